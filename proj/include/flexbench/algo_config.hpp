#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "flexbench/task.hpp"

namespace flexbench {

struct AlgoConfig {
    std::size_t population_size = 100;
    std::size_t max_generations = 50;
    std::size_t tournament_size = 2;
    double eta_cross = 30.0;
    double eta_mut = 20.0;
    double mutation_prob = 1.0 / static_cast<double>(kNumProcess);
    double crossover_prob = 1.0;
    std::uint64_t seed = 0;

    // Throws DomainError.
    void validate() const;

    bool operator==(const AlgoConfig&) const = default;
};

enum class GenotypeKind { plain, active_inactive };

std::string_view to_string(GenotypeKind k);
GenotypeKind genotype_kind_from_string(std::string_view s);

struct Representation {
    GenotypeKind kind = GenotypeKind::plain;
    std::size_t gene_length = 1; // slots per parameter, active-inactive only

    std::size_t genotype_size() const
    {
        return kind == GenotypeKind::plain ? kNumProcess : kNumProcess * (gene_length + 1);
    }
    void validate() const;

    bool operator==(const Representation&) const = default;
};

} // namespace flexbench
