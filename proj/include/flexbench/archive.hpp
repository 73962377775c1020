#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "flexbench/algo_config.hpp"
#include "flexbench/task.hpp"

namespace flexbench {

struct ArchiveEntry {
    std::vector<double> genotype;
    Phenotype phenotype{};
    ObjectiveVector objectives;

    bool operator==(const ArchiveEntry&) const = default;
};

// A stored front used to seed adaption runs.
struct ParetoArchive {
    static constexpr int kFormatVersion = 1;

    int format_version = kFormatVersion;
    std::vector<std::string> tasks;     // one material, or the goal pair
    std::string algorithm = "baseline"; // baseline | varying-goals | varying-goals+active-inactive
    Representation representation;
    std::size_t epoch_length = 0;       // 0 unless trained with varying goals
    AlgoConfig config;
    std::uint64_t seed = 0;
    std::vector<ArchiveEntry> individuals;
    double best_hypervolume = 0.0;
    std::size_t generation = 0;
    std::uint64_t evaluations = 0;

    bool operator==(const ParetoArchive&) const = default;
};

// JSON text, two-space indent, trailing newline. Throws SchemaError if the
// archive violates its invariants.
std::string archive_to_json(const ParetoArchive& a);
ParetoArchive archive_from_json(std::string_view text);

void save_archive(const ParetoArchive& a, const std::filesystem::path& path);
ParetoArchive load_archive(const std::filesystem::path& path);

} // namespace flexbench
