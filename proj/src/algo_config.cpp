#include "flexbench/algo_config.hpp"

#include <string>

#include "flexbench/errors.hpp"

namespace flexbench {

void AlgoConfig::validate() const
{
    if (population_size < 4 || population_size % 2 != 0) {
        throw DomainError("population_size must be even and >= 4");
    }
    if (tournament_size != 2) {
        throw DomainError("tournament_size must be 2");
    }
    if (!(eta_cross > 0.0) || !(eta_mut > 0.0)) {
        throw DomainError("eta_cross and eta_mut must be positive");
    }
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0) || !(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
        throw DomainError("probabilities must lie in [0, 1]");
    }
}

std::string_view to_string(GenotypeKind k)
{
    return k == GenotypeKind::plain ? "plain" : "active-inactive";
}

GenotypeKind genotype_kind_from_string(std::string_view s)
{
    if (s == "plain") {
        return GenotypeKind::plain;
    }
    if (s == "active-inactive") {
        return GenotypeKind::active_inactive;
    }
    throw DomainError("unknown genotype kind '" + std::string(s) + "'");
}

void Representation::validate() const
{
    if (gene_length < 1) {
        throw DomainError("gene_length must be >= 1");
    }
    if (kind == GenotypeKind::plain && gene_length != 1) {
        throw DomainError("plain genotypes have gene_length 1");
    }
}

} // namespace flexbench
