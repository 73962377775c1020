#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "flexbench/algo_config.hpp"
#include "flexbench/errors.hpp"
#include "flexbench/operators.hpp"

namespace flexbench {

// Generation i (from 1) of a schedule with epoch length E over n goals.
std::size_t goal_index(std::size_t i, std::size_t epoch_length, std::size_t n_goals);

// One gene per process parameter, laid out as [selector, slot_1 .. slot_l].
// Selectors are 1-based and stored as doubles.
struct AIGenotype {
    std::size_t gene_length = 2;
    std::vector<double> flat;

    AIGenotype() = default;
    AIGenotype(std::size_t l, std::vector<double> values);

    std::size_t selector(std::size_t gene) const;
    void set_selector(std::size_t gene, std::size_t sel);
    double& slot(std::size_t gene, std::size_t k) { return flat[gene * (gene_length + 1) + k]; }
    double slot(std::size_t gene, std::size_t k) const { return flat[gene * (gene_length + 1) + k]; }

    // Throws StructureError on bad length or selector.
    void check() const;

    bool operator==(const AIGenotype&) const = default;
};

Phenotype decode(const AIGenotype& g);
AIGenotype encode(const AIGenotype& g, std::span<const double> p);

// Selectors set to 1 with p in the first slots; other slots drawn uniformly.
template <UniformRng R>
AIGenotype ai_from_phenotype(const Phenotype& p, std::size_t l, const Bounds& bounds, R& rng)
{
    AIGenotype g(l, std::vector<double>(kNumProcess * (l + 1), 0.0));
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        g.set_selector(i, 1);
        g.slot(i, 1) = p[i];
        for (std::size_t k = 2; k <= l; ++k) {
            g.slot(i, k) = bounds[i].lo + rng.uniform() * (bounds[i].hi - bounds[i].lo);
        }
    }
    return g;
}

template <UniformRng R>
AIGenotype random_ai_genotype(std::size_t l, const Bounds& bounds, R& rng)
{
    AIGenotype g(l, std::vector<double>(kNumProcess * (l + 1), 0.0));
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        for (std::size_t k = 1; k <= l; ++k) {
            g.slot(i, k) = bounds[i].lo + rng.uniform() * (bounds[i].hi - bounds[i].lo);
        }
        g.set_selector(i, l == 1 ? 1 : 1 + rng.below(l));
    }
    return g;
}

// Step 1 moves each selector to a different slot with probability flip_prob,
// step 2 applies polynomial mutation to the decoded phenotype.
template <UniformRng R>
AIGenotype two_step_mutation(const AIGenotype& g, double eta_mut, double mutation_prob, double flip_prob,
                             const Bounds& bounds, R& rng)
{
    g.check();
    AIGenotype out = g;
    const std::size_t l = g.gene_length;
    if (l > 1) {
        for (std::size_t i = 0; i < kNumProcess; ++i) {
            if (rng.uniform() < flip_prob) {
                std::size_t s = 1 + rng.below(l - 1);
                if (s >= out.selector(i)) {
                    ++s;
                }
                out.set_selector(i, s);
            }
        }
    }
    const Phenotype mutated = polynomial_mutation(decode(out), eta_mut, mutation_prob, bounds, rng);
    return encode(out, mutated);
}

template <UniformRng R>
std::pair<AIGenotype, AIGenotype> ai_crossover(const AIGenotype& g1, const AIGenotype& g2, double eta_cross,
                                               const Bounds& bounds, R& rng)
{
    g1.check();
    g2.check();
    auto [c1, c2] = sbx_crossover(decode(g1), decode(g2), eta_cross, bounds, rng);
    return {encode(g1, c1), encode(g2, c2)};
}

} // namespace flexbench
