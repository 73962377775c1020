#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <utility>

#include "flexbench/task.hpp"

namespace flexbench {

template <class R>
concept UniformRng = requires(R& r, std::uint64_t n) {
    { r.uniform() } -> std::convertible_to<double>;
    { r.below(n) } -> std::convertible_to<std::uint64_t>;
};

namespace detail {

inline double sbx_spread(double rand, double beta, double eta)
{
    const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    if (rand <= 1.0 / alpha) {
        return std::pow(rand * alpha, 1.0 / (eta + 1.0));
    }
    return std::pow(1.0 / (2.0 - rand * alpha), 1.0 / (eta + 1.0));
}

} // namespace detail

// Bounded simulated binary crossover. Each gene takes part with probability
// 0.5; the two children of a gene are assigned in random order.
template <UniformRng R>
std::pair<Phenotype, Phenotype> sbx_crossover(const Phenotype& p1, const Phenotype& p2, double eta,
                                              const Bounds& bounds, R& rng)
{
    Phenotype c1 = p1;
    Phenotype c2 = p2;
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        if (!(rng.uniform() < 0.5)) {
            continue;
        }
        if (!(std::abs(p1[i] - p2[i]) > 1e-14)) {
            continue;
        }
        const double xl = bounds[i].lo;
        const double xu = bounds[i].hi;
        const double x1 = std::min(p1[i], p2[i]);
        const double x2 = std::max(p1[i], p2[i]);
        const double rand = rng.uniform();

        double bq = detail::sbx_spread(rand, 1.0 + 2.0 * (x1 - xl) / (x2 - x1), eta);
        const double lo_child = std::clamp(0.5 * (x1 + x2 - bq * (x2 - x1)), xl, xu);
        bq = detail::sbx_spread(rand, 1.0 + 2.0 * (xu - x2) / (x2 - x1), eta);
        const double hi_child = std::clamp(0.5 * (x1 + x2 + bq * (x2 - x1)), xl, xu);

        if (rng.uniform() < 0.5) {
            c1[i] = hi_child;
            c2[i] = lo_child;
        } else {
            c1[i] = lo_child;
            c2[i] = hi_child;
        }
    }
    return {c1, c2};
}

// Bounded polynomial mutation, each gene with probability `prob`.
template <UniformRng R>
Phenotype polynomial_mutation(const Phenotype& x, double eta, double prob, const Bounds& bounds, R& rng)
{
    Phenotype y = x;
    const double pw = 1.0 / (eta + 1.0);
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        if (!(rng.uniform() < prob)) {
            continue;
        }
        const double xl = bounds[i].lo;
        const double xu = bounds[i].hi;
        const double v = y[i];
        const double d1 = (v - xl) / (xu - xl);
        const double d2 = (xu - v) / (xu - xl);
        const double rand = rng.uniform();
        double dq = 0.0;
        if (rand < 0.5) {
            const double val = 2.0 * rand + (1.0 - 2.0 * rand) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(val, pw) - 1.0;
        } else {
            const double val = 2.0 * (1.0 - rand) + 2.0 * (rand - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(val, pw);
        }
        y[i] = std::clamp(v + dq * (xu - xl), xl, xu);
    }
    return y;
}

template <UniformRng R>
Phenotype random_phenotype(const Bounds& bounds, R& rng)
{
    Phenotype x{};
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        x[i] = bounds[i].lo + rng.uniform() * (bounds[i].hi - bounds[i].lo);
    }
    return x;
}

} // namespace flexbench
