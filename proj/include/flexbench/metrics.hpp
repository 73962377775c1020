#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flexbench {

using Point = std::vector<double>;

// Exact measure of the region dominated by `front` and bounded by `ref`
// (minimisation). Points not strictly better than ref in every coordinate
// contribute nothing. Empty ref means all ones.
double hypervolume(std::span<const Point> front, std::span<const double> ref = {});

// Koza's minimum computational effort. checkpoints[r] is the evaluation count
// at which run r first met its target, or nullopt if it never did. Returns
// nullopt when no run succeeded.
std::optional<std::uint64_t> computational_effort(std::span<const std::optional<std::uint64_t>> checkpoints,
                                                  std::uint64_t granularity, double z = 0.99);

struct Aggregates {
    double worst = 0.0;
    double average = 0.0;
    double best = 0.0;
};

// Square source x target table; the diagonal and missing cells are ignored.
struct CostMatrix {
    std::vector<std::string> sources;
    std::vector<std::string> targets;
    std::vector<std::vector<std::optional<double>>> cells; // [target][source]
};

Aggregates cost_aggregates(std::span<const double> costs);
Aggregates cost_aggregates(const CostMatrix& m);

double success_threshold(double reference_hv, double fraction = 0.99);

} // namespace flexbench
