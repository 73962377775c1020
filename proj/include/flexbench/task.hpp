#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "flexbench/material.hpp"

namespace flexbench {

inline constexpr std::size_t kNumProcess = 3;
inline constexpr std::size_t kNumObjectives = 4;

// (cutting_speed, cutting_angle, cutting_depth)
using Phenotype = std::array<double, kNumProcess>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

using Bounds = std::array<Interval, kNumProcess>;

Bounds default_bounds();

struct TaskSpec {
    MaterialParams material;
    double total_length = 1.0; // m
    double total_depth = 1.0;  // same unit as cutting_depth
    Bounds bounds = default_bounds();
    double speed_limit = 50.0;  // m/s
    double force_limit = 500.0; // N

    void validate() const;
};

TaskSpec make_task(const MaterialParams& mat);

struct ObjectiveVector {
    double production_time = 0.0;
    double tool_wear = 0.0;
    double abs_Fc = 0.0;
    double abs_Ft = 0.0;

    std::array<double, kNumObjectives> values() const { return {production_time, tool_wear, abs_Fc, abs_Ft}; }
    bool operator==(const ObjectiveVector&) const = default;
};

// Violation assigned when the cutting model has no physical solution.
inline constexpr double kSolverFailureViolation = 1.0e300;

struct EvalResult {
    bool feasible = false;
    std::optional<ObjectiveVector> objectives; // present iff feasible
    CutOutputs outputs;
    double violation = 0.0;
    std::string failure; // solver message when the model had no equilibrium
};

struct Feasibility {
    bool feasible = false;
    double violation = 0.0;
};

double production_time(double cutting_speed, std::uint64_t n_layers, double total_length);

// Overflow yields the largest finite double instead of infinity.
double tool_wear(double cutting_speed, double Fc, double Ft, std::uint64_t n_layers);

Feasibility is_feasible(const ProcessParams& proc, const CutOutputs& outputs, const TaskSpec& task);

EvalResult evaluate(const TaskSpec& task, const ProcessParams& proc);
EvalResult evaluate(const TaskSpec& task, const Phenotype& x);

ProcessParams to_process(const Phenotype& x);

// Log-scaled time and wear, linear forces; each component clamped to [0, 1].
std::array<double, kNumObjectives> normalize(const ObjectiveVector& obj);

namespace objective_ranges {
inline constexpr double kTimeMin = 200.0;
inline constexpr double kTimeMax = 1.0e7;
inline constexpr double kWearMin = 110.0;
inline constexpr double kWearMax = 7.72e223;
inline constexpr double kForceMax = 500.0;
} // namespace objective_ranges

} // namespace flexbench
