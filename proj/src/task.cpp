#include "flexbench/task.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flexbench/errors.hpp"

namespace flexbench {

Bounds default_bounds()
{
    using namespace process_bounds;
    return {Interval{kSpeedMin, kSpeedMax}, Interval{kAngleMin, kAngleMax}, Interval{kDepthMin, kDepthMax}};
}

void TaskSpec::validate() const
{
    material.validate();
    if (!(total_length > 0.0) || !(total_depth > 0.0)) {
        throw DomainError("task: total_length and total_depth must be positive");
    }
    if (bounds != default_bounds()) {
        throw DomainError("task: process bounds must match the benchmark box");
    }
    if (!(speed_limit > 0.0) || !(force_limit > 0.0)) {
        throw DomainError("task: limits must be positive");
    }
}

TaskSpec make_task(const MaterialParams& mat)
{
    TaskSpec t;
    t.material = mat;
    return t;
}

double production_time(double cutting_speed, std::uint64_t n_layers, double total_length)
{
    if (!(cutting_speed > 0.0) || n_layers < 1) {
        throw DomainError("production_time: requires cutting_speed > 0 and n_layers >= 1");
    }
    return total_length / cutting_speed * static_cast<double>(n_layers);
}

double tool_wear(double cutting_speed, double Fc, double Ft, std::uint64_t n_layers)
{
    if (n_layers < 1) {
        throw DomainError("tool_wear: n_layers must be >= 1");
    }
    const double w = (cutting_speed * std::exp(std::abs(Fc)) + 0.1 * cutting_speed * std::exp(std::abs(Ft))) *
                     static_cast<double>(n_layers);
    if (!std::isfinite(w)) {
        return std::numeric_limits<double>::max();
    }
    return w;
}

Feasibility is_feasible(const ProcessParams& proc, const CutOutputs& outputs, const TaskSpec& task)
{
    const double excess = std::max(0.0, proc.cutting_speed - task.speed_limit) +
                          std::max(0.0, std::abs(outputs.Fc) - task.force_limit) +
                          std::max(0.0, std::abs(outputs.Ft) - task.force_limit);
    const bool ok = proc.cutting_speed < task.speed_limit && std::abs(outputs.Fc) < task.force_limit &&
                    std::abs(outputs.Ft) < task.force_limit;
    if (ok) {
        return {true, 0.0};
    }
    // A value sitting exactly on a limit is infeasible but has zero excess.
    return {false, std::max(excess, std::numeric_limits<double>::min())};
}

ProcessParams to_process(const Phenotype& x)
{
    ProcessParams p;
    p.cutting_speed = x[0];
    p.cutting_angle = x[1];
    p.cutting_depth = x[2];
    return p;
}

EvalResult evaluate(const TaskSpec& task, const ProcessParams& proc)
{
    proc.validate();
    EvalResult r;
    try {
        r.outputs = solve_cut(task.material, proc, task.total_depth);
    } catch (const ConvergenceError& e) {
        r.violation = kSolverFailureViolation;
        r.failure = e.what();
        return r;
    } catch (const ModelDomainError& e) {
        r.violation = kSolverFailureViolation;
        r.failure = e.what();
        return r;
    }
    const Feasibility f = is_feasible(proc, r.outputs, task);
    r.feasible = f.feasible;
    r.violation = f.violation;
    if (r.feasible) {
        r.objectives = ObjectiveVector{
            production_time(proc.cutting_speed, r.outputs.n_layers, task.total_length),
            tool_wear(proc.cutting_speed, r.outputs.Fc, r.outputs.Ft, r.outputs.n_layers),
            std::abs(r.outputs.Fc),
            std::abs(r.outputs.Ft),
        };
    }
    return r;
}

EvalResult evaluate(const TaskSpec& task, const Phenotype& x)
{
    return evaluate(task, to_process(x));
}

std::array<double, kNumObjectives> normalize(const ObjectiveVector& obj)
{
    using namespace objective_ranges;
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    auto log_scale = [&](double v, double lo, double hi) {
        if (!(v > 0.0)) {
            return 0.0;
        }
        return clamp01((std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo)));
    };
    return {
        log_scale(obj.production_time, kTimeMin, kTimeMax),
        log_scale(obj.tool_wear, kWearMin, kWearMax),
        clamp01(obj.abs_Fc / kForceMax),
        clamp01(obj.abs_Ft / kForceMax),
    };
}

} // namespace flexbench
