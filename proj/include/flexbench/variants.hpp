#pragma once

#include <vector>

#include "flexbench/genotype.hpp"
#include "flexbench/nsga2.hpp"

namespace flexbench {

struct GoalSchedule {
    std::vector<TaskSpec> goals;
    std::size_t epoch_length = 5;

    void validate() const;
};

struct VaryingGoalsResult {
    ParetoArchive stored;               // front captured at the last improvement of any goal
    std::vector<double> best_per_goal;  // best hypervolume seen per goal
    std::uint64_t evaluations_used = 0; // includes re-evaluations on goal switches
    std::size_t goal_switches = 0;
    std::vector<TracePoint> trace;
};

// NSGA-II whose problem at generation i is goals[goal_index(i, E, n)]. The
// initial population is evaluated on goals[0].
VaryingGoalsResult varying_goals_run(const GoalSchedule& schedule, const AlgoConfig& config,
                                     const Representation& rep);

// Same loop over arbitrary problems; names label the stored archive.
VaryingGoalsResult varying_goals_run(std::span<const Problem> goals, std::span<const std::string> names,
                                     std::size_t epoch_length, const AlgoConfig& config, const Representation& rep);

} // namespace flexbench
