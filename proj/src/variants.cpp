#include "flexbench/variants.hpp"

#include "flexbench/errors.hpp"

namespace flexbench {

void GoalSchedule::validate() const
{
    if (goals.empty()) {
        throw DomainError("goal schedule needs at least one goal");
    }
    if (epoch_length < 1) {
        throw DomainError("epoch length must be >= 1");
    }
    for (std::size_t i = 0; i < goals.size(); ++i) {
        goals[i].validate();
        for (std::size_t j = 0; j < i; ++j) {
            if (goals[i].material == goals[j].material) {
                throw DomainError("goal schedule contains the same material twice");
            }
        }
    }
}

VaryingGoalsResult varying_goals_run(std::span<const Problem> goals, std::span<const std::string> names,
                                     std::size_t epoch_length, const AlgoConfig& config, const Representation& rep)
{
    if (goals.empty() || epoch_length < 1) {
        throw DomainError("varying_goals_run: needs at least one goal and epoch length >= 1");
    }
    Rng rng(config.seed);
    Population pop(config, rep);
    std::size_t current = 0;
    pop.initialize(nullptr, goals[current], rng);

    VaryingGoalsResult r;
    r.best_per_goal.assign(goals.size(), 0.0);
    std::vector<bool> seen(goals.size(), false);
    r.stored.tasks.assign(names.begin(), names.end());
    r.stored.algorithm = std::string(algorithm_tag(rep, goals.size() > 1));
    r.stored.representation = rep;
    r.stored.epoch_length = epoch_length;
    r.stored.config = config;
    r.stored.seed = config.seed;

    auto observe = [&](std::size_t generation) {
        const FrontSnapshot snap = feasible_front(pop.members());
        if ((!seen[current] && !snap.members.empty()) || snap.hypervolume > r.best_per_goal[current]) {
            seen[current] = true;
            r.best_per_goal[current] = snap.hypervolume;
            r.stored.individuals = pop.entries(snap.members);
            r.stored.best_hypervolume = snap.hypervolume;
            r.stored.generation = generation;
            r.stored.evaluations = pop.evaluations();
        }
        r.trace.push_back({pop.evaluations(), r.best_per_goal[current], snap.hypervolume, current});
    };

    observe(0);
    for (std::size_t gen = 1; gen <= config.max_generations; ++gen) {
        const std::size_t g = goal_index(gen, epoch_length, goals.size());
        if (g != current) {
            current = g;
            pop.reevaluate(goals[current]);
            ++r.goal_switches;
        }
        pop.advance(goals[current], rng);
        observe(gen);
    }
    r.evaluations_used = pop.evaluations();
    return r;
}

VaryingGoalsResult varying_goals_run(const GoalSchedule& schedule, const AlgoConfig& config,
                                     const Representation& rep)
{
    schedule.validate();
    std::vector<Problem> problems;
    std::vector<std::string> names;
    for (const auto& task : schedule.goals) {
        problems.emplace_back([&task](const Phenotype& x) { return evaluate(task, x); });
        names.push_back(task.material.name);
    }
    return varying_goals_run(problems, names, schedule.epoch_length, config, rep);
}

} // namespace flexbench
