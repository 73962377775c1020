#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flexbench/algo_config.hpp"
#include "flexbench/archive.hpp"
#include "flexbench/metrics.hpp"
#include "flexbench/rng.hpp"
#include "flexbench/task.hpp"

namespace flexbench {

// Strict Pareto domination for minimisation.
bool dominates(std::span<const double> a, std::span<const double> b);
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Fronts as index lists, best first.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Point> points);

// Gap-sum crowding over one front; boundary points get +infinity and
// duplicated interior vectors get 0.
std::vector<double> crowding_distance(std::span<const Point> front);

struct Individual {
    std::vector<double> genotype;
    Phenotype phenotype{};
    bool feasible = false;
    ObjectiveVector objectives;
    double violation = 0.0;
    std::size_t rank = 0;
    double crowding = 0.0;
};

// Feasible beats infeasible, infeasible compare by violation, feasible by domination.
bool constrained_dominates(const Individual& a, const Individual& b);

// Assigns rank and crowding to every individual; returns the fronts.
std::vector<std::vector<std::size_t>> rank_population(std::span<Individual> pop);

// True iff a strictly precedes b (lower rank, then larger crowding).
bool crowded_less(const Individual& a, const Individual& b);

// Elitist truncation of a ranked pool to k individuals.
std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t k);

// Binary tournaments over two shuffled copies of the population. Returns k indices.
std::vector<std::size_t> tournament_select(std::span<const Individual> pop, std::size_t k, Rng& rng);

// Feasible non-dominated members and the hypervolume of their normalised objectives.
struct FrontSnapshot {
    std::vector<std::size_t> members;
    double hypervolume = 0.0;
};
FrontSnapshot feasible_front(std::span<const Individual> pop);

using Problem = std::function<EvalResult(const Phenotype&)>;

struct TracePoint {
    std::uint64_t evaluations = 0;
    double best_hypervolume = 0.0;    // best so far for the goal being optimised
    double current_hypervolume = 0.0; // front of the current population
    std::size_t goal = 0;
};

struct RunResult {
    ParetoArchive best_front;
    double best_hypervolume = 0.0;
    std::uint64_t evaluations_used = 0;
    std::optional<std::uint64_t> success_checkpoint;
    std::size_t generations = 0;
    std::vector<TracePoint> trace;
};

// Generational loop state shared by the plain and varying-goals drivers.
class Population {
public:
    Population(const AlgoConfig& config, const Representation& rep);

    // Seeds from `initial` (may be null), fills the rest at random and evaluates.
    void initialize(const ParetoArchive* initial, const Problem& problem, Rng& rng);
    // Offspring by tournament, crossover and mutation, then elitist survival.
    void advance(const Problem& problem, Rng& rng);
    // Re-evaluates every member on a new problem.
    void reevaluate(const Problem& problem);

    std::span<const Individual> members() const { return members_; }
    std::uint64_t evaluations() const { return evaluations_; }
    const Representation& representation() const { return rep_; }
    const AlgoConfig& config() const { return config_; }

    // Archive entries of the given members.
    std::vector<ArchiveEntry> entries(std::span<const std::size_t> idx) const;

private:
    Individual make(std::vector<double> genotype, const Problem& problem);
    std::vector<double> random_genotype(Rng& rng) const;
    std::vector<double> seed_genotype(const ParetoArchive& a, const ArchiveEntry& e, Rng& rng) const;
    Phenotype decode_genotype(const std::vector<double>& g) const;
    std::pair<std::vector<double>, std::vector<double>> crossover(const std::vector<double>& a,
                                                                  const std::vector<double>& b, Rng& rng) const;
    std::vector<double> mutate(const std::vector<double>& g, Rng& rng) const;

    AlgoConfig config_;
    Representation rep_;
    Bounds bounds_;
    std::vector<Individual> members_;
    std::uint64_t evaluations_ = 0;
};

std::string_view algorithm_tag(const Representation& rep, bool varying_goals);

// Runs NSGA-II on one problem. Stops after the first generation whose best
// hypervolume reaches stop_threshold.
RunResult run(const Problem& problem, const AlgoConfig& config, const ParetoArchive* initial = nullptr,
              std::optional<double> stop_threshold = std::nullopt, const Representation& rep = {});
RunResult run(const TaskSpec& task, const AlgoConfig& config, const ParetoArchive* initial = nullptr,
              std::optional<double> stop_threshold = std::nullopt, const Representation& rep = {});

} // namespace flexbench
