#include "flexbench/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "flexbench/errors.hpp"
#include "flexbench/genotype.hpp"
#include "flexbench/operators.hpp"

namespace flexbench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deb's fast non-dominated sort over an arbitrary domination relation.
template <class Dominates>
std::vector<std::vector<std::size_t>> sort_fronts(std::size_t n, Dominates&& dom)
{
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dom(i, j)) {
                dominated[i].push_back(j);
                ++count[j];
            } else if (dom(j, i)) {
                dominated[j].push_back(i);
                ++count[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (count[i] == 0) {
            current.push_back(i);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : current) {
            for (std::size_t j : dominated[i]) {
                if (--count[j] == 0) {
                    next.push_back(j);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

Point objective_point(const Individual& ind)
{
    const auto v = ind.objectives.values();
    return Point(v.begin(), v.end());
}

} // namespace

bool dominates(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DomainError("dominates: dimension mismatch");
    }
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        strictly = strictly || a[i] < b[i];
    }
    return strictly;
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b)
{
    const auto va = a.values();
    const auto vb = b.values();
    return dominates(std::span<const double>(va), std::span<const double>(vb));
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const Point> points)
{
    return sort_fronts(points.size(), [&](std::size_t i, std::size_t j) { return dominates(points[i], points[j]); });
}

std::vector<double> crowding_distance(std::span<const Point> front)
{
    const std::size_t n = front.size();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), kInf);
        return dist;
    }
    const std::size_t m = front.front().size();
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < m; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][k] < front[b][k]; });
        const double range = front[order.back()][k] - front[order.front()][k];
        dist[order.front()] = kInf;
        dist[order.back()] = kInf;
        if (!(range > 0.0)) {
            continue;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dist[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / range;
        }
    }
    std::map<Point, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        groups[front[i]].push_back(i);
    }
    for (const auto& [p, members] : groups) {
        if (members.size() < 2) {
            continue;
        }
        for (std::size_t i : members) {
            if (dist[i] != kInf) {
                dist[i] = 0.0;
            }
        }
    }
    return dist;
}

bool constrained_dominates(const Individual& a, const Individual& b)
{
    if (a.feasible != b.feasible) {
        return a.feasible;
    }
    if (!a.feasible) {
        return a.violation < b.violation;
    }
    return dominates(a.objectives, b.objectives);
}

std::vector<std::vector<std::size_t>> rank_population(std::span<Individual> pop)
{
    auto fronts = sort_fronts(pop.size(), [&](std::size_t i, std::size_t j) {
        return constrained_dominates(pop[i], pop[j]);
    });
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto& front = fronts[r];
        for (std::size_t i : front) {
            pop[i].rank = r;
            pop[i].crowding = 0.0;
        }
        if (!pop[front.front()].feasible) {
            continue;
        }
        std::vector<Point> pts;
        pts.reserve(front.size());
        for (std::size_t i : front) {
            pts.push_back(objective_point(pop[i]));
        }
        const auto d = crowding_distance(pts);
        for (std::size_t k = 0; k < front.size(); ++k) {
            pop[front[k]].crowding = d[k];
        }
    }
    return fronts;
}

bool crowded_less(const Individual& a, const Individual& b)
{
    if (a.rank != b.rank) {
        return a.rank < b.rank;
    }
    return a.crowding > b.crowding;
}

std::vector<Individual> select_survivors(std::vector<Individual> pool, std::size_t k)
{
    const auto fronts = rank_population(pool);
    std::vector<Individual> out;
    out.reserve(k);
    for (const auto& front : fronts) {
        if (out.size() + front.size() <= k) {
            for (std::size_t i : front) {
                out.push_back(std::move(pool[i]));
            }
            continue;
        }
        std::vector<std::size_t> last = front;
        std::stable_sort(last.begin(), last.end(),
                         [&](std::size_t a, std::size_t b) { return pool[a].crowding > pool[b].crowding; });
        for (std::size_t i = 0; out.size() < k; ++i) {
            out.push_back(std::move(pool[last[i]]));
        }
        break;
    }
    return out;
}

std::vector<std::size_t> tournament_select(std::span<const Individual> pop, std::size_t k, Rng& rng)
{
    const std::size_t n = pop.size();
    auto shuffled = [&] {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), 0);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(p[i - 1], p[rng.below(i)]);
        }
        return p;
    };
    const auto p1 = shuffled();
    const auto p2 = shuffled();
    auto winner = [&](std::size_t a, std::size_t b) {
        if (crowded_less(pop[a], pop[b])) {
            return a;
        }
        if (crowded_less(pop[b], pop[a])) {
            return b;
        }
        return std::min(a, b);
    };
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    for (std::size_t i = 0; chosen.size() < k && i < n; i += 4) {
        for (const auto* perm : {&p1, &p2}) {
            for (std::size_t off : {std::size_t{0}, std::size_t{2}}) {
                if (chosen.size() < k && i + off + 1 < n) {
                    chosen.push_back(winner((*perm)[i + off], (*perm)[i + off + 1]));
                }
            }
        }
    }
    if (chosen.size() < k) {
        throw DomainError("tournament_select: population too small for the requested selection");
    }
    return chosen;
}

FrontSnapshot feasible_front(std::span<const Individual> pop)
{
    std::vector<std::size_t> feasible;
    std::vector<Point> pts;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        if (pop[i].feasible) {
            feasible.push_back(i);
            pts.push_back(objective_point(pop[i]));
        }
    }
    FrontSnapshot snap;
    if (feasible.empty()) {
        return snap;
    }
    const auto fronts = non_dominated_sort(pts);
    std::vector<Point> normalized;
    for (std::size_t k : fronts.front()) {
        snap.members.push_back(feasible[k]);
        const auto v = normalize(pop[feasible[k]].objectives);
        normalized.emplace_back(v.begin(), v.end());
    }
    snap.hypervolume = hypervolume(normalized);
    return snap;
}

Population::Population(const AlgoConfig& config, const Representation& rep)
    : config_(config), rep_(rep), bounds_(default_bounds())
{
    config_.validate();
    rep_.validate();
}

Individual Population::make(std::vector<double> genotype, const Problem& problem)
{
    Individual ind;
    ind.phenotype = decode_genotype(genotype);
    ind.genotype = std::move(genotype);
    const EvalResult r = problem(ind.phenotype);
    ++evaluations_;
    ind.feasible = r.feasible;
    ind.violation = r.violation;
    if (r.objectives) {
        ind.objectives = *r.objectives;
    }
    return ind;
}

Phenotype Population::decode_genotype(const std::vector<double>& g) const
{
    if (rep_.kind == GenotypeKind::plain) {
        if (g.size() != kNumProcess) {
            throw StructureError("plain genotype must have " + std::to_string(kNumProcess) + " values");
        }
        return {g[0], g[1], g[2]};
    }
    return decode(AIGenotype(rep_.gene_length, g));
}

std::vector<double> Population::random_genotype(Rng& rng) const
{
    if (rep_.kind == GenotypeKind::plain) {
        const Phenotype p = random_phenotype(bounds_, rng);
        return {p.begin(), p.end()};
    }
    return random_ai_genotype(rep_.gene_length, bounds_, rng).flat;
}

std::vector<double> Population::seed_genotype(const ParetoArchive& a, const ArchiveEntry& e, Rng& rng) const
{
    if (rep_.kind == GenotypeKind::plain) {
        return {e.phenotype.begin(), e.phenotype.end()};
    }
    if (a.representation == rep_) {
        AIGenotype g(rep_.gene_length, e.genotype);
        g.check();
        return g.flat;
    }
    return ai_from_phenotype(e.phenotype, rep_.gene_length, bounds_, rng).flat;
}

std::pair<std::vector<double>, std::vector<double>> Population::crossover(const std::vector<double>& a,
                                                                          const std::vector<double>& b,
                                                                          Rng& rng) const
{
    if (rep_.kind == GenotypeKind::plain) {
        auto [c1, c2] = sbx_crossover(decode_genotype(a), decode_genotype(b), config_.eta_cross, bounds_, rng);
        return {{c1.begin(), c1.end()}, {c2.begin(), c2.end()}};
    }
    auto [c1, c2] = ai_crossover(AIGenotype(rep_.gene_length, a), AIGenotype(rep_.gene_length, b),
                                 config_.eta_cross, bounds_, rng);
    return {std::move(c1.flat), std::move(c2.flat)};
}

std::vector<double> Population::mutate(const std::vector<double>& g, Rng& rng) const
{
    if (rep_.kind == GenotypeKind::plain) {
        const Phenotype p = polynomial_mutation(decode_genotype(g), config_.eta_mut, config_.mutation_prob, bounds_, rng);
        return {p.begin(), p.end()};
    }
    const double flip = 1.0 / static_cast<double>(kNumProcess);
    return two_step_mutation(AIGenotype(rep_.gene_length, g), config_.eta_mut, config_.mutation_prob, flip, bounds_,
                             rng)
        .flat;
}

void Population::initialize(const ParetoArchive* initial, const Problem& problem, Rng& rng)
{
    members_.clear();
    evaluations_ = 0;
    const std::size_t n = config_.population_size;
    std::vector<std::vector<double>> genotypes;
    if (initial != nullptr) {
        for (const auto& e : initial->individuals) {
            if (genotypes.size() == n) {
                break;
            }
            genotypes.push_back(seed_genotype(*initial, e, rng));
        }
    }
    while (genotypes.size() < n) {
        genotypes.push_back(random_genotype(rng));
    }
    for (auto& g : genotypes) {
        members_.push_back(make(std::move(g), problem));
    }
    rank_population(members_);
}

void Population::advance(const Problem& problem, Rng& rng)
{
    const std::size_t n = config_.population_size;
    const auto picks = tournament_select(members_, n, rng);
    std::vector<std::vector<double>> children;
    children.reserve(n);
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        std::vector<double> a = members_[picks[i]].genotype;
        std::vector<double> b = members_[picks[i + 1]].genotype;
        if (rng.uniform() < config_.crossover_prob) {
            std::tie(a, b) = crossover(a, b, rng);
        }
        children.push_back(mutate(a, rng));
        children.push_back(mutate(b, rng));
    }
    std::vector<Individual> pool = members_;
    for (auto& c : children) {
        pool.push_back(make(std::move(c), problem));
    }
    members_ = select_survivors(std::move(pool), n);
}

void Population::reevaluate(const Problem& problem)
{
    for (auto& ind : members_) {
        ind = make(std::move(ind.genotype), problem);
    }
    rank_population(members_);
}

std::vector<ArchiveEntry> Population::entries(std::span<const std::size_t> idx) const
{
    std::vector<ArchiveEntry> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(ArchiveEntry{members_[i].genotype, members_[i].phenotype, members_[i].objectives});
    }
    return out;
}

std::string_view algorithm_tag(const Representation& rep, bool varying_goals)
{
    if (!varying_goals) {
        return "baseline";
    }
    return rep.kind == GenotypeKind::plain ? "varying-goals" : "varying-goals+active-inactive";
}

RunResult run(const Problem& problem, const AlgoConfig& config, const ParetoArchive* initial,
              std::optional<double> stop_threshold, const Representation& rep)
{
    Rng rng(config.seed);
    Population pop(config, rep);
    pop.initialize(initial, problem, rng);

    RunResult r;
    r.best_front.algorithm = std::string(algorithm_tag(rep, false));
    r.best_front.representation = rep;
    r.best_front.config = config;
    r.best_front.seed = config.seed;
    bool captured = false;

    auto observe = [&](std::size_t generation) {
        const FrontSnapshot snap = feasible_front(pop.members());
        if ((!captured && !snap.members.empty()) || snap.hypervolume > r.best_hypervolume) {
            captured = true;
            r.best_hypervolume = snap.hypervolume;
            r.best_front.individuals = pop.entries(snap.members);
            r.best_front.best_hypervolume = snap.hypervolume;
            r.best_front.generation = generation;
            r.best_front.evaluations = pop.evaluations();
        }
        r.trace.push_back({pop.evaluations(), r.best_hypervolume, snap.hypervolume, 0});
        if (stop_threshold && !r.success_checkpoint && r.best_hypervolume >= *stop_threshold) {
            r.success_checkpoint = pop.evaluations();
        }
        return r.success_checkpoint.has_value();
    };

    bool done = observe(0);
    for (std::size_t gen = 1; gen <= config.max_generations && !done; ++gen) {
        pop.advance(problem, rng);
        r.generations = gen;
        done = observe(gen);
    }
    r.evaluations_used = pop.evaluations();
    return r;
}

RunResult run(const TaskSpec& task, const AlgoConfig& config, const ParetoArchive* initial,
              std::optional<double> stop_threshold, const Representation& rep)
{
    task.validate();
    RunResult r = run([&task](const Phenotype& x) { return evaluate(task, x); }, config, initial, stop_threshold,
                      rep);
    r.best_front.tasks = {task.material.name};
    return r;
}

} // namespace flexbench
