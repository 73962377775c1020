#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <set>

#include "flexbench/errors.hpp"
#include "flexbench/nsga2.hpp"
#include "flexbench/operators.hpp"
#include "scripted_rng.hpp"

using namespace flexbench;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> brute_force_ranks(const std::vector<Point>& pts)
{
    const std::size_t n = pts.size();
    std::vector<std::size_t> rank(n, 0);
    std::vector<bool> done(n, false);
    std::size_t assigned = 0;
    for (std::size_t r = 0; assigned < n; ++r) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) {
                continue;
            }
            bool dominated = false;
            for (std::size_t j = 0; j < n && !dominated; ++j) {
                if (done[j] || i == j) {
                    continue;
                }
                bool no_worse = true;
                bool better = false;
                for (std::size_t k = 0; k < pts[i].size(); ++k) {
                    no_worse = no_worse && pts[j][k] <= pts[i][k];
                    better = better || pts[j][k] < pts[i][k];
                }
                dominated = no_worse && better;
            }
            if (!dominated) {
                layer.push_back(i);
            }
        }
        for (std::size_t i : layer) {
            rank[i] = r;
            done[i] = true;
        }
        assigned += layer.size();
    }
    return rank;
}

Individual feasible_ind(std::vector<double> obj)
{
    Individual ind;
    ind.feasible = true;
    ind.objectives = {obj[0], obj[1], obj[2], obj[3]};
    return ind;
}

Individual infeasible_ind(double violation)
{
    Individual ind;
    ind.feasible = false;
    ind.violation = violation;
    return ind;
}

AlgoConfig small_config(std::size_t pop, std::size_t gens, std::uint64_t seed)
{
    AlgoConfig c;
    c.population_size = pop;
    c.max_generations = gens;
    c.seed = seed;
    return c;
}

bool same_bits(double a, double b)
{
    return std::memcmp(&a, &b, sizeof a) == 0;
}

} // namespace

TEST_CASE("domination")
{
    const std::vector<double> a{1, 2, 3, 4};
    CHECK_FALSE(dominates(a, a));
    CHECK(dominates(std::vector<double>{0, 0, 0, 0}, std::vector<double>{1, 0, 0, 0}));
    CHECK_FALSE(dominates(std::vector<double>{1, 2}, std::vector<double>{2, 1}));
    CHECK_FALSE(dominates(std::vector<double>{2, 1}, std::vector<double>{1, 2}));
    CHECK(dominates(ObjectiveVector{1, 1, 1, 1}, ObjectiveVector{1, 1, 1, 2}));
}

TEST_CASE("non-dominated sorting examples")
{
    const std::vector<Point> pts{{1, 2}, {2, 1}, {2, 2}, {3, 3}};
    const auto fronts = non_dominated_sort(pts);
    REQUIRE(fronts.size() == 3);
    CHECK(std::set<std::size_t>(fronts[0].begin(), fronts[0].end()) == std::set<std::size_t>{0, 1});
    CHECK(fronts[1] == std::vector<std::size_t>{2});
    CHECK(fronts[2] == std::vector<std::size_t>{3});

    const std::vector<Point> same(7, Point{0.3, 0.3, 0.3});
    CHECK(non_dominated_sort(same).size() == 1);
    CHECK(non_dominated_sort(same)[0].size() == 7);

    std::vector<Point> chain;
    for (int i = 5; i >= 0; --i) {
        chain.push_back({double(i), double(i)});
    }
    const auto cf = non_dominated_sort(chain);
    REQUIRE(cf.size() == 6);
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(cf[k] == std::vector<std::size_t>{5 - k});
    }
    CHECK(non_dominated_sort(std::vector<Point>{}).empty());
}

TEST_CASE("non-dominated sorting agrees with brute force")
{
    std::mt19937_64 gen(2024);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + gen() % 64;
        const std::size_t m = 2 + gen() % 3;
        const int levels = 2 + static_cast<int>(gen() % 9); // coarse grids create ties
        std::vector<Point> pts(n, Point(m));
        for (auto& p : pts) {
            for (auto& v : p) {
                v = static_cast<double>(gen() % levels);
            }
        }
        const auto expected = brute_force_ranks(pts);
        const auto fronts = non_dominated_sort(pts);
        std::vector<std::size_t> got(n, 999);
        std::size_t seen = 0;
        for (std::size_t r = 0; r < fronts.size(); ++r) {
            for (std::size_t i : fronts[r]) {
                got[i] = r;
                ++seen;
            }
        }
        mismatches += (got != expected || seen != n);
    }
    CHECK(mismatches == 0);
}

TEST_CASE("crowding distance")
{
    CHECK(crowding_distance(std::vector<Point>{{0.2, 0.4}}) == std::vector<double>{kInf});
    CHECK(crowding_distance(std::vector<Point>{{0.2, 0.4}, {0.3, 0.1}}) == std::vector<double>{kInf, kInf});

    const auto d = crowding_distance(std::vector<Point>{{0, 1}, {0.5, 0.5}, {1, 0}});
    CHECK(d[0] == kInf);
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(d[2] == kInf);

    const auto dup = crowding_distance(std::vector<Point>{{0, 1}, {0.5, 0.5}, {0.5, 0.5}, {1, 0}});
    CHECK(dup[0] == kInf);
    CHECK(dup[3] == kInf);
    CHECK(dup[1] == 0.0);
    CHECK(dup[2] == 0.0);

    // A zero-range objective adds nothing.
    const auto flat = crowding_distance(std::vector<Point>{{0, 1, 7}, {0.5, 0.5, 7}, {1, 0, 7}});
    CHECK(flat[1] == doctest::Approx(2.0));
    CHECK(crowding_distance(std::vector<Point>{}).empty());
}

TEST_CASE("crowded comparison and constraint domination")
{
    Individual a = feasible_ind({1, 1, 1, 1});
    Individual b = feasible_ind({1, 1, 1, 1});
    a.rank = 0;
    b.rank = 1;
    CHECK(crowded_less(a, b));
    CHECK_FALSE(crowded_less(b, a));
    b.rank = 0;
    a.crowding = kInf;
    b.crowding = 1.3;
    CHECK(crowded_less(a, b));
    b.crowding = kInf;
    CHECK_FALSE(crowded_less(a, b));
    CHECK_FALSE(crowded_less(b, a));

    const Individual good = feasible_ind({9, 9, 9, 9});
    const Individual bad = infeasible_ind(0.1);
    const Individual worse = infeasible_ind(5.0);
    CHECK(constrained_dominates(good, bad));
    CHECK_FALSE(constrained_dominates(bad, good));
    CHECK(constrained_dominates(bad, worse));
    CHECK_FALSE(constrained_dominates(worse, bad));
    CHECK(constrained_dominates(feasible_ind({1, 1, 1, 1}), feasible_ind({1, 2, 1, 1})));
}

TEST_CASE("ranking puts infeasible individuals behind feasible ones")
{
    std::vector<Individual> pop{infeasible_ind(3.0), feasible_ind({1, 2, 0, 0}), infeasible_ind(1.0),
                                feasible_ind({2, 1, 0, 0}), feasible_ind({3, 3, 0, 0})};
    const auto fronts = rank_population(pop);
    CHECK(pop[1].rank == 0);
    CHECK(pop[3].rank == 0);
    CHECK(pop[4].rank == 1);
    CHECK(pop[2].rank == 2);
    CHECK(pop[0].rank == 3);
    CHECK(fronts.size() == 4);
    CHECK(pop[1].crowding == kInf);
}

TEST_CASE("survivor selection is elitist and keeps the size")
{
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Individual> pool;
    for (int i = 0; i < 40; ++i) {
        pool.push_back(i % 7 == 0 ? infeasible_ind(u(gen)) : feasible_ind({u(gen), u(gen), u(gen), u(gen)}));
    }
    rank_population(pool);
    const auto kept = select_survivors(pool, 20);
    CHECK(kept.size() == 20);
    std::size_t worst_kept = 0;
    for (const auto& k : kept) {
        worst_kept = std::max(worst_kept, k.rank);
    }
    std::size_t better_dropped = 0;
    for (const auto& p : pool) {
        const bool is_kept = std::any_of(kept.begin(), kept.end(), [&](const Individual& k) {
            return k.objectives == p.objectives && k.violation == p.violation && k.feasible == p.feasible;
        });
        better_dropped += (!is_kept && p.rank < worst_kept);
    }
    CHECK(better_dropped == 0);
}

TEST_CASE("tournament selection")
{
    std::vector<Individual> pop;
    for (int i = 0; i < 10; ++i) {
        pop.push_back(feasible_ind({double(i), double(10 - i), 0, 0}));
    }
    pop.push_back(feasible_ind({20, 20, 0, 0}));
    pop.push_back(feasible_ind({21, 21, 0, 0}));
    rank_population(pop);
    Rng rng(4);
    const auto picks = tournament_select(pop, 12, rng);
    CHECK(picks.size() == 12);
    // The worst individual can never win a binary tournament.
    CHECK(std::count(picks.begin(), picks.end(), 11u) == 0);
    for (auto p : picks) {
        CHECK(p < pop.size());
    }
}

TEST_CASE("sbx crossover")
{
    const Bounds b = default_bounds();
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Phenotype p = random_phenotype(b, rng);
        const auto [c1, c2] = sbx_crossover(p, p, 30.0, b, rng);
        CHECK(c1 == p);
        CHECK(c2 == p);
    }

    // Parents symmetric inside the bounds with the spread factor pinned at 1.
    const Phenotype p1{1.0, 0.0, 2e-4};
    const Phenotype p2{4.1, 0.5, 5e-4};
    const double eta = 30.0;
    const double beta = 1.0 + 2.0 * (1.0 - 0.1) / (4.1 - 1.0);
    const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    ScriptedRng s;
    s.uniforms = {0.1, 1.0 / alpha, 0.9, 0.7, 0.7};
    const auto [c1, c2] = sbx_crossover(p1, p2, eta, b, s);
    CHECK(c1[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c2[0] == doctest::Approx(4.1).epsilon(1e-12));
    CHECK(c1[1] == p1[1]);
    CHECK(c2[2] == p2[2]);

    // Child mean sits at the parent midpoint.
    std::array<double, 3> sum{}, sum_sq{};
    const int N = 10000;
    for (int i = 0; i < N; ++i) {
        const Phenotype a = random_phenotype(b, rng);
        const Phenotype c = random_phenotype(b, rng);
        const auto [x, y] = sbx_crossover(a, c, eta, b, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = (0.5 * (x[k] + y[k]) - 0.5 * (a[k] + c[k])) / (b[k].hi - b[k].lo);
            sum[k] += d;
            sum_sq[k] += d * d;
            CHECK(x[k] >= b[k].lo);
            CHECK(x[k] <= b[k].hi);
            CHECK(y[k] >= b[k].lo);
            CHECK(y[k] <= b[k].hi);
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double mean = sum[k] / N;
        const double se = std::sqrt((sum_sq[k] / N - mean * mean) / N);
        CHECK(std::abs(mean) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("polynomial mutation")
{
    const Bounds b = default_bounds();
    Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const Phenotype p = random_phenotype(b, rng);
        CHECK(polynomial_mutation(p, 20.0, 0.0, b, rng) == p);
    }
    const Phenotype at_lo{b[0].lo, b[1].lo, b[2].lo};
    const Phenotype at_hi{b[0].hi, b[1].hi, b[2].hi};
    for (int i = 0; i < 10000; ++i) {
        for (const auto& p : {at_lo, at_hi}) {
            const auto y = polynomial_mutation(p, 20.0, 1.0, b, rng);
            for (std::size_t k = 0; k < 3; ++k) {
                CHECK(y[k] >= b[k].lo);
                CHECK(y[k] <= b[k].hi);
            }
        }
    }
    const Phenotype mid{0.5 * (b[0].lo + b[0].hi), 0.5 * (b[1].lo + b[1].hi), 0.5 * (b[2].lo + b[2].hi)};
    std::array<double, 3> sum{}, sum_sq{};
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
        const auto y = polynomial_mutation(mid, 20.0, 1.0, b, rng);
        for (std::size_t k = 0; k < 3; ++k) {
            const double d = (y[k] - mid[k]) / (b[k].hi - b[k].lo);
            sum[k] += d;
            sum_sq[k] += d * d;
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        const double mean = sum[k] / N;
        const double se = std::sqrt((sum_sq[k] / N - mean * mean) / N);
        CHECK(std::abs(mean) <= 3.0 * se);
    }
}

TEST_CASE("operators stay in bounds under adversarial streams")
{
    const Bounds b = default_bounds();
    const double edges[] = {0.0, 1e-300, 0.25, 0.5 - 1e-16, 0.5, 0.75, 1.0 - 0x1.0p-53};
    const Phenotype corners[] = {{b[0].lo, b[1].lo, b[2].lo}, {b[0].hi, b[1].hi, b[2].hi},
                                 {b[0].lo, b[1].hi, b[2].lo}, {1.0, 0.2, 3e-4}};
    for (const auto& p : corners) {
        for (const auto& q : corners) {
            for (double e1 : edges) {
                for (double e2 : edges) {
                    ScriptedRng s;
                    for (int k = 0; k < 3; ++k) {
                        s.uniforms.insert(s.uniforms.end(), {0.0, e1, e2});
                    }
                    const auto [c1, c2] = sbx_crossover(p, q, 30.0, b, s);
                    ScriptedRng m;
                    for (int k = 0; k < 3; ++k) {
                        m.uniforms.insert(m.uniforms.end(), {0.0, e1});
                    }
                    const auto y = polynomial_mutation(c1, 20.0, 1.0, b, m);
                    for (std::size_t k = 0; k < 3; ++k) {
                        CHECK(c1[k] >= b[k].lo);
                        CHECK(c1[k] <= b[k].hi);
                        CHECK(c2[k] >= b[k].lo);
                        CHECK(c2[k] <= b[k].hi);
                        CHECK(y[k] >= b[k].lo);
                        CHECK(y[k] <= b[k].hi);
                        CHECK(std::isfinite(y[k]));
                    }
                }
            }
        }
    }
}

TEST_CASE("run without generations stores the first front of the initial population")
{
    const TaskSpec task = make_task(find_material("steel"));
    const RunResult r = run(task, small_config(20, 0, 3));
    CHECK(r.evaluations_used == 20);
    CHECK(r.generations == 0);
    CHECK(r.trace.size() == 1);
    CHECK(r.best_front.generation == 0);
    CHECK(!r.best_front.individuals.empty());
    CHECK(r.best_front.tasks == std::vector<std::string>{"steel"});

    Population pop(small_config(20, 0, 3), {});
    Rng rng(3);
    const Problem prob = [&task](const Phenotype& x) { return evaluate(task, x); };
    pop.initialize(nullptr, prob, rng);
    const auto snap = feasible_front(pop.members());
    CHECK(snap.members.size() == r.best_front.individuals.size());
    CHECK(snap.hypervolume == r.best_hypervolume);
}

TEST_CASE("evaluation accounting matches an evaluator-side counter")
{
    const TaskSpec task = make_task(find_material("tungsten-alloy"));
    for (std::size_t gens : {0u, 1u, 7u}) {
        std::uint64_t calls = 0;
        const Problem prob = [&](const Phenotype& x) {
            ++calls;
            return evaluate(task, x);
        };
        const RunResult r = run(prob, small_config(12, gens, 5));
        CHECK(r.evaluations_used == calls);
        CHECK(r.evaluations_used == 12 * (r.generations + 1));
        CHECK(r.generations == gens);
        for (std::size_t g = 0; g < r.trace.size(); ++g) {
            CHECK(r.trace[g].evaluations == 12 * (g + 1));
        }
    }
}

TEST_CASE("best hypervolume never decreases and the population size is kept")
{
    const TaskSpec task = make_task(find_material("inconel-718"));
    const Problem prob = [&task](const Phenotype& x) { return evaluate(task, x); };
    const AlgoConfig cfg = small_config(24, 15, 17);
    Population pop(cfg, {});
    Rng rng(cfg.seed);
    pop.initialize(nullptr, prob, rng);
    double best = feasible_front(pop.members()).hypervolume;
    for (int g = 0; g < 15; ++g) {
        const auto before = feasible_front(pop.members());
        std::vector<ObjectiveVector> front_before;
        for (auto i : before.members) {
            front_before.push_back(pop.members()[i].objectives);
        }
        pop.advance(prob, rng);
        CHECK(pop.members().size() == 24);
        const auto after = feasible_front(pop.members());
        // Every old front member survives or is dominated by a member of the new front.
        for (const auto& o : front_before) {
            bool covered = false;
            for (auto i : after.members) {
                const auto& n = pop.members()[i].objectives;
                covered = covered || n == o || dominates(n, o);
            }
            if (after.members.size() < 24) {
                CHECK(covered);
            }
        }
        best = std::max(best, after.hypervolume);
    }
    const RunResult r = run(prob, cfg);
    for (std::size_t g = 1; g < r.trace.size(); ++g) {
        CHECK(r.trace[g].best_hypervolume >= r.trace[g - 1].best_hypervolume);
    }
    CHECK(r.best_hypervolume == r.trace.back().best_hypervolume);
    CHECK(r.best_hypervolume == best);
    for (const auto& e : r.best_front.individuals) {
        const auto b = default_bounds();
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(e.phenotype[k] >= b[k].lo);
            CHECK(e.phenotype[k] <= b[k].hi);
        }
    }
}

TEST_CASE("runs are deterministic")
{
    const TaskSpec task = make_task(find_material("steel"));
    const RunResult a = run(task, small_config(16, 6, 99));
    const RunResult b = run(task, small_config(16, 6, 99));
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t g = 0; g < a.trace.size(); ++g) {
        CHECK(same_bits(a.trace[g].best_hypervolume, b.trace[g].best_hypervolume));
        CHECK(same_bits(a.trace[g].current_hypervolume, b.trace[g].current_hypervolume));
    }
    CHECK(a.best_front == b.best_front);
    const RunResult c = run(task, small_config(16, 6, 100));
    CHECK_FALSE(c.best_front == a.best_front);
}

TEST_CASE("seeded runs stop at the first checkpoint when the seed already meets the target")
{
    const TaskSpec task = make_task(find_material("steel"));
    const RunResult source = run(task, small_config(20, 5, 1));
    const RunResult adapted = run(task, small_config(20, 5, 2), &source.best_front, 0.5 * source.best_hypervolume);
    REQUIRE(adapted.success_checkpoint);
    CHECK(*adapted.success_checkpoint == 20);
    CHECK(adapted.evaluations_used == 20);

    const RunResult never = run(task, small_config(20, 3, 2), &source.best_front, 1.5);
    CHECK_FALSE(never.success_checkpoint);
    CHECK(never.evaluations_used == 80);
}

TEST_CASE("short seed archives are filled with random individuals")
{
    const TaskSpec task = make_task(find_material("steel"));
    const RunResult source = run(task, small_config(8, 2, 1));
    ParetoArchive one = source.best_front;
    one.individuals.resize(1);
    Population pop(small_config(16, 0, 4), {});
    Rng rng(4);
    pop.initialize(&one, [&task](const Phenotype& x) { return evaluate(task, x); }, rng);
    CHECK(pop.members().size() == 16);
    CHECK(pop.evaluations() == 16);
    bool found = false;
    for (const auto& m : pop.members()) {
        found = found || m.phenotype == one.individuals[0].phenotype;
    }
    CHECK(found);
}

TEST_CASE("config validation")
{
    AlgoConfig c;
    CHECK_NOTHROW(c.validate());
    c.population_size = 7;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.population_size = 2;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = AlgoConfig{};
    c.eta_cross = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = AlgoConfig{};
    c.mutation_prob = 1.5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK(AlgoConfig{}.population_size == 100);
    CHECK(AlgoConfig{}.max_generations == 50);
    CHECK(AlgoConfig{}.eta_cross == 30.0);
    CHECK(AlgoConfig{}.eta_mut == 20.0);
    CHECK(AlgoConfig{}.mutation_prob == doctest::Approx(1.0 / 3.0));
    CHECK(AlgoConfig{}.crossover_prob == 1.0);
}
