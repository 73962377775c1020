#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "flexbench/genotype.hpp"
#include "flexbench/variants.hpp"
#include "scripted_rng.hpp"

using namespace flexbench;

namespace {

AlgoConfig small_config(std::size_t pop, std::size_t gens, std::uint64_t seed)
{
    AlgoConfig c;
    c.population_size = pop;
    c.max_generations = gens;
    c.seed = seed;
    return c;
}

std::vector<double> inactive_slots(const AIGenotype& g)
{
    std::vector<double> out;
    for (std::size_t i = 0; i < kNumProcess; ++i) {
        for (std::size_t k = 1; k <= g.gene_length; ++k) {
            if (k != g.selector(i)) {
                out.push_back(g.slot(i, k));
            }
        }
    }
    return out;
}

std::vector<std::size_t> selectors(const AIGenotype& g)
{
    return {g.selector(0), g.selector(1), g.selector(2)};
}

} // namespace

TEST_CASE("goal index")
{
    CHECK(goal_index(1, 5, 2) == 0);
    CHECK(goal_index(5, 5, 2) == 0);
    CHECK(goal_index(6, 5, 2) == 1);
    CHECK(goal_index(26, 5, 3) == 2);
    CHECK_THROWS_AS(goal_index(0, 5, 2), DomainError);
    CHECK_THROWS_AS(goal_index(1, 0, 2), DomainError);
    CHECK_THROWS_AS(goal_index(1, 5, 0), DomainError);
    for (std::size_t E = 1; E <= 6; ++E) {
        for (std::size_t n = 1; n <= 4; ++n) {
            std::vector<bool> hit(n, false);
            for (std::size_t i = 1; i <= 3 * E * n; ++i) {
                CHECK(goal_index(i, E, n) == goal_index(i + E * n, E, n));
                hit[goal_index(i, E, n)] = true;
            }
            CHECK(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }));
        }
    }
}

TEST_CASE("decode and encode")
{
    const AIGenotype g(2, {1, 3.0, 4.0, 2, 0.1, 0.2, 1, 5e-4, 7e-4});
    CHECK(decode(g) == Phenotype{3.0, 0.2, 5e-4});
    CHECK(encode(g, decode(g)) == g);

    const AIGenotype ones(3, {1, 0.5, 1, 2, 1, 0.1, 0.2, 0.3, 1, 1e-5, 2e-5, 3e-5});
    CHECK(decode(ones) == Phenotype{0.5, 0.1, 1e-5});

    const AIGenotype twos(2, {2, 1.0, 2.0, 2, 0.1, 0.2, 2, 1e-4, 2e-4});
    const std::vector<double> p{3.0, 0.4, 9e-4};
    const AIGenotype e = encode(twos, p);
    CHECK(e.flat == std::vector<double>{2, 1.0, 3.0, 2, 0.1, 0.4, 2, 1e-4, 9e-4});

    CHECK_THROWS_AS(encode(g, std::vector<double>{1.0, 2.0}), StructureError);
    CHECK_THROWS_AS(decode(AIGenotype(2, {3, 1, 2, 1, 1, 2, 1, 1, 2})), StructureError);
    CHECK_THROWS_AS(decode(AIGenotype(2, {1.5, 1, 2, 1, 1, 2, 1, 1, 2})), StructureError);
    CHECK_THROWS_AS(decode(AIGenotype(2, {1, 1, 2, 1, 1, 2})), StructureError);
}

TEST_CASE("decode and encode round trips")
{
    const Bounds b = default_bounds();
    Rng rng(21);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t l = 1 + rng.below(5);
        const AIGenotype g = random_ai_genotype(l, b, rng);
        const Phenotype p = random_phenotype(b, rng);
        const AIGenotype e = encode(g, p);
        CHECK(decode(e) == p);
        CHECK(encode(g, decode(g)) == g);
        CHECK(selectors(e) == selectors(g));
        CHECK(inactive_slots(e) == inactive_slots(g));
        const Phenotype d = decode(g);
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(d[k] >= b[k].lo);
            CHECK(d[k] <= b[k].hi);
        }
    }
}

TEST_CASE("two-step mutation")
{
    const Bounds b = default_bounds();
    const AIGenotype g(2, {1, 3.0, 4.0, 2, 0.1, 0.2, 1, 5e-4, 7e-4});

    ScriptedRng none;
    none.uniforms = {0.9, 0.9, 0.9, 0.9, 0.9, 0.9};
    CHECK(two_step_mutation(g, 20.0, 1.0 / 3.0, 1.0 / 3.0, b, none) == g);

    ScriptedRng flip;
    flip.uniforms = {0.0, 0.9, 0.9, 0.9, 0.9, 0.9};
    flip.integers = {0};
    const AIGenotype f = two_step_mutation(g, 20.0, 1.0 / 3.0, 1.0 / 3.0, b, flip);
    CHECK(f.selector(0) == 2);
    CHECK(f.selector(1) == 2);
    CHECK(f.flat == std::vector<double>{2, 3.0, 4.0, 2, 0.1, 0.2, 1, 5e-4, 7e-4});

    ScriptedRng back;
    back.uniforms = {0.9, 0.0, 0.9, 0.9, 0.9, 0.9};
    back.integers = {0};
    CHECK(two_step_mutation(g, 20.0, 1.0 / 3.0, 1.0 / 3.0, b, back).selector(1) == 1);

    // With l = 3 the new selector is uniform over the two other slots.
    const AIGenotype g3(3, {2, 1, 2, 3, 1, 0, 0.1, 0.2, 1, 1e-4, 2e-4, 3e-4});
    for (std::uint64_t pick : {0u, 1u}) {
        ScriptedRng s;
        s.uniforms = {0.0, 0.9, 0.9, 0.9, 0.9, 0.9};
        s.integers = {pick};
        CHECK(two_step_mutation(g3, 20.0, 1.0 / 3.0, 1.0 / 3.0, b, s).selector(0) == (pick == 0 ? 1u : 3u));
    }
}

TEST_CASE("selector flip rate")
{
    const Bounds b = default_bounds();
    Rng rng(77);
    const AIGenotype g = random_ai_genotype(2, b, rng);
    const int N = 100000;
    std::array<int, 3> flips{};
    for (int t = 0; t < N; ++t) {
        const AIGenotype m = two_step_mutation(g, 20.0, 1.0 / 3.0, 1.0 / 3.0, b, rng);
        for (std::size_t i = 0; i < 3; ++i) {
            flips[i] += m.selector(i) != g.selector(i);
        }
        CHECK(inactive_slots(m).size() == 3);
    }
    const double p = 1.0 / 3.0;
    const double se = std::sqrt(p * (1 - p) / N);
    for (int f : flips) {
        CHECK(std::abs(static_cast<double>(f) / N - p) <= 3.0 * se);
    }
}

TEST_CASE("mutation keeps inactive slots")
{
    const Bounds b = default_bounds();
    Rng rng(5);
    for (int t = 0; t < 2000; ++t) {
        const AIGenotype g = random_ai_genotype(4, b, rng);
        const AIGenotype m = two_step_mutation(g, 20.0, 1.0 / 3.0, 0.0, b, rng);
        CHECK(selectors(m) == selectors(g));
        CHECK(inactive_slots(m) == inactive_slots(g));
    }
}

TEST_CASE("active-inactive crossover")
{
    const Bounds b = default_bounds();
    Rng rng(8);
    for (int t = 0; t < 2000; ++t) {
        const AIGenotype g1 = random_ai_genotype(3, b, rng);
        const AIGenotype g2 = random_ai_genotype(3, b, rng);
        const auto [c1, c2] = ai_crossover(g1, g2, 30.0, b, rng);
        CHECK(selectors(c1) == selectors(g1));
        CHECK(selectors(c2) == selectors(g2));
        CHECK(inactive_slots(c1) == inactive_slots(g1));
        CHECK(inactive_slots(c2) == inactive_slots(g2));
        const auto [s1, s2] = ai_crossover(g1, g1, 30.0, b, rng);
        CHECK(s1 == g1);
        CHECK(s2 == g1);
    }
}

TEST_CASE("inactive slots are invisible to evaluation")
{
    const Bounds b = default_bounds();
    const TaskSpec task = make_task(find_material("steel"));
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        AIGenotype g1 = random_ai_genotype(3, b, rng);
        AIGenotype g2 = g1;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t k = 1; k <= 3; ++k) {
                if (k != g2.selector(i)) {
                    g2.slot(i, k) = b[i].lo + rng.uniform() * (b[i].hi - b[i].lo);
                }
            }
        }
        CHECK(g1 != g2);
        const EvalResult r1 = evaluate(task, decode(g1));
        const EvalResult r2 = evaluate(task, decode(g2));
        CHECK(r1.feasible == r2.feasible);
        CHECK(r1.objectives == r2.objectives);
        CHECK(r1.violation == r2.violation);
    }
}

TEST_CASE("a single-goal schedule behaves like the plain run")
{
    const TaskSpec steel = make_task(find_material("steel"));
    const AlgoConfig cfg = small_config(16, 8, 31);
    const RunResult plain = run(steel, cfg);
    const VaryingGoalsResult vg = varying_goals_run(GoalSchedule{{steel}, 5}, cfg, {});
    CHECK(vg.goal_switches == 0);
    CHECK(vg.evaluations_used == plain.evaluations_used);
    REQUIRE(vg.trace.size() == plain.trace.size());
    for (std::size_t g = 0; g < vg.trace.size(); ++g) {
        CHECK(vg.trace[g].best_hypervolume == plain.trace[g].best_hypervolume);
    }
    CHECK(vg.stored.individuals == plain.best_front.individuals);
    CHECK(vg.stored.algorithm == "baseline");
}

TEST_CASE("an epoch covering the whole run never leaves the first goal")
{
    const TaskSpec steel = make_task(find_material("steel"));
    const TaskSpec tungsten = make_task(find_material("tungsten-alloy"));
    const AlgoConfig cfg = small_config(16, 6, 32);
    const VaryingGoalsResult vg = varying_goals_run(GoalSchedule{{steel, tungsten}, 6}, cfg, {});
    const RunResult plain = run(steel, cfg);
    CHECK(vg.goal_switches == 0);
    CHECK(vg.stored.individuals == plain.best_front.individuals);
    CHECK(vg.best_per_goal[1] == 0.0);
    CHECK(vg.stored.tasks == std::vector<std::string>{"steel", "tungsten-alloy"});
    CHECK(vg.stored.algorithm == "varying-goals");
    CHECK(vg.stored.epoch_length == 6);
}

TEST_CASE("goal switches re-evaluate and are counted")
{
    const TaskSpec steel = make_task(find_material("steel"));
    const TaskSpec inconel = make_task(find_material("inconel-718"));
    std::uint64_t calls = 0;
    const std::vector<Problem> goals{
        [&](const Phenotype& x) {
            ++calls;
            return evaluate(steel, x);
        },
        [&](const Phenotype& x) {
            ++calls;
            return evaluate(inconel, x);
        },
    };
    const std::vector<std::string> names{"steel", "inconel-718"};
    const VaryingGoalsResult r = varying_goals_run(goals, names, 2, small_config(12, 10, 3), {});
    CHECK(r.goal_switches == 4);
    CHECK(r.evaluations_used == calls);
    CHECK(r.evaluations_used == 12 * (10 + 1) + 12 * 4);
    for (std::size_t g = 1; g < r.trace.size(); ++g) {
        CHECK(r.trace[g].goal == goal_index(g, 2, 2));
    }
    CHECK(r.best_per_goal[0] > 0.0);
    CHECK(r.best_per_goal[1] > 0.0);
}

TEST_CASE("the stored front follows the last improvement")
{
    const TaskSpec steel = make_task(find_material("steel"));
    const TaskSpec tungsten = make_task(find_material("tungsten-alloy"));
    const VaryingGoalsResult r =
        varying_goals_run(GoalSchedule{{steel, tungsten}, 3}, small_config(16, 12, 41), {GenotypeKind::active_inactive, 2});
    std::size_t last = 0;
    std::vector<double> best(2, 0.0);
    for (std::size_t g = 0; g < r.trace.size(); ++g) {
        const auto& t = r.trace[g];
        if (t.best_hypervolume > best[t.goal]) {
            last = g;
            best[t.goal] = t.best_hypervolume;
        }
    }
    CHECK(r.stored.generation == last);
    CHECK(r.stored.algorithm == "varying-goals+active-inactive");
    CHECK(r.stored.representation.gene_length == 2);
    for (const auto& e : r.stored.individuals) {
        CHECK(e.genotype.size() == 9);
        CHECK(decode(AIGenotype(2, e.genotype)) == e.phenotype);
    }
}

TEST_CASE("gene length one is the plain representation with matched streams")
{
    const TaskSpec steel = make_task(find_material("tungsten-alloy"));
    const AlgoConfig cfg = small_config(16, 6, 55);
    const RunResult plain = run(steel, cfg);
    const RunResult ai = run(steel, cfg, nullptr, std::nullopt, {GenotypeKind::active_inactive, 1});
    REQUIRE(plain.trace.size() == ai.trace.size());
    for (std::size_t g = 0; g < plain.trace.size(); ++g) {
        CHECK(plain.trace[g].best_hypervolume == ai.trace[g].best_hypervolume);
    }
    REQUIRE(plain.best_front.individuals.size() == ai.best_front.individuals.size());
    for (std::size_t i = 0; i < plain.best_front.individuals.size(); ++i) {
        CHECK(plain.best_front.individuals[i].phenotype == ai.best_front.individuals[i].phenotype);
    }
}

TEST_CASE("schedules are validated")
{
    const TaskSpec steel = make_task(find_material("steel"));
    CHECK_THROWS_AS((GoalSchedule{{}, 5}.validate()), DomainError);
    CHECK_THROWS_AS((GoalSchedule{{steel}, 0}.validate()), DomainError);
    CHECK_THROWS_AS((GoalSchedule{{steel, steel}, 5}.validate()), DomainError);
    CHECK_THROWS_AS((Representation{GenotypeKind::plain, 2}.validate()), DomainError);
    CHECK_THROWS_AS((Representation{GenotypeKind::active_inactive, 0}.validate()), DomainError);
}
