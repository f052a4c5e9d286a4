#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/format.hpp"
#include "rcsp/solver.hpp"

using namespace rcsp;
using test::not_equal;

TEST_SUITE("model") {

TEST_CASE("template_satisfied on small tables") {
    const auto ne = not_equal(3);
    const std::array<Value, 2> a{1, 2}, b{2, 2};
    CHECK(template_satisfied(ne, a));
    CHECK_FALSE(template_satisfied(ne, b));

    const ConstraintTemplate empty(3, 2, {});
    for (Value x = 1; x <= 3; ++x)
        for (Value y = 1; y <= 3; ++y) {
            const std::array<Value, 2> t{x, y};
            CHECK(template_satisfied(empty, t));
            CHECK_FALSE(template_satisfied(test::full_template(3, 2), t));
        }

    const std::array<Value, 3> too_long{1, 1, 1};
    const std::array<Value, 2> out_of_range{1, 4};
    CHECK_THROWS_AS((void)template_satisfied(ne, too_long), InvalidInput);
    CHECK_THROWS_AS((void)template_satisfied(ne, out_of_range), InvalidInput);
}

TEST_CASE("template construction rejects bad restriction sets") {
    CHECK_THROWS_AS(ConstraintTemplate(2, 2, {{1, 1}, {1, 1}}), InvalidInput);
    CHECK_THROWS_AS(ConstraintTemplate(2, 2, {{1, 3}}), InvalidInput);
    CHECK_THROWS_AS(ConstraintTemplate(2, 2, {{1}}), InvalidInput);
    const ConstraintTemplate t(2, 2, {{2, 1}, {1, 2}});
    CHECK(t.restrictions() == std::vector<std::vector<Value>>{{1, 2}, {2, 1}});
    CHECK(test::full_template(2, 3).num_restrictions() == 8);
}

TEST_CASE("rationals stay reduced") {
    CHECK(Rational(2, 6) == Rational(1, 3));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
    CHECK(Rational::approximate(0.35) == Rational(7, 20));
    CHECK_THROWS_AS(Rational(1, 0), InvalidInput);
}

TEST_CASE("distribution invariants") {
    const auto ne = not_equal(3);
    const ConstraintTemplate other(3, 2, {{1, 2}});
    CHECK_NOTHROW(ConstraintDistribution({{ne, Rational(1, 3)}, {other, Rational(2, 3)}}));
    CHECK_THROWS_AS(ConstraintDistribution({{ne, Rational(1, 3)}, {other, Rational(1, 3)}}), InvalidInput);
    CHECK_THROWS_AS(ConstraintDistribution({{ne, Rational(1, 2)}, {ne, Rational(1, 2)}}), InvalidInput);
    CHECK_THROWS_AS(ConstraintDistribution({{ne, Rational(1, 2)}, {not_equal(2), Rational(1, 2)}}), InvalidInput);
    CHECK_THROWS_AS(ConstraintDistribution({}), InvalidInput);
}

TEST_CASE("instance invariants") {
    const auto ne = not_equal(2);
    CHECK_THROWS_AS(CspInstance(2, 2, 2, {ne}, {{{1, 3}, 0}}), InvalidInput);
    CHECK_THROWS_AS(CspInstance(2, 2, 2, {ne}, {{{1, 2}, 1}}), InvalidInput);
    CHECK_THROWS_AS(CspInstance(2, 2, 2, {ne}, {{{1}, 0}}), InvalidInput);
    // constraints are kept sorted by (scope, template)
    const CspInstance inst(3, 2, 2, {ne}, {{{2, 3}, 0}, {{1, 2}, 0}});
    CHECK(inst.constraints()[0].vars == std::vector<Var>{1, 2});
}

TEST_CASE("evaluate") {
    const CspInstance none(3, 3, 2, {not_equal(3)});
    CHECK(evaluate(none, Assignment{{1, 1, 1}}));
    CHECK(evaluate(none, Assignment{{3, 2, 1}}));

    const auto edge = test::graph_instance(2, not_equal(3), {{1, 2}});
    CHECK_FALSE(evaluate(edge, Assignment{{1, 1}}));
    CHECK(evaluate(edge, Assignment{{1, 2}}));
    CHECK_THROWS_AS((void)evaluate(edge, Assignment{{1}}), InvalidInput);

    // 2-SAT style: x1 or x2, not x1 or x3, not x2 or not x3  (value 1 = true)
    const ConstraintTemplate nor(2, 2, {{2, 2}});      // forbids both false
    const ConstraintTemplate imp(2, 2, {{1, 2}});      // forbids x true, y false
    const ConstraintTemplate nand(2, 2, {{1, 1}});     // forbids both true
    const CspInstance sat(3, 2, 2, {nor, imp, nand}, {{{1, 2}, 0}, {{1, 3}, 1}, {{2, 3}, 2}});
    const Assignment a{{1, 2, 1}};
    CHECK(evaluate(sat, a));
    std::optional<Assignment> first;
    CHECK(test::count_by_enumeration(sat, &first) >= 1);
    CHECK(evaluate(sat, *first));
}

TEST_CASE("simple sampler edge cases") {
    const auto d = dkt_distribution(2, 2, 1).named.dist;
    CHECK(sample_csp(50, 0.0, d, Seed{1}).constraints().empty());
    CHECK(sample_csp(2, 1.0, d, Seed{1}).constraints().size() == 1);
    CHECK(sample_csp(10, 1.0, d, Seed{1}).constraints().size() == 45);
    CHECK_THROWS_AS(sample_csp(1, 0.5, d, Seed{1}), InvalidInput);
    CHECK_THROWS_AS(sample_csp(10, 1.5, d, Seed{1}), InvalidInput);
}

TEST_CASE("samplers are deterministic under the seed") {
    const auto d = example_ed3().dist;
    CHECK(emit_instance(sample_csp(80, 0.03, d, Seed{9})) == emit_instance(sample_csp(80, 0.03, d, Seed{9})));
    CHECK(emit_instance(sample_hat_csp(80, 0.03, d, Seed{9})) ==
          emit_instance(sample_hat_csp(80, 0.03, d, Seed{9})));
    CHECK(emit_instance(sample_csp(80, 0.03, d, Seed{9})) != emit_instance(sample_csp(80, 0.03, d, Seed{10})));
}

TEST_CASE("simple sampler never repeats a variable set") {
    const auto d = dkt_distribution(2, 3, 1).named.dist;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto inst = sample_csp(25, 0.05, d, Seed{s});
        CHECK(inst.is_simple());
        std::set<std::vector<Var>> seen;
        for (const auto& c : inst.constraints()) {
            auto key = c.vars;
            std::sort(key.begin(), key.end());
            CHECK(seen.insert(key).second);
        }
    }
}

TEST_CASE("simple sampler mean constraint count matches the binomial mean") {
    const auto d = dkt_distribution(2, 2, 1).named.dist;
    const int n = 100;
    const double p = 2.0 / n;
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 1000; ++s)
        counts.push_back(static_cast<double>(sample_csp(n, p, d, derive(Seed{77}, s)).constraints().size()));
    const double expect = p * n * (n - 1) / 2.0;  // 99
    const double se = std::sqrt(test::variance(counts) / static_cast<double>(counts.size()));
    CHECK(std::abs(test::mean(counts) - expect) <= 3 * se);
}

TEST_CASE("hat sampler") {
    const auto d = dkt_distribution(2, 2, 1).named.dist;
    CHECK(sample_hat_csp(60, 0.0, d, Seed{3}).constraints().empty());
    // P(C) p / k! = 1/4 * 10 / 2 > 1
    CHECK_THROWS_AS(sample_hat_csp(10, 10.0, d, Seed{3}), InvalidInput);
}

TEST_CASE("hat and simple samplers agree on the expected constraint count") {
    const auto d = dkt_distribution(2, 2, 1).named.dist;
    const int n = 200;
    const double p = 1.0 / n;
    std::vector<double> simple, hat;
    for (std::uint64_t s = 0; s < 2000; ++s) {
        simple.push_back(static_cast<double>(sample_csp(n, p, d, derive(Seed{5}, s)).constraints().size()));
        hat.push_back(static_cast<double>(sample_hat_csp(n, p, d, derive(Seed{6}, s)).constraints().size()));
    }
    const double se = std::sqrt(test::variance(simple) / 2000.0 + test::variance(hat) / 2000.0);
    CHECK(std::abs(test::mean(simple) - test::mean(hat)) <= 3 * se);
}

TEST_CASE("hat sampler produces repeated pairs in a constant fraction of runs") {
    const auto d = dkt_distribution(2, 2, 1).named.dist;
    const int n = 200;
    int with_repeat = 0;
    const int runs = 400;
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto inst = sample_hat_csp(n, 2.0 / n, d, derive(Seed{8}, s));
        std::set<std::pair<Var, Var>> seen;
        bool rep = false;
        for (const auto& c : inst.constraints())
            rep |= !seen.insert({std::min(c.vars[0], c.vars[1]), std::max(c.vars[0], c.vars[1])}).second;
        with_repeat += rep;
    }
    const double frac = static_cast<double>(with_repeat) / runs;
    CHECK(frac > 0.05);
    CHECK(frac < 0.95);
}

TEST_CASE("plant") {
    const auto ed3 = example_ed3().dist;
    const auto inst = sample_csp(30, 0.1, ed3, Seed{2});
    const CspInstance empty_m(3, 3, 2, ed3.templates());
    CHECK(plant(inst, empty_m, Seed{4}) == inst);

    const CspInstance one(2, 3, 2, ed3.templates(), {{{1, 2}, 1}});
    const CspInstance blank(10, 3, 2, ed3.templates());
    const auto planted = plant(blank, one, Seed{4});
    REQUIRE(planted.constraints().size() == 1);
    CHECK(planted.constraints()[0].vars[0] != planted.constraints()[0].vars[1]);
    CHECK(planted.tmpl_of(planted.constraints()[0]) == ed3.tmpl(1));

    const CspInstance big(40, 3, 2, ed3.templates());
    CHECK_THROWS_AS(plant(blank, big, Seed{1}), InvalidInput);
}

TEST_CASE("planting an unsatisfiable pattern makes the instance unsatisfiable") {
    // 4 variables, not-equal K4 over 3 values: no 3-colouring.
    const auto ne = not_equal(3);
    const auto k4 = test::graph_instance(4, ne, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    REQUIRE(test::count_by_enumeration(k4) == 0);
    const ConstraintDistribution dist({{ne, Rational(1, 1)}});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto base = sample_csp(40, 0.01, dist, Seed{s});
        CHECK_FALSE(solve(plant(base, k4, Seed{s + 100})).has_value());
    }
}

TEST_CASE("force_values") {
    const auto ne = not_equal(3);
    const auto inst = test::graph_instance(3, ne, {{1, 2}});
    const std::array<std::pair<Var, Value>, 1> f{{{1, 1}}};
    const auto forced = force_values(inst, f);
    CHECK_FALSE(evaluate(forced, Assignment{{2, 1, 1}}));
    CHECK(evaluate(forced, Assignment{{1, 2, 1}}));

    const std::array<std::pair<Var, Value>, 2> clash{{{2, 1}, {2, 3}}};
    const auto dead = force_values(inst, clash);
    CHECK(dead.trivially_unsat());
    CHECK_FALSE(solve(dead).has_value());
}

TEST_CASE("forbid_values") {
    const CspInstance inst(2, 3, 2, {not_equal(3)});
    const std::array<std::pair<Var, Value>, 2> two{{{1, 1}, {1, 2}}};
    const auto only3 = forbid_values(inst, two);
    CHECK(only3.domain(1) == value_bit(3));
    const std::array<std::pair<Var, Value>, 1> last{{{1, 3}}};
    CHECK(forbid_values(only3, last).trivially_unsat());
    CHECK(forbid_values(only3, two) == only3);
}

TEST_CASE("forcing values agrees with solving on restricted domains") {
    const auto ed3 = example_ed3().dist;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto inst = sample_csp(9, 0.35, ed3, Seed{s});
        Rng rng(s);
        const Var v = static_cast<Var>(rng() % 9) + 1;
        const Value x = static_cast<Value>(rng() % 3) + 1;
        const std::array<std::pair<Var, Value>, 1> f{{{v, x}}};
        const auto forced = force_values(inst, f);
        // oracle: count solutions of the original that give v the value x
        std::uint64_t restricted = 0;
        {
            auto doms = inst.domains();
            doms[static_cast<std::size_t>(v - 1)] &= value_bit(x);
            restricted = test::count_by_enumeration(
                CspInstance(9, 3, 2, inst.templates(), inst.constraints(), doms));
        }
        CHECK(solve(forced).has_value() == (restricted > 0));
    }
}

TEST_CASE("forcing a satisfying assignment is at least as hard as planting the pattern") {
    // coarse example at c = 2, n = 150; pattern = C2 triangle with satisfying assignment (1, 2, 3).
    const auto ed3 = example_ed3().dist;
    const int n = 150;
    const double p = 2.0 / n;
    const CspInstance m(3, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}});
    const int runs = 500;
    int unsat_planted = 0, unsat_forced = 0;
    for (std::uint64_t s = 0; s < runs; ++s) {
        const auto base = sample_hat_csp(n, p, ed3, derive(Seed{31}, s));
        unsat_planted += !solve(plant(base, m, derive(Seed{32}, s))).has_value();
        Rng rng(derive(Seed{33}, s).value);
        std::vector<Var> vars;
        while (vars.size() < 3) {
            const Var v = static_cast<Var>(rng() % n) + 1;
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
        }
        const std::array<std::pair<Var, Value>, 3> a{{{vars[0], 1}, {vars[1], 2}, {vars[2], 3}}};
        unsat_forced += !solve(force_values(base, a)).has_value();
    }
    const double pp = static_cast<double>(unsat_planted) / runs, pf = static_cast<double>(unsat_forced) / runs;
    const double se = std::sqrt(pp * (1 - pp) / runs + pf * (1 - pf) / runs);
    CHECK(pf >= pp - 3 * se);
}

TEST_CASE("digraph sampler") {
    CHECK(sample_digraph(20, 0.0, Seed{1}).arcs.empty());
    const auto both = sample_digraph(2, 1.0, Seed{1});
    CHECK(both.arcs.size() == 2);
    CHECK(both.two_cycles() == 1);
    CHECK(both.underlying_edges() == std::vector<std::pair<Var, Var>>{{1, 2}});

    const int n = 200;
    const double c = 2.0, p = c / n;
    std::vector<double> cycles;
    for (std::uint64_t s = 0; s < 2000; ++s)
        cycles.push_back(static_cast<double>(sample_digraph(n, p, derive(Seed{12}, s)).two_cycles()));
    const double expect = n * (n - 1) / 2.0 * p * p;
    const double m = test::mean(cycles);
    CHECK(std::abs(m - expect) <= 3 * std::sqrt(test::variance(cycles) / 2000.0));
    // Poisson-like: variance close to the mean
    CHECK(test::variance(cycles) / m == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("binomial") {
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(64, 32) == 1832624140942590534ULL);
    CHECK(binomial(3, 5) == 0);
    CHECK_THROWS_AS((void)binomial(200, 100), InvalidInput);
}

}  // TEST_SUITE
