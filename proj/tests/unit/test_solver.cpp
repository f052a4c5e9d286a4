#include <doctest.h>

#include <algorithm>
#include <array>

#include "helpers.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/generators.hpp"
#include "rcsp/hypergraph.hpp"
#include "rcsp/solver.hpp"

using namespace rcsp;
using test::graph_instance;
using test::not_equal;

namespace {

// Values of `other` left compatible with `known` = value under constraint c, read
// in the constraint's stored orientation and the other variable's domain.
std::vector<Value> compatible(const CspInstance& inst, const Constraint& c, Var known, Value value) {
    const Var other = c.vars[0] == known ? c.vars[1] : c.vars[0];
    std::vector<Value> out;
    for (Value g = 1; g <= inst.domain_size(); ++g) {
        if (!((inst.domain(other) >> (g - 1)) & 1)) continue;
        std::array<Value, 2> t{};
        t[c.vars[0] == known ? 0 : 1] = value;
        t[c.vars[0] == known ? 1 : 0] = g;
        if (inst.tmpl_of(c).satisfied(t)) out.push_back(g);
    }
    return out;
}

std::vector<ConstraintDistribution> oracle_distributions(Rng& rng) {
    std::vector<ConstraintDistribution> out{example_ed3().dist, dkt_distribution(2, 2, 1).named.dist,
                                            dkt_distribution(2, 3, 1).named.dist,
                                            dkt_distribution(3, 2, 3).named.dist, colouring_distribution(3).dist};
    for (int i = 0; i < 6; ++i) {
        const int d = 2 + static_cast<int>(rng() % 2), k = 2 + static_cast<int>(rng() % 2);
        out.push_back(random_distribution(d, k, 4, rng));
    }
    return out;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("solver examples") {
    const CspInstance empty(4, 3, 2, {not_equal(3)});
    const auto a = solve(empty);
    REQUIRE(a.has_value());
    CHECK(evaluate(empty, *a));
    const CspInstance full(3, 2, 2, {test::full_template(2, 2)}, {{{1, 3}, 0}});
    CHECK_FALSE(solve(full).has_value());
    CHECK(solve(CspInstance(0, 2, 2, {})).has_value());
}

TEST_CASE("brute force examples") {
    CHECK_FALSE(brute_force(graph_instance(3, not_equal(2), {{1, 2}, {2, 3}, {1, 3}})).has_value());
    const auto w = brute_force(graph_instance(3, not_equal(3), {{1, 2}, {2, 3}, {1, 3}}));
    REQUIRE(w.has_value());
    CHECK(w->values == std::vector<Value>{1, 2, 3});
    const CspInstance one(1, 3, 2, {not_equal(3)}, {}, {value_bit(2)});
    CHECK(brute_force(one)->values == std::vector<Value>{2});
    CHECK_THROWS_AS(brute_force(CspInstance(30, 3, 2, {not_equal(3)})), Unsupported);
    CHECK_THROWS_AS(brute_force(CspInstance(5, 3, 2, {not_equal(3)}), 100), Unsupported);
}

TEST_CASE("solve agrees with brute force and plain enumeration") {
    Rng rng(1000);
    const auto dists = oracle_distributions(rng);
    int sat = 0, unsat = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const auto& dist = dists[static_cast<std::size_t>(trial) % dists.size()];
        const int n = 1 + static_cast<int>(rng() % 10);
        if (n < dist.arity()) continue;
        // every other trial stacks three samples to reach the unsatisfiable side
        auto inst = random_small_instance(n, dist, rng);
        if (trial % 2) {
            auto cs = inst.constraints();
            for (int extra = 0; extra < 2; ++extra) {
                const auto more = random_small_instance(n, dist, rng);
                cs.insert(cs.end(), more.constraints().begin(), more.constraints().end());
            }
            std::sort(cs.begin(), cs.end());
            cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
            inst = CspInstance(n, dist.domain_size(), dist.arity(), dist.templates(), cs, inst.domains());
        }
        std::optional<Assignment> first;
        const auto count = test::count_by_enumeration(inst, &first);
        const auto bf = brute_force(inst);
        const auto s = solve(inst);
        CHECK(bf.has_value() == (count > 0));
        CHECK(s.has_value() == (count > 0));
        if (bf) CHECK(bf->values == first->values);
        if (s) CHECK(evaluate(inst, *s));
        (count > 0 ? sat : unsat)++;
    }
    CHECK(sat > 100);
    CHECK(unsat > 100);
}

TEST_CASE("node budget yields an indeterminate outcome, never a wrong one") {
    // K5 with 4 colours: unsatisfiable, but arc consistency alone cannot see it
    std::vector<std::pair<Var, Var>> e;
    for (Var a = 1; a <= 5; ++a)
        for (Var b = a + 1; b <= 5; ++b) e.push_back({a, b});
    const auto k5 = graph_instance(5, not_equal(4), e);
    const auto tight = solve(k5, SolveOptions{1});
    CHECK(tight.status == SolveStatus::indeterminate);
    CHECK_FALSE(tight.assignment.has_value());
    const auto full = solve(k5, SolveOptions{0});
    CHECK(full.status == SolveStatus::unsat);
    CHECK(std::string(to_string(SolveStatus::indeterminate)) == "indeterminate");
}

TEST_CASE("solve is deterministic") {
    const auto ed3 = example_ed3().dist;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto inst = sample_csp(200, 2.0 / 200, ed3, Seed{s});
        const auto a = solve(inst, SolveOptions{});
        const auto b = solve(inst, SolveOptions{});
        CHECK(a.status == b.status);
        CHECK(a.nodes == b.nodes);
        CHECK(a.assignment == b.assignment);
    }
}

TEST_CASE("solve excluding a value") {
    const auto ed3 = example_ed3().dist;
    const CspInstance tri(3, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}});
    CHECK_FALSE(solve_excluding_value(tri, 1).has_value());
    CHECK(solve_excluding_value(CspInstance(3, 3, 2, ed3.templates()), 2).has_value());
    const CspInstance path(3, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}});
    const auto w = solve_excluding_value(path, 1);
    REQUIRE(w.has_value());
    for (Value v : w->values) CHECK(v != 1);
    CHECK(evaluate(path, *w));
}

TEST_CASE("count solutions") {
    CHECK(count_solutions(CspInstance(2, 3, 2, {not_equal(3)}), 1000) == 9);
    CHECK(count_solutions(graph_instance(2, not_equal(3), {{1, 2}}), 1000) == 6);
    const auto ed3 = example_ed3().dist;
    const CspInstance tri(3, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}});
    CHECK(count_solutions(tri, 1000) == 6);
    CHECK(count_solutions(CspInstance(10, 3, 2, {not_equal(3)}), 50) == 50);
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = random_small_instance(2 + static_cast<int>(rng() % 6), ed3, rng);
        CHECK(count_solutions(inst, 1'000'000) == test::count_by_enumeration(inst));
    }
}

TEST_CASE("implication closure examples") {
    const auto ed3 = example_ed3().dist;
    // v=1 -C1- u=2 -C1- w=3
    const CspInstance path(3, 3, 2, ed3.templates(), {{{1, 2}, 0}, {{2, 3}, 0}});
    const auto from1 = implication_closure(path, 1, 1);
    CHECK(from1.forced_to(1) == std::vector<Var>{2, 3});
    CHECK(from1.size() == 2);
    CHECK_FALSE(from1.truncated);
    CHECK(certify(path, from1));
    CHECK(implication_closure(path, 1, 2).size() == 0);
    CHECK(implication_closure(CspInstance(4, 3, 2, ed3.templates()), 4, 1).size() == 0);
    CHECK_THROWS_AS(implication_closure(CspInstance(3, 2, 3, {test::full_template(2, 3)}), 1, 1), Unsupported);
}

TEST_CASE("implication closure orientation, conflicts and dead values") {
    // forbids (1,1) and (1,2): first variable = 1 leaves the second only value 3
    const ConstraintTemplate t(3, 2, {{1, 1}, {1, 2}});
    const CspInstance fwd(2, 3, 2, {t}, {{{1, 2}, 0}});
    CHECK(implication_closure(fwd, 1, 1).forced_to(3) == std::vector<Var>{2});
    CHECK(implication_closure(fwd, 2, 1).size() == 0);  // reverse orientation forces nothing

    // two chains force different values on variable 3
    const ConstraintTemplate to1(3, 2, {{1, 2}, {1, 3}});
    const ConstraintTemplate to2(3, 2, {{1, 1}, {1, 3}});
    const CspInstance clash(3, 3, 2, {to1, to2}, {{{1, 2}, 0}, {{1, 3}, 1}, {{2, 3}, 0}});
    const auto c = implication_closure(clash, 1, 1);
    CHECK(c.truncated);
    CHECK(certify(clash, c));

    const CspInstance dead(2, 3, 2, {test::full_template(3, 2)}, {{{1, 2}, 0}});
    const auto d = implication_closure(dead, 1, 1);
    CHECK(d.size() == 0);
    CHECK(d.dead.size() == 1);
}

TEST_CASE("every closure step is certified by independent replay") {
    Rng rng(321);
    const auto dists = std::vector<ConstraintDistribution>{example_ed3().dist, dkt_distribution(2, 2, 1).named.dist,
                                                           dkt_distribution(3, 2, 4).named.dist,
                                                           random_distribution(3, 2, 3, rng)};
    for (int trial = 0; trial < 300; ++trial) {
        const auto& dist = dists[static_cast<std::size_t>(trial) % dists.size()];
        const int n = 5 + static_cast<int>(rng() % 40);
        const auto inst = sample_csp(n, 2.5 / n, dist, Seed{static_cast<std::uint64_t>(trial)});
        const Var v = static_cast<Var>(rng() % static_cast<unsigned>(n)) + 1;
        const Value x = static_cast<Value>(rng() % static_cast<unsigned>(dist.domain_size())) + 1;
        const auto cl = implication_closure(inst, v, x);
        CHECK(certify(inst, cl));
        std::vector<Value> known(static_cast<std::size_t>(n) + 1, 0);
        known[static_cast<std::size_t>(v)] = x;
        for (const auto& f : cl.forced) {
            CHECK(f.var != v);
            REQUIRE(known[static_cast<std::size_t>(f.parent)] != 0);
            const auto& c = inst.constraints()[f.constraint];
            CHECK(((c.vars[0] == f.parent && c.vars[1] == f.var) || (c.vars[1] == f.parent && c.vars[0] == f.var)));
            CHECK(compatible(inst, c, f.parent, known[static_cast<std::size_t>(f.parent)]) ==
                  std::vector<Value>{f.value});
            CHECK(known[static_cast<std::size_t>(f.var)] == 0);
            known[static_cast<std::size_t>(f.var)] = f.value;
        }
    }
}

TEST_CASE("adding a constraint never makes an unsatisfiable instance satisfiable") {
    Rng rng(606);
    const auto dist = dkt_distribution(2, 2, 1).named.dist;
    int checked = 0;
    for (std::uint64_t s = 0; s < 400 && checked < 100; ++s) {
        const int n = 12;
        auto inst = sample_csp(n, 3.5 / n, dist, Seed{s});
        if (solve(inst).has_value()) continue;
        ++checked;
        auto cs = inst.constraints();
        for (int add = 0; add < 3; ++add) {
            Var a = static_cast<Var>(rng() % n) + 1, b = a;
            while (b == a) b = static_cast<Var>(rng() % n) + 1;
            cs.push_back({{a, b}, static_cast<int>(rng() % 4)});
            const CspInstance more(n, 2, 2, inst.templates(), cs, inst.domains());
            CHECK_FALSE(solve(more).has_value());
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("unicyclic instances in the nontrivial (d,k,t) regime are satisfiable") {
    struct P {
        int d, k, t;
    };
    Rng rng(777);
    for (const P p : {P{2, 2, 1}, P{2, 3, 1}, P{2, 3, 2}, P{2, 3, 3}, P{3, 2, 1}, P{3, 2, 2}, P{3, 3, 1},
                      P{3, 3, 4}}) {
        const auto dkt = dkt_distribution(p.d, p.k, p.t);
        REQUIRE(dkt.nontrivial);
        int ok = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const auto g = random_unicyclic(p.k, 14, rng);
            const auto inst = instance_on(g, dkt.named.dist, rng);
            ok += solve(inst).has_value();
        }
        CHECK_MESSAGE(ok == 500, "d=" << p.d << " k=" << p.k << " t=" << p.t);
    }
}

TEST_CASE("bad values") {
    CHECK(bad_values(example_ed3().dist).empty());
    const ConstraintTemplate kill2(3, 2, {{2, 1}, {2, 2}, {2, 3}});
    const ConstraintDistribution one({{kill2, Rational(1, 2)}, {not_equal(3), Rational(1, 2)}});
    CHECK(bad_values(one) == std::vector<Value>{2});
    const ConstraintTemplate force32(3, 2, {{3, 1}, {3, 3}});
    const ConstraintDistribution two(
        {{kill2, Rational(1, 3)}, {not_equal(3), Rational(1, 3)}, {force32, Rational(1, 3)}});
    CHECK(bad_values(two) == std::vector<Value>{2, 3});
    // column variant: second variable can never be 1
    const ConstraintTemplate col1(3, 2, {{1, 1}, {2, 1}, {3, 1}});
    CHECK(bad_values(ConstraintDistribution({{col1, Rational(1, 1)}})) == std::vector<Value>{1});
    CHECK_THROWS_AS(bad_values(dkt_distribution(2, 3, 1).named.dist), Unsupported);
}

}  // TEST_SUITE
