#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <json.hpp>
#include <numeric>

#include "helpers.hpp"
#include "rcsp/criticality.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/generators.hpp"

using namespace rcsp;
using Matrix = std::vector<std::vector<double>>;

namespace {

// Forcing weight straight from the restriction lists.
double weight_oracle(const ConstraintDistribution& dist, Value a, Value b) {
    const int d = dist.domain_size();
    double w = 0;
    for (const auto& e : dist.entries()) {
        const auto& r = e.tmpl.restrictions();
        auto forbidden = [&](Value x, Value y) { return std::find(r.begin(), r.end(), std::vector<Value>{x, y}) != r.end(); };
        int fwd_ok = 0, bwd_ok = 0;
        bool fwd_b = false, bwd_b = false;
        for (Value g = 1; g <= d; ++g) {
            if (!forbidden(a, g)) fwd_ok++, fwd_b = g == b;
            if (!forbidden(g, a)) bwd_ok++, bwd_b = g == b;
        }
        w += e.probability.value() * 0.5 * ((fwd_ok == 1 && fwd_b) + (bwd_ok == 1 && bwd_b));
    }
    return w;
}

double radius_2x2(const Matrix& m) {
    const double tr = m[0][0] + m[1][1], det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return tr / 2 + std::sqrt(std::max(0.0, tr * tr / 4 - det));
}

// Largest real part among the roots of the characteristic polynomial,
// via Cardano's formula in complex arithmetic.
double radius_3x3(const Matrix& m) {
    using C = std::complex<double>;
    const double a = -(m[0][0] + m[1][1] + m[2][2]);
    const double b = m[0][0] * m[1][1] + m[0][0] * m[2][2] + m[1][1] * m[2][2] - m[0][1] * m[1][0] -
                     m[0][2] * m[2][0] - m[1][2] * m[2][1];
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    const double c = -det;
    // x = t - a/3:  t^3 + p t + q = 0
    const double p = b - a * a / 3, q = 2 * a * a * a / 27 - a * b / 3 + c;
    const C disc = std::sqrt(C(q * q / 4 + p * p * p / 27, 0));
    C u = std::pow(C(-q / 2, 0) + disc, 1.0 / 3);
    if (std::abs(u) < 1e-14) u = std::pow(C(-q / 2, 0) - disc, 1.0 / 3);
    const C w(-0.5, std::sqrt(3.0) / 2);
    double best = -1e300;
    C uk = u;
    for (int k = 0; k < 3; ++k, uk *= w) {
        const C t = std::abs(uk) < 1e-14 ? C(0, 0) : uk - p / (3.0 * uk);
        best = std::max(best, (t - a / 3).real());
    }
    return best;
}

ConstraintDistribution relabel(const ConstraintDistribution& dist, const std::vector<Value>& perm) {
    std::vector<ConstraintDistribution::Entry> out;
    for (const auto& e : dist.entries()) {
        std::vector<std::vector<Value>> r;
        for (const auto& t : e.tmpl.restrictions()) r.push_back({perm[static_cast<std::size_t>(t[0] - 1)], perm[static_cast<std::size_t>(t[1] - 1)]});
        out.push_back({ConstraintTemplate(dist.domain_size(), 2, r), e.probability});
    }
    return ConstraintDistribution(out);
}

}  // namespace

TEST_SUITE("criticality") {

TEST_CASE("forcing weights of the coarse example") {
    const auto ed3 = example_ed3().dist;
    CHECK(forcing_weight(ed3, 1, 1) == doctest::Approx(2.0 / 3).epsilon(1e-15));
    for (Value a = 1; a <= 3; ++a)
        for (Value b = 1; b <= 3; ++b)
            if (a != 1 || b != 1) CHECK(forcing_weight(ed3, a, b) == 0.0);
}

TEST_CASE("forcing weights of 2-SAT and of an empty template") {
    const auto w = mean_matrix(dkt_distribution(2, 2, 1).named.dist);
    for (Value a = 1; a <= 2; ++a)
        for (Value b = 1; b <= 2; ++b) CHECK(w.at(a, b) == doctest::Approx(0.25));
    const auto z = mean_matrix(ConstraintDistribution({{ConstraintTemplate(3, 2, {}), Rational(1, 1)}}));
    for (const auto& row : z.w)
        for (double x : row) CHECK(x == 0.0);
    CHECK_THROWS_AS(mean_matrix(dkt_distribution(2, 3, 1).named.dist), Unsupported);
}

TEST_CASE("forcing weights match a direct table computation") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 3);
        const auto dist = random_distribution(d, 2, 4, rng);
        for (Value a = 1; a <= d; ++a)
            for (Value b = 1; b <= d; ++b) CHECK(forcing_weight(dist, a, b) == doctest::Approx(weight_oracle(dist, a, b)));
    }
}

TEST_CASE("spectral radius on hand-picked matrices") {
    CHECK(spectral_radius({{0, 1}, {1, 0}}) == doctest::Approx(1.0));
    CHECK(spectral_radius({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}}) == doctest::Approx(1.0));
    CHECK(spectral_radius({{0, 1}, {0, 0}}) == 0.0);
    CHECK(spectral_radius({{2, 0}, {0, 3}}) == doctest::Approx(3.0));
    CHECK(spectral_radius({{0.25, 0.25}, {0.25, 0.25}}) == doctest::Approx(0.5));
    CHECK(spectral_radius({{1, 5}, {0, 1}}) == doctest::Approx(1.0));
    CHECK_THROWS_AS(spectral_radius({{1, -1}, {0, 1}}), InvalidInput);
}

TEST_CASE("spectral radius agrees with characteristic-polynomial roots") {
    Rng rng(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        Matrix m(n, std::vector<double>(n));
        for (auto& row : m)
            for (double& x : row) x = rng() % 10 < 3 ? 0.0 : u(rng);
        const double expect = n == 2 ? radius_2x2(m) : radius_3x3(m);
        CHECK(spectral_radius(m) == doctest::Approx(expect).epsilon(1e-9));
    }
}

TEST_CASE("classification of the coarse example") {
    const auto ed3 = example_ed3().dist;
    const auto at2 = classify(ed3, 2.0);
    CHECK(at2.label(1, 1) == Criticality::supercritical);
    for (Value a = 2; a <= 3; ++a)
        for (Value b = 1; b <= 3; ++b) CHECK(at2.label(a, b) == Criticality::subcritical);
    CHECK(at2.f_delta[0] == Criticality::supercritical);
    CHECK(at2.f_delta[1] == Criticality::subcritical);

    const auto at1 = classify(ed3, 1.0);
    for (const auto& row : at1.pair)
        for (auto l : row) CHECK(l == Criticality::subcritical);
    CHECK(classify(ed3, 1.5).label(1, 1) == Criticality::critical);
    CHECK(classify(ed3, 1.5 + 1e-6).label(1, 1) == Criticality::supercritical);

    const auto cc = critical_constants(ed3);
    REQUIRE(cc.size() == 1);
    CHECK(std::abs(cc[0] - 1.5) <= 1e-9);
}

TEST_CASE("classification of 2-SAT") {
    const auto twosat = dkt_distribution(2, 2, 1).named.dist;
    CHECK(classify(twosat, 2.0).label(1, 2) == Criticality::critical);
    CHECK(classify(twosat, 1.0).label(1, 2) == Criticality::subcritical);
    CHECK(classify(twosat, 3.0).label(2, 1) == Criticality::supercritical);
    const auto cc = critical_constants(twosat);
    REQUIRE(cc.size() == 1);
    CHECK(cc[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(critical_constants(ConstraintDistribution({{ConstraintTemplate(3, 2, {}), Rational(1, 1)}})).empty());
    for (const auto& row : classify(twosat, 0.0).pair)
        for (auto l : row) CHECK(l == Criticality::subcritical);
}

TEST_CASE("supercriticality needs a block that is reachable and reaches the target") {
    // 1 -> 2 (weight only), 2 -> 2 self-loop; 3 isolated
    const ConstraintTemplate one_to_two(3, 2, {{1, 1}, {1, 3}});
    const ConstraintTemplate two_to_two(3, 2, {{2, 1}, {2, 3}});
    const ConstraintDistribution d({{one_to_two, Rational(1, 2)}, {two_to_two, Rational(1, 2)}});
    const auto w = mean_matrix(d);
    CHECK(w.at(1, 2) == doctest::Approx(0.25));
    CHECK(w.at(2, 2) == doctest::Approx(0.25));
    const auto r = classify(d, 8.0);  // block {2} has radius 2
    CHECK(r.label(1, 2) == Criticality::supercritical);
    CHECK(r.label(2, 2) == Criticality::supercritical);
    CHECK(r.label(1, 1) == Criticality::subcritical);
    CHECK(r.label(2, 1) == Criticality::subcritical);
    CHECK(r.label(3, 3) == Criticality::subcritical);
}

TEST_CASE("at most d^2 critical constants") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 4);
        const auto dist = random_distribution(d, 2, 6, rng);
        const auto cc = critical_constants(dist);
        CHECK(cc.size() <= static_cast<std::size_t>(d * d));
        CHECK(std::is_sorted(cc.begin(), cc.end()));
    }
}

TEST_CASE("mean matrix is conjugated by value relabelling") {
    Rng rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 3 + static_cast<int>(rng() % 2);
        const auto dist = random_distribution(d, 2, 4, rng);
        std::vector<Value> perm(static_cast<std::size_t>(d));
        std::iota(perm.begin(), perm.end(), 1);
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto w = mean_matrix(dist), wp = mean_matrix(relabel(dist, perm));
        for (Value a = 1; a <= d; ++a)
            for (Value b = 1; b <= d; ++b)
                CHECK(wp.at(perm[static_cast<std::size_t>(a - 1)], perm[static_cast<std::size_t>(b - 1)]) == w.at(a, b));
    }
}

TEST_CASE("growth simulation is empty at c = 0") {
    const auto cells = monte_carlo_growth(example_ed3().dist, 0.0, 1, 1, {50, 100}, 20, Seed{1});
    for (const auto& c : cells) CHECK(c.mean == 0.0);
}

TEST_CASE("growth simulation matches the analytic labels") {
    struct Case {
        ConstraintDistribution dist;
        Value from, to;
    };
    const std::vector<Case> cases{{example_ed3().dist, 1, 1}, {dkt_distribution(2, 2, 1).named.dist, 1, 2}};
    for (const auto& cs : cases) {
        for (double cstar : critical_constants(cs.dist)) {
            const double lo = 0.5 * cstar, hi = 1.5 * cstar;
            REQUIRE(classify(cs.dist, lo).label(cs.from, cs.to) == Criticality::subcritical);
            REQUIRE(classify(cs.dist, hi).label(cs.from, cs.to) == Criticality::supercritical);
            const auto flat = monte_carlo_growth(cs.dist, lo, cs.from, cs.to, {100, 400}, 600, Seed{3});
            const auto grow = monte_carlo_growth(cs.dist, hi, cs.from, cs.to, {100, 400}, 600, Seed{4});
            CHECK(flat[1].mean <= 1.5 * flat[0].mean + 3 * (flat[0].std_error + flat[1].std_error));
            CHECK(grow[1].mean >= 2.0 * grow[0].mean);
        }
    }
}

TEST_CASE("growth simulation is reproducible and worker-independent") {
    const auto ed3 = example_ed3().dist;
    const auto a = monte_carlo_growth(ed3, 2.0, 1, 1, {60, 120}, 50, Seed{8}, 1);
    const auto b = monte_carlo_growth(ed3, 2.0, 1, 1, {60, 120}, 50, Seed{8}, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].mean == b[i].mean);
}

TEST_CASE("blocking-value witness") {
    const auto ed3 = example_ed3().dist;
    const CspInstance tri(3, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}});
    CHECK(blocking_witness(ed3, 2.0, tri) == std::optional<Value>(1));
    CHECK_FALSE(blocking_witness(ed3, 1.0, tri).has_value());
    const CspInstance edge(2, 3, 2, ed3.templates(), {{{1, 2}, 1}});
    CHECK_THROWS_AS(blocking_witness(ed3, 2.0, edge), InvalidInput);  // a tree, not unicyclic
    const CspInstance tri_tail(4, 3, 2, ed3.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}, {{3, 4}, 1}});
    CHECK(blocking_witness(ed3, 2.0, tri_tail) == std::optional<Value>(1));
    const CspInstance c1_tri(3, 3, 2, ed3.templates(), {{{1, 2}, 0}, {{2, 3}, 0}, {{1, 3}, 0}});
    CHECK_FALSE(blocking_witness(ed3, 2.0, c1_tri).has_value());
    CHECK_THROWS_AS(blocking_witness(dkt_distribution(2, 2, 1).named.dist, 2.0,
                                      CspInstance(3, 2, 2, dkt_distribution(2, 2, 1).named.dist.templates())),
                    InvalidInput);
}

TEST_CASE("report JSON") {
    const auto j = nlohmann::json::parse(report_to_json(classify(example_ed3().dist, 2.0)));
    CHECK(j["c"] == 2.0);
    CHECK(j["pairs"].size() == 9);
    CHECK(j["pairs"][0]["delta"] == 1);
    CHECK(j["pairs"][0]["gamma"] == 1);
    CHECK(j["pairs"][0]["label"] == "supercritical");
    CHECK(j["f_delta"].size() == 3);
    CHECK(j["critical_constants"].size() == 1);
}

}  // TEST_SUITE
