#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "helpers.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/experiment.hpp"
#include "rcsp/scanner.hpp"

using namespace rcsp;

namespace {

// Wilson bounds written out from the textbook form.
Interval wilson_oracle(double s, double t, double z) {
    const double ph = s / t, z2 = z * z;
    const double centre = (ph + z2 / (2 * t)) / (1 + z2 / t);
    const double half = z / (1 + z2 / t) * std::sqrt(ph * (1 - ph) / t + z2 / (4 * t * t));
    return {centre - half, centre + half};
}

ScanResult synthetic(const std::vector<int>& ns, const std::vector<double>& grid,
                     const std::function<std::size_t(int, double)>& sat_of, std::size_t trials) {
    ScanResult r;
    r.dist_tag = "synthetic";
    r.n_list = ns;
    r.c_grid = grid;
    r.trials = trials;
    for (int n : ns)
        for (double c : grid) {
            CellResult cell;
            cell.n = n;
            cell.c = c;
            cell.trials = trials;
            cell.sat = sat_of(n, c);
            cell.unsat = trials - cell.sat;
            cell.phat = static_cast<double>(cell.sat) / static_cast<double>(trials);
            cell.ci = wilson_interval(cell.sat, trials);
            r.cells.push_back(cell);
        }
    return r;
}

}  // namespace

TEST_SUITE("scanner") {

TEST_CASE("density conversion and model names") {
    CHECK(density_to_p(2.0, 100, 2) == doctest::Approx(0.02));
    CHECK(density_to_p(3.0, 10, 3) == doctest::Approx(0.03));
    CHECK(model_from_string("hat") == Model::hat);
    CHECK(std::string(to_string(Model::simple)) == "simple");
    CHECK_THROWS_AS(model_from_string("other"), InvalidInput);
}

TEST_CASE("Wilson interval") {
    for (std::size_t t : {1u, 7u, 20u, 100u, 1000u})
        for (std::size_t s = 0; s <= t; s += std::max<std::size_t>(1, t / 7)) {
            const auto got = wilson_interval(s, t);
            const auto want = wilson_oracle(static_cast<double>(s), static_cast<double>(t), 1.959963984540054);
            CHECK(got.lo == doctest::Approx(want.lo).epsilon(1e-12));
            CHECK(got.hi == doctest::Approx(want.hi).epsilon(1e-12));
            CHECK(got.lo >= 0.0);
            CHECK(got.hi <= 1.0);
        }
    const auto none = wilson_interval(0, 0);
    CHECK(none.lo == 0.0);
    CHECK(none.hi == 1.0);
}

TEST_CASE("no constraints at c = 0") {
    const auto cell = estimate_sat_prob(example_ed3().dist, Model::simple, 100, 0.0, 30, Seed{2});
    CHECK(cell.phat == 1.0);
    CHECK(cell.sat == 30);
}

TEST_CASE("sparse 2-SAT is almost always satisfiable") {
    const auto cell = estimate_sat_prob(dkt_distribution(2, 2, 1).named.dist, Model::simple, 200, 0.5, 100, Seed{3});
    CHECK(cell.phat >= 0.9);
    CHECK(cell.indeterminate == 0);
}

TEST_CASE("cells are reproducible and independent of the worker count") {
    const auto dist = example_ed3().dist;
    const auto a = scan(dist, "ed3", Model::simple, {40, 80}, {1.0, 2.0}, 25, Seed{9});
    const auto b = scan(dist, "ed3", Model::simple, {40, 80}, {1.0, 2.0}, 25, Seed{9}, RunOptions{{}, 3});
    REQUIRE(a.cells.size() == 4);
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
        CHECK(a.cells[i].sat == b.cells[i].sat);
        CHECK(a.cells[i].n == b.cells[i].n);
    }
    // a single cell is the same as estimating it directly with the derived seed
    const auto direct = estimate_sat_prob(dist, Model::simple, 80, 2.0, 25, derive(Seed{9}, 3));
    CHECK(direct.sat == a.cell(1, 1).sat);
}

TEST_CASE("estimated probability decreases in c") {
    const auto dist = dkt_distribution(2, 2, 1).named.dist;
    const auto r = scan(dist, "dkt:2,2,1", Model::simple, {100}, make_grid(0.5, 4.0, 0.5), 150, Seed{21});
    for (std::size_t j = 1; j < r.c_grid.size(); ++j) {
        const auto& a = r.cell(0, j - 1);
        const auto& b = r.cell(0, j);
        const double se = std::sqrt(a.phat * (1 - a.phat) / 150 + b.phat * (1 - b.phat) / 150);
        CHECK(b.phat <= a.phat + 2 * se + 1e-12);
    }
}

TEST_CASE("monotone smoothing") {
    const auto dist = example_ed3().dist;
    const auto r = scan(dist, "ed3", Model::simple, {60}, make_grid(0.5, 3.5, 0.25), 40, Seed{5});
    const auto s = monotone_smooth(r);
    REQUIRE(s.size() == r.cells.size());
    for (std::size_t j = 1; j < s.size(); ++j) CHECK(s[j] <= s[j - 1] + 1e-12);
    for (std::size_t j = 0; j < s.size(); ++j) {
        const auto& cell = r.cells[j];
        CHECK(s[j] >= cell.ci.lo - (cell.ci.hi - cell.ci.lo) / 2);
        CHECK(s[j] <= cell.ci.hi + (cell.ci.hi - cell.ci.lo) / 2);
    }
    // an already monotone curve is left alone
    const auto step = synthetic({10}, {1, 2, 3}, [](int, double c) { return c < 2.5 ? std::size_t{9} : std::size_t{1}; }, 10);
    const auto same = monotone_smooth(step);
    CHECK(same[0] == doctest::Approx(0.9));
    CHECK(same[2] == doctest::Approx(0.1));
    // a violation is pooled by weight
    const auto bump = synthetic({10}, {1, 2}, [](int, double c) { return c < 1.5 ? std::size_t{2} : std::size_t{6}; }, 10);
    const auto pooled = monotone_smooth(bump);
    CHECK(pooled[0] == doctest::Approx(0.4));
    CHECK(pooled[1] == doctest::Approx(0.4));
}

TEST_CASE("a step curve has a window of one grid step") {
    const auto grid = make_grid(0.5, 8.0, 0.5);
    const auto r = synthetic({100}, grid, [](int, double c) { return c < 5 ? std::size_t{1000} : std::size_t{0}; }, 1000);
    for (auto kind : {WindowKind::point, WindowKind::wide, WindowKind::narrow}) {
        const auto w = transition_window(r, 0.8, 0.2, kind);
        REQUIRE(w.size() == 1);
        REQUIRE(w[0].width.has_value());
        CHECK(*w[0].width == doctest::Approx(0.5));
        CHECK(*w[0].c_lo == doctest::Approx(4.5));
    }
    CHECK_THROWS_AS(transition_window(r, 0.2, 0.8), InvalidInput);
}

TEST_CASE("window is undefined when the grid misses a level") {
    const auto r = synthetic({100}, {1, 2, 3}, [](int, double) { return std::size_t{90}; }, 100);
    const auto w = transition_window(r);
    CHECK_FALSE(w[0].width.has_value());
    CHECK_FALSE(w[0].note.empty());
}

TEST_CASE("verdicts on synthetic curves") {
    const auto grid = make_grid(0.1, 6.0, 0.1);
    // logistic curves around 3 whose width scales like n^(-1/2), or stays put
    auto curve = [](double scale_of_n) {
        return [scale_of_n](int n, double c) {
            const double s = scale_of_n < 0 ? 0.5 : 5.0 / std::sqrt(static_cast<double>(n));
            const double p = 1.0 / (1.0 + std::exp((c - 3.0) / s));
            return static_cast<std::size_t>(std::lround(p * 100000));
        };
    };
    const auto sharp = synthetic({100, 1000, 10000}, grid, curve(1), 100000);
    CHECK(sharpness_verdict(sharp).verdict == Verdict::shrinks);
    const auto coarse = synthetic({100, 1000, 10000}, grid, curve(-1), 100000);
    CHECK(sharpness_verdict(coarse).verdict == Verdict::not_shrinking);
    const auto two = synthetic({100, 10000}, grid, curve(1), 100000);
    const auto rep = sharpness_verdict(two);
    CHECK(rep.verdict == Verdict::inconclusive);
    CHECK(rep.reason.find("fewer than 3") != std::string::npos);
    // tiny samples cannot separate anything
    const auto noisy = synthetic({100, 1000, 10000}, grid, [](int, double c) { return c < 3 ? std::size_t{4} : std::size_t{1}; }, 5);
    CHECK(sharpness_verdict(noisy).verdict == Verdict::inconclusive);
}

TEST_CASE("threshold bisection on a known step") {
    const auto est = threshold_estimate([](double c) { return c < 5.0 ? 1.0 : 0.0; }, 0.0, 8.0, 1e-6);
    CHECK(std::abs(est.c - 5.0) <= 1e-6);
    CHECK(est.probes > 2);
    CHECK_THROWS_AS(threshold_estimate([](double c) { return c < 5.0 ? 1.0 : 0.0; }, 6.0, 8.0, 1e-3), InvalidInput);
    CHECK_THROWS_AS(threshold_estimate([](double) { return 1.0; }, 0.0, 8.0, 1e-3), InvalidInput);
    CHECK_THROWS_AS(threshold_estimate([](double) { return 1.0; }, 0.0, 8.0, 0.0), InvalidInput);
}

TEST_CASE("threshold estimate for 2-SAT lands near 2") {
    const auto est = threshold_estimate(dkt_distribution(2, 2, 1).named.dist, Model::simple, 300, 0.5, 5.0, 0.1, 200,
                                        Seed{13});
    CHECK(est.c > 1.2);
    CHECK(est.c < 3.2);
}

TEST_CASE("CSV, JSON and SVG output") {
    const auto r = scan(example_ed3().dist, "ed3", Model::simple, {20, 40, 60}, {1.0, 2.0}, 10, Seed{1});
    const auto csv = scan_to_csv(r, {"tool 1", "seed 1"});
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "# tool 1");
    std::getline(is, line);
    CHECK(line == "# seed 1");
    std::getline(is, line);
    CHECK(line == "dist,model,n,c,trials,sat,indeterminate,phat,ci_lo,ci_hi");
    int rows = 0;
    while (std::getline(is, line)) {
        CHECK(line.rfind("ed3,simple,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 6);

    const auto j = nlohmann::json::parse(scan_to_json(r, sharpness_verdict(r)));
    for (const char* key : {"dist", "model", "n", "c", "trials", "seed", "indeterminate", "total_trials", "windows", "verdict"})
        CHECK(j.contains(key));
    CHECK(j["total_trials"] == 60);
    CHECK(j["windows"]["point"].size() == 3);
    CHECK(j["verdict"].contains("result"));

    const auto svg = scan_to_svg(r);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

}  // TEST_SUITE
