#include "rcsp/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

#include "rcsp/criticality.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/experiment.hpp"
#include "rcsp/format.hpp"
#include "rcsp/generators.hpp"
#include "rcsp/homomorphism.hpp"
#include "rcsp/hypergraph.hpp"
#include "rcsp/scanner.hpp"
#include "rcsp/solver.hpp"

namespace rcsp {

namespace {

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Check {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
        if (!ok) {
            pass = false;
            detail += " [FAILED]";
        }
    }
};

ScanResult run_preset_scan(const std::string& name, const AcceptanceOptions& opt) {
    const auto cfg = preset(name, opt.seed).front();
    const auto named = distribution_from_spec(cfg.dist, cfg.target);
    RunOptions run;
    run.solver.node_budget = cfg.node_budget;
    run.workers = opt.workers;
    return scan(named.dist, named.spec, cfg.model, cfg.n_list, cfg.c_grid, cfg.trials, Seed{cfg.seed}, run);
}

const Window& window_for(const std::vector<Window>& ws, int n) {
    for (const auto& w : ws)
        if (w.n == n) return w;
    throw std::logic_error("no window for n");
}

std::string width_text(const Window& w) {
    return w.width ? fmt("%.3g [%.3g, %.3g]", *w.width, *w.c_lo, *w.c_hi) : "undefined (" + w.note + ")";
}

// ---------------------------------------------------------------- AC1
Check oracle_equivalence(const AcceptanceOptions& opt) {
    Check ck;
    std::size_t disagreements = 0, sat = 0;
    const std::size_t total = 1000;
    for (std::size_t i = 0; i < total; ++i) {
        auto rng = make_rng(derive(Seed{opt.seed}, 1, i));
        std::uniform_int_distribution<int> dd(2, 3), kk(1, 3);
        const int d = dd(rng);
        const int k = kk(rng);
        std::uniform_int_distribution<int> nn(k, 12);
        const auto dist = random_distribution(d, k, 4, rng);
        const auto inst = random_small_instance(nn(rng), dist, rng);
        const bool a = solve(inst).has_value();
        const auto b = brute_force(inst);
        if (a != b.has_value()) ++disagreements;
        if (b) ++sat;
    }
    ck.require(disagreements == 0, fmt("%zu instances, %zu satisfiable, %zu disagreements", total, sat, disagreements));
    return ck;
}

// ---------------------------------------------------------------- AC2
Check unicyclic_dkt(const AcceptanceOptions& opt) {
    Check ck;
    const int params[4][3] = {{2, 2, 1}, {2, 3, 1}, {3, 2, 2}, {2, 3, 3}};
    for (std::size_t pi = 0; pi < 4; ++pi) {
        const auto [d, k, t] = params[pi];
        const auto named = dkt_distribution(d, k, t);
        std::size_t sat = 0, unicyclic = 0;
        for (std::size_t i = 0; i < 500; ++i) {
            auto rng = make_rng(derive(Seed{opt.seed}, 2, pi * 1000 + i));
            const auto h = random_unicyclic(k, 30, rng);
            if (cycle_rank(h) == 1) ++unicyclic;
            if (solve(instance_on(h, named.named.dist, rng))) ++sat;
        }
        ck.require(sat == 500 && unicyclic == 500,
                   fmt("(%d,%d,%d): %zu/500 satisfiable, %zu/500 unicyclic", d, k, t, sat, unicyclic));
    }
    return ck;
}

// ---------------------------------------------------------------- AC3
Check hom_lemmas(const AcceptanceOptions& opt) {
    Check ck;
    std::size_t ok_edge = 0;
    const auto edge = single_edge_target(3);
    for (std::size_t i = 0; i < 200; ++i) {
        auto rng = make_rng(derive(Seed{opt.seed}, 3, i));
        const auto h = random_unicyclic(3, 30, rng);
        try {
            if (is_homomorphism(h, edge, unicyclic_to_edge(h))) ++ok_edge;
        } catch (const std::exception&) {
        }
    }
    ck.require(ok_edge == 200, fmt("unicyclic_to_edge verified on %zu/200 3-uniform hypergraphs", ok_edge));
    std::size_t ok_k3 = 0;
    const auto k3 = complete_target(3);
    for (std::size_t i = 0; i < 200; ++i) {
        auto rng = make_rng(derive(Seed{opt.seed}, 3, 1000 + i));
        const auto g = random_unicyclic(2, 30, rng);
        if (has_homomorphism(g, k3)) ++ok_k3;
    }
    ck.require(ok_k3 == 200, fmt("%zu/200 unicyclic graphs map to K3", ok_k3));
    Hypergraph triangle(3, {{1, 2}, {2, 3}, {1, 3}});
    ck.require(!has_homomorphism(triangle, cycle_target(5)), "K3 -> C5 rejected");
    return ck;
}

// ---------------------------------------------------------------- AC4
Check ed3_criticality(const AcceptanceOptions&) {
    Check ck;
    const auto dist = example_ed3().dist;
    const auto w = mean_matrix(dist);
    bool exact = w.at(1, 1) == 2.0 / 3.0;
    for (Value a = 1; a <= 3; ++a)
        for (Value b = 1; b <= 3; ++b)
            if ((a != 1 || b != 1) && w.at(a, b) != 0.0) exact = false;
    ck.require(exact, fmt("W[1][1] = %.17g, other entries zero", w.at(1, 1)));
    const auto cc = critical_constants(dist);
    ck.require(cc.size() == 1 && std::abs(cc[0] - 1.5) <= 1e-9,
               cc.size() == 1 ? fmt("critical constants {%.12g}", cc[0]) : fmt("%zu critical constants", cc.size()));
    const auto rep = classify(dist, 2.0);
    bool rest = true;
    for (Value a = 2; a <= 3; ++a)
        for (Value b = 1; b <= 3; ++b)
            if (rep.label(a, b) != Criticality::subcritical) rest = false;
    ck.require(rep.label(1, 1) == Criticality::supercritical, "c=2: F_{1,1} supercritical");
    ck.require(rest, "c=2: F_{2,*}, F_{3,*} subcritical");
    return ck;
}

// ---------------------------------------------------------------- AC5
Check growth(const AcceptanceOptions& opt) {
    Check ck;
    const auto dist = example_ed3().dist;
    const std::vector<int> ns{100, 200, 400};
    const auto sub = monte_carlo_growth(dist, 1.0, 1, 1, ns, 2000, derive(Seed{opt.seed}, 5, 1), opt.workers);
    const auto sup = monte_carlo_growth(dist, 2.0, 1, 1, ns, 2000, derive(Seed{opt.seed}, 5, 2), opt.workers);
    const double flat = sub[2].mean / sub[0].mean;
    const double lin = sup[2].mean / sup[1].mean;
    ck.require(flat <= 1.5, fmt("c=1 means %.3f/%.3f/%.3f, ratio(400/100) = %.3f <= 1.5", sub[0].mean, sub[1].mean,
                                sub[2].mean, flat));
    ck.require(lin >= 1.4 && lin <= 2.6, fmt("c=2 means %.2f/%.2f/%.2f, ratio(400/200) = %.3f in [1.4, 2.6]",
                                             sup[0].mean, sup[1].mean, sup[2].mean, lin));
    return ck;
}

// ---------------------------------------------------------------- AC6
Check coarse_band(const AcceptanceOptions& opt) {
    Check ck;
    const auto r = run_preset_scan("ed3-coarse", opt);
    for (std::size_t i = 0; i < r.n_list.size(); ++i)
        for (std::size_t j = 0; j < r.c_grid.size(); ++j) {
            if (std::abs(r.c_grid[j] - 2.0) > 1e-9) continue;
            const auto& cell = r.cell(i, j);
            const bool ok = cell.phat >= 0.08 && cell.phat <= 0.92 && cell.ci.lo >= 0.03 && cell.ci.hi <= 0.97;
            ck.require(ok, fmt("n=%d c=2: phat %.4f, Wilson [%.4f, %.4f] (%zu/%zu sat, %zu indeterminate)", cell.n,
                               cell.phat, cell.ci.lo, cell.ci.hi, cell.sat, cell.decided(), cell.indeterminate));
        }
    const auto ws = transition_window(r);
    const auto& w100 = window_for(ws, 100);
    const auto& w400 = window_for(ws, 400);
    const bool ok = w100.width && w400.width && *w400.width >= 0.5 * *w100.width;
    ck.require(ok, "window n=100 " + width_text(w100) + ", n=400 " + width_text(w400) + ", need width(400) >= 0.5 width(100)");
    return ck;
}

// ---------------------------------------------------------------- AC7
Check sharp_shrinkage(const AcceptanceOptions& opt) {
    Check ck;
    const auto r = run_preset_scan("twosat-sharp", opt);
    const auto ws = transition_window(r);
    const auto& w100 = window_for(ws, 100);
    const auto& w400 = window_for(ws, 400);
    const bool ok = w100.width && w400.width && *w400.width <= 0.7 * *w100.width;
    ck.require(ok, "window n=100 " + width_text(w100) + ", n=400 " + width_text(w400) + ", need width(400) <= 0.7 width(100)");
    RunOptions run;
    run.workers = opt.workers;
    const auto est = threshold_estimate(dkt_distribution(2, 2, 1).named.dist, Model::simple, 400, 1.0, 3.0, 0.05, 400,
                                        derive(Seed{opt.seed}, 7), run);
    ck.require(est.c >= 1.6 && est.c <= 2.4,
               fmt("threshold estimate n=400: c = %.4f (phat %.3f there) in [1.6, 2.4]", est.c, est.phat));
    return ck;
}

// ---------------------------------------------------------------- AC8
Check hom_sharp(const AcceptanceOptions& opt) {
    Check ck;
    const auto r = run_preset_scan("hom-k3", opt);
    const auto ws = transition_window(r);
    const auto& w100 = window_for(ws, 100);
    const auto& w300 = window_for(ws, 300);
    const bool shrinks = w100.width && w300.width && *w300.width <= 0.7 * *w100.width;
    const auto verdict = sharpness_verdict(r, 0.7);
    const double frac = static_cast<double>(r.indeterminate()) / static_cast<double>(r.total_trials());
    ck.require(shrinks || verdict.verdict == Verdict::inconclusive,
               "window n=100 " + width_text(w100) + ", n=300 " + width_text(w300) + ", verdict " +
                   to_string(verdict.verdict) + " (" + verdict.reason + ")");
    ck.require(frac < 0.05, fmt("indeterminate %zu/%zu = %.4f < 0.05", r.indeterminate(), r.total_trials(), frac));
    return ck;
}

// ---------------------------------------------------------------- AC9
Check witness(const AcceptanceOptions&) {
    Check ck;
    const auto dist = example_ed3().dist;
    // Template index 1 is not-equal.
    CspInstance m(3, 3, 2, dist.templates(), {{{1, 2}, 1}, {{2, 3}, 1}, {{1, 3}, 1}});
    const auto at2 = blocking_witness(dist, 2.0, m);
    const auto at1 = blocking_witness(dist, 1.0, m);
    ck.require(at2 && *at2 == 1, at2 ? fmt("c=2: value %d", *at2) : std::string("c=2: none"));
    ck.require(!at1, at1 ? fmt("c=1: value %d", *at1) : std::string("c=1: none"));
    return ck;
}

// ---------------------------------------------------------------- AC10
Check model_relation(const AcceptanceOptions& opt) {
    Check ck;
    const auto dist = example_ed3().dist;
    const int n = 200;
    const double p = 2.0 / n;
    const std::size_t seeds = 2000;
    auto stats = [&](bool hat) {
        double sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < seeds; ++i) {
            const Seed s = derive(Seed{opt.seed}, hat ? 11 : 10, i);
            const double m = static_cast<double>((hat ? sample_hat_csp(n, p, dist, s) : sample_csp(n, p, dist, s)).constraints().size());
            sum += m;
            sq += m * m;
        }
        const double mean = sum / seeds;
        const double var = (sq - seeds * mean * mean) / (seeds - 1);
        return std::pair{mean, std::sqrt(var / seeds)};
    };
    const auto [ms, ss] = stats(false);
    const auto [mh, sh] = stats(true);
    const double bound = 3.0 * std::sqrt(ss * ss + sh * sh);
    ck.require(std::abs(ms - mh) <= bound,
               fmt("simple %.3f +- %.3f, hat %.3f +- %.3f, |diff| %.3f <= %.3f", ms, ss, mh, sh, std::abs(ms - mh), bound));
    return ck;
}

// ---------------------------------------------------------------- AC11
Check round_trips(const AcceptanceOptions& opt) {
    Check ck;
    std::size_t ok = 0, hat_multi = 0, restricted = 0;
    for (std::size_t i = 0; i < 500; ++i) {
        auto rng = make_rng(derive(Seed{opt.seed}, 11, i));
        std::uniform_int_distribution<int> dd(1, 4), kk(1, 3);
        const int d = dd(rng);
        const int k = kk(rng);
        std::uniform_int_distribution<int> nn(std::max(k, 2), 40);
        const auto dist = random_distribution(d, k, 5, rng);
        const auto inst = random_small_instance(nn(rng), dist, rng);
        if (!inst.is_simple()) ++hat_multi;
        for (auto m : inst.domains())
            if (m != full_mask(d)) {
                ++restricted;
                break;
            }
        try {
            if (parse_instance(emit_instance(inst)) == inst) ++ok;
        } catch (const std::exception&) {
        }
    }
    ck.require(ok == 500, fmt("%zu/500 identical after emit+parse (%zu non-simple, %zu with restricted domains)", ok,
                              hat_multi, restricted));
    return ck;
}

struct Spec {
    const char* name;
    double max_seconds;  // 0 = no stated limit
    std::function<Check(const AcceptanceOptions&)> run;
};

const std::map<int, Spec>& specs() {
    static const std::map<int, Spec> table{
        {1, {"solver/brute-force oracle equivalence", 120, oracle_equivalence}},
        {2, {"unicyclic (d,k,t) satisfiability", 60, unicyclic_dkt}},
        {3, {"homomorphism lemmas", 60, hom_lemmas}},
        {4, {"coarse example criticality", 0, ed3_criticality}},
        {5, {"criticality vs. simulation", 300, growth}},
        {6, {"coarse-threshold band", 600, coarse_band}},
        {7, {"sharp-threshold shrinkage", 900, sharp_shrinkage}},
        {8, {"homomorphism sharp case (K3)", 1800, hom_sharp}},
        {9, {"witness for the coarse example", 0, witness}},
        {10, {"simple/hat model relation", 0, model_relation}},
        {11, {"format round-trips", 0, round_trips}},
    };
    return table;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& options) {
    const auto it = specs().find(id);
    if (it == specs().end()) throw InvalidInput("no acceptance criterion " + std::to_string(id));
    CriterionResult r;
    r.id = id;
    r.name = it->second.name;
    const auto start = std::chrono::steady_clock::now();
    Check ck;
    try {
        ck = it->second.run(options);
    } catch (const std::exception& e) {
        ck.pass = false;
        ck.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (it->second.max_seconds > 0) ck.require(r.seconds < it->second.max_seconds, fmt("runtime %.1f s < %.0f s", r.seconds, it->second.max_seconds));
    r.pass = ck.pass;
    r.detail = ck.detail;
    return r;
}

std::vector<std::string> verify_preset_names() {
    return {"all", "oracle", "unicyclic-dkt", "hom-lemmas", "ed3-criticality", "growth", "ed3-coarse",
            "twosat-sharp", "hom-k3", "witness", "model-relation", "round-trip"};
}

std::vector<int> verify_preset_criteria(const std::string& name) {
    if (name == "all") {
        std::vector<int> all;
        for (int i = 1; i <= kCriterionCount; ++i) all.push_back(i);
        return all;
    }
    if (name.size() > 2 && name.rfind("ac", 0) == 0) {
        try {
            const int id = std::stoi(name.substr(2));
            if (id >= 1 && id <= kCriterionCount && std::to_string(id) == name.substr(2)) return {id};
        } catch (const std::exception&) {
        }
    }
    const auto names = verify_preset_names();
    for (std::size_t i = 1; i < names.size(); ++i)
        if (names[i] == name) return {static_cast<int>(i)};
    throw InvalidInput("unknown verify preset '" + name + "'");
}

std::string format_result(const CriterionResult& r) {
    return fmt("[%s] AC%d %s (%.1f s): ", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds) + r.detail;
}

}  // namespace rcsp
