#include "rcsp/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <sstream>

#include "parallel.hpp"
#include "rcsp/error.hpp"

namespace rcsp {

const char* to_string(Model m) noexcept { return m == Model::simple ? "simple" : "hat"; }

Model model_from_string(const std::string& s) {
    if (s == "simple") return Model::simple;
    if (s == "hat") return Model::hat;
    throw InvalidInput("unknown model '" + s + "' (expected simple or hat)");
}

double density_to_p(double c, int n, int k) {
    if (n < 1) throw InvalidInput("n must be >= 1");
    return c / std::pow(static_cast<double>(n), k - 1);
}

CspInstance sample_model(Model model, int n, double p, const ConstraintDistribution& dist, Seed seed) {
    return model == Model::simple ? sample_csp(n, p, dist, seed) : sample_hat_csp(n, p, dist, seed);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (ph + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

void finish(CellResult& cell) {
    const std::size_t decided = cell.decided();
    cell.phat = decided ? static_cast<double>(cell.sat) / static_cast<double>(decided) : 1.0;
    cell.ci = wilson_interval(cell.sat, decided);
}

void check_density(double c, int n, int k) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("c must be finite and >= 0");
    if (n < k) throw InvalidInput("n must be >= k");
    if (density_to_p(c, n, k) > 1.0) throw InvalidInput("p = c/n^(k-1) exceeds 1");
}

}  // namespace

CellResult estimate_sat_prob(const ConstraintDistribution& dist, Model model, int n, double c, std::size_t trials,
                             Seed seed, const RunOptions& options) {
    if (trials == 0) throw InvalidInput("trials must be >= 1");
    check_density(c, n, dist.arity());
    const double p = density_to_p(c, n, dist.arity());
    std::vector<SolveStatus> status(trials);
    detail::parallel_for(trials, options.workers, [&](std::size_t t) {
        status[t] = solve(sample_model(model, n, p, dist, derive(seed, t)), options.solver).status;
    });
    CellResult cell;
    cell.n = n;
    cell.c = c;
    cell.trials = trials;
    for (auto s : status) {
        if (s == SolveStatus::sat) ++cell.sat;
        else if (s == SolveStatus::unsat) ++cell.unsat;
        else ++cell.indeterminate;
    }
    finish(cell);
    return cell;
}

std::size_t ScanResult::indeterminate() const {
    std::size_t s = 0;
    for (const auto& c : cells) s += c.indeterminate;
    return s;
}

std::size_t ScanResult::total_trials() const {
    std::size_t s = 0;
    for (const auto& c : cells) s += c.trials;
    return s;
}

ScanResult scan(const ConstraintDistribution& dist, const std::string& dist_tag, Model model,
                const std::vector<int>& n_list, const std::vector<double>& c_grid, std::size_t trials, Seed seed,
                const RunOptions& options) {
    if (n_list.empty() || c_grid.empty()) throw InvalidInput("scan grid is empty");
    if (trials == 0) throw InvalidInput("trials must be >= 1");
    for (int n : n_list)
        for (double c : c_grid) check_density(c, n, dist.arity());

    ScanResult r;
    r.dist_tag = dist_tag;
    r.model = model;
    r.n_list = n_list;
    r.c_grid = c_grid;
    r.trials = trials;
    r.seed = seed.value;
    const std::size_t cells = n_list.size() * c_grid.size();
    // Flatten (cell, trial) so workers stay busy across cells.
    std::vector<SolveStatus> status(cells * trials);
    detail::parallel_for(status.size(), options.workers, [&](std::size_t idx) {
        const std::size_t cell = idx / trials;
        const std::size_t t = idx % trials;
        const int n = n_list[cell / c_grid.size()];
        const double c = c_grid[cell % c_grid.size()];
        const double p = density_to_p(c, n, dist.arity());
        status[idx] = solve(sample_model(model, n, p, dist, derive(derive(seed, cell), t)), options.solver).status;
    });
    for (std::size_t cell = 0; cell < cells; ++cell) {
        CellResult cr;
        cr.n = n_list[cell / c_grid.size()];
        cr.c = c_grid[cell % c_grid.size()];
        cr.trials = trials;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto s = status[cell * trials + t];
            if (s == SolveStatus::sat) ++cr.sat;
            else if (s == SolveStatus::unsat) ++cr.unsat;
            else ++cr.indeterminate;
        }
        finish(cr);
        r.cells.push_back(cr);
    }
    return r;
}

std::vector<double> monotone_smooth(const ScanResult& result) {
    std::vector<double> out(result.cells.size());
    const std::size_t m = result.c_grid.size();
    for (std::size_t i = 0; i < result.n_list.size(); ++i) {
        struct Block {
            double value;
            double weight;
            std::size_t count;
        };
        std::vector<Block> blocks;
        for (std::size_t j = 0; j < m; ++j) {
            const auto& cell = result.cell(i, j);
            blocks.push_back({cell.phat, std::max<double>(1.0, static_cast<double>(cell.decided())), 1});
            // Nonincreasing: merge while a later block exceeds an earlier one.
            while (blocks.size() > 1 && blocks[blocks.size() - 2].value < blocks.back().value) {
                auto b = blocks.back();
                blocks.pop_back();
                auto& a = blocks.back();
                a.value = (a.value * a.weight + b.value * b.weight) / (a.weight + b.weight);
                a.weight += b.weight;
                a.count += b.count;
            }
        }
        std::size_t j = 0;
        for (const auto& b : blocks)
            for (std::size_t t = 0; t < b.count; ++t) out[i * m + j++] = b.value;
    }
    return out;
}

std::vector<Window> transition_window(const ScanResult& result, double hi, double lo, WindowKind kind) {
    if (!(lo < hi)) throw InvalidInput("window levels need lo < hi");
    std::vector<Window> out;
    const std::size_t m = result.c_grid.size();
    for (std::size_t i = 0; i < result.n_list.size(); ++i) {
        Window w;
        w.n = result.n_list[i];
        for (std::size_t j = 0; j < m; ++j) {
            const auto& cell = result.cell(i, j);
            double high_side = cell.phat;
            double low_side = cell.phat;
            if (kind == WindowKind::wide) {
                high_side = cell.ci.lo;
                low_side = cell.ci.hi;
            } else if (kind == WindowKind::narrow) {
                high_side = cell.ci.hi;
                low_side = cell.ci.lo;
            }
            if (high_side >= hi) w.c_lo = cell.c;
            if (low_side <= lo && !w.c_hi) w.c_hi = cell.c;
        }
        if (!w.c_lo) w.note = "no grid point at or above the high level";
        else if (!w.c_hi) w.note = "no grid point at or below the low level";
        else if (*w.c_lo > *w.c_hi) {
            if (kind == WindowKind::narrow) {
                w.width = 0.0;
                w.note = "levels overlap";
            } else {
                w.note = "non-monotone estimates";
            }
        } else {
            w.width = *w.c_hi - *w.c_lo;
        }
        out.push_back(w);
    }
    return out;
}

const char* to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::shrinks: return "shrinks";
        case Verdict::not_shrinking: return "not shrinking";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

SharpnessReport sharpness_verdict(const ScanResult& result, double ratio, double hi, double lo) {
    SharpnessReport rep;
    rep.ratio = ratio;
    rep.point = transition_window(result, hi, lo, WindowKind::point);
    rep.wide = transition_window(result, hi, lo, WindowKind::wide);
    rep.narrow = transition_window(result, hi, lo, WindowKind::narrow);
    if (result.n_list.size() < 3) {
        rep.reason = "fewer than 3 values of n";
        return rep;
    }
    const auto [min_it, max_it] = std::minmax_element(result.n_list.begin(), result.n_list.end());
    const auto a = static_cast<std::size_t>(min_it - result.n_list.begin());
    const auto b = static_cast<std::size_t>(max_it - result.n_list.begin());
    const auto& wide_small = rep.wide[a].width;
    const auto& narrow_small = rep.narrow[a].width;
    const auto& wide_large = rep.wide[b].width;
    const auto& narrow_large = rep.narrow[b].width;
    char buf[256];
    if (wide_large && narrow_small && *wide_large <= ratio * *narrow_small) {
        rep.verdict = Verdict::shrinks;
        std::snprintf(buf, sizeof buf, "widest window at n=%d (%.4g) <= %.2f x narrowest at n=%d (%.4g)",
                      result.n_list[b], *wide_large, ratio, result.n_list[a], *narrow_small);
    } else if (narrow_large && wide_small && *narrow_large > ratio * *wide_small) {
        rep.verdict = Verdict::not_shrinking;
        std::snprintf(buf, sizeof buf, "narrowest window at n=%d (%.4g) > %.2f x widest at n=%d (%.4g)",
                      result.n_list[b], *narrow_large, ratio, result.n_list[a], *wide_small);
    } else if (!wide_large || !wide_small || !narrow_large || !narrow_small) {
        std::snprintf(buf, sizeof buf, "window undefined at n=%d or n=%d", result.n_list[a], result.n_list[b]);
    } else {
        std::snprintf(buf, sizeof buf, "confidence bands overlap the %.2f ratio", ratio);
    }
    rep.reason = buf;
    return rep;
}

ThresholdEstimate threshold_estimate(const std::function<double(double)>& prob, double lo, double hi, double tol) {
    if (!(lo < hi)) throw InvalidInput("threshold bracket needs lo < hi");
    if (!(tol > 0.0)) throw InvalidInput("tolerance must be > 0");
    ThresholdEstimate est;
    const double p_lo = prob(lo);
    const double p_hi = prob(hi);
    est.probes = 2;
    if (!(p_lo > 0.5) || !(p_hi < 0.5))
        throw InvalidInput("bracket does not straddle probability 0.5 (p(lo) = " + std::to_string(p_lo) +
                           ", p(hi) = " + std::to_string(p_hi) + ")");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double p = prob(mid);
        ++est.probes;
        if (p >= 0.5) lo = mid;
        else hi = mid;
    }
    est.c = 0.5 * (lo + hi);
    est.phat = prob(est.c);
    ++est.probes;
    return est;
}

ThresholdEstimate threshold_estimate(const ConstraintDistribution& dist, Model model, int n, double lo, double hi,
                                     double tol, std::size_t trials_per_probe, Seed seed, const RunOptions& options) {
    std::uint64_t probe = 0;
    return threshold_estimate(
        [&](double c) { return estimate_sat_prob(dist, model, n, c, trials_per_probe, derive(seed, probe++), options).phat; },
        lo, hi, tol);
}

std::string scan_to_csv(const ScanResult& result, const std::vector<std::string>& provenance) {
    std::ostringstream os;
    for (const auto& line : provenance) os << "# " << line << '\n';
    os << "dist,model,n,c,trials,sat,indeterminate,phat,ci_lo,ci_hi\n";
    char buf[256];
    for (const auto& cell : result.cells) {
        std::snprintf(buf, sizeof buf, ",%s,%d,%.6g,%zu,%zu,%zu,%.6f,%.6f,%.6f\n", to_string(result.model), cell.n,
                      cell.c, cell.trials, cell.sat, cell.indeterminate, cell.phat, cell.ci.lo, cell.ci.hi);
        os << result.dist_tag << buf;
    }
    return os.str();
}

namespace {

nlohmann::json window_json(const Window& w) {
    nlohmann::json j;
    j["n"] = w.n;
    j["c_lo"] = w.c_lo ? nlohmann::json(*w.c_lo) : nlohmann::json(nullptr);
    j["c_hi"] = w.c_hi ? nlohmann::json(*w.c_hi) : nlohmann::json(nullptr);
    j["width"] = w.width ? nlohmann::json(*w.width) : nlohmann::json(nullptr);
    if (!w.note.empty()) j["note"] = w.note;
    return j;
}

}  // namespace

std::string scan_to_json(const ScanResult& result, const SharpnessReport& sharpness) {
    nlohmann::json j;
    j["dist"] = result.dist_tag;
    j["model"] = to_string(result.model);
    j["n"] = result.n_list;
    j["c"] = result.c_grid;
    j["trials"] = result.trials;
    j["seed"] = result.seed;
    j["indeterminate"] = result.indeterminate();
    j["total_trials"] = result.total_trials();
    for (const char* key : {"point", "wide", "narrow"}) j["windows"][key] = nlohmann::json::array();
    for (const auto& w : sharpness.point) j["windows"]["point"].push_back(window_json(w));
    for (const auto& w : sharpness.wide) j["windows"]["wide"].push_back(window_json(w));
    for (const auto& w : sharpness.narrow) j["windows"]["narrow"].push_back(window_json(w));
    j["verdict"] = {{"result", to_string(sharpness.verdict)}, {"ratio", sharpness.ratio}, {"reason", sharpness.reason}};
    return j.dump(2);
}

std::string scan_to_svg(const ScanResult& result) {
    const double width = 640, height = 400, left = 60, right = 20, top = 20, bottom = 50;
    const double c_min = *std::min_element(result.c_grid.begin(), result.c_grid.end());
    double c_max = *std::max_element(result.c_grid.begin(), result.c_grid.end());
    if (c_max <= c_min) c_max = c_min + 1.0;
    auto x = [&](double c) { return left + (c - c_min) / (c_max - c_min) * (width - left - right); };
    auto y = [&](double p) { return top + (1.0 - p) * (height - top - bottom); };
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                  "font-size=\"12\">\n",
                  width, height);
    os << buf;
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  y(0), width - right, y(0));
    os << buf;
    std::snprintf(buf, sizeof buf, "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n", left,
                  y(0), left, y(1));
    os << buf;
    for (double p : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n", left - 6,
                      y(p) + 4, p);
        os << buf;
    }
    for (double c : {c_min, 0.5 * (c_min + c_max), c_max}) {
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.3g</text>\n", x(c),
                      y(0) + 18, c);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">c</text>\n",
                  0.5 * (left + width - right), height - 8);
    os << buf;
    for (std::size_t i = 0; i < result.n_list.size(); ++i) {
        const char* colour = colours[i % 6];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < result.c_grid.size(); ++j) {
            const auto& cell = result.cell(i, j);
            std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", j ? " " : "", x(cell.c), y(cell.phat));
            os << buf;
        }
        os << "\"/>\n";
        std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" fill=\"%s\">n=%d</text>\n", width - right - 70,
                      top + 16.0 * static_cast<double>(i + 1), colour, result.n_list[i]);
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace rcsp
