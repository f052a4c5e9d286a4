#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcsp/model.hpp"
#include "rcsp/solver.hpp"

namespace rcsp {

enum class Model { simple, hat };

const char* to_string(Model m) noexcept;
/// "simple" or "hat"; throws InvalidInput otherwise.
Model model_from_string(const std::string& s);

/// p = c / n^(k-1).
double density_to_p(double c, int n, int k);

CspInstance sample_model(Model model, int n, double p, const ConstraintDistribution& dist, Seed seed);

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval; z defaults to the two-sided 95% quantile.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct CellResult {
    int n = 0;
    double c = 0.0;
    std::size_t trials = 0;
    std::size_t sat = 0;
    std::size_t unsat = 0;
    std::size_t indeterminate = 0;
    /// sat / (sat + unsat); 1 when every trial was indeterminate.
    double phat = 1.0;
    Interval ci;

    std::size_t decided() const noexcept { return sat + unsat; }
};

struct RunOptions {
    SolveOptions solver;
    unsigned workers = 1;
};

/// Trial t samples with derive(seed, t) and solves under the node budget.
CellResult estimate_sat_prob(const ConstraintDistribution& dist, Model model, int n, double c, std::size_t trials,
                             Seed seed, const RunOptions& options = {});

struct ScanResult {
    std::string dist_tag;
    Model model = Model::simple;
    std::vector<int> n_list;
    std::vector<double> c_grid;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    /// Row-major: cells[i * c_grid.size() + j] holds (n_list[i], c_grid[j]).
    std::vector<CellResult> cells;

    const CellResult& cell(std::size_t ni, std::size_t cj) const { return cells.at(ni * c_grid.size() + cj); }
    std::size_t indeterminate() const;
    std::size_t total_trials() const;
};

/// Cell (i, j) runs estimate_sat_prob with seed derive(seed, i * |c_grid| + j).
ScanResult scan(const ConstraintDistribution& dist, const std::string& dist_tag, Model model,
                const std::vector<int>& n_list, const std::vector<double>& c_grid, std::size_t trials, Seed seed,
                const RunOptions& options = {});

/// Per-n nonincreasing fit of p-hat over the c grid (pool adjacent
/// violators, weighted by decided trials). Indexed like ScanResult::cells.
std::vector<double> monotone_smooth(const ScanResult& result);

enum class WindowKind {
    point,   // p-hat itself
    wide,    // outer edges: Wilson bounds must clear the levels
    narrow,  // inner edges: Wilson bounds merely touch the levels
};

struct Window {
    int n = 0;
    std::optional<double> c_lo;   // largest grid c still at or above the high level
    std::optional<double> c_hi;   // smallest grid c at or below the low level
    std::optional<double> width;  // unset when the grid does not bracket the crossing
    std::string note;
};

std::vector<Window> transition_window(const ScanResult& result, double hi = 0.8, double lo = 0.2,
                                      WindowKind kind = WindowKind::point);

enum class Verdict { shrinks, not_shrinking, inconclusive };

const char* to_string(Verdict v) noexcept;

struct SharpnessReport {
    Verdict verdict = Verdict::inconclusive;
    double ratio = 0.6;
    std::vector<Window> point;
    std::vector<Window> wide;
    std::vector<Window> narrow;
    std::string reason;
};

/// Compares the smallest and largest n. Shrinks when the widest window
/// consistent with the data at n_max is at most ratio times the narrowest
/// at n_min; not shrinking when even the narrowest at n_max exceeds ratio
/// times the widest at n_min; inconclusive otherwise or with fewer than 3 n.
SharpnessReport sharpness_verdict(const ScanResult& result, double ratio = 0.6, double hi = 0.8, double lo = 0.2);

struct ThresholdEstimate {
    double c = 0.0;
    double phat = 0.0;  // probability at the returned midpoint
    int probes = 0;
};

/// Bisection on a probability curve until the bracket is at most tol wide.
/// Throws InvalidInput unless prob(lo) > 0.5 > prob(hi).
ThresholdEstimate threshold_estimate(const std::function<double(double)>& prob, double lo, double hi, double tol);

/// Probe number i (0 = lower bracket, 1 = upper bracket, ...) estimates with
/// derive(seed, i) and `trials_per_probe` trials.
ThresholdEstimate threshold_estimate(const ConstraintDistribution& dist, Model model, int n, double lo, double hi,
                                     double tol, std::size_t trials_per_probe, Seed seed,
                                     const RunOptions& options = {});

/// `dist,model,n,c,trials,sat,indeterminate,phat,ci_lo,ci_hi`, preceded by
/// `# ` provenance lines.
std::string scan_to_csv(const ScanResult& result, const std::vector<std::string>& provenance = {});
std::string scan_to_json(const ScanResult& result, const SharpnessReport& sharpness);
/// Probability-vs-c curves, one polyline per n.
std::string scan_to_svg(const ScanResult& result);

}  // namespace rcsp
