#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcsp/model.hpp"

namespace rcsp {

/// d x d expected one-step forcing weights per unit of c; entry (a, b) is
/// stored at w[a-1][b-1].
struct MeanMatrix {
    int d = 0;
    std::vector<std::vector<double>> w;

    double at(Value from, Value to) const { return w[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)]; }
    MeanMatrix scaled(double c) const;
};

/// Sum over templates of P(C) times the fraction of the two orientations in
/// which C, given one variable = from, leaves `to` as the only value of the other.
double forcing_weight(const ConstraintDistribution& dist, Value from, Value to);
MeanMatrix mean_matrix(const ConstraintDistribution& dist);

/// Largest eigenvalue of a square nonnegative matrix. Power iteration on
/// the shifted matrix A + I per strongly connected block, stopped when the
/// Collatz-Wielandt bounds agree to within `tol`.
double spectral_radius(const std::vector<std::vector<double>>& a, int max_iter = 200, double tol = 1e-12);

enum class Criticality { subcritical, critical, supercritical };

const char* to_string(Criticality c) noexcept;

inline constexpr double kCriticalTol = 1e-9;

struct CriticalityReport {
    int d = 0;
    double c = 0.0;
    MeanMatrix w;
    /// pair[a-1][b-1] labels F_{a,b}.
    std::vector<std::vector<Criticality>> pair;
    /// f_delta[a-1] labels F_a.
    std::vector<Criticality> f_delta;
    std::vector<double> critical_constants;

    Criticality label(Value from, Value to) const {
        return pair[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)];
    }
};

/// F_{a,b} is supercritical when a strongly connected block of the forcing
/// graph (edges where W > 0) with radius(cW) > 1 is reachable from a and
/// reaches b; critical when the best such block sits at radius 1 within
/// tolerance; otherwise subcritical. k = 2 only.
CriticalityReport classify(const ConstraintDistribution& dist, double c);

/// 1 / radius for every block with positive radius, sorted and deduplicated.
std::vector<double> critical_constants(const ConstraintDistribution& dist);

struct GrowthCell {
    int n = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    double std_error = 0.0;
};

/// Mean |F_{from,to}(v)| for a uniformly random v of a fresh simple-model
/// instance at p = c/n, per n. Trial t of the i-th n uses derive(seed, i, t).
std::vector<GrowthCell> monte_carlo_growth(const ConstraintDistribution& dist, double c, Value from, Value to,
                                           const std::vector<int>& n_list, std::size_t trials, Seed seed,
                                           unsigned workers = 1);

/// Smallest value a such that `m` cannot be satisfied without a and F_{a,a}
/// is supercritical at c. Requires d = 3, k = 2 and m unicyclic.
std::optional<Value> blocking_witness(const ConstraintDistribution& dist, double c, const CspInstance& m);

/// {"c", "d", "W", "pairs": [{delta, gamma, label}], "f_delta": [{delta, label}], "critical_constants"}
std::string report_to_json(const CriticalityReport& report);

}  // namespace rcsp
