#include "rcsp/criticality.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <json.hpp>

#include "parallel.hpp"
#include "rcsp/error.hpp"
#include "rcsp/hypergraph.hpp"
#include "rcsp/solver.hpp"

namespace rcsp {

const char* to_string(Criticality c) noexcept {
    switch (c) {
        case Criticality::subcritical: return "subcritical";
        case Criticality::critical: return "critical";
        case Criticality::supercritical: return "supercritical";
    }
    return "?";
}

MeanMatrix MeanMatrix::scaled(double c) const {
    MeanMatrix out = *this;
    for (auto& row : out.w)
        for (double& x : row) x *= c;
    return out;
}

namespace {

void require_binary(int k) {
    if (k != 2) throw Unsupported("criticality analysis is defined for k = 2 only");
}

// Values of the second variable compatible with the first = a, or of the
// first compatible with the second = a when `first_known` is false.
DomainMask compatible(const ConstraintTemplate& t, Value a, bool first_known) {
    DomainMask out = 0;
    Value tuple[2];
    for (Value b = 1; b <= t.domain_size(); ++b) {
        tuple[0] = first_known ? a : b;
        tuple[1] = first_known ? b : a;
        if (!t.forbids_code(t.encode(tuple))) out |= value_bit(b);
    }
    return out;
}

// Tarjan's algorithm; returns the component id of every node, numbered in
// reverse topological order.
std::vector<int> strong_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
        comp(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
    int counter = 0;
    int comps = 0;
    std::function<void(int)> visit = [&](int v) {
        index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
        stack.push_back(v);
        on_stack[static_cast<std::size_t>(v)] = 1;
        for (int w : adj[static_cast<std::size_t>(v)]) {
            if (index[static_cast<std::size_t>(w)] < 0) {
                visit(w);
                low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(w)]);
            } else if (on_stack[static_cast<std::size_t>(w)]) {
                low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
            }
        }
        if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[static_cast<std::size_t>(w)] = 0;
                comp[static_cast<std::size_t>(w)] = comps;
            } while (w != v);
            ++comps;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[static_cast<std::size_t>(v)] < 0) visit(v);
    return comp;
}

std::vector<std::vector<int>> positive_graph(const std::vector<std::vector<double>>& a) {
    std::vector<std::vector<int>> adj(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[i][j] > 0.0) adj[i].push_back(static_cast<int>(j));
    return adj;
}

// Radius of one irreducible block by shifted power iteration.
double block_radius(const std::vector<std::vector<double>>& a, const std::vector<int>& nodes, int max_iter, double tol) {
    const std::size_t m = nodes.size();
    bool any = false;
    for (int i : nodes)
        for (int j : nodes)
            if (a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] > 0.0) any = true;
    if (!any) return 0.0;
    std::vector<double> x(m, 1.0), y(m);
    double lo = 0.0, hi = 0.0;
    // Keep iterating past max_iter only while the bounds have not met; the
    // hard stop guards against pathological inputs.
    const int hard_cap = std::max(max_iter, 100000);
    for (int it = 0; it < hard_cap; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = x[i];
            for (std::size_t j = 0; j < m; ++j)
                s += a[static_cast<std::size_t>(nodes[i])][static_cast<std::size_t>(nodes[j])] * x[j];
            y[i] = s;
        }
        lo = INFINITY;
        hi = 0.0;
        double norm = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double r = y[i] / x[i];
            lo = std::min(lo, r);
            hi = std::max(hi, r);
            norm = std::max(norm, y[i]);
        }
        for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
        if (hi - lo <= tol * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi) - 1.0;
}

struct Blocks {
    std::vector<int> comp;
    std::vector<std::vector<int>> members;
    std::vector<double> radius;
    std::vector<std::vector<char>> reach;  // reach[a][b]: b reachable from a in >= 0 steps
};

Blocks analyse(const std::vector<std::vector<double>>& a, int max_iter = 200, double tol = 1e-12) {
    Blocks b;
    const auto adj = positive_graph(a);
    b.comp = strong_components(adj);
    const int count = b.comp.empty() ? 0 : *std::max_element(b.comp.begin(), b.comp.end()) + 1;
    b.members.resize(static_cast<std::size_t>(count));
    for (std::size_t v = 0; v < b.comp.size(); ++v) b.members[static_cast<std::size_t>(b.comp[v])].push_back(static_cast<int>(v));
    for (const auto& mem : b.members) b.radius.push_back(block_radius(a, mem, max_iter, tol));
    const std::size_t n = a.size();
    b.reach.assign(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<int> stack{static_cast<int>(s)};
        b.reach[s][s] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[static_cast<std::size_t>(v)])
                if (!b.reach[s][static_cast<std::size_t>(w)]) {
                    b.reach[s][static_cast<std::size_t>(w)] = 1;
                    stack.push_back(w);
                }
        }
    }
    return b;
}

}  // namespace

double forcing_weight(const ConstraintDistribution& dist, Value from, Value to) {
    require_binary(dist.arity());
    const int d = dist.domain_size();
    if (from < 1 || from > d || to < 1 || to > d) throw InvalidInput("value outside 1..d");
    double total = 0.0;
    for (const auto& e : dist.entries()) {
        const DomainMask fwd = compatible(e.tmpl, from, true);
        const DomainMask bwd = compatible(e.tmpl, from, false);
        const double hits = (fwd == value_bit(to) ? 0.5 : 0.0) + (bwd == value_bit(to) ? 0.5 : 0.0);
        total += e.probability.value() * hits;
    }
    return total;
}

MeanMatrix mean_matrix(const ConstraintDistribution& dist) {
    require_binary(dist.arity());
    MeanMatrix m;
    m.d = dist.domain_size();
    m.w.assign(static_cast<std::size_t>(m.d), std::vector<double>(static_cast<std::size_t>(m.d), 0.0));
    for (Value a = 1; a <= m.d; ++a)
        for (Value b = 1; b <= m.d; ++b)
            m.w[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = forcing_weight(dist, a, b);
    return m;
}

double spectral_radius(const std::vector<std::vector<double>>& a, int max_iter, double tol) {
    for (const auto& row : a) {
        if (row.size() != a.size()) throw InvalidInput("matrix must be square");
        for (double x : row)
            if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("matrix must be finite and nonnegative");
    }
    if (a.empty()) return 0.0;
    const auto b = analyse(a, max_iter, tol);
    return *std::max_element(b.radius.begin(), b.radius.end());
}

std::vector<double> critical_constants(const ConstraintDistribution& dist) {
    const auto w = mean_matrix(dist);
    const auto b = analyse(w.w);
    std::vector<double> out;
    for (double r : b.radius)
        if (r > 0.0) out.push_back(1.0 / r);
    std::sort(out.begin(), out.end());
    std::vector<double> dedup;
    for (double x : out)
        if (dedup.empty() || std::abs(x - dedup.back()) > kCriticalTol) dedup.push_back(x);
    return dedup;
}

CriticalityReport classify(const ConstraintDistribution& dist, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidInput("c must be finite and >= 0");
    CriticalityReport rep;
    rep.d = dist.domain_size();
    rep.c = c;
    rep.w = mean_matrix(dist);
    const auto b = analyse(rep.w.w);
    for (double r : b.radius)
        if (r > 0.0) rep.critical_constants.push_back(1.0 / r);
    std::sort(rep.critical_constants.begin(), rep.critical_constants.end());
    rep.critical_constants.erase(
        std::unique(rep.critical_constants.begin(), rep.critical_constants.end(),
                    [](double x, double y) { return std::abs(x - y) <= kCriticalTol; }),
        rep.critical_constants.end());

    auto block_label = [&](std::size_t blk) {
        const double r = b.radius[blk];
        if (r <= 0.0) return Criticality::subcritical;
        const double crit = 1.0 / r;
        if (std::abs(c - crit) <= kCriticalTol) return Criticality::critical;
        return c * r > 1.0 ? Criticality::supercritical : Criticality::subcritical;
    };
    const std::size_t d = static_cast<std::size_t>(rep.d);
    rep.pair.assign(d, std::vector<Criticality>(d, Criticality::subcritical));
    rep.f_delta.assign(d, Criticality::subcritical);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t g = 0; g < d; ++g) {
            Criticality best = Criticality::subcritical;
            for (std::size_t blk = 0; blk < b.members.size(); ++blk) {
                const auto& mem = b.members[blk];
                const bool entered = std::any_of(mem.begin(), mem.end(), [&](int mu) { return b.reach[a][static_cast<std::size_t>(mu)]; });
                const bool leaves = std::any_of(mem.begin(), mem.end(), [&](int mu) { return b.reach[static_cast<std::size_t>(mu)][g]; });
                if (!entered || !leaves) continue;
                best = std::max(best, block_label(blk));
            }
            rep.pair[a][g] = best;
            rep.f_delta[a] = std::max(rep.f_delta[a], best);
        }
    }
    return rep;
}

std::vector<GrowthCell> monte_carlo_growth(const ConstraintDistribution& dist, double c, Value from, Value to,
                                           const std::vector<int>& n_list, std::size_t trials, Seed seed,
                                           unsigned workers) {
    require_binary(dist.arity());
    const int d = dist.domain_size();
    if (from < 1 || from > d || to < 1 || to > d) throw InvalidInput("value outside 1..d");
    if (trials == 0) throw InvalidInput("trials must be >= 1");
    std::vector<GrowthCell> out;
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const int n = n_list[i];
        if (n < 2) throw InvalidInput("n must be >= 2");
        const double p = c / n;
        if (p < 0.0 || p > 1.0) throw InvalidInput("c/n must lie in [0,1]");
        std::vector<double> sizes(trials, 0.0);
        detail::parallel_for(trials, workers, [&](std::size_t t) {
            const Seed s = derive(seed, i, t);
            const auto inst = sample_csp(n, p, dist, s);
            auto rng = make_rng(derive(s, 1));
            std::uniform_int_distribution<int> pick(1, n);
            const auto closure = implication_closure(inst, pick(rng), from);
            sizes[t] = static_cast<double>(closure.forced_to(to).size());
        });
        double mean = 0.0;
        for (double x : sizes) mean += x;
        mean /= static_cast<double>(trials);
        double var = 0.0;
        for (double x : sizes) var += (x - mean) * (x - mean);
        var = trials > 1 ? var / static_cast<double>(trials - 1) : 0.0;
        out.push_back({n, trials, mean, std::sqrt(var / static_cast<double>(trials))});
    }
    return out;
}

std::optional<Value> blocking_witness(const ConstraintDistribution& dist, double c, const CspInstance& m) {
    if (dist.domain_size() != 3 || dist.arity() != 2) throw InvalidInput("witness check needs d = 3 and k = 2");
    if (m.domain_size() != 3 || m.arity() != 2) throw InvalidInput("M must have d = 3 and k = 2");
    if (cycle_rank(constraint_hypergraph(m)) != 1) throw InvalidInput("M must be unicyclic");
    const auto rep = classify(dist, c);
    for (Value a = 1; a <= 3; ++a)
        if (!solve_excluding_value(m, a) && rep.label(a, a) == Criticality::supercritical) return a;
    return std::nullopt;
}

std::string report_to_json(const CriticalityReport& report) {
    nlohmann::json j;
    j["c"] = report.c;
    j["d"] = report.d;
    j["W"] = report.w.w;
    j["pairs"] = nlohmann::json::array();
    for (int a = 1; a <= report.d; ++a)
        for (int g = 1; g <= report.d; ++g)
            j["pairs"].push_back({{"delta", a}, {"gamma", g}, {"label", to_string(report.label(a, g))}});
    j["f_delta"] = nlohmann::json::array();
    for (int a = 1; a <= report.d; ++a)
        j["f_delta"].push_back({{"delta", a}, {"label", to_string(report.f_delta[static_cast<std::size_t>(a - 1)])}});
    j["critical_constants"] = report.critical_constants;
    return j.dump(2);
}

}  // namespace rcsp
