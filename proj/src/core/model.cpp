#include "rcsp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "rcsp/error.hpp"

namespace rcsp {

// ---------------------------------------------------------------- Rational

namespace {

using u128 = unsigned __int128;

std::uint64_t narrow(u128 x) {
    if (x > static_cast<u128>(~std::uint64_t{0})) throw InvalidInput("rational overflow");
    return static_cast<std::uint64_t>(x);
}

u128 gcd128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Rational make_reduced(u128 num, u128 den) {
    if (den == 0) throw InvalidInput("rational with zero denominator");
    u128 g = gcd128(num, den);
    if (g == 0) g = 1;
    return Rational(narrow(num / g), narrow(den / g));
}

}  // namespace

Rational::Rational(std::uint64_t n, std::uint64_t d) {
    if (d == 0) throw InvalidInput("rational with zero denominator");
    std::uint64_t g = std::gcd(n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::approximate(double x, std::uint64_t max_den) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("cannot approximate " + std::to_string(x));
    // Continued-fraction convergents, finishing with the best semiconvergent.
    std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double r = x;
    for (int iter = 0; iter < 64; ++iter) {
        double a_f = std::floor(r);
        if (a_f > 1e18) break;
        auto a = static_cast<std::uint64_t>(a_f);
        if (q1 != 0 && a > (max_den - q0) / q1) {
            std::uint64_t t = (max_den - q0) / q1;
            Rational semi(p0 + t * p1, q0 + t * q1);
            Rational conv(p1, q1);
            return std::abs(semi.value() - x) < std::abs(conv.value() - x) ? semi : conv;
        }
        std::uint64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        double frac = r - a_f;
        if (frac < 1e-15 * std::max(1.0, r)) break;
        r = 1.0 / frac;
    }
    return Rational(p1, q1);
}

Rational operator+(Rational a, Rational b) {
    return make_reduced(static_cast<u128>(a.num) * b.den + static_cast<u128>(b.num) * a.den,
                        static_cast<u128>(a.den) * b.den);
}

Rational operator-(Rational a, Rational b) {
    u128 lhs = static_cast<u128>(a.num) * b.den;
    u128 rhs = static_cast<u128>(b.num) * a.den;
    if (rhs > lhs) throw InvalidInput("negative rational");
    return make_reduced(lhs - rhs, static_cast<u128>(a.den) * b.den);
}

Rational operator*(Rational a, Rational b) {
    return make_reduced(static_cast<u128>(a.num) * b.num, static_cast<u128>(a.den) * b.den);
}

// ------------------------------------------------------ ConstraintTemplate

ConstraintTemplate::ConstraintTemplate(int d, int k, std::vector<std::vector<Value>> restrictions)
    : d_(d), k_(k), restrictions_(std::move(restrictions)) {
    if (d < 1 || d > kMaxDomain) throw InvalidInput("domain size must be in 1.." + std::to_string(kMaxDomain));
    if (k < 1) throw InvalidInput("arity must be >= 1");
    std::size_t table = 1;
    for (int i = 0; i < k; ++i) {
        table *= static_cast<std::size_t>(d);
        if (table > kMaxTemplateTable) throw InvalidInput("d^k too large for a template table");
    }
    forbidden_.assign(table, 0);
    for (const auto& r : restrictions_) {
        if (static_cast<int>(r.size()) != k)
            throw InvalidInput("restriction has length " + std::to_string(r.size()) + ", expected " +
                               std::to_string(k));
        for (Value v : r)
            if (v < 1 || v > d) throw InvalidInput("restriction value " + std::to_string(v) + " outside 1.." + std::to_string(d));
        std::size_t code = encode(r);
        if (forbidden_[code]) throw InvalidInput("duplicate restriction");
        forbidden_[code] = 1;
    }
    std::sort(restrictions_.begin(), restrictions_.end());
}

bool ConstraintTemplate::satisfied(std::span<const Value> tuple) const {
    if (static_cast<int>(tuple.size()) != k_)
        throw InvalidInput("tuple length " + std::to_string(tuple.size()) + " does not match arity " +
                           std::to_string(k_));
    for (Value v : tuple)
        if (v < 1 || v > d_) throw InvalidInput("value " + std::to_string(v) + " outside 1.." + std::to_string(d_));
    return !forbids_code(encode(tuple));
}

bool template_satisfied(const ConstraintTemplate& t, std::span<const Value> tuple) { return t.satisfied(tuple); }

// -------------------------------------------------- ConstraintDistribution

ConstraintDistribution::ConstraintDistribution(std::vector<Entry> entries) : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidInput("distribution needs at least one template");
    d_ = entries_.front().tmpl.domain_size();
    k_ = entries_.front().tmpl.arity();
    double total = 0.0;
    Rational exact(0, 1);
    bool exact_ok = true;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.tmpl.domain_size() != d_ || e.tmpl.arity() != k_)
            throw InvalidInput("templates in a distribution must share (d, k)");
        if (e.probability.num == 0 || e.probability.num > e.probability.den)
            throw InvalidInput("template probability must lie in (0, 1]");
        for (std::size_t j = 0; j < i; ++j)
            if (entries_[j].tmpl == e.tmpl) throw InvalidInput("duplicate template in distribution");
        total += e.probability.value();
        cumulative_.push_back(total);
        if (exact_ok) {
            try {
                exact = exact + e.probability;
            } catch (const InvalidInput&) {
                exact_ok = false;
            }
        }
    }
    if (exact_ok ? !(exact == Rational(1, 1)) : std::abs(total - 1.0) > 1e-12)
        throw InvalidInput("template probabilities must sum to 1 (got " + std::to_string(total) + ")");
    cumulative_.back() = 1.0;
}

std::vector<ConstraintTemplate> ConstraintDistribution::templates() const {
    std::vector<ConstraintTemplate> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.tmpl);
    return out;
}

std::size_t ConstraintDistribution::sample_index(Rng& rng) const {
    if (entries_.size() == 1) return 0;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

// ------------------------------------------------------------- CspInstance

CspInstance::CspInstance(int n, int d, int k, std::vector<ConstraintTemplate> templates,
                         std::vector<Constraint> constraints, std::vector<DomainMask> domains)
    : n_(n), d_(d), k_(k), templates_(std::move(templates)), constraints_(std::move(constraints)),
      domains_(std::move(domains)) {
    if (n < 0) throw InvalidInput("variable count must be >= 0");
    if (d < 1 || d > kMaxDomain) throw InvalidInput("domain size must be in 1.." + std::to_string(kMaxDomain));
    if (k < 1) throw InvalidInput("arity must be >= 1");
    for (const auto& t : templates_)
        if (t.domain_size() != d || t.arity() != k) throw InvalidInput("template (d, k) does not match instance");
    if (domains_.empty()) domains_.assign(static_cast<std::size_t>(n), full_mask(d));
    if (static_cast<int>(domains_.size()) != n) throw InvalidInput("one domain per variable required");
    for (auto& m : domains_)
        if (m & ~full_mask(d)) throw InvalidInput("domain contains a value outside 1..d");
    for (const auto& c : constraints_) {
        if (static_cast<int>(c.vars.size()) != k) throw InvalidInput("constraint scope does not have k variables");
        for (Var v : c.vars)
            if (v < 1 || v > n) throw InvalidInput("constraint variable " + std::to_string(v) + " outside 1..n");
        if (c.tmpl < 0 || c.tmpl >= static_cast<int>(templates_.size()))
            throw InvalidInput("constraint refers to unknown template " + std::to_string(c.tmpl));
    }
    std::sort(constraints_.begin(), constraints_.end());
}

bool CspInstance::trivially_unsat() const noexcept {
    return std::any_of(domains_.begin(), domains_.end(), [](DomainMask m) { return m == 0; });
}

bool CspInstance::is_simple() const {
    std::vector<std::vector<Var>> sets;
    sets.reserve(constraints_.size());
    for (const auto& c : constraints_) {
        auto s = c.vars;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
        sets.push_back(std::move(s));
    }
    std::sort(sets.begin(), sets.end());
    return std::adjacent_find(sets.begin(), sets.end()) == sets.end();
}

bool evaluate(const CspInstance& instance, const Assignment& a) {
    const int n = instance.num_vars();
    if (static_cast<int>(a.size()) != n) throw InvalidInput("assignment is not total over the instance variables");
    for (Var v = 1; v <= n; ++v) {
        Value x = a[v];
        if (x < 1 || x > instance.domain_size()) throw InvalidInput("assignment value outside 1..d for variable " + std::to_string(v));
        if (!(instance.domain(v) & value_bit(x))) return false;
    }
    std::vector<Value> tuple(static_cast<std::size_t>(instance.arity()));
    for (const auto& c : instance.constraints()) {
        for (std::size_t i = 0; i < c.vars.size(); ++i) tuple[i] = a[c.vars[i]];
        const auto& t = instance.tmpl_of(c);
        if (t.forbids_code(t.encode(tuple))) return false;
    }
    return true;
}

// ---------------------------------------------------------------- samplers

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<u128>(~std::uint64_t{0})) throw InvalidInput("binomial coefficient overflows 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability must lie in [0, 1]");
}

/// Visits the indices in [0, total) selected by independent p-coins, using
/// geometric skips so the cost is proportional to the number selected.
template <class Fn>
void for_each_bernoulli(std::uint64_t total, double p, Rng& rng, Fn&& fn) {
    if (p <= 0.0 || total == 0) return;
    if (p >= 1.0) {
        for (std::uint64_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::geometric_distribution<std::uint64_t> skip(p);
    std::uint64_t i = 0;
    while (true) {
        std::uint64_t s = skip(rng);
        if (s >= total - i) return;
        i += s;
        fn(i);
        ++i;
        if (i >= total) return;
    }
}

/// Colex unranking: the k-subset (0-based, ascending) with the given rank.
void unrank_subset(std::uint64_t rank, int n, int k, std::vector<Var>& out) {
    out.assign(static_cast<std::size_t>(k), 0);
    for (int i = k; i >= 1; --i) {
        // Largest a in [i-1, n-1] with C(a, i) <= rank.
        std::uint64_t lo = static_cast<std::uint64_t>(i - 1), hi = static_cast<std::uint64_t>(n - 1);
        while (lo < hi) {
            std::uint64_t mid = lo + (hi - lo + 1) / 2;
            if (binomial(mid, static_cast<std::uint64_t>(i)) <= rank) lo = mid;
            else hi = mid - 1;
        }
        out[static_cast<std::size_t>(i - 1)] = static_cast<Var>(lo);
        rank -= binomial(lo, static_cast<std::uint64_t>(i));
    }
}

std::uint64_t falling_factorial(std::uint64_t n, int k) {
    u128 r = 1;
    for (int i = 0; i < k; ++i) {
        r *= (n - static_cast<std::uint64_t>(i));
        if (r > static_cast<u128>(~std::uint64_t{0})) throw InvalidInput("too many ordered tuples");
    }
    return static_cast<std::uint64_t>(r);
}

}  // namespace

CspInstance sample_csp(int n, double p, const ConstraintDistribution& dist, Seed seed) {
    check_probability(p);
    const int k = dist.arity();
    if (n < k) throw InvalidInput("need n >= k");
    Rng rng = make_rng(seed);
    std::vector<Constraint> constraints;
    std::vector<Var> subset;
    const std::uint64_t total = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
    for_each_bernoulli(total, p, rng, [&](std::uint64_t rank) {
        unrank_subset(rank, n, k, subset);
        for (auto& v : subset) v += 1;
        std::shuffle(subset.begin(), subset.end(), rng);
        Constraint c;
        c.vars = subset;
        c.tmpl = static_cast<int>(dist.sample_index(rng));
        constraints.push_back(std::move(c));
    });
    return CspInstance(n, dist.domain_size(), k, dist.templates(), std::move(constraints));
}

CspInstance sample_hat_csp(int n, double p, const ConstraintDistribution& dist, Seed seed) {
    check_probability(p);
    const int k = dist.arity();
    if (n < k) throw InvalidInput("need n >= k");
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    const std::uint64_t tuples = falling_factorial(static_cast<std::uint64_t>(n), k);
    // Encoded ordered tuples must fit in 64 bits for the duplicate check.
    if (std::pow(static_cast<double>(n), k) > 1.8e19) throw InvalidInput("n^k too large for the hat sampler");

    Rng rng = make_rng(seed);
    std::vector<Constraint> constraints;
    std::unordered_set<std::uint64_t> used;
    std::vector<Var> tuple(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < dist.size(); ++j) {
        const double q = dist.probability(j).value() * p / kfact;
        if (q > 1.0) throw InvalidInput("P(C) * p / k! exceeds 1");
        if (q <= 0.0) continue;
        std::uint64_t count = q >= 1.0 ? tuples : std::binomial_distribution<std::uint64_t>(tuples, q)(rng);
        used.clear();
        std::uniform_int_distribution<int> pick(1, n);
        while (used.size() < count) {
            std::uint64_t code = 0;
            for (int i = 0; i < k; ++i) {
                Var v;
                do {
                    v = pick(rng);
                } while (std::find(tuple.begin(), tuple.begin() + i, v) != tuple.begin() + i);
                tuple[static_cast<std::size_t>(i)] = v;
                code = code * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(v - 1);
            }
            if (!used.insert(code).second) continue;
            Constraint c;
            c.vars = tuple;
            c.tmpl = static_cast<int>(j);
            constraints.push_back(std::move(c));
        }
    }
    return CspInstance(n, dist.domain_size(), k, dist.templates(), std::move(constraints));
}

CspInstance plant(const CspInstance& instance, const CspInstance& pattern, Seed seed) {
    if (pattern.domain_size() != instance.domain_size() || pattern.arity() != instance.arity())
        throw InvalidInput("planted CSP must share (d, k) with the instance");
    const int n = instance.num_vars();
    const int r = pattern.num_vars();
    if (r > n) throw InvalidInput("planted CSP has more variables than the instance");

    Rng rng = make_rng(seed);
    // Uniform ordered r-tuple of distinct variables: prefix of a partial shuffle.
    std::vector<Var> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 1);
    for (int i = 0; i < r; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
    }

    auto templates = instance.templates();
    std::vector<int> remap;
    for (const auto& t : pattern.templates()) {
        auto it = std::find(templates.begin(), templates.end(), t);
        if (it == templates.end()) {
            templates.push_back(t);
            it = templates.end() - 1;
        }
        remap.push_back(static_cast<int>(it - templates.begin()));
    }
    auto constraints = instance.constraints();
    for (const auto& c : pattern.constraints()) {
        Constraint placed;
        placed.tmpl = remap[static_cast<std::size_t>(c.tmpl)];
        for (Var v : c.vars) placed.vars.push_back(pool[static_cast<std::size_t>(v - 1)]);
        constraints.push_back(std::move(placed));
    }
    auto domains = instance.domains();
    for (Var v = 1; v <= r; ++v) domains[static_cast<std::size_t>(pool[static_cast<std::size_t>(v - 1)] - 1)] &= pattern.domain(v);
    return CspInstance(n, instance.domain_size(), instance.arity(), std::move(templates), std::move(constraints),
                       std::move(domains));
}

namespace {

template <class Op>
CspInstance restrict_domains(const CspInstance& instance, std::span<const std::pair<Var, Value>> pairs, Op op) {
    auto domains = instance.domains();
    for (auto [v, x] : pairs) {
        if (v < 1 || v > instance.num_vars()) throw InvalidInput("variable " + std::to_string(v) + " outside 1..n");
        if (x < 1 || x > instance.domain_size()) throw InvalidInput("value " + std::to_string(x) + " outside 1..d");
        auto& m = domains[static_cast<std::size_t>(v - 1)];
        m = op(m, value_bit(x));
    }
    return CspInstance(instance.num_vars(), instance.domain_size(), instance.arity(), instance.templates(),
                       instance.constraints(), std::move(domains));
}

}  // namespace

CspInstance force_values(const CspInstance& instance, std::span<const std::pair<Var, Value>> pairs) {
    return restrict_domains(instance, pairs, [](DomainMask m, DomainMask bit) { return m & bit; });
}

CspInstance forbid_values(const CspInstance& instance, std::span<const std::pair<Var, Value>> pairs) {
    return restrict_domains(instance, pairs, [](DomainMask m, DomainMask bit) { return m & ~bit; });
}

// ----------------------------------------------------------------- Digraph

std::size_t Digraph::two_cycles() const {
    std::size_t count = 0;
    for (auto [u, v] : arcs)
        if (u < v && std::binary_search(arcs.begin(), arcs.end(), std::pair{v, u})) ++count;
    return count;
}

std::vector<std::pair<Var, Var>> Digraph::underlying_edges() const {
    std::vector<std::pair<Var, Var>> edges;
    edges.reserve(arcs.size());
    for (auto [u, v] : arcs) edges.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

Digraph sample_digraph(int n, double p, Seed seed) {
    check_probability(p);
    if (n < 0) throw InvalidInput("vertex count must be >= 0");
    Digraph g;
    g.n = n;
    if (n < 2) return g;
    Rng rng = make_rng(seed);
    const std::uint64_t m = static_cast<std::uint64_t>(n - 1);
    for_each_bernoulli(static_cast<std::uint64_t>(n) * m, p, rng, [&](std::uint64_t idx) {
        Var u = static_cast<Var>(idx / m);
        Var w = static_cast<Var>(idx % m);
        if (w >= u) ++w;
        g.arcs.emplace_back(u + 1, w + 1);
    });
    std::sort(g.arcs.begin(), g.arcs.end());
    return g;
}

}  // namespace rcsp
