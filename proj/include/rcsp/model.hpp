#pragma once

// Constraint templates, distributions over them, CSP instances, and the
// samplers for the simple and hat random models.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rcsp/rng.hpp"

namespace rcsp {

/// Variables and values are 1-based throughout.
using Var = int;
using Value = int;

/// Per-variable allowed-value set; bit (v-1) set means value v is allowed.
using DomainMask = std::uint64_t;

inline constexpr int kMaxDomain = 64;
inline constexpr std::size_t kMaxTemplateTable = std::size_t{1} << 22;

constexpr DomainMask full_mask(int d) noexcept {
    return d >= 64 ? ~DomainMask{0} : ((DomainMask{1} << d) - 1);
}
constexpr DomainMask value_bit(Value v) noexcept { return DomainMask{1} << (v - 1); }

/// Nonnegative exact fraction, always stored reduced.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    Rational() = default;
    Rational(std::uint64_t n, std::uint64_t d);

    double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

    /// Closest fraction with denominator <= max_den (continued fractions).
    static Rational approximate(double x, std::uint64_t max_den = 1000000000ULL);

    friend Rational operator+(Rational a, Rational b);
    friend Rational operator-(Rational a, Rational b);
    friend Rational operator*(Rational a, Rational b);
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Arity-k constraint over domain {1..d}, given by its forbidden tuples.
class ConstraintTemplate {
public:
    ConstraintTemplate(int d, int k, std::vector<std::vector<Value>> restrictions);

    int domain_size() const noexcept { return d_; }
    int arity() const noexcept { return k_; }
    std::size_t num_restrictions() const noexcept { return restrictions_.size(); }
    /// Restrictions in lexicographic order.
    const std::vector<std::vector<Value>>& restrictions() const noexcept { return restrictions_; }

    /// Validating check: throws InvalidInput on arity or value mismatch.
    bool satisfied(std::span<const Value> tuple) const;

    /// Mixed-radix code of an (unchecked) tuple; value 1 maps to digit 0.
    std::size_t encode(std::span<const Value> tuple) const noexcept {
        std::size_t code = 0;
        for (Value v : tuple) code = code * static_cast<std::size_t>(d_) + static_cast<std::size_t>(v - 1);
        return code;
    }
    bool forbids_code(std::size_t code) const noexcept { return forbidden_[code] != 0; }
    std::size_t table_size() const noexcept { return forbidden_.size(); }

    friend bool operator==(const ConstraintTemplate& a, const ConstraintTemplate& b) {
        return a.d_ == b.d_ && a.k_ == b.k_ && a.restrictions_ == b.restrictions_;
    }

private:
    int d_;
    int k_;
    std::vector<std::vector<Value>> restrictions_;
    std::vector<std::uint8_t> forbidden_;
};

bool template_satisfied(const ConstraintTemplate& t, std::span<const Value> tuple);

/// Finite distribution over templates sharing one (d, k).
class ConstraintDistribution {
public:
    struct Entry {
        ConstraintTemplate tmpl;
        Rational probability;
    };

    explicit ConstraintDistribution(std::vector<Entry> entries);

    int domain_size() const noexcept { return d_; }
    int arity() const noexcept { return k_; }
    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    const ConstraintTemplate& tmpl(std::size_t i) const { return entries_.at(i).tmpl; }
    Rational probability(std::size_t i) const { return entries_.at(i).probability; }

    std::vector<ConstraintTemplate> templates() const;

    /// Index of a template drawn according to the probabilities.
    std::size_t sample_index(Rng& rng) const;

private:
    int d_;
    int k_;
    std::vector<Entry> entries_;
    std::vector<double> cumulative_;
};

struct Constraint {
    std::vector<Var> vars;  // ordered scope
    int tmpl = 0;           // index into the owning instance's template table

    friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

/// n variables with per-variable domains plus a list of constraints.
/// Constraints are kept in canonical order: by (scope, template id).
class CspInstance {
public:
    CspInstance(int n, int d, int k, std::vector<ConstraintTemplate> templates,
                std::vector<Constraint> constraints = {}, std::vector<DomainMask> domains = {});

    int num_vars() const noexcept { return n_; }
    int domain_size() const noexcept { return d_; }
    int arity() const noexcept { return k_; }
    const std::vector<ConstraintTemplate>& templates() const noexcept { return templates_; }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    const std::vector<DomainMask>& domains() const noexcept { return domains_; }
    DomainMask domain(Var v) const { return domains_.at(static_cast<std::size_t>(v - 1)); }
    const ConstraintTemplate& tmpl_of(const Constraint& c) const {
        return templates_[static_cast<std::size_t>(c.tmpl)];
    }

    /// Some domain is empty: no assignment can satisfy the instance.
    bool trivially_unsat() const noexcept;
    /// No repeated variable inside a scope and no two scopes with the same variable set.
    bool is_simple() const;

    friend bool operator==(const CspInstance&, const CspInstance&) = default;

private:
    int n_;
    int d_;
    int k_;
    std::vector<ConstraintTemplate> templates_;
    std::vector<Constraint> constraints_;
    std::vector<DomainMask> domains_;
};

/// Total map from variables to values; values[v-1] is the value of v.
struct Assignment {
    std::vector<Value> values;

    Value operator[](Var v) const { return values[static_cast<std::size_t>(v - 1)]; }
    std::size_t size() const noexcept { return values.size(); }
    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// True iff every value lies in its domain and every constraint is satisfied.
bool evaluate(const CspInstance& instance, const Assignment& assignment);

/// Simple model: each unordered k-subset independently gets one constraint
/// with probability p, variables in uniformly random order, template from dist.
CspInstance sample_csp(int n, double p, const ConstraintDistribution& dist, Seed seed);

/// Hat model: each (ordered k-tuple, template C) pair is present independently
/// with probability P(C) * p / k!.
CspInstance sample_hat_csp(int n, double p, const ConstraintDistribution& dist, Seed seed);

/// Copies the constraints and domains of `pattern` onto a uniformly random
/// ordered tuple of distinct variables of `instance`.
CspInstance plant(const CspInstance& instance, const CspInstance& pattern, Seed seed);

/// Restrict each listed variable's domain to the given value.
CspInstance force_values(const CspInstance& instance, std::span<const std::pair<Var, Value>> pairs);
/// Remove the given value from each listed variable's domain.
CspInstance forbid_values(const CspInstance& instance, std::span<const std::pair<Var, Value>> pairs);

/// Random digraph D(n, p): each of the n(n-1) arcs present independently.
struct Digraph {
    int n = 0;
    std::vector<std::pair<Var, Var>> arcs;  // sorted

    std::size_t two_cycles() const;
    /// Underlying simple graph: directions dropped, double edges merged; pairs (u < v), sorted.
    std::vector<std::pair<Var, Var>> underlying_edges() const;
};

Digraph sample_digraph(int n, double p, Seed seed);

/// Number of k-subsets of n items; throws InvalidInput on 64-bit overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace rcsp
