#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcsp/model.hpp"

namespace rcsp {

enum class SolveStatus { sat, unsat, indeterminate };

const char* to_string(SolveStatus s) noexcept;

struct SolveOptions {
    /// Search nodes before giving up; 0 means unlimited.
    std::uint64_t node_budget = 10'000'000;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::indeterminate;
    std::optional<Assignment> assignment;
    std::uint64_t nodes = 0;
};

/// Backtracking with generalized arc consistency (MAC). Variables by fewest
/// remaining values, then most active constraints, then id; values ascending.
/// Independent parts of the residual constraint graph are solved separately.
SolveOutcome solve(const CspInstance& instance, const SolveOptions& options);
/// Unlimited budget.
std::optional<Assignment> solve(const CspInstance& instance);

inline constexpr std::uint64_t kBruteForceCap = 20'000'000;

/// Exhaustive search in variable order 1..n and ascending values, so the
/// witness is the lexicographically smallest one. Throws Unsupported when
/// d^n exceeds `cap`.
std::optional<Assignment> brute_force(const CspInstance& instance, std::uint64_t cap = kBruteForceCap);

/// Solve with value `excluded` removed from every domain.
std::optional<Assignment> solve_excluding_value(const CspInstance& instance, Value excluded);

/// Number of satisfying assignments, saturating at `cap`.
std::uint64_t count_solutions(const CspInstance& instance, std::uint64_t cap);

/// One entry of an implication closure: `var` is forced to `value` by
/// constraint `constraint` once `parent` holds its own forced value.
struct ForcedValue {
    Var var = 0;
    Value value = 0;
    Var parent = 0;
    std::size_t constraint = 0;
};

struct ImplicationClosure {
    Var source = 0;
    Value source_value = 0;
    /// Reached (u, gamma) pairs in BFS order; the source itself is excluded.
    std::vector<ForcedValue> forced;
    /// A second chain tried to force a different value on an already forced variable.
    bool truncated = false;
    /// (variable, value) pairs whose assignment leaves some neighbour no value at all.
    std::vector<std::pair<Var, Value>> dead;

    /// Variables forced to `gamma`, ascending.
    std::vector<Var> forced_to(Value gamma) const;
    std::size_t size() const noexcept { return forced.size(); }
};

/// Closure of the forcing relation from source = value (k = 2 only). A
/// constraint forces its other variable when exactly one of that variable's
/// domain values stays compatible, read in the constraint's stored orientation.
ImplicationClosure implication_closure(const CspInstance& instance, Var source, Value value);

/// Replays every recorded step and checks it forces exactly the recorded value.
bool certify(const CspInstance& instance, const ImplicationClosure& closure);

/// Values forbidden outright by some support template (a full row or column
/// of restrictions), closed under template-level forcing. k = 2 only.
std::vector<Value> bad_values(const ConstraintDistribution& dist);

}  // namespace rcsp
