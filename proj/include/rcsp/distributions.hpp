#pragma once

// Builders for the named constraint distributions, and the `name:params`
// spec mini-language used by configs and the CLI.

#include <string>
#include <string_view>

#include "rcsp/model.hpp"

namespace rcsp {

class TargetHypergraph;

/// A distribution plus the spec string that regenerates it.
struct NamedDistribution {
    ConstraintDistribution dist;
    std::string spec;
};

/// Templates enumerated above this count make dkt_distribution refuse.
inline constexpr std::uint64_t kMaxDktTemplates = 1000000;

struct DktDistribution {
    NamedDistribution named;
    /// t < d^(k-1): the regime where unicyclic instances are always satisfiable.
    bool nontrivial = false;
};

/// Uniform over all templates with exactly t restrictions, in lexicographic
/// order of their sorted restriction lists.
DktDistribution dkt_distribution(int d, int k, int t);

/// d=3, k=2. Template 1: both variables equal 1 or neither does (P = 2/3).
/// Template 2: not-equal (P = 1/3).
NamedDistribution example_ed3();

struct Split5Family {
    NamedDistribution named;
    double c_of_q = 0.0;  // (1 - q) / q
};

/// d=5, k=2 pair {C1 (P=q), C2 (P=1-q)} coupling a 2-colouring on {4,5}
/// with a 3-colouring on {1,2,3}.
Split5Family split5_family(double q);

/// Lifts `base` to domain d+2: every template also forces all variables into
/// {1..d} or all into {d+1, d+2}; an extra template C* (probability q) also
/// forbids the first two variables both being d+1 or both d+2.
NamedDistribution prime_family(const NamedDistribution& base, double q);

/// Single template permitting exactly the hyperedges of H.
NamedDistribution homomorphism_distribution(const TargetHypergraph& target, std::string target_name = "H");

/// d=3, k=2 not-equal (3-colouring); convenience for the base of prime_family.
NamedDistribution colouring_distribution(int colours);

/// Parses `dkt:d,k,t`, `ed3`, `split5:q`, `colour:m`, `prime:q:<base spec>`,
/// `hom` / `hom:<file.hg>` (target from `target_path` when no file is given),
/// or `file:<path>` (distribution text format).
NamedDistribution distribution_from_spec(std::string_view spec, const std::string& target_path = {});

}  // namespace rcsp
