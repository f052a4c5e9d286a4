#pragma once

// Random structures for property checks: arbitrary distributions, unicyclic
// hypergraphs, and instances laid over a given constraint hypergraph.

#include "rcsp/hypergraph.hpp"
#include "rcsp/model.hpp"

namespace rcsp {

/// 1..max_templates distinct templates over (d, k), each with a random
/// restriction set, and random rational probabilities summing to 1.
ConstraintDistribution random_distribution(int d, int k, int max_templates, Rng& rng);

/// Connected k-uniform hypergraph with exactly one cycle and at most
/// max_vertices vertices. The cycle has length >= 3 for k = 2 and >= 2
/// otherwise; the remaining edges hang off as a forest, each sharing one vertex.
Hypergraph random_unicyclic(int k, int max_vertices, Rng& rng);

/// Random tree-shaped (acyclic, connected) k-uniform hypergraph.
Hypergraph random_hypertree(int k, int max_vertices, Rng& rng);

/// One constraint per hyperedge: template drawn from dist, variables in a
/// uniformly random order.
CspInstance instance_on(const Hypergraph& h, const ConstraintDistribution& dist, Rng& rng);

/// Random instance for oracle checks: model, density and forced or
/// forbidden domains all vary with the draw.
CspInstance random_small_instance(int n, const ConstraintDistribution& dist, Rng& rng);

}  // namespace rcsp
