#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rcsp/hypergraph.hpp"

namespace rcsp {

/// k-uniform target hypergraph H. Undirected targets store every ordering
/// of each hyperedge, so membership is order-free; directed targets do not.
class TargetHypergraph {
public:
    TargetHypergraph(int n, int k, std::vector<std::vector<Var>> edges, bool directed = false);

    int num_vertices() const noexcept { return n_; }
    int arity() const noexcept { return k_; }
    bool directed() const noexcept { return directed_; }
    /// Edges as given.
    const std::vector<std::vector<Var>>& edges() const noexcept { return edges_; }
    /// Distinct member tuples (all orderings for undirected targets), sorted.
    const std::vector<std::vector<Var>>& tuples() const noexcept { return tuples_; }
    bool contains(std::span<const Var> tuple) const;
    /// No hyperedge of the form (v, v, ..., v).
    bool loopless() const;

private:
    int n_;
    int k_;
    bool directed_;
    std::vector<std::vector<Var>> edges_;
    std::vector<std::vector<Var>> tuples_;
    std::vector<std::uint8_t> member_;
};

TargetHypergraph target_from_text(std::string_view text);
TargetHypergraph complete_target(int m);
TargetHypergraph cycle_target(int m);
/// One hyperedge (1, 2, ..., k) on k vertices.
TargetHypergraph single_edge_target(int k);

/// mapping[v-1] is the image of G-vertex v.
using VertexMap = std::vector<Var>;

bool is_homomorphism(const Hypergraph& g, const TargetHypergraph& h, std::span<const Var> mapping);

/// Backtracking search with arc-consistency filtering. Vertices are tried in
/// descending degree order, images in ascending id order. Throws
/// InvalidInput when an edge of G does not have H's arity.
std::optional<VertexMap> has_homomorphism(const Hypergraph& g, const TargetHypergraph& h);

/// Maps a unicyclic k-uniform hypergraph (k >= 3) onto single_edge_target(k):
/// alternate images w0/w1 around the cycle with w2 on its last vertex, then
/// extend outward, choosing the lowest unused image in each new edge.
VertexMap unicyclic_to_edge(const Hypergraph& g);

/// Homomorphism from a unicyclic graph M into a connected graph H containing
/// a triangle that sends every vertex at distance exactly r from M's cycle to u.
/// Requires r >= |V(H)| + 3.
VertexMap ring_homomorphism(const Hypergraph& m, const TargetHypergraph& h, Var u, int r);

/// Three mutually adjacent distinct vertices (k = 2 targets).
bool has_triangle(const TargetHypergraph& h);

}  // namespace rcsp
