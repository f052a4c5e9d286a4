#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rcsp/model.hpp"

namespace rcsp {

/// Vertices 1..n; each edge is an ordered vertex tuple. Repeated vertices
/// inside an edge (loops) and parallel edges are allowed.
class Hypergraph {
public:
    Hypergraph() = default;
    Hypergraph(int n, std::vector<std::vector<Var>> edges);

    int num_vertices() const noexcept { return n_; }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    const std::vector<std::vector<Var>>& edges() const noexcept { return edges_; }
    const std::vector<Var>& edge(std::size_t i) const { return edges_.at(i); }
    /// Edge indices containing v, one entry per distinct edge.
    const std::vector<std::size_t>& incident(Var v) const { return incident_.at(static_cast<std::size_t>(v - 1)); }

    /// No vertex repeats within an edge and no two edges are equal as sets.
    bool is_simple() const;
    /// Sum of edge sizes.
    std::size_t total_edge_size() const;

    friend bool operator==(const Hypergraph& a, const Hypergraph& b) { return a.n_ == b.n_ && a.edges_ == b.edges_; }

private:
    int n_ = 0;
    std::vector<std::vector<Var>> edges_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// One hyperedge per constraint, multiplicity preserved.
Hypergraph constraint_hypergraph(const CspInstance& instance);

enum class ComponentKind { tree, unicyclic, multicyclic };

const char* to_string(ComponentKind kind) noexcept;

struct Component {
    std::vector<Var> vertices;        // ascending
    std::vector<std::size_t> edges;   // ascending edge indices
    ComponentKind kind = ComponentKind::tree;
    /// Independent cycles of the vertex/edge incidence multigraph.
    std::size_t cycle_rank = 0;
};

/// Connected components (isolated vertices included), ordered by smallest vertex.
std::vector<Component> classify_components(const Hypergraph& h);

/// Total number of independent cycles; 1 means the hypergraph has exactly one cycle.
std::size_t cycle_rank(const Hypergraph& h);

/// Shortest walk length from any vertex in `from` to `to`; nullopt if unreachable.
std::optional<int> distance(const Hypergraph& h, std::span<const Var> from, Var to);
/// BFS distances from a vertex set to every vertex; -1 marks unreachable. Index v-1.
std::vector<int> distances_from(const Hypergraph& h, std::span<const Var> from);

/// Merge u and v into one vertex w. w takes id min(u, v); max(u, v) is removed
/// and higher ids shift down by one. Edges may end up with repeated w.
Hypergraph contract(const Hypergraph& h, Var u, Var v);

/// The unique cycle of a hypergraph whose cycle rank is 1, as a closed walk
/// v0 e1 v1 ... e_r v0. vertices[i] = v_i, edges[i] = e_{i+1}.
struct CycleWalk {
    std::vector<Var> vertices;
    std::vector<std::size_t> edges;
};
std::optional<CycleWalk> unique_cycle(const Hypergraph& h);

struct ForestReport {
    bool hits_constraint_with_two_t_vars = false;
    bool ball_is_forest = true;
    std::size_t ball_size = 0;

    bool passes(std::size_t max_ball) const noexcept {
        return !hits_constraint_with_two_t_vars && ball_is_forest && ball_size <= max_ball;
    }
};

/// Local structure around a variable set T: whether some constraint holds two
/// distinct T variables, whether the constraints inside the radius-r ball form
/// a forest, and how many variables the ball holds.
ForestReport neighborhood_forest_check(const CspInstance& instance, std::span<const Var> t_vars, int radius);

// Text format:  hg <n> <k> [directed]  /  e <v1> ... <vk>
struct HypergraphText {
    Hypergraph graph;
    int arity = 0;
    bool directed = false;
};
HypergraphText parse_hypergraph(std::string_view text);
std::string emit_hypergraph(const Hypergraph& h, int arity, bool directed = false);

}  // namespace rcsp
