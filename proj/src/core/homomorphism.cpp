#include "rcsp/homomorphism.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>
#include <stdexcept>

#include "rcsp/error.hpp"

namespace rcsp {

namespace {

std::size_t encode_tuple(std::span<const Var> t, int n) {
    std::size_t code = 0;
    for (Var v : t) code = code * static_cast<std::size_t>(n) + static_cast<std::size_t>(v - 1);
    return code;
}

}  // namespace

TargetHypergraph::TargetHypergraph(int n, int k, std::vector<std::vector<Var>> edges, bool directed)
    : n_(n), k_(k), directed_(directed), edges_(std::move(edges)) {
    if (n < 1) throw InvalidInput("target needs at least one vertex");
    if (n > kMaxDomain) throw InvalidInput("target has more than " + std::to_string(kMaxDomain) + " vertices");
    if (k < 1) throw InvalidInput("target arity must be >= 1");
    std::size_t table = 1;
    for (int i = 0; i < k; ++i) {
        table *= static_cast<std::size_t>(n);
        if (table > kMaxTemplateTable) throw InvalidInput("|V(H)|^k too large");
    }
    member_.assign(table, 0);
    for (const auto& e : edges_) {
        if (static_cast<int>(e.size()) != k) throw InvalidInput("target hyperedge does not have arity k");
        for (Var v : e)
            if (v < 1 || v > n) throw InvalidInput("target vertex " + std::to_string(v) + " outside 1..n");
        auto t = e;
        if (directed_) {
            member_[encode_tuple(t, n)] = 1;
            continue;
        }
        std::sort(t.begin(), t.end());
        do {
            member_[encode_tuple(t, n)] = 1;
        } while (std::next_permutation(t.begin(), t.end()));
    }
    // Decode the membership table into the sorted tuple list.
    std::vector<Var> t(static_cast<std::size_t>(k));
    for (std::size_t code = 0; code < table; ++code) {
        if (!member_[code]) continue;
        std::size_t c = code;
        for (int i = k - 1; i >= 0; --i) {
            t[static_cast<std::size_t>(i)] = static_cast<Var>(c % static_cast<std::size_t>(n)) + 1;
            c /= static_cast<std::size_t>(n);
        }
        tuples_.push_back(t);
    }
}

bool TargetHypergraph::contains(std::span<const Var> tuple) const {
    if (static_cast<int>(tuple.size()) != k_) return false;
    for (Var v : tuple)
        if (v < 1 || v > n_) return false;
    return member_[encode_tuple(tuple, n_)] != 0;
}

bool TargetHypergraph::loopless() const {
    return std::none_of(edges_.begin(), edges_.end(), [](const std::vector<Var>& e) {
        return std::adjacent_find(e.begin(), e.end(), std::not_equal_to<>()) == e.end();
    });
}

TargetHypergraph target_from_text(std::string_view text) {
    auto parsed = parse_hypergraph(text);
    return TargetHypergraph(parsed.graph.num_vertices(), parsed.arity, parsed.graph.edges(), parsed.directed);
}

TargetHypergraph complete_target(int m) {
    std::vector<std::vector<Var>> edges;
    for (Var a = 1; a <= m; ++a)
        for (Var b = a + 1; b <= m; ++b) edges.push_back({a, b});
    return TargetHypergraph(m, 2, std::move(edges));
}

TargetHypergraph cycle_target(int m) {
    if (m < 3) throw InvalidInput("cycle target needs at least 3 vertices");
    std::vector<std::vector<Var>> edges;
    for (Var a = 1; a <= m; ++a) edges.push_back({a, a % m + 1});
    return TargetHypergraph(m, 2, std::move(edges));
}

TargetHypergraph single_edge_target(int k) {
    std::vector<Var> e(static_cast<std::size_t>(k));
    std::iota(e.begin(), e.end(), 1);
    return TargetHypergraph(k, k, {e});
}

bool is_homomorphism(const Hypergraph& g, const TargetHypergraph& h, std::span<const Var> mapping) {
    if (static_cast<int>(mapping.size()) != g.num_vertices()) return false;
    for (Var x : mapping)
        if (x < 1 || x > h.num_vertices()) return false;
    std::vector<Var> image;
    for (const auto& e : g.edges()) {
        image.clear();
        for (Var v : e) image.push_back(mapping[static_cast<std::size_t>(v - 1)]);
        if (!h.contains(image)) return false;
    }
    return true;
}

// ------------------------------------------------------------ search

namespace {

class HomSearch {
public:
    HomSearch(const Hypergraph& g, const TargetHypergraph& h) : g_(g), h_(h) {
        for (const auto& e : g.edges())
            if (static_cast<int>(e.size()) != h.arity())
                throw InvalidInput("arity mismatch: G has an edge of size " + std::to_string(e.size()) +
                                   ", H has arity " + std::to_string(h.arity()));
        order_.resize(static_cast<std::size_t>(g.num_vertices()));
        std::iota(order_.begin(), order_.end(), 1);
        std::stable_sort(order_.begin(), order_.end(),
                         [&](Var a, Var b) { return g.incident(a).size() > g.incident(b).size(); });
    }

    std::optional<VertexMap> run() {
        std::vector<DomainMask> dom(static_cast<std::size_t>(g_.num_vertices()), full_mask(h_.num_vertices()));
        if (!propagate(dom, all_edges())) return std::nullopt;
        if (!search(dom, 0)) return std::nullopt;
        VertexMap map;
        for (DomainMask m : result_) map.push_back(std::countr_zero(m) + 1);
        return map;
    }

private:
    std::vector<std::size_t> all_edges() const {
        std::vector<std::size_t> all(g_.num_edges());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }

    /// Generalized arc consistency on one edge; returns false on wipe-out.
    bool revise(std::vector<DomainMask>& dom, std::size_t ei, std::vector<Var>& changed) const {
        const auto& e = g_.edge(ei);
        const std::size_t k = e.size();
        std::vector<DomainMask> support(k, 0);
        for (const auto& t : h_.tuples()) {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i) {
                if (!(dom[static_cast<std::size_t>(e[i] - 1)] & value_bit(t[i]))) ok = false;
                for (std::size_t j = 0; j < i && ok; ++j)
                    if (e[j] == e[i] && t[j] != t[i]) ok = false;
            }
            if (!ok) continue;
            for (std::size_t i = 0; i < k; ++i) support[i] |= value_bit(t[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            auto& d = dom[static_cast<std::size_t>(e[i] - 1)];
            DomainMask nd = d & support[i];
            if (nd != d) {
                d = nd;
                changed.push_back(e[i]);
                if (nd == 0) return false;
            }
        }
        return true;
    }

    bool propagate(std::vector<DomainMask>& dom, std::vector<std::size_t> queue) const {
        std::vector<bool> queued(g_.num_edges(), false);
        for (auto ei : queue) queued[ei] = true;
        std::vector<Var> changed;
        while (!queue.empty()) {
            std::size_t ei = queue.back();
            queue.pop_back();
            queued[ei] = false;
            changed.clear();
            if (!revise(dom, ei, changed)) return false;
            for (Var v : changed)
                for (std::size_t ej : g_.incident(v))
                    if (!queued[ej]) {
                        queued[ej] = true;
                        queue.push_back(ej);
                    }
        }
        return true;
    }

    bool search(const std::vector<DomainMask>& dom, std::size_t depth) {
        while (depth < order_.size() && std::popcount(dom[static_cast<std::size_t>(order_[depth] - 1)]) == 1) ++depth;
        if (depth == order_.size()) {
            result_ = dom;
            return true;
        }
        const Var v = order_[depth];
        DomainMask options = dom[static_cast<std::size_t>(v - 1)];
        while (options) {
            DomainMask bit = options & (~options + 1);
            options &= options - 1;
            auto next = dom;
            next[static_cast<std::size_t>(v - 1)] = bit;
            if (propagate(next, g_.incident(v)) && search(next, depth + 1)) return true;
        }
        return false;
    }

    const Hypergraph& g_;
    const TargetHypergraph& h_;
    std::vector<Var> order_;
    std::vector<DomainMask> result_;
};

}  // namespace

std::optional<VertexMap> has_homomorphism(const Hypergraph& g, const TargetHypergraph& h) {
    auto map = HomSearch(g, h).run();
    if (map && !is_homomorphism(g, h, *map)) throw std::logic_error("homomorphism search produced an invalid map");
    return map;
}

// ------------------------------------------------- constructive lemmas

VertexMap unicyclic_to_edge(const Hypergraph& g) {
    const int n = g.num_vertices();
    if (g.num_edges() == 0) throw InvalidInput("hypergraph is not unicyclic");
    const int k = static_cast<int>(g.edge(0).size());
    if (k < 3) throw InvalidInput("unicyclic_to_edge needs k >= 3");
    for (const auto& e : g.edges()) {
        if (static_cast<int>(e.size()) != k) throw InvalidInput("hypergraph is not k-uniform");
        auto s = e;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw InvalidInput("hyperedge repeats a vertex; no map onto a single hyperedge exists");
    }
    auto cycle = unique_cycle(g);
    if (!cycle) throw InvalidInput("hypergraph is not unicyclic");

    VertexMap map(static_cast<std::size_t>(n), 0);
    auto image = [&](Var v) -> Var& { return map[static_cast<std::size_t>(v - 1)]; };
    const std::size_t r = cycle->vertices.size();
    for (std::size_t i = 0; i + 1 < r; ++i) image(cycle->vertices[i]) = static_cast<Var>(i % 2) + 1;
    image(cycle->vertices[r - 1]) = 3;

    // Give the unmapped vertices of an edge the images it is still missing.
    auto fill_edge = [&](std::size_t ei) {
        const auto& e = g.edge(ei);
        std::vector<bool> used(static_cast<std::size_t>(k) + 1, false);
        for (Var v : e)
            if (image(v)) used[static_cast<std::size_t>(image(v))] = true;
        Var next = 1;
        for (Var v : e) {
            if (image(v)) continue;
            while (used[static_cast<std::size_t>(next)]) ++next;
            image(v) = next;
            used[static_cast<std::size_t>(next)] = true;
        }
    };
    std::vector<bool> edge_done(g.num_edges(), false);
    std::deque<Var> queue;
    for (std::size_t ei : cycle->edges) {
        fill_edge(ei);
        edge_done[ei] = true;
    }
    for (std::size_t ei : cycle->edges)
        for (Var v : g.edge(ei)) queue.push_back(v);

    auto sweep = [&]() {
        while (!queue.empty()) {
            Var v = queue.front();
            queue.pop_front();
            for (std::size_t ei : g.incident(v)) {
                if (edge_done[ei]) continue;
                edge_done[ei] = true;
                fill_edge(ei);
                for (Var u : g.edge(ei)) queue.push_back(u);
            }
        }
    };
    sweep();
    for (Var v = 1; v <= n; ++v) {
        if (image(v)) continue;
        image(v) = 1;
        queue.push_back(v);
        sweep();
    }
    if (!is_homomorphism(g, single_edge_target(k), map))
        throw std::logic_error("unicyclic_to_edge produced an invalid map");
    return map;
}

bool has_triangle(const TargetHypergraph& h) {
    if (h.arity() != 2) throw InvalidInput("has_triangle needs a graph (k = 2)");
    const int n = h.num_vertices();
    auto adj = [&](Var a, Var b) {
        const Var t[2] = {a, b};
        const Var s[2] = {b, a};
        return h.contains(t) || h.contains(s);
    };
    for (Var a = 1; a <= n; ++a)
        for (Var b = a + 1; b <= n; ++b) {
            if (!adj(a, b)) continue;
            for (Var c = b + 1; c <= n; ++c)
                if (adj(a, c) && adj(b, c)) return true;
        }
    return false;
}

VertexMap ring_homomorphism(const Hypergraph& m, const TargetHypergraph& h, Var u, int r) {
    if (h.arity() != 2 || h.directed()) throw InvalidInput("ring_homomorphism needs an undirected graph target");
    const int hn = h.num_vertices();
    if (u < 1 || u > hn) throw InvalidInput("target vertex u outside 1..|V(H)|");
    if (r < hn + 3) throw InvalidInput("need r >= |V(H)| + 3");
    for (const auto& e : m.edges())
        if (e.size() != 2) throw InvalidInput("M must be a graph");
    if (!m.is_simple()) throw InvalidInput("M must be a simple graph");

    auto adjacent = [&](Var a, Var b) {
        const Var t[2] = {a, b};
        return h.contains(t);
    };
    Var tri[3] = {0, 0, 0};
    for (Var a = 1; a <= hn && !tri[0]; ++a)
        for (Var b = a + 1; b <= hn && !tri[0]; ++b) {
            if (!adjacent(a, b)) continue;
            for (Var c = b + 1; c <= hn; ++c)
                if (adjacent(a, c) && adjacent(b, c)) {
                    tri[0] = a;
                    tri[1] = b;
                    tri[2] = c;
                    break;
                }
        }
    if (!tri[0]) throw InvalidInput("H contains no triangle");
    {
        std::vector<int> reach(static_cast<std::size_t>(hn), 0);
        std::vector<Var> stack{1};
        reach[0] = 1;
        while (!stack.empty()) {
            Var a = stack.back();
            stack.pop_back();
            for (Var b = 1; b <= hn; ++b)
                if (!reach[static_cast<std::size_t>(b - 1)] && adjacent(a, b)) {
                    reach[static_cast<std::size_t>(b - 1)] = 1;
                    stack.push_back(b);
                }
        }
        if (std::count(reach.begin(), reach.end(), 0) != 0) throw InvalidInput("H must be connected");
    }
    auto cycle = unique_cycle(m);
    if (!cycle) throw InvalidInput("M is not unicyclic");

    // can[j][x]: H has a walk of length exactly j from x to u.
    std::vector<std::vector<char>> can(static_cast<std::size_t>(r) + 1, std::vector<char>(static_cast<std::size_t>(hn), 0));
    can[0][static_cast<std::size_t>(u - 1)] = 1;
    for (int j = 1; j <= r; ++j)
        for (Var x = 1; x <= hn; ++x)
            for (Var y = 1; y <= hn; ++y)
                if (adjacent(x, y) && can[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(y - 1)]) {
                    can[static_cast<std::size_t>(j)][static_cast<std::size_t>(x - 1)] = 1;
                    break;
                }
    // walks[i][j] is the j-th vertex of a length-r walk from tri[i] to u.
    std::vector<std::vector<Var>> walks(3);
    for (int i = 0; i < 3; ++i) {
        if (!can[static_cast<std::size_t>(r)][static_cast<std::size_t>(tri[i] - 1)])
            throw std::logic_error("no walk of length r from a triangle vertex to u");
        Var cur = tri[i];
        walks[static_cast<std::size_t>(i)].push_back(cur);
        for (int j = 1; j <= r; ++j) {
            Var next = 0;
            for (Var y = 1; y <= hn; ++y)
                if (adjacent(cur, y) && can[static_cast<std::size_t>(r - j)][static_cast<std::size_t>(y - 1)]) {
                    next = y;
                    break;
                }
            cur = next;
            walks[static_cast<std::size_t>(i)].push_back(cur);
        }
    }

    const int n = m.num_vertices();
    VertexMap map(static_cast<std::size_t>(n), 0);
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::vector<int> root_slot(static_cast<std::size_t>(n), -1);
    std::vector<Var> parent(static_cast<std::size_t>(n), 0);
    std::deque<Var> queue;
    const std::size_t len = cycle->vertices.size();
    for (std::size_t i = 0; i < len; ++i) {
        Var v = cycle->vertices[i];
        int slot = (len % 2 == 1 && i + 1 == len) ? 2 : static_cast<int>(i % 2);
        root_slot[static_cast<std::size_t>(v - 1)] = slot;
        depth[static_cast<std::size_t>(v - 1)] = 0;
        map[static_cast<std::size_t>(v - 1)] = tri[slot];
        queue.push_back(v);
    }
    auto lowest_neighbour = [&](Var x) {
        for (Var y = 1; y <= hn; ++y)
            if (adjacent(x, y)) return y;
        throw std::logic_error("target vertex without neighbours");
    };
    auto bfs = [&]() {
        while (!queue.empty()) {
            Var v = queue.front();
            queue.pop_front();
            for (std::size_t ei : m.incident(v)) {
                const auto& e = m.edge(ei);
                Var w = e[0] == v ? e[1] : e[0];
                if (depth[static_cast<std::size_t>(w - 1)] >= 0) continue;
                const int dw = depth[static_cast<std::size_t>(v - 1)] + 1;
                depth[static_cast<std::size_t>(w - 1)] = dw;
                root_slot[static_cast<std::size_t>(w - 1)] = root_slot[static_cast<std::size_t>(v - 1)];
                parent[static_cast<std::size_t>(w - 1)] = v;
                const int slot = root_slot[static_cast<std::size_t>(w - 1)];
                if (slot >= 0 && dw <= r)
                    map[static_cast<std::size_t>(w - 1)] = walks[static_cast<std::size_t>(slot)][static_cast<std::size_t>(dw)];
                else
                    map[static_cast<std::size_t>(w - 1)] = lowest_neighbour(map[static_cast<std::size_t>(v - 1)]);
                queue.push_back(w);
            }
        }
    };
    bfs();
    // Tree components away from the cycle.
    for (Var v = 1; v <= n; ++v) {
        if (depth[static_cast<std::size_t>(v - 1)] >= 0) continue;
        depth[static_cast<std::size_t>(v - 1)] = 0;
        map[static_cast<std::size_t>(v - 1)] = u;
        queue.push_back(v);
        bfs();
    }
    if (!is_homomorphism(m, h, map)) throw std::logic_error("ring_homomorphism produced an invalid map");
    return map;
}

}  // namespace rcsp
