#include "rcsp/hypergraph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <numeric>
#include <sstream>

#include "rcsp/error.hpp"

namespace rcsp {

namespace {

struct DisjointSets {
    std::vector<int> parent;
    explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

}  // namespace

Hypergraph::Hypergraph(int n, std::vector<std::vector<Var>> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 0) throw InvalidInput("vertex count must be >= 0");
    incident_.resize(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (edges_[i].empty()) throw InvalidInput("hyperedge must contain at least one vertex");
        for (Var v : edges_[i]) {
            if (v < 1 || v > n) throw InvalidInput("hyperedge vertex " + std::to_string(v) + " outside 1..n");
            auto& inc = incident_[static_cast<std::size_t>(v - 1)];
            if (inc.empty() || inc.back() != i) inc.push_back(i);
        }
    }
}

bool Hypergraph::is_simple() const {
    std::vector<std::vector<Var>> sets;
    for (const auto& e : edges_) {
        auto s = e;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end()) return false;
        sets.push_back(std::move(s));
    }
    std::sort(sets.begin(), sets.end());
    return std::adjacent_find(sets.begin(), sets.end()) == sets.end();
}

std::size_t Hypergraph::total_edge_size() const {
    std::size_t s = 0;
    for (const auto& e : edges_) s += e.size();
    return s;
}

Hypergraph constraint_hypergraph(const CspInstance& instance) {
    std::vector<std::vector<Var>> edges;
    edges.reserve(instance.constraints().size());
    for (const auto& c : instance.constraints()) edges.push_back(c.vars);
    return Hypergraph(instance.num_vars(), std::move(edges));
}

const char* to_string(ComponentKind kind) noexcept {
    switch (kind) {
        case ComponentKind::tree: return "tree";
        case ComponentKind::unicyclic: return "unicyclic";
        case ComponentKind::multicyclic: return "multicyclic";
    }
    return "?";
}

std::vector<Component> classify_components(const Hypergraph& h) {
    const int n = h.num_vertices();
    DisjointSets ds(n);
    for (const auto& e : h.edges())
        for (Var v : e) ds.unite(e.front() - 1, v - 1);

    // Cycle rank of the incidence multigraph per component: I - (V + E) + 1.
    std::vector<int> slot(static_cast<std::size_t>(n), -1);
    std::vector<Component> comps;
    std::vector<std::size_t> incidences;
    for (Var v = 1; v <= n; ++v) {
        int root = ds.find(v - 1);
        if (slot[static_cast<std::size_t>(root)] < 0) {
            slot[static_cast<std::size_t>(root)] = static_cast<int>(comps.size());
            comps.emplace_back();
            incidences.push_back(0);
        }
        comps[static_cast<std::size_t>(slot[static_cast<std::size_t>(root)])].vertices.push_back(v);
    }
    for (std::size_t i = 0; i < h.num_edges(); ++i) {
        const auto& e = h.edge(i);
        auto c = static_cast<std::size_t>(slot[static_cast<std::size_t>(ds.find(e.front() - 1))]);
        comps[c].edges.push_back(i);
        incidences[c] += e.size();
    }
    for (std::size_t c = 0; c < comps.size(); ++c) {
        auto& comp = comps[c];
        comp.cycle_rank = incidences[c] + 1 - comp.vertices.size() - comp.edges.size();
        comp.kind = comp.cycle_rank == 0   ? ComponentKind::tree
                    : comp.cycle_rank == 1 ? ComponentKind::unicyclic
                                           : ComponentKind::multicyclic;
    }
    return comps;
}

std::size_t cycle_rank(const Hypergraph& h) {
    std::size_t total = 0;
    for (const auto& c : classify_components(h)) total += c.cycle_rank;
    return total;
}

std::vector<int> distances_from(const Hypergraph& h, std::span<const Var> from) {
    std::vector<int> dist(static_cast<std::size_t>(h.num_vertices()), -1);
    std::vector<bool> edge_used(h.num_edges(), false);
    std::deque<Var> queue;
    for (Var v : from) {
        if (v < 1 || v > h.num_vertices()) throw InvalidInput("vertex " + std::to_string(v) + " outside 1..n");
        if (dist[static_cast<std::size_t>(v - 1)] < 0) {
            dist[static_cast<std::size_t>(v - 1)] = 0;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        Var v = queue.front();
        queue.pop_front();
        int dv = dist[static_cast<std::size_t>(v - 1)];
        for (std::size_t ei : h.incident(v)) {
            if (edge_used[ei]) continue;
            edge_used[ei] = true;
            for (Var u : h.edge(ei)) {
                if (dist[static_cast<std::size_t>(u - 1)] < 0) {
                    dist[static_cast<std::size_t>(u - 1)] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    return dist;
}

std::optional<int> distance(const Hypergraph& h, std::span<const Var> from, Var to) {
    if (to < 1 || to > h.num_vertices()) throw InvalidInput("vertex " + std::to_string(to) + " outside 1..n");
    int d = distances_from(h, from)[static_cast<std::size_t>(to - 1)];
    if (d < 0) return std::nullopt;
    return d;
}

Hypergraph contract(const Hypergraph& h, Var u, Var v) {
    const int n = h.num_vertices();
    if (u < 1 || u > n || v < 1 || v > n) throw InvalidInput("contracted vertices must lie in 1..n");
    if (u == v) throw InvalidInput("contract needs two distinct vertices");
    const Var w = std::min(u, v);
    const Var gone = std::max(u, v);
    auto relabel = [&](Var x) {
        if (x == gone) return w;
        return x > gone ? x - 1 : x;
    };
    std::vector<std::vector<Var>> edges = h.edges();
    for (auto& e : edges)
        for (auto& x : e) x = relabel(x);
    return Hypergraph(n - 1, std::move(edges));
}

std::optional<CycleWalk> unique_cycle(const Hypergraph& h) {
    if (cycle_rank(h) != 1) return std::nullopt;
    const int n = h.num_vertices();
    const std::size_t m = h.num_edges();
    // Incidence multigraph: vertex nodes 0..n-1, edge nodes n..n+m-1.
    std::vector<std::size_t> degree(static_cast<std::size_t>(n) + m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (Var v : h.edge(i)) {
            ++degree[static_cast<std::size_t>(v - 1)];
            ++degree[static_cast<std::size_t>(n) + i];
        }
    }
    // Peel degree-1 nodes; what survives with degree 2 is the cycle.
    std::vector<bool> removed(degree.size(), false);
    std::deque<std::size_t> leaves;
    for (std::size_t x = 0; x < degree.size(); ++x)
        if (degree[x] <= 1) leaves.push_back(x);
    auto neighbours = [&](std::size_t x, auto&& fn) {
        if (x < static_cast<std::size_t>(n)) {
            for (std::size_t ei : h.incident(static_cast<Var>(x) + 1)) {
                const auto& e = h.edge(ei);
                auto mult = std::count(e.begin(), e.end(), static_cast<Var>(x) + 1);
                for (long c = 0; c < mult; ++c) fn(static_cast<std::size_t>(n) + ei);
            }
        } else {
            for (Var v : h.edge(x - static_cast<std::size_t>(n))) fn(static_cast<std::size_t>(v - 1));
        }
    };
    while (!leaves.empty()) {
        std::size_t x = leaves.front();
        leaves.pop_front();
        if (removed[x]) continue;
        removed[x] = true;
        neighbours(x, [&](std::size_t y) {
            if (removed[y]) return;
            if (--degree[y] == 1) leaves.push_back(y);
        });
    }
    std::size_t start = degree.size();
    for (std::size_t x = 0; x < static_cast<std::size_t>(n); ++x)
        if (!removed[x]) {
            start = x;
            break;
        }
    if (start == degree.size()) return std::nullopt;

    CycleWalk walk;
    std::size_t cur = start;
    std::size_t prev_edge = m;  // none yet
    do {
        walk.vertices.push_back(static_cast<Var>(cur) + 1);
        std::size_t next_edge = m;
        for (std::size_t ei : h.incident(static_cast<Var>(cur) + 1)) {
            if (removed[static_cast<std::size_t>(n) + ei] || ei == prev_edge) continue;
            next_edge = ei;
            break;
        }
        if (next_edge == m) {
            // Only possible for a loop-style edge holding cur twice.
            next_edge = prev_edge;
        }
        walk.edges.push_back(next_edge);
        // The other surviving incidence of next_edge.
        const auto& e = h.edge(next_edge);
        std::size_t nxt = cur;
        bool skipped_self = false;
        for (Var v : e) {
            auto x = static_cast<std::size_t>(v - 1);
            if (removed[x]) continue;
            if (x == cur && !skipped_self) {
                skipped_self = true;
                continue;
            }
            nxt = x;
            break;
        }
        prev_edge = next_edge;
        cur = nxt;
    } while (cur != start && walk.vertices.size() <= static_cast<std::size_t>(n));
    return walk;
}

ForestReport neighborhood_forest_check(const CspInstance& instance, std::span<const Var> t_vars, int radius) {
    if (radius < 0) throw InvalidInput("radius must be >= 0");
    Hypergraph h = constraint_hypergraph(instance);
    ForestReport report;

    std::vector<bool> in_t(static_cast<std::size_t>(instance.num_vars()), false);
    for (Var v : t_vars) {
        if (v < 1 || v > instance.num_vars()) throw InvalidInput("variable " + std::to_string(v) + " outside 1..n");
        in_t[static_cast<std::size_t>(v - 1)] = true;
    }
    for (const auto& e : h.edges()) {
        std::vector<Var> hits;
        for (Var v : e)
            if (in_t[static_cast<std::size_t>(v - 1)]) hits.push_back(v);
        std::sort(hits.begin(), hits.end());
        hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
        if (hits.size() >= 2) report.hits_constraint_with_two_t_vars = true;
    }

    auto dist = distances_from(h, t_vars);
    std::vector<Var> ball;
    std::vector<int> local(static_cast<std::size_t>(instance.num_vars()), 0);
    for (Var v = 1; v <= instance.num_vars(); ++v) {
        int dv = dist[static_cast<std::size_t>(v - 1)];
        if (dv >= 0 && dv <= radius) {
            ball.push_back(v);
            local[static_cast<std::size_t>(v - 1)] = static_cast<int>(ball.size());
        }
    }
    report.ball_size = ball.size();

    std::vector<std::vector<Var>> induced;
    for (const auto& e : h.edges()) {
        if (!std::all_of(e.begin(), e.end(), [&](Var v) { return local[static_cast<std::size_t>(v - 1)] > 0; }))
            continue;
        std::vector<Var> mapped;
        for (Var v : e) mapped.push_back(local[static_cast<std::size_t>(v - 1)]);
        induced.push_back(std::move(mapped));
    }
    report.ball_is_forest = cycle_rank(Hypergraph(static_cast<int>(ball.size()), std::move(induced))) == 0;
    return report;
}

HypergraphText parse_hypergraph(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    HypergraphText out;
    bool have_header = false;
    int n = 0;
    std::vector<std::vector<Var>> edges;
    auto to_int = [&](const std::string& tok, const char* what) {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size())
            throw ParseError(line_no, std::string("expected integer ") + what + ", got '" + tok + "'");
        return v;
    };
    while (std::getline(in, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
        std::istringstream ls(raw);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (!have_header) {
            if (tok[0] != "hg" || tok.size() < 3 || tok.size() > 4)
                throw ParseError(line_no, "expected 'hg <nvertices> <k> [directed]' header");
            long long nv = to_int(tok[1], "vertex count");
            long long k = to_int(tok[2], "arity");
            if (nv < 0 || nv > (1 << 28)) throw ParseError(line_no, "vertex count out of range");
            if (k < 1 || k > 64) throw ParseError(line_no, "arity out of range");
            if (tok.size() == 4) {
                if (tok[3] != "directed") throw ParseError(line_no, "unknown header flag '" + tok[3] + "'");
                out.directed = true;
            }
            n = static_cast<int>(nv);
            out.arity = static_cast<int>(k);
            have_header = true;
            continue;
        }
        if (tok[0] != "e") throw ParseError(line_no, "unknown line type '" + tok[0] + "'");
        if (static_cast<int>(tok.size()) != out.arity + 1)
            throw ParseError(line_no, "'e' line expects " + std::to_string(out.arity) + " vertices");
        std::vector<Var> e;
        for (std::size_t i = 1; i < tok.size(); ++i) {
            long long v = to_int(tok[i], "vertex");
            if (v < 1 || v > n) throw ParseError(line_no, "vertex " + std::to_string(v) + " outside 1.." + std::to_string(n));
            e.push_back(static_cast<Var>(v));
        }
        edges.push_back(std::move(e));
    }
    if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing 'hg' header");
    out.graph = Hypergraph(n, std::move(edges));
    return out;
}

std::string emit_hypergraph(const Hypergraph& h, int arity, bool directed) {
    std::ostringstream out;
    out << "hg " << h.num_vertices() << ' ' << arity << (directed ? " directed" : "") << '\n';
    for (const auto& e : h.edges()) {
        out << 'e';
        for (Var v : e) out << ' ' << v;
        out << '\n';
    }
    return out.str();
}

}  // namespace rcsp
