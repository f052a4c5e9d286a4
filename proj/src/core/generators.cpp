#include "rcsp/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "rcsp/error.hpp"

namespace rcsp {

ConstraintDistribution random_distribution(int d, int k, int max_templates, Rng& rng) {
    if (d < 1 || k < 1 || max_templates < 1) throw InvalidInput("bad random distribution parameters");
    std::size_t tuples = 1;
    for (int i = 0; i < k; ++i) tuples *= static_cast<std::size_t>(d);
    std::uniform_int_distribution<int> count_dist(1, max_templates);
    const int want = count_dist(rng);
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::vector<std::size_t>> codes;
    // Restriction density per template varies so both loose and tight templates appear.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int attempt = 0; attempt < 50 * want && static_cast<int>(codes.size()) < want; ++attempt) {
        const double density = 0.6 * unit(rng);
        std::vector<std::size_t> chosen;
        for (std::size_t c = 0; c < tuples; ++c)
            if (unit(rng) < density) chosen.push_back(c);
        if (seen.insert(chosen).second) codes.push_back(std::move(chosen));
    }
    std::vector<std::uint64_t> weights;
    std::uniform_int_distribution<std::uint64_t> wdist(1, 6);
    for (std::size_t i = 0; i < codes.size(); ++i) weights.push_back(wdist(rng));
    const std::uint64_t total = std::accumulate(weights.begin(), weights.end(), std::uint64_t{0});

    std::vector<ConstraintDistribution::Entry> entries;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        std::vector<std::vector<Value>> restrictions;
        for (std::size_t code : codes[i]) {
            std::vector<Value> t(static_cast<std::size_t>(k));
            std::size_t c = code;
            for (int j = k - 1; j >= 0; --j) {
                t[static_cast<std::size_t>(j)] = static_cast<Value>(c % static_cast<std::size_t>(d)) + 1;
                c /= static_cast<std::size_t>(d);
            }
            restrictions.push_back(std::move(t));
        }
        entries.push_back({ConstraintTemplate(d, k, std::move(restrictions)), Rational(weights[i], total)});
    }
    return ConstraintDistribution(std::move(entries));
}

namespace {

// Adds pendant edges sharing one existing vertex until the vertex cap is hit
// or the coin says stop.
void grow_forest(int k, int max_vertices, int& n, std::vector<std::vector<Var>>& edges, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double stop = 0.15 + 0.3 * unit(rng);
    while (n + (k - 1) <= max_vertices && unit(rng) > stop) {
        std::uniform_int_distribution<Var> pick(1, n);
        std::vector<Var> e{pick(rng)};
        for (int j = 1; j < k; ++j) e.push_back(++n);
        edges.push_back(std::move(e));
    }
}

Hypergraph relabel(int n, std::vector<std::vector<Var>> edges, Rng& rng) {
    std::vector<Var> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& e : edges) {
        for (Var& v : e) v = perm[static_cast<std::size_t>(v - 1)];
        std::shuffle(e.begin(), e.end(), rng);
    }
    std::shuffle(edges.begin(), edges.end(), rng);
    return Hypergraph(n, std::move(edges));
}

}  // namespace

Hypergraph random_unicyclic(int k, int max_vertices, Rng& rng) {
    if (k < 2) throw InvalidInput("unicyclic hypergraphs need k >= 2");
    const int min_len = k == 2 ? 3 : 2;
    // A cycle of length r uses r * (k - 1) vertices.
    const int max_len = max_vertices / (k - 1);
    if (max_len < min_len) throw InvalidInput("vertex cap too small for a cycle");
    std::uniform_int_distribution<int> len_dist(min_len, std::min(max_len, min_len + 8));
    const int r = len_dist(rng);
    int n = r;  // cycle junction vertices 1..r
    std::vector<std::vector<Var>> edges;
    for (int i = 0; i < r; ++i) {
        std::vector<Var> e{i + 1, (i + 1) % r + 1};
        for (int j = 2; j < k; ++j) e.push_back(++n);
        edges.push_back(std::move(e));
    }
    grow_forest(k, max_vertices, n, edges, rng);
    return relabel(n, std::move(edges), rng);
}

Hypergraph random_hypertree(int k, int max_vertices, Rng& rng) {
    if (k < 2 || max_vertices < k) throw InvalidInput("bad hypertree parameters");
    int n = k;
    std::vector<std::vector<Var>> edges;
    std::vector<Var> first(static_cast<std::size_t>(k));
    std::iota(first.begin(), first.end(), 1);
    edges.push_back(first);
    grow_forest(k, max_vertices, n, edges, rng);
    return relabel(n, std::move(edges), rng);
}

CspInstance instance_on(const Hypergraph& h, const ConstraintDistribution& dist, Rng& rng) {
    std::vector<Constraint> cons;
    for (const auto& e : h.edges()) {
        if (static_cast<int>(e.size()) != dist.arity()) throw InvalidInput("edge size differs from arity");
        auto vars = e;
        std::shuffle(vars.begin(), vars.end(), rng);
        cons.push_back({std::move(vars), static_cast<int>(dist.sample_index(rng))});
    }
    return CspInstance(h.num_vertices(), dist.domain_size(), dist.arity(), dist.templates(), std::move(cons));
}

CspInstance random_small_instance(int n, const ConstraintDistribution& dist, Rng& rng) {
    const int k = dist.arity();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Mean constraint count between 0 and 1.5 n.
    double subsets = 1.0;
    for (int i = 0; i < k; ++i) subsets *= static_cast<double>(n - i) / static_cast<double>(i + 1);
    const double p = std::min(1.0, 1.5 * n * unit(rng) / subsets);
    const std::uint64_t seed = rng();
    auto inst = unit(rng) < 0.5 ? sample_csp(n, p, dist, Seed{seed}) : sample_hat_csp(n, std::min(p, 1.0), dist, Seed{seed});
    if (unit(rng) < 0.3) {
        std::uniform_int_distribution<Var> var(1, n);
        std::uniform_int_distribution<Value> val(1, dist.domain_size());
        std::vector<std::pair<Var, Value>> pairs{{var(rng), val(rng)}};
        inst = unit(rng) < 0.5 ? force_values(inst, pairs) : forbid_values(inst, pairs);
    }
    return inst;
}

}  // namespace rcsp
