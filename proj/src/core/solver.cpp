#include "rcsp/solver.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <numeric>

#include "rcsp/error.hpp"

namespace rcsp {

const char* to_string(SolveStatus s) noexcept {
    switch (s) {
        case SolveStatus::sat: return "sat";
        case SolveStatus::unsat: return "unsat";
        case SolveStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

namespace {

// Compatibility tables for one template.
struct TemplateTables {
    // k = 2: row[a] = values b with (a, b) allowed; col[b] = values a with (a, b) allowed.
    std::vector<DomainMask> row;
    std::vector<DomainMask> col;
    // any k: allowed tuples.
    std::vector<std::vector<Value>> allowed;
};

TemplateTables build_tables(const ConstraintTemplate& t) {
    TemplateTables out;
    const int d = t.domain_size();
    const int k = t.arity();
    std::vector<Value> tuple(static_cast<std::size_t>(k), 1);
    for (std::size_t code = 0; code < t.table_size(); ++code) {
        std::size_t c = code;
        for (int i = k - 1; i >= 0; --i) {
            tuple[static_cast<std::size_t>(i)] = static_cast<Value>(c % static_cast<std::size_t>(d)) + 1;
            c /= static_cast<std::size_t>(d);
        }
        if (!t.forbids_code(code)) out.allowed.push_back(tuple);
    }
    if (k == 2) {
        out.row.assign(static_cast<std::size_t>(d) + 1, 0);
        out.col.assign(static_cast<std::size_t>(d) + 1, 0);
        for (const auto& a : out.allowed) {
            out.row[static_cast<std::size_t>(a[0])] |= value_bit(a[1]);
            out.col[static_cast<std::size_t>(a[1])] |= value_bit(a[0]);
        }
    }
    return out;
}

struct BudgetExhausted {};

constexpr int kSplitPeriod = 4;

class Mac {
public:
    Mac(const CspInstance& inst, std::uint64_t budget) : inst_(inst), budget_(budget) {
        for (const auto& t : inst.templates()) tables_.push_back(build_tables(t));
        const auto& cons = inst.constraints();
        incident_.resize(static_cast<std::size_t>(inst.num_vars()));
        binary_.resize(cons.size());
        for (std::size_t ci = 0; ci < cons.size(); ++ci) {
            auto vars = cons[ci].vars;
            binary_[ci] = vars.size() == 2 && vars[0] != vars[1];
            std::sort(vars.begin(), vars.end());
            vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
            for (Var v : vars) incident_[static_cast<std::size_t>(v - 1)].push_back(ci);
        }
        queued_.assign(cons.size(), 0);
        weight_.assign(cons.size(), 1);
        stamp_.assign(static_cast<std::size_t>(inst.num_vars()), 0);
        comp_of_.assign(static_cast<std::size_t>(inst.num_vars()), -1);
    }

    SolveOutcome run() {
        SolveOutcome out;
        auto dom = inst_.domains();
        try {
            std::vector<std::size_t> all(inst_.constraints().size());
            std::iota(all.begin(), all.end(), 0);
            bool ok = !inst_.trivially_unsat() && propagate(dom, all);
            if (ok) {
                std::vector<Var> vars(static_cast<std::size_t>(inst_.num_vars()));
                std::iota(vars.begin(), vars.end(), 1);
                ok = search(dom, vars, 0);
            }
            out.status = ok ? SolveStatus::sat : SolveStatus::unsat;
            if (ok) {
                Assignment a;
                for (DomainMask m : dom) a.values.push_back(std::countr_zero(m) + 1);
                out.assignment = std::move(a);
            }
        } catch (const BudgetExhausted&) {
            out.status = SolveStatus::indeterminate;
        }
        out.nodes = nodes_;
        return out;
    }

private:
    DomainMask& at(std::vector<DomainMask>& dom, Var v) const { return dom[static_cast<std::size_t>(v - 1)]; }

    // Narrow the domains of constraint ci's variables to supported values.
    // Appends changed variables; false on wipe-out.
    bool revise(std::vector<DomainMask>& dom, std::size_t ci, std::vector<Var>& changed) const {
        const auto& c = inst_.constraints()[ci];
        const auto& tab = tables_[static_cast<std::size_t>(c.tmpl)];
        if (binary_[ci]) {
            const Var x = c.vars[0];
            const Var y = c.vars[1];
            const DomainMask dx = at(dom, x);
            const DomainMask dy = at(dom, y);
            DomainMask nx = 0;
            DomainMask ny = 0;
            for (DomainMask m = dx; m; m &= m - 1) {
                const int a = std::countr_zero(m) + 1;
                if (tab.row[static_cast<std::size_t>(a)] & dy) nx |= value_bit(a);
            }
            for (DomainMask m = dy; m; m &= m - 1) {
                const int b = std::countr_zero(m) + 1;
                if (tab.col[static_cast<std::size_t>(b)] & nx) ny |= value_bit(b);
            }
            if (nx != dx) {
                at(dom, x) = nx;
                changed.push_back(x);
            }
            if (ny != dy) {
                at(dom, y) = ny;
                changed.push_back(y);
            }
            return nx && ny;
        }
        const std::size_t k = c.vars.size();
        std::vector<DomainMask> support(k, 0);
        for (const auto& t : tab.allowed) {
            bool ok = true;
            for (std::size_t i = 0; i < k && ok; ++i) {
                if (!(at(dom, c.vars[i]) & value_bit(t[i]))) ok = false;
                for (std::size_t j = 0; j < i && ok; ++j)
                    if (c.vars[j] == c.vars[i] && t[j] != t[i]) ok = false;
            }
            if (!ok) continue;
            for (std::size_t i = 0; i < k; ++i) support[i] |= value_bit(t[i]);
        }
        for (std::size_t i = 0; i < k; ++i) {
            DomainMask& d = at(dom, c.vars[i]);
            const DomainMask nd = d & support[i];
            if (nd != d) {
                d = nd;
                changed.push_back(c.vars[i]);
            }
            if (!nd) return false;
        }
        return true;
    }

    bool propagate(std::vector<DomainMask>& dom, const std::vector<std::size_t>& seed) {
        std::vector<std::size_t> queue;
        for (auto ci : seed)
            if (!queued_[ci]) {
                queued_[ci] = 1;
                queue.push_back(ci);
            }
        std::vector<Var> changed;
        bool ok = true;
        std::size_t head = 0;
        while (head < queue.size()) {
            const std::size_t ci = queue[head++];
            queued_[ci] = 0;
            changed.clear();
            if (!revise(dom, ci, changed)) {
                ++weight_[ci];
                ok = false;
                break;
            }
            for (Var v : changed)
                for (std::size_t cj : incident_[static_cast<std::size_t>(v - 1)])
                    if (!queued_[cj]) {
                        queued_[cj] = 1;
                        queue.push_back(cj);
                    }
        }
        for (; head < queue.size(); ++head) queued_[queue[head]] = 0;
        return ok;
    }

    // Every tuple in the product of current domains is allowed.
    bool entailed(const std::vector<DomainMask>& dom, std::size_t ci) const {
        const auto& c = inst_.constraints()[ci];
        const auto& tmpl = inst_.tmpl_of(c);
        if (tmpl.num_restrictions() == 0) return true;
        if (binary_[ci]) {
            const auto& tab = tables_[static_cast<std::size_t>(c.tmpl)];
            const DomainMask dy = dom[static_cast<std::size_t>(c.vars[1] - 1)];
            for (DomainMask m = dom[static_cast<std::size_t>(c.vars[0] - 1)]; m; m &= m - 1)
                if ((tab.row[static_cast<std::size_t>(std::countr_zero(m) + 1)] & dy) != dy) return false;
            return true;
        }
        for (const auto& r : tmpl.restrictions()) {
            bool inside = true;
            for (std::size_t i = 0; i < r.size() && inside; ++i) {
                if (!(dom[static_cast<std::size_t>(c.vars[i] - 1)] & value_bit(r[i]))) inside = false;
                for (std::size_t j = 0; j < i && inside; ++j)
                    if (c.vars[j] == c.vars[i] && r[j] != r[i]) inside = false;
            }
            if (inside) return false;
        }
        return true;
    }

    static bool fixed(DomainMask m) { return std::has_single_bit(m); }

    // Satisfies the unfixed variables among `vars`; results are written into dom.
    bool search(std::vector<DomainMask>& dom, const std::vector<Var>& vars, int depth) {
        // Components of unfixed variables linked by active constraints,
        // recomputed every few levels.
        const bool split = depth % kSplitPeriod == 0;
        ++epoch_;
        std::vector<Var> unfixed;
        for (Var v : vars)
            if (!fixed(dom[static_cast<std::size_t>(v - 1)])) {
                unfixed.push_back(v);
                stamp_[static_cast<std::size_t>(v - 1)] = epoch_;
            }
        if (unfixed.empty()) return true;

        std::vector<int> parent(unfixed.size());
        std::iota(parent.begin(), parent.end(), 0);
        std::vector<std::uint64_t> active_degree(unfixed.size(), 0);
        for (std::size_t i = 0; i < unfixed.size(); ++i) comp_of_[static_cast<std::size_t>(unfixed[i] - 1)] = static_cast<int>(i);
        auto find = [&](int x) {
            while (parent[static_cast<std::size_t>(x)] != x) {
                parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
                x = parent[static_cast<std::size_t>(x)];
            }
            return x;
        };
        for (Var v : unfixed) {
            for (std::size_t ci : incident_[static_cast<std::size_t>(v - 1)]) {
                const auto& c = inst_.constraints()[ci];
                // Handle each constraint once, from its smallest unfixed variable.
                auto& distinct = scratch_;
                distinct.clear();
                bool smaller = false;
                for (Var w : c.vars) {
                    if (stamp_[static_cast<std::size_t>(w - 1)] != epoch_) continue;
                    if (w < v) smaller = true;
                    if (std::find(distinct.begin(), distinct.end(), w) == distinct.end()) distinct.push_back(w);
                }
                if (smaller) continue;
                if (!split) {
                    if (distinct.size() >= 2)
                        for (Var w : distinct)
                            active_degree[static_cast<std::size_t>(comp_of_[static_cast<std::size_t>(w - 1)])] += weight_[ci];
                    continue;
                }
                if (distinct.size() < 2 || entailed(dom, ci)) continue;
                const int root = find(comp_of_[static_cast<std::size_t>(distinct[0] - 1)]);
                for (Var w : distinct) {
                    active_degree[static_cast<std::size_t>(comp_of_[static_cast<std::size_t>(w - 1)])] += weight_[ci];
                    parent[static_cast<std::size_t>(find(comp_of_[static_cast<std::size_t>(w - 1)]))] = root;
                }
            }
        }
        if (!split) return branch(dom, unfixed, active_degree, depth);
        std::vector<std::vector<Var>> comps;
        std::vector<std::vector<std::uint64_t>> comp_degree;
        std::vector<int> index(unfixed.size(), -1);
        for (std::size_t i = 0; i < unfixed.size(); ++i) {
            const int r = find(static_cast<int>(i));
            if (index[static_cast<std::size_t>(r)] < 0) {
                index[static_cast<std::size_t>(r)] = static_cast<int>(comps.size());
                comps.emplace_back();
                comp_degree.emplace_back();
            }
            comps[static_cast<std::size_t>(index[static_cast<std::size_t>(r)])].push_back(unfixed[i]);
            comp_degree[static_cast<std::size_t>(index[static_cast<std::size_t>(r)])].push_back(active_degree[i]);
        }
        std::vector<std::size_t> order(comps.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return comps[a].size() < comps[b].size(); });
        for (std::size_t idx : order) {
            const auto& comp = comps[idx];
            if (comp.size() == 1) {
                // No active constraint touches it: every remaining value is supported.
                DomainMask& m = dom[static_cast<std::size_t>(comp[0] - 1)];
                m &= ~m + 1;
                continue;
            }
            if (!branch(dom, comp, comp_degree[idx], depth)) return false;
        }
        return true;
    }

    bool branch(std::vector<DomainMask>& dom, const std::vector<Var>& comp, const std::vector<std::uint64_t>& degree,
                int depth) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < comp.size(); ++i) {
            const int si = std::popcount(dom[static_cast<std::size_t>(comp[i] - 1)]);
            const int sb = std::popcount(dom[static_cast<std::size_t>(comp[best] - 1)]);
            if (si < sb || (si == sb && degree[i] > degree[best])) best = i;
        }
        const Var v = comp[best];
        for (DomainMask m = dom[static_cast<std::size_t>(v - 1)]; m; m &= m - 1) {
            if (budget_ && nodes_ >= budget_) throw BudgetExhausted{};
            ++nodes_;
            auto next = dom;
            next[static_cast<std::size_t>(v - 1)] = m & (~m + 1);
            if (propagate(next, incident_[static_cast<std::size_t>(v - 1)]) && search(next, comp, depth + 1)) {
                dom = std::move(next);
                return true;
            }
        }
        return false;
    }

    const CspInstance& inst_;
    std::uint64_t budget_;
    std::uint64_t nodes_ = 0;
    std::vector<TemplateTables> tables_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<char> binary_;
    std::vector<char> queued_;
    // Grows each time the constraint wipes out a domain.
    std::vector<std::uint64_t> weight_;
    std::vector<std::uint64_t> stamp_;
    std::vector<Var> scratch_;
    std::vector<int> comp_of_;
    std::uint64_t epoch_ = 0;
};

// Depth-first enumeration in variable order 1..n; each constraint is checked
// once its largest variable is assigned.
class Enumerator {
public:
    explicit Enumerator(const CspInstance& inst) : inst_(inst), values_(static_cast<std::size_t>(inst.num_vars()), 0) {
        checks_.resize(static_cast<std::size_t>(inst.num_vars()));
        for (std::size_t ci = 0; ci < inst.constraints().size(); ++ci) {
            const auto& vars = inst.constraints()[ci].vars;
            const Var last = *std::max_element(vars.begin(), vars.end());
            checks_[static_cast<std::size_t>(last - 1)].push_back(ci);
        }
    }

    // Visits satisfying assignments in lexicographic order until visit returns false.
    template <class Visit>
    void run(Visit&& visit) {
        if (inst_.trivially_unsat()) return;
        stop_ = false;
        dfs(1, visit);
    }

    const std::vector<Value>& values() const { return values_; }

private:
    template <class Visit>
    void dfs(Var v, Visit& visit) {
        if (v > inst_.num_vars()) {
            if (!visit()) stop_ = true;
            return;
        }
        std::vector<Value> tuple;
        for (DomainMask m = inst_.domain(v); m && !stop_; m &= m - 1) {
            values_[static_cast<std::size_t>(v - 1)] = std::countr_zero(m) + 1;
            bool ok = true;
            for (std::size_t ci : checks_[static_cast<std::size_t>(v - 1)]) {
                const auto& c = inst_.constraints()[ci];
                tuple.clear();
                for (Var w : c.vars) tuple.push_back(values_[static_cast<std::size_t>(w - 1)]);
                const auto& t = inst_.tmpl_of(c);
                if (t.forbids_code(t.encode(tuple))) {
                    ok = false;
                    break;
                }
            }
            if (ok) dfs(v + 1, visit);
        }
        values_[static_cast<std::size_t>(v - 1)] = 0;
    }

    const CspInstance& inst_;
    std::vector<Value> values_;
    std::vector<std::vector<std::size_t>> checks_;
    bool stop_ = false;
};

}  // namespace

SolveOutcome solve(const CspInstance& instance, const SolveOptions& options) {
    auto out = Mac(instance, options.node_budget).run();
    if (out.assignment && !evaluate(instance, *out.assignment))
        throw std::logic_error("solver returned an assignment that fails evaluation");
    return out;
}

std::optional<Assignment> solve(const CspInstance& instance) {
    return solve(instance, SolveOptions{0}).assignment;
}

std::optional<Assignment> brute_force(const CspInstance& instance, std::uint64_t cap) {
    long double space = 1.0L;
    for (int i = 0; i < instance.num_vars(); ++i) space *= static_cast<long double>(instance.domain_size());
    if (space > static_cast<long double>(cap))
        throw Unsupported("brute force refused: d^n = " + std::to_string(static_cast<double>(space)) +
                          " exceeds cap " + std::to_string(cap));
    Enumerator e(instance);
    std::optional<Assignment> found;
    e.run([&] {
        found = Assignment{e.values()};
        return false;
    });
    return found;
}

std::optional<Assignment> solve_excluding_value(const CspInstance& instance, Value excluded) {
    if (instance.domain_size() < 2) throw InvalidInput("excluding a value needs d >= 2");
    if (excluded < 1 || excluded > instance.domain_size()) throw InvalidInput("excluded value outside 1..d");
    std::vector<std::pair<Var, Value>> pairs;
    for (Var v = 1; v <= instance.num_vars(); ++v) pairs.emplace_back(v, excluded);
    return solve(forbid_values(instance, pairs));
}

std::uint64_t count_solutions(const CspInstance& instance, std::uint64_t cap) {
    std::uint64_t count = 0;
    if (cap == 0) return 0;
    Enumerator e(instance);
    e.run([&] { return ++count < cap; });
    return count;
}

// ------------------------------------------------------------ forcing

std::vector<Var> ImplicationClosure::forced_to(Value gamma) const {
    std::vector<Var> out;
    for (const auto& f : forced)
        if (f.value == gamma) out.push_back(f.var);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void require_binary(int k) {
    if (k != 2) throw Unsupported("forcing analysis is defined for k = 2 only");
}

// Values of `other` compatible with `self` = a under constraint c.
DomainMask compatible(const CspInstance& inst, const Constraint& c, Var self, Value a, DomainMask other_domain) {
    const auto& t = inst.tmpl_of(c);
    const bool self_first = c.vars[0] == self;
    DomainMask out = 0;
    Value tuple[2];
    for (DomainMask m = other_domain; m; m &= m - 1) {
        const Value b = std::countr_zero(m) + 1;
        tuple[0] = self_first ? a : b;
        tuple[1] = self_first ? b : a;
        if (!t.forbids_code(t.encode(tuple))) out |= value_bit(b);
    }
    return out;
}

}  // namespace

ImplicationClosure implication_closure(const CspInstance& instance, Var source, Value value) {
    require_binary(instance.arity());
    if (source < 1 || source > instance.num_vars()) throw InvalidInput("source variable outside 1..n");
    if (value < 1 || value > instance.domain_size()) throw InvalidInput("source value outside 1..d");

    const auto& cons = instance.constraints();
    std::vector<std::vector<std::size_t>> incident(static_cast<std::size_t>(instance.num_vars()));
    for (std::size_t ci = 0; ci < cons.size(); ++ci) {
        const auto& vs = cons[ci].vars;
        if (vs[0] == vs[1]) continue;
        incident[static_cast<std::size_t>(vs[0] - 1)].push_back(ci);
        incident[static_cast<std::size_t>(vs[1] - 1)].push_back(ci);
    }

    ImplicationClosure out;
    out.source = source;
    out.source_value = value;
    std::vector<Value> forced(static_cast<std::size_t>(instance.num_vars()), 0);
    std::vector<char> blocked(static_cast<std::size_t>(instance.num_vars()), 0);
    forced[static_cast<std::size_t>(source - 1)] = value;
    std::deque<Var> queue{source};
    while (!queue.empty()) {
        const Var w = queue.front();
        queue.pop_front();
        if (blocked[static_cast<std::size_t>(w - 1)]) continue;
        const Value a = forced[static_cast<std::size_t>(w - 1)];
        for (std::size_t ci : incident[static_cast<std::size_t>(w - 1)]) {
            const auto& c = cons[ci];
            const Var u = c.vars[0] == w ? c.vars[1] : c.vars[0];
            const DomainMask ok = compatible(instance, c, w, a, instance.domain(u));
            if (ok == 0) {
                out.dead.emplace_back(w, a);
                continue;
            }
            if (!std::has_single_bit(ok)) continue;
            const Value g = std::countr_zero(ok) + 1;
            Value& slot = forced[static_cast<std::size_t>(u - 1)];
            if (slot == g) continue;
            if (slot != 0) {
                out.truncated = true;
                if (u != source) blocked[static_cast<std::size_t>(u - 1)] = 1;
                continue;
            }
            slot = g;
            out.forced.push_back({u, g, w, ci});
            queue.push_back(u);
        }
    }
    std::sort(out.dead.begin(), out.dead.end());
    out.dead.erase(std::unique(out.dead.begin(), out.dead.end()), out.dead.end());
    return out;
}

bool certify(const CspInstance& instance, const ImplicationClosure& closure) {
    require_binary(instance.arity());
    std::vector<Value> known(static_cast<std::size_t>(instance.num_vars()) + 1, 0);
    known[static_cast<std::size_t>(closure.source)] = closure.source_value;
    for (const auto& f : closure.forced) {
        if (f.var == closure.source || known[static_cast<std::size_t>(f.var)] != 0) return false;
        if (f.constraint >= instance.constraints().size()) return false;
        const auto& c = instance.constraints()[f.constraint];
        const bool links = (c.vars[0] == f.parent && c.vars[1] == f.var) || (c.vars[1] == f.parent && c.vars[0] == f.var);
        if (!links) return false;
        const Value a = known[static_cast<std::size_t>(f.parent)];
        if (a == 0) return false;
        if (compatible(instance, c, f.parent, a, instance.domain(f.var)) != value_bit(f.value)) return false;
        known[static_cast<std::size_t>(f.var)] = f.value;
    }
    return true;
}

std::vector<Value> bad_values(const ConstraintDistribution& dist) {
    require_binary(dist.arity());
    const int d = dist.domain_size();
    const DomainMask all = full_mask(d);
    std::vector<char> bad(static_cast<std::size_t>(d) + 1, 0);
    // forces[a] = values reachable in one template-level forcing step from a.
    std::vector<DomainMask> forces(static_cast<std::size_t>(d) + 1, 0);
    for (const auto& e : dist.entries()) {
        const auto tab = build_tables(e.tmpl);
        for (Value a = 1; a <= d; ++a) {
            const DomainMask row = tab.row[static_cast<std::size_t>(a)] & all;
            const DomainMask col = tab.col[static_cast<std::size_t>(a)] & all;
            if (row == 0 || col == 0) bad[static_cast<std::size_t>(a)] = 1;
            if (std::has_single_bit(row)) forces[static_cast<std::size_t>(a)] |= row;
            if (std::has_single_bit(col)) forces[static_cast<std::size_t>(a)] |= col;
        }
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (Value a = 1; a <= d; ++a) {
            if (bad[static_cast<std::size_t>(a)]) continue;
            for (DomainMask m = forces[static_cast<std::size_t>(a)]; m; m &= m - 1)
                if (bad[static_cast<std::size_t>(std::countr_zero(m) + 1)]) {
                    bad[static_cast<std::size_t>(a)] = 1;
                    grew = true;
                    break;
                }
        }
    }
    std::vector<Value> out;
    for (Value a = 1; a <= d; ++a)
        if (bad[static_cast<std::size_t>(a)]) out.push_back(a);
    return out;
}

}  // namespace rcsp
