#pragma once

// Small builders and an independent enumeration oracle shared by the unit tests.

#include <cstdint>
#include <optional>
#include <vector>

#include "rcsp/model.hpp"

namespace test {

using namespace rcsp;

inline ConstraintTemplate not_equal(int d) {
    std::vector<std::vector<Value>> r;
    for (Value v = 1; v <= d; ++v) r.push_back({v, v});
    return ConstraintTemplate(d, 2, r);
}

inline ConstraintTemplate full_template(int d, int k) {
    std::vector<std::vector<Value>> r;
    std::vector<Value> t(static_cast<std::size_t>(k), 1);
    while (true) {
        r.push_back(t);
        int i = k - 1;
        while (i >= 0 && t[static_cast<std::size_t>(i)] == d) t[static_cast<std::size_t>(i--)] = 1;
        if (i < 0) break;
        ++t[static_cast<std::size_t>(i)];
    }
    return ConstraintTemplate(d, k, r);
}

inline CspInstance graph_instance(int n, const ConstraintTemplate& t, const std::vector<std::pair<Var, Var>>& edges) {
    std::vector<Constraint> cs;
    for (auto [a, b] : edges) cs.push_back({{a, b}, 0});
    return CspInstance(n, t.domain_size(), 2, {t}, cs);
}

// Plain odometer over all d^n assignments; shares no code with the solver.
inline std::uint64_t count_by_enumeration(const CspInstance& inst, std::optional<Assignment>* first = nullptr) {
    const int n = inst.num_vars(), d = inst.domain_size();
    std::vector<Value> vals(static_cast<std::size_t>(n), 1);
    std::uint64_t count = 0;
    while (true) {
        bool ok = true;
        for (int v = 0; v < n && ok; ++v)
            ok = (inst.domains()[static_cast<std::size_t>(v)] >> (vals[static_cast<std::size_t>(v)] - 1)) & 1;
        for (const auto& c : inst.constraints()) {
            if (!ok) break;
            std::vector<Value> tuple;
            for (Var x : c.vars) tuple.push_back(vals[static_cast<std::size_t>(x - 1)]);
            const auto& r = inst.tmpl_of(c).restrictions();
            for (const auto& f : r)
                if (f == tuple) ok = false;
        }
        if (ok) {
            if (first && !*first) *first = Assignment{vals};
            ++count;
        }
        int i = n - 1;
        while (i >= 0 && vals[static_cast<std::size_t>(i)] == d) vals[static_cast<std::size_t>(i--)] = 1;
        if (i < 0) break;
        ++vals[static_cast<std::size_t>(i)];
    }
    return count;
}

inline double mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double variance(const std::vector<double>& xs) {
    const double m = mean(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

}  // namespace test
