#include "rcsp/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>

#include "rcsp/error.hpp"
#include "rcsp/format.hpp"
#include "rcsp/homomorphism.hpp"

namespace rcsp {

namespace {

std::vector<Value> decode(std::size_t code, int d, int k) {
    std::vector<Value> t(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        t[static_cast<std::size_t>(i)] = static_cast<Value>(code % static_cast<std::size_t>(d)) + 1;
        code /= static_cast<std::size_t>(d);
    }
    return t;
}

std::size_t power(int base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= static_cast<std::size_t>(base);
        if (r > kMaxTemplateTable) throw InvalidInput("d^k too large");
    }
    return r;
}

std::string shortest(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

Rational to_rational(double q) {
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("q must lie in (0,1)");
    return Rational::approximate(q);
}

double parse_double(std::string_view s, const char* what) {
    double x = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidInput(std::string("bad ") + what + ": '" + std::string(s) + "'");
    return x;
}

int parse_int(std::string_view s, const char* what) {
    int x = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw InvalidInput(std::string("bad ") + what + ": '" + std::string(s) + "'");
    return x;
}

}  // namespace

DktDistribution dkt_distribution(int d, int k, int t) {
    if (d < 2 || k < 2) throw InvalidInput("dkt needs d >= 2 and k >= 2");
    const std::size_t tuples = power(d, k);
    if (t < 1 || static_cast<std::size_t>(t) > tuples) throw InvalidInput("dkt needs 1 <= t <= d^k");
    std::uint64_t count = 0;
    try {
        count = binomial(tuples, static_cast<std::uint64_t>(t));
    } catch (const InvalidInput&) {
        count = kMaxDktTemplates + 1;
    }
    if (count > kMaxDktTemplates)
        throw InvalidInput("dkt(" + std::to_string(d) + "," + std::to_string(k) + "," + std::to_string(t) +
                           ") has more than " + std::to_string(kMaxDktTemplates) + " templates");

    const Rational prob(1, count);
    std::vector<ConstraintDistribution::Entry> entries;
    entries.reserve(count);
    // t-combinations of tuple codes in lexicographic order.
    std::vector<std::size_t> comb(static_cast<std::size_t>(t));
    for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = i;
    while (true) {
        std::vector<std::vector<Value>> restrictions;
        restrictions.reserve(comb.size());
        for (auto code : comb) restrictions.push_back(decode(code, d, k));
        entries.push_back({ConstraintTemplate(d, k, std::move(restrictions)), prob});
        std::size_t i = comb.size();
        while (i > 0 && comb[i - 1] == tuples - comb.size() + (i - 1)) --i;
        if (i == 0) break;
        ++comb[i - 1];
        for (std::size_t j = i; j < comb.size(); ++j) comb[j] = comb[j - 1] + 1;
    }
    DktDistribution out{{ConstraintDistribution(std::move(entries)),
                         "dkt:" + std::to_string(d) + "," + std::to_string(k) + "," + std::to_string(t)},
                        false};
    out.nontrivial = static_cast<std::size_t>(t) < tuples / static_cast<std::size_t>(d);
    return out;
}

NamedDistribution example_ed3() {
    ConstraintTemplate one(3, 2, {{1, 2}, {1, 3}, {2, 1}, {3, 1}});
    ConstraintTemplate ne(3, 2, {{1, 1}, {2, 2}, {3, 3}});
    return {ConstraintDistribution({{one, Rational(2, 3)}, {ne, Rational(1, 3)}}), "ed3"};
}

Split5Family split5_family(double q) {
    const Rational pq = to_rational(q);
    std::vector<std::vector<Value>> mixed;
    for (Value a = 1; a <= 3; ++a)
        for (Value b = 4; b <= 5; ++b) {
            mixed.push_back({a, b});
            mixed.push_back({b, a});
        }
    auto c1 = mixed;
    c1.push_back({4, 4});
    c1.push_back({5, 5});
    auto c2 = mixed;
    for (Value a = 1; a <= 3; ++a) c2.push_back({a, a});
    ConstraintDistribution dist({{ConstraintTemplate(5, 2, std::move(c1)), pq},
                                 {ConstraintTemplate(5, 2, std::move(c2)), Rational(1, 1) - pq}});
    return {{std::move(dist), "split5:" + shortest(q)}, (1.0 - q) / q};
}

NamedDistribution prime_family(const NamedDistribution& base, double q) {
    const Rational pq = to_rational(q);
    const int d = base.dist.domain_size();
    const int k = base.dist.arity();
    if (k < 2) throw InvalidInput("prime family needs k >= 2");
    const int dd = d + 2;
    const std::size_t tuples = power(dd, k);

    std::vector<std::vector<Value>> mixed;
    std::vector<std::vector<Value>> upper_pairs;
    for (std::size_t code = 0; code < tuples; ++code) {
        auto t = decode(code, dd, k);
        const bool all_low = std::all_of(t.begin(), t.end(), [&](Value v) { return v <= d; });
        const bool all_high = std::all_of(t.begin(), t.end(), [&](Value v) { return v > d; });
        if (!all_low && !all_high)
            mixed.push_back(t);
        else if (all_high && t[0] == t[1])
            upper_pairs.push_back(t);
    }
    std::vector<ConstraintDistribution::Entry> entries;
    const Rational rest = Rational(1, 1) - pq;
    for (const auto& e : base.dist.entries()) {
        auto r = e.tmpl.restrictions();
        r.insert(r.end(), mixed.begin(), mixed.end());
        entries.push_back({ConstraintTemplate(dd, k, std::move(r)), rest * e.probability});
    }
    auto star = mixed;
    star.insert(star.end(), upper_pairs.begin(), upper_pairs.end());
    entries.push_back({ConstraintTemplate(dd, k, std::move(star)), pq});
    return {ConstraintDistribution(std::move(entries)), "prime:" + shortest(q) + ":" + base.spec};
}

NamedDistribution homomorphism_distribution(const TargetHypergraph& target, std::string target_name) {
    const int d = target.num_vertices();
    const int k = target.arity();
    const std::size_t tuples = power(d, k);
    std::vector<std::vector<Value>> forbidden;
    for (std::size_t code = 0; code < tuples; ++code) {
        auto t = decode(code, d, k);
        if (!target.contains(t)) forbidden.push_back(std::move(t));
    }
    return {ConstraintDistribution({{ConstraintTemplate(d, k, std::move(forbidden)), Rational(1, 1)}}),
            "hom:" + target_name};
}

NamedDistribution colouring_distribution(int colours) {
    if (colours < 1) throw InvalidInput("need at least one colour");
    auto named = homomorphism_distribution(complete_target(colours), "K" + std::to_string(colours));
    named.spec = "colour:" + std::to_string(colours);
    return named;
}

NamedDistribution distribution_from_spec(std::string_view spec, const std::string& target_path) {
    const auto colon = spec.find(':');
    const std::string_view name = spec.substr(0, colon);
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

    if (name == "ed3" && colon == std::string_view::npos) return example_ed3();
    if (name == "dkt") {
        std::vector<int> parts;
        std::size_t start = 0;
        while (start <= rest.size()) {
            auto comma = rest.find(',', start);
            if (comma == std::string_view::npos) comma = rest.size();
            parts.push_back(parse_int(rest.substr(start, comma - start), "dkt parameter"));
            start = comma + 1;
        }
        if (parts.size() != 3) throw InvalidInput("dkt spec must be dkt:d,k,t");
        return dkt_distribution(parts[0], parts[1], parts[2]).named;
    }
    if (name == "split5") return split5_family(parse_double(rest, "q")).named;
    if (name == "colour" || name == "color") return colouring_distribution(parse_int(rest, "colour count"));
    if (name == "prime") {
        const auto sep = rest.find(':');
        if (sep == std::string_view::npos) throw InvalidInput("prime spec must be prime:q:<base spec>");
        const double q = parse_double(rest.substr(0, sep), "q");
        return prime_family(distribution_from_spec(rest.substr(sep + 1), target_path), q);
    }
    if (name == "hom") {
        std::string path = colon == std::string_view::npos ? target_path : std::string(rest);
        if (path.empty()) throw InvalidInput("hom spec needs a target file (hom:<file> or --target)");
        static const std::regex builtin("([KC])([0-9]+)");
        std::smatch m;
        if (std::regex_match(path, m, builtin)) {
            const int size = std::stoi(m[2]);
            auto target = m[1] == "K" ? complete_target(size) : cycle_target(size);
            auto named = homomorphism_distribution(target, path);
            return named;
        }
        auto named = homomorphism_distribution(target_from_text(read_text_file(path)), path);
        return named;
    }
    if (name == "file") {
        if (rest.empty()) throw InvalidInput("file spec needs a path");
        return {parse_distribution(read_text_file(std::string(rest))), std::string(spec)};
    }
    throw InvalidInput("unknown distribution spec '" + std::string(spec) + "'");
}

}  // namespace rcsp
