#include "rcsp/format.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "rcsp/error.hpp"

namespace rcsp {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> lines;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        Line line{number, {}};
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t' || raw[i] == '\r')) ++i;
            std::size_t j = i;
            while (j < raw.size() && raw[j] != ' ' && raw[j] != '\t' && raw[j] != '\r') ++j;
            if (j > i) line.tokens.push_back(raw.substr(i, j - i));
            i = j;
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (end == text.size()) break;
        pos = end + 1;
    }
    return lines;
}

long long to_int(const Line& line, std::size_t idx, const char* what) {
    if (idx >= line.tokens.size()) throw ParseError(line.number, std::string("missing ") + what);
    auto tok = line.tokens[idx];
    long long value = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line.number, std::string("expected integer ") + what + ", got '" + std::string(tok) + "'");
    return value;
}

void expect_arity(const Line& line, std::size_t count) {
    if (line.tokens.size() != count)
        throw ParseError(line.number, "'" + std::string(line.tokens[0]) + "' line expects " +
                                          std::to_string(count - 1) + " fields, got " +
                                          std::to_string(line.tokens.size() - 1));
}

int in_range(const Line& line, std::size_t idx, long long lo, long long hi, const char* what) {
    long long v = to_int(line, idx, what);
    if (v < lo || v > hi)
        throw ParseError(line.number, std::string(what) + " " + std::to_string(v) + " outside " + std::to_string(lo) +
                                          ".." + std::to_string(hi));
    return static_cast<int>(v);
}

/// Shared template-block reader; returns index one past the block.
std::size_t read_template(const std::vector<Line>& lines, std::size_t i, int d, int k,
                          std::vector<ConstraintTemplate>& templates) {
    const Line& head = lines[i];
    expect_arity(head, 3);
    int id = in_range(head, 1, 1, 1LL << 30, "template id");
    if (id != static_cast<int>(templates.size()) + 1)
        throw ParseError(head.number, "template id " + std::to_string(id) + " out of sequence (expected " +
                                          std::to_string(templates.size() + 1) + ")");
    long long count = to_int(head, 2, "restriction count");
    long long max_count = 1;
    for (int j = 0; j < k && max_count <= (1LL << 40); ++j) max_count *= d;
    if (count < 0 || count > max_count)
        throw ParseError(head.number, "restriction count " + std::to_string(count) + " outside 0.." + std::to_string(max_count));
    std::vector<std::vector<Value>> restrictions;
    restrictions.reserve(static_cast<std::size_t>(count));
    for (long long r = 0; r < count; ++r) {
        ++i;
        if (i >= lines.size()) throw ParseError(head.number, "template block ends early");
        const Line& line = lines[i];
        if (line.tokens[0] != "r") throw ParseError(line.number, "expected 'r' line inside template block");
        expect_arity(line, static_cast<std::size_t>(k) + 1);
        std::vector<Value> tuple;
        for (int j = 0; j < k; ++j) tuple.push_back(in_range(line, static_cast<std::size_t>(j) + 1, 1, d, "value"));
        restrictions.push_back(std::move(tuple));
    }
    try {
        templates.emplace_back(d, k, std::move(restrictions));
    } catch (const InvalidInput& e) {
        throw ParseError(head.number, e.what());
    }
    return i + 1;
}

void emit_template_block(std::ostringstream& out, std::size_t id, const ConstraintTemplate& t) {
    out << "t " << id << ' ' << t.num_restrictions() << '\n';
    for (const auto& r : t.restrictions()) {
        out << 'r';
        for (Value v : r) out << ' ' << v;
        out << '\n';
    }
}

void emit_comment(std::ostringstream& out, std::string_view comment) {
    std::size_t pos = 0;
    while (pos < comment.size()) {
        std::size_t end = comment.find('\n', pos);
        if (end == std::string_view::npos) end = comment.size();
        out << "# " << comment.substr(pos, end - pos) << '\n';
        pos = end + 1;
    }
}

}  // namespace

std::string emit_instance(const CspInstance& instance, std::string_view header_comment) {
    std::ostringstream out;
    emit_comment(out, header_comment);
    out << "csp " << instance.num_vars() << ' ' << instance.domain_size() << ' ' << instance.arity() << '\n';
    for (std::size_t i = 0; i < instance.templates().size(); ++i) emit_template_block(out, i + 1, instance.templates()[i]);
    for (const auto& c : instance.constraints()) {
        out << 'c';
        for (Var v : c.vars) out << ' ' << v;
        out << ' ' << c.tmpl + 1 << '\n';
    }
    const DomainMask full = full_mask(instance.domain_size());
    for (Var v = 1; v <= instance.num_vars(); ++v) {
        DomainMask m = instance.domain(v);
        if (m == full) continue;
        out << "u " << v;
        for (Value x = 1; x <= instance.domain_size(); ++x)
            if (m & value_bit(x)) out << ' ' << x;
        out << '\n';
    }
    return out.str();
}

CspInstance parse_instance(std::string_view text) {
    auto lines = tokenize(text);
    if (lines.empty()) throw ParseError(1, "empty input; expected 'csp <n> <d> <k>' header");
    const Line& head = lines[0];
    if (head.tokens[0] != "csp") throw ParseError(head.number, "expected 'csp <n> <d> <k>' header");
    expect_arity(head, 4);
    const int n = in_range(head, 1, 0, 1 << 28, "variable count");
    const int d = in_range(head, 2, 1, kMaxDomain, "domain size");
    const int k = in_range(head, 3, 1, 64, "arity");

    std::vector<ConstraintTemplate> templates;
    std::vector<Constraint> constraints;
    std::vector<DomainMask> domains(static_cast<std::size_t>(n), full_mask(d));
    std::vector<bool> domain_seen(static_cast<std::size_t>(n), false);
    std::size_t i = 1;
    while (i < lines.size()) {
        const Line& line = lines[i];
        const auto kind = line.tokens[0];
        if (kind == "t") {
            i = read_template(lines, i, d, k, templates);
            continue;
        }
        if (kind == "c") {
            expect_arity(line, static_cast<std::size_t>(k) + 2);
            Constraint c;
            for (int j = 0; j < k; ++j) c.vars.push_back(in_range(line, static_cast<std::size_t>(j) + 1, 1, n, "variable"));
            c.tmpl = in_range(line, static_cast<std::size_t>(k) + 1, 1, static_cast<long long>(templates.size()),
                              "template id") - 1;
            constraints.push_back(std::move(c));
        } else if (kind == "u") {
            if (line.tokens.size() < 2) throw ParseError(line.number, "'u' line needs a variable");
            Var v = in_range(line, 1, 1, n, "variable");
            if (domain_seen[static_cast<std::size_t>(v - 1)])
                throw ParseError(line.number, "duplicate domain line for variable " + std::to_string(v));
            domain_seen[static_cast<std::size_t>(v - 1)] = true;
            DomainMask m = 0;
            for (std::size_t j = 2; j < line.tokens.size(); ++j) {
                Value x = in_range(line, j, 1, d, "value");
                if (m & value_bit(x)) throw ParseError(line.number, "duplicate value in domain line");
                m |= value_bit(x);
            }
            domains[static_cast<std::size_t>(v - 1)] = m;
        } else if (kind == "r") {
            throw ParseError(line.number, "'r' line outside a template block");
        } else {
            throw ParseError(line.number, "unknown line type '" + std::string(kind) + "'");
        }
        ++i;
    }
    return CspInstance(n, d, k, std::move(templates), std::move(constraints), std::move(domains));
}

std::string emit_distribution(const ConstraintDistribution& dist, std::string_view header_comment) {
    std::ostringstream out;
    emit_comment(out, header_comment);
    out << "dist " << dist.domain_size() << ' ' << dist.arity() << '\n';
    for (std::size_t i = 0; i < dist.size(); ++i) emit_template_block(out, i + 1, dist.tmpl(i));
    for (std::size_t i = 0; i < dist.size(); ++i)
        out << "p " << i + 1 << ' ' << dist.probability(i).num << ' ' << dist.probability(i).den << '\n';
    return out.str();
}

ConstraintDistribution parse_distribution(std::string_view text) {
    auto lines = tokenize(text);
    if (lines.empty()) throw ParseError(1, "empty input; expected 'dist <d> <k>' header");
    const Line& head = lines[0];
    if (head.tokens[0] != "dist") throw ParseError(head.number, "expected 'dist <d> <k>' header");
    expect_arity(head, 3);
    const int d = in_range(head, 1, 1, kMaxDomain, "domain size");
    const int k = in_range(head, 2, 1, 64, "arity");

    std::vector<ConstraintTemplate> templates;
    std::vector<std::optional<Rational>> probs;
    std::size_t last_line = head.number;
    std::size_t i = 1;
    while (i < lines.size()) {
        const Line& line = lines[i];
        last_line = line.number;
        if (line.tokens[0] == "t") {
            i = read_template(lines, i, d, k, templates);
            continue;
        }
        if (line.tokens[0] != "p") throw ParseError(line.number, "unexpected '" + std::string(line.tokens[0]) + "' line in distribution");
        expect_arity(line, 4);
        int id = in_range(line, 1, 1, static_cast<long long>(templates.size()), "template id");
        long long num = to_int(line, 2, "numerator");
        long long den = to_int(line, 3, "denominator");
        if (num <= 0 || den <= 0 || num > den) throw ParseError(line.number, "probability must lie in (0, 1]");
        probs.resize(templates.size());
        if (probs[static_cast<std::size_t>(id - 1)]) throw ParseError(line.number, "duplicate probability line");
        probs[static_cast<std::size_t>(id - 1)] = Rational(static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den));
        ++i;
    }
    probs.resize(templates.size());
    std::vector<ConstraintDistribution::Entry> entries;
    for (std::size_t j = 0; j < templates.size(); ++j) {
        if (!probs[j]) throw ParseError(last_line, "template " + std::to_string(j + 1) + " has no probability line");
        entries.push_back({templates[j], *probs[j]});
    }
    try {
        return ConstraintDistribution(std::move(entries));
    } catch (const InvalidInput& e) {
        throw ParseError(last_line, e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << text;
    if (!out) throw InvalidInput("write to '" + path + "' failed");
}

}  // namespace rcsp
