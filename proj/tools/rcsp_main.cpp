// rcsp command-line tool. Talks to the library only through rcsp.h.

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcsp/rcsp.h"

namespace {

using json = nlohmann::json;

constexpr int kExitInfo = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

// Thrown to unwind to main with an exit code after a message was printed.
struct Exit {
    int code;
};

void check(rcsp_status s, const std::string& context) {
    if (s == RCSP_OK) return;
    std::cerr << "rcsp: " << context << ": " << rcsp_last_error() << "\n";
    throw Exit{s == RCSP_ERR_INTERNAL ? kExitFail : kExitUsage};
}

// Takes ownership of a malloc'd string from the library.
std::string take(char* s) {
    std::string out = s ? s : "";
    rcsp_string_free(s);
    return out;
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using DistPtr = std::unique_ptr<rcsp_distribution, Deleter<rcsp_distribution, rcsp_distribution_free>>;
using InstPtr = std::unique_ptr<rcsp_instance, Deleter<rcsp_instance, rcsp_instance_free>>;
using GraphPtr = std::unique_ptr<rcsp_hypergraph, Deleter<rcsp_hypergraph, rcsp_hypergraph_free>>;
using TargetPtr = std::unique_ptr<rcsp_target, Deleter<rcsp_target, rcsp_target_free>>;
using ScanPtr = std::unique_ptr<rcsp_scan, Deleter<rcsp_scan, rcsp_scan_free>>;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "rcsp: cannot write '" << path << "'\n";
        throw Exit{kExitUsage};
    }
    out << text;
}

std::string read_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "rcsp: cannot open '" << path << "'\n";
        throw Exit{kExitUsage};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

DistPtr load_dist(const std::string& spec, const std::string& target) {
    rcsp_distribution* d = nullptr;
    check(rcsp_distribution_from_spec(spec.c_str(), target.empty() ? nullptr : target.c_str(), &d),
          "distribution '" + spec + "'");
    return DistPtr(d);
}

// ---- gen

struct GenArgs {
    std::string dist, target, model = "simple", out;
    int n = 0;
    double c = 0.0;
    std::uint64_t seed = 0;
};

int cmd_gen(const GenArgs& a) {
    auto dist = load_dist(a.dist, a.target);
    const int model = a.model == "hat" ? RCSP_MODEL_HAT : RCSP_MODEL_SIMPLE;
    rcsp_instance* raw = nullptr;
    check(rcsp_instance_sample(dist.get(), model, a.n, a.c, a.seed, &raw), "gen");
    InstPtr inst(raw);
    const std::string dist_spec = take([&] {
        char* s = nullptr;
        check(rcsp_distribution_spec(dist.get(), &s), "gen");
        return s;
    }());
    std::ostringstream header;
    header << "rcsp " << rcsp_version() << "\n"
           << "gen dist=" << dist_spec << " model=" << a.model << " n=" << a.n << " c=" << a.c
           << " seed=" << a.seed;
    if (!a.target.empty()) header << " target=" << a.target;
    char* text = nullptr;
    check(rcsp_instance_emit(inst.get(), header.str().c_str(), &text), "gen");
    write_output(a.out, take(text));
    return kExitInfo;
}

// ---- solve

struct SolveArgs {
    std::string file;
    std::uint64_t budget = 0;
    bool quiet = false;
};

int cmd_solve(const SolveArgs& a) {
    const std::string text = read_input(a.file);
    rcsp_instance* raw = nullptr;
    check(rcsp_instance_parse(text.c_str(), &raw), a.file);
    InstPtr inst(raw);
    int n = 0;
    check(rcsp_instance_info(inst.get(), &n, nullptr, nullptr, nullptr), "solve");
    std::vector<int> values(static_cast<std::size_t>(n));
    int result = 0;
    std::uint64_t nodes = 0;
    check(rcsp_solve(inst.get(), a.budget, &result, values.data(), &nodes), "solve");
    if (result == RCSP_SAT) {
        std::cout << "s SATISFIABLE\n";
        if (!a.quiet) {
            std::cout << "v";
            for (int v : values) std::cout << ' ' << v;
            std::cout << "\n";
        }
    } else if (result == RCSP_UNSAT) {
        std::cout << "s UNSATISFIABLE\n";
    } else {
        std::cout << "s UNKNOWN\n";
    }
    std::cout << "c nodes " << nodes << "\n";
    return result;
}

// ---- hom

int cmd_hom(const std::string& g_path, const std::string& h_path) {
    rcsp_hypergraph* g_raw = nullptr;
    check(rcsp_hypergraph_parse(read_input(g_path).c_str(), &g_raw), g_path);
    GraphPtr g(g_raw);
    rcsp_target* h_raw = nullptr;
    check(rcsp_target_parse(read_input(h_path).c_str(), &h_raw), h_path);
    TargetPtr h(h_raw);
    int n = 0;
    check(rcsp_hypergraph_info(g.get(), &n, nullptr, nullptr), "hom");
    std::vector<int> map(static_cast<std::size_t>(n));
    int found = 0;
    check(rcsp_homomorphism(g.get(), h.get(), &found, map.data()), "hom");
    if (!found) {
        std::cout << "s NO HOMOMORPHISM\n";
        return RCSP_UNSAT;
    }
    std::cout << "s HOMOMORPHIC\nv";
    for (int x : map) std::cout << ' ' << x;
    std::cout << "\n";
    return RCSP_SAT;
}

// ---- scan

struct ScanArgs {
    std::string preset, config, dist, target, model = "simple", out_dir, csv, json_out, svg, save_config;
    std::vector<int> n;
    double c_from = 0.0, c_to = -1.0, c_step = 0.1;
    std::vector<double> c_list;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed, budget;
    unsigned workers = 1;
    bool dry_run = false;
};

std::vector<json> scan_configs(const ScanArgs& a) {
    std::vector<json> configs;
    if (!a.preset.empty()) {
        if (!a.seed) {
            std::cerr << "rcsp: scan --preset needs --seed\n";
            throw Exit{kExitUsage};
        }
        char* arr = nullptr;
        check(rcsp_preset_configs(a.preset.c_str(), *a.seed, &arr), "scan");
        for (auto& c : json::parse(take(arr))) configs.push_back(c);
    } else if (!a.config.empty()) {
        json j;
        try {
            j = json::parse(read_input(a.config));
        } catch (const json::parse_error& e) {
            std::cerr << "rcsp: " << a.config << ": " << e.what() << "\n";
            throw Exit{kExitUsage};
        }
        if (j.is_array())
            for (auto& c : j) configs.push_back(c);
        else
            configs.push_back(j);
    } else {
        if (a.dist.empty() || a.n.empty() || !a.seed) {
            std::cerr << "rcsp: scan needs --preset, --config, or --dist with --n and --seed\n";
            throw Exit{kExitUsage};
        }
        std::vector<double> grid = a.c_list;
        if (grid.empty() && a.c_to >= a.c_from && a.c_step > 0.0) {
            const auto steps = static_cast<long>((a.c_to - a.c_from) / a.c_step + 1e-9);
            for (long i = 0; i <= steps; ++i) grid.push_back(std::round((a.c_from + static_cast<double>(i) * a.c_step) * 1e9) / 1e9);
        }
        json c = {{"name", "scan"}, {"dist", a.dist}, {"target", a.target}, {"model", a.model},
                  {"n", a.n},       {"c", grid},        {"seed", *a.seed}};
        configs.push_back(c);
    }
    for (auto& c : configs) {
        if (a.seed) c["seed"] = *a.seed;
        if (a.trials) c["trials"] = *a.trials;
        if (a.budget) c["node_budget"] = *a.budget;
        if (a.workers != 1 || !c.contains("workers")) c["workers"] = a.workers;
        if (!c.contains("c") || !c["c"].is_array() || c["c"].empty()) {
            std::cerr << "rcsp: scan: empty c grid\n";
            throw Exit{kExitUsage};
        }
        if (!c.contains("n") || !c["n"].is_array() || c["n"].empty()) {
            std::cerr << "rcsp: scan: empty n list\n";
            throw Exit{kExitUsage};
        }
    }
    return configs;
}

std::string out_path(const std::string& flag, const json& config, const char* key, const std::string& dir,
                     const std::string& ext) {
    if (!flag.empty()) return flag;
    if (config.contains(key) && config[key].is_string() && !config[key].get<std::string>().empty())
        return config[key].get<std::string>();
    if (!dir.empty()) return dir + "/" + config.value("name", std::string("scan")) + ext;
    return {};
}

int cmd_scan(const ScanArgs& a) {
    const auto configs = scan_configs(a);
    if (configs.size() > 1 && (!a.csv.empty() || !a.json_out.empty() || !a.svg.empty())) {
        std::cerr << "rcsp: preset has " << configs.size() << " configs; use --out-dir instead of file flags\n";
        return kExitUsage;
    }
    json normalized = json::array();
    for (const auto& c : configs) {
        char* norm = nullptr;
        check(rcsp_config_normalize(c.dump().c_str(), &norm), "scan config");
        normalized.push_back(json::parse(take(norm)));
    }
    if (!a.save_config.empty())
        write_output(a.save_config, (normalized.size() == 1 ? normalized[0] : normalized).dump(2) + "\n");
    if (a.dry_run) return kExitInfo;

    for (const auto& c : normalized) {
        rcsp_scan* raw = nullptr;
        check(rcsp_scan_run(c.dump().c_str(), &raw), "scan");
        ScanPtr scan(raw);
        char* csv = nullptr;
        check(rcsp_scan_csv(scan.get(), &csv), "scan");
        const std::string csv_path = out_path(a.csv, c, "csv_out", a.out_dir, ".csv");
        write_output(csv_path, take(csv));

        char* js = nullptr;
        check(rcsp_scan_json(scan.get(), &js), "scan");
        const std::string summary = take(js);
        const std::string json_path = out_path(a.json_out, c, "json_out", a.out_dir, ".json");
        if (!json_path.empty()) write_output(json_path, summary + "\n");
        const std::string svg_path = out_path(a.svg, c, "svg_out", a.out_dir, ".svg");
        if (!svg_path.empty()) {
            char* svg = nullptr;
            check(rcsp_scan_svg(scan.get(), &svg), "scan");
            write_output(svg_path, take(svg));
        }
        const auto s = json::parse(summary);
        std::cerr << c.value("name", std::string("scan")) << ": verdict " << s["verdict"]["result"].get<std::string>()
                  << " (" << s["verdict"]["reason"].get<std::string>() << ")\n";
    }
    return kExitInfo;
}

// ---- criticality

int cmd_criticality(const std::string& spec, const std::string& target, double c) {
    auto dist = load_dist(spec, target);
    char* out = nullptr;
    check(rcsp_criticality_json(dist.get(), c, &out), "criticality");
    auto j = json::parse(take(out));
    j["provenance"] = {{"tool", std::string("rcsp ") + rcsp_version()}, {"dist", spec}, {"c", c}};
    if (!target.empty()) j["provenance"]["target"] = target;
    std::cout << j.dump(2) << "\n";
    return kExitInfo;
}

// ---- verify

int cmd_verify(const std::string& preset, std::uint64_t seed, unsigned workers) {
    char* report = nullptr;
    int ok = 0;
    check(rcsp_verify(preset.c_str(), seed, workers, &report, &ok), "verify");
    std::cout << take(report) << (ok ? "verify: all passed\n" : "verify: FAILED\n");
    return ok ? kExitInfo : kExitFail;
}

int run(int argc, char** argv) {
    CLI::App app{"Random constraint satisfaction experiments"};
    app.set_version_flag("--version", std::string("rcsp ") + rcsp_version());
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "Sample a random instance");
    g->add_option("--dist", gen.dist, "Distribution spec, e.g. dkt:2,3,1, ed3, hom:K3")->required();
    g->add_option("--n", gen.n, "Number of variables")->required();
    g->add_option("--c", gen.c, "Density; p = c/n^(k-1)")->required();
    g->add_option("--seed", gen.seed, "RNG seed")->required();
    g->add_option("--model", gen.model, "simple or hat")->check(CLI::IsMember({"simple", "hat"}));
    g->add_option("--target", gen.target, "Target hypergraph file for --dist hom");
    g->add_option("--out,-o", gen.out, "Output file (default stdout)");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Decide an instance file (exit 10 sat, 20 unsat, 30 budget hit)");
    s->add_option("file", solve.file, "Instance file")->required();
    s->add_option("--budget", solve.budget, "Node budget, 0 = unlimited");
    s->add_flag("--quiet,-q", solve.quiet, "Omit the witness line");

    std::string g_file, h_file;
    auto* h = app.add_subcommand("hom", "Decide whether G maps homomorphically to H (exit 10 yes, 20 no)");
    h->add_option("G", g_file, "Source hypergraph")->required();
    h->add_option("H", h_file, "Target hypergraph")->required();

    ScanArgs scan;
    auto* sc = app.add_subcommand("scan", "Monte Carlo satisfiability scan over a (n, c) grid");
    sc->add_option("--preset", scan.preset, "Named experiment");
    sc->add_option("--config", scan.config, "JSON config file (object or array)");
    sc->add_option("--dist", scan.dist, "Distribution spec");
    sc->add_option("--target", scan.target, "Target hypergraph file for --dist hom");
    sc->add_option("--model", scan.model)->check(CLI::IsMember({"simple", "hat"}));
    sc->add_option("--n", scan.n, "Problem sizes")->delimiter(',');
    sc->add_option("--c", scan.c_list, "Explicit c values")->delimiter(',');
    sc->add_option("--c-from", scan.c_from);
    sc->add_option("--c-to", scan.c_to);
    sc->add_option("--c-step", scan.c_step);
    sc->add_option("--trials", scan.trials);
    sc->add_option("--seed", scan.seed, "RNG seed (required unless the config has one)");
    sc->add_option("--budget", scan.budget, "Solver node budget per instance");
    sc->add_option("--workers,-j", scan.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
    sc->add_option("--csv", scan.csv, "CSV path (default stdout)");
    sc->add_option("--json", scan.json_out, "Summary JSON path");
    sc->add_option("--svg", scan.svg, "SVG plot path");
    sc->add_option("--out-dir", scan.out_dir, "Write <name>.csv/.json/.svg here");
    sc->add_option("--save-config", scan.save_config, "Write the normalized config");
    sc->add_flag("--dry-run", scan.dry_run, "Validate and save the config without running");
    auto* preset_opt = sc->get_option("--preset");
    preset_opt->excludes(sc->get_option("--config"));
    preset_opt->excludes(sc->get_option("--dist"));
    sc->get_option("--config")->excludes(sc->get_option("--dist"));

    std::string crit_dist, crit_target;
    double crit_c = 0.0;
    auto* cr = app.add_subcommand("criticality", "Forcing-matrix criticality report as JSON (k = 2 only)");
    cr->add_option("--dist", crit_dist, "Distribution spec")->required();
    cr->add_option("--c", crit_c, "Density")->required();
    cr->add_option("--target", crit_target, "Target hypergraph file for --dist hom");

    std::string verify_name;
    std::uint64_t verify_seed = 1;
    unsigned verify_workers = 1;
    auto* v = app.add_subcommand("verify", "Run acceptance checks (exit 0 pass, 1 fail)");
    v->add_option("preset", verify_name, "all, ac1..ac11, or a named check")->required();
    v->add_option("--seed", verify_seed);
    v->add_option("--workers,-j", verify_workers)->check(CLI::Range(1u, 1024u));

    auto* p = app.add_subcommand("presets", "List scan and verify presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (g->parsed()) return cmd_gen(gen);
    if (s->parsed()) return cmd_solve(solve);
    if (h->parsed()) return cmd_hom(g_file, h_file);
    if (sc->parsed()) return cmd_scan(scan);
    if (cr->parsed()) return cmd_criticality(crit_dist, crit_target, crit_c);
    if (v->parsed()) return cmd_verify(verify_name, verify_seed, verify_workers);
    if (p->parsed()) {
        char* names = nullptr;
        check(rcsp_preset_names(&names), "presets");
        std::cout << "scan:";
        for (auto& n : json::parse(take(names))) std::cout << ' ' << n.get<std::string>();
        check(rcsp_verify_preset_names(&names), "presets");
        std::cout << "\nverify:";
        for (auto& n : json::parse(take(names))) std::cout << ' ' << n.get<std::string>();
        std::cout << "\n";
        return kExitInfo;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Exit& e) {
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "rcsp: " << e.what() << "\n";
        return kExitFail;
    }
}
