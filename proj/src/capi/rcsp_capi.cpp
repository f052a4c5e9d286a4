#include "rcsp/rcsp.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <new>
#include <optional>
#include <string>

#include "rcsp/acceptance.hpp"
#include "rcsp/criticality.hpp"
#include "rcsp/distributions.hpp"
#include "rcsp/error.hpp"
#include "rcsp/experiment.hpp"
#include "rcsp/format.hpp"
#include "rcsp/homomorphism.hpp"
#include "rcsp/hypergraph.hpp"
#include "rcsp/scanner.hpp"
#include "rcsp/solver.hpp"

struct rcsp_distribution {
    rcsp::NamedDistribution named;
};

struct rcsp_instance {
    rcsp::CspInstance inst;
};

struct rcsp_hypergraph {
    rcsp::Hypergraph graph;
    int arity;
};

struct rcsp_target {
    rcsp::TargetHypergraph target;
};

struct rcsp_scan {
    rcsp::ExperimentConfig config;
    rcsp::ScanResult result;
    rcsp::SharpnessReport sharpness;
};

namespace {

thread_local std::string last_error;

rcsp_status fail(rcsp_status s, const std::string& what) {
    last_error = what;
    return s;
}

// Runs body, mapping library exceptions to status codes.
template <class Body>
rcsp_status guarded(Body&& body) {
    try {
        body();
        return RCSP_OK;
    } catch (const rcsp::ParseError& e) {
        return fail(RCSP_ERR_PARSE, e.what());
    } catch (const rcsp::InvalidInput& e) {
        return fail(RCSP_ERR_INVALID, e.what());
    } catch (const rcsp::Unsupported& e) {
        return fail(RCSP_ERR_UNSUPPORTED, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RCSP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RCSP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RCSP_ERR_INTERNAL, "unknown error");
    }
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void need(const void* p, const char* what) {
    if (!p) throw rcsp::InvalidInput(std::string(what) + " is NULL");
}

std::string provenance_config(const rcsp::ExperimentConfig& c) {
    return nlohmann::json::parse(rcsp::config_to_json(c)).dump();
}

}  // namespace

extern "C" {

const char* rcsp_version(void) { return "0.1.0"; }

const char* rcsp_last_error(void) { return last_error.c_str(); }

void rcsp_string_free(char* s) { std::free(s); }

rcsp_status rcsp_distribution_from_spec(const char* spec, const char* target_path, rcsp_distribution** out) {
    return guarded([&] {
        need(spec, "spec");
        need(out, "out");
        *out = new rcsp_distribution{rcsp::distribution_from_spec(spec, target_path ? target_path : "")};
    });
}

void rcsp_distribution_free(rcsp_distribution* dist) { delete dist; }

rcsp_status rcsp_distribution_info(const rcsp_distribution* dist, int* d, int* k, size_t* templates) {
    return guarded([&] {
        need(dist, "dist");
        if (d) *d = dist->named.dist.domain_size();
        if (k) *k = dist->named.dist.arity();
        if (templates) *templates = dist->named.dist.size();
    });
}

rcsp_status rcsp_distribution_spec(const rcsp_distribution* dist, char** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = dup(dist->named.spec);
    });
}

rcsp_status rcsp_distribution_emit(const rcsp_distribution* dist, char** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = dup(rcsp::emit_distribution(dist->named.dist, dist->named.spec));
    });
}

rcsp_status rcsp_instance_sample(const rcsp_distribution* dist, int model, int n, double c, uint64_t seed,
                                 rcsp_instance** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        if (model != RCSP_MODEL_SIMPLE && model != RCSP_MODEL_HAT) throw rcsp::InvalidInput("unknown model");
        if (!(c >= 0.0)) throw rcsp::InvalidInput("c must be >= 0");
        const auto& d = dist->named.dist;
        if (n < d.arity()) throw rcsp::InvalidInput("n must be >= k");
        const double p = rcsp::density_to_p(c, n, d.arity());
        if (p > 1.0) throw rcsp::InvalidInput("p = c/n^(k-1) exceeds 1");
        const auto m = model == RCSP_MODEL_SIMPLE ? rcsp::Model::simple : rcsp::Model::hat;
        *out = new rcsp_instance{rcsp::sample_model(m, n, p, d, rcsp::Seed{seed})};
    });
}

rcsp_status rcsp_instance_parse(const char* text, rcsp_instance** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new rcsp_instance{rcsp::parse_instance(text)};
    });
}

rcsp_status rcsp_instance_read(const char* path, rcsp_instance** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new rcsp_instance{rcsp::parse_instance(rcsp::read_text_file(path))};
    });
}

void rcsp_instance_free(rcsp_instance* inst) { delete inst; }

rcsp_status rcsp_instance_info(const rcsp_instance* inst, int* n, int* d, int* k, size_t* constraints) {
    return guarded([&] {
        need(inst, "instance");
        if (n) *n = inst->inst.num_vars();
        if (d) *d = inst->inst.domain_size();
        if (k) *k = inst->inst.arity();
        if (constraints) *constraints = inst->inst.constraints().size();
    });
}

rcsp_status rcsp_instance_emit(const rcsp_instance* inst, const char* header_comment, char** out) {
    return guarded([&] {
        need(inst, "instance");
        need(out, "out");
        *out = dup(rcsp::emit_instance(inst->inst, header_comment ? header_comment : ""));
    });
}

rcsp_status rcsp_instance_evaluate(const rcsp_instance* inst, const int* values, size_t count, int* satisfied) {
    return guarded([&] {
        need(inst, "instance");
        need(satisfied, "satisfied");
        if (count && !values) throw rcsp::InvalidInput("values is NULL");
        rcsp::Assignment a{std::vector<rcsp::Value>(values, values + count)};
        *satisfied = rcsp::evaluate(inst->inst, a) ? 1 : 0;
    });
}

rcsp_status rcsp_solve(const rcsp_instance* inst, uint64_t node_budget, int* result, int* values, uint64_t* nodes) {
    return guarded([&] {
        need(inst, "instance");
        need(result, "result");
        const auto out = rcsp::solve(inst->inst, rcsp::SolveOptions{node_budget});
        *result = out.status == rcsp::SolveStatus::sat     ? RCSP_SAT
                  : out.status == rcsp::SolveStatus::unsat ? RCSP_UNSAT
                                                           : RCSP_INDETERMINATE;
        if (nodes) *nodes = out.nodes;
        if (values && out.assignment)
            for (std::size_t i = 0; i < out.assignment->size(); ++i) values[i] = out.assignment->values[i];
    });
}

rcsp_status rcsp_hypergraph_parse(const char* text, rcsp_hypergraph** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        auto parsed = rcsp::parse_hypergraph(text);
        *out = new rcsp_hypergraph{std::move(parsed.graph), parsed.arity};
    });
}

rcsp_status rcsp_hypergraph_read(const char* path, rcsp_hypergraph** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        auto parsed = rcsp::parse_hypergraph(rcsp::read_text_file(path));
        *out = new rcsp_hypergraph{std::move(parsed.graph), parsed.arity};
    });
}

void rcsp_hypergraph_free(rcsp_hypergraph* h) { delete h; }

rcsp_status rcsp_hypergraph_info(const rcsp_hypergraph* h, int* n, int* k, size_t* edges) {
    return guarded([&] {
        need(h, "hypergraph");
        if (n) *n = h->graph.num_vertices();
        if (k) *k = h->arity;
        if (edges) *edges = h->graph.num_edges();
    });
}

rcsp_status rcsp_target_parse(const char* text, rcsp_target** out) {
    return guarded([&] {
        need(text, "text");
        need(out, "out");
        *out = new rcsp_target{rcsp::target_from_text(text)};
    });
}

rcsp_status rcsp_target_read(const char* path, rcsp_target** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new rcsp_target{rcsp::target_from_text(rcsp::read_text_file(path))};
    });
}

void rcsp_target_free(rcsp_target* t) { delete t; }

rcsp_status rcsp_homomorphism(const rcsp_hypergraph* g, const rcsp_target* h, int* found, int* mapping) {
    return guarded([&] {
        need(g, "G");
        need(h, "H");
        need(found, "found");
        if (g->arity != h->target.arity())
            throw rcsp::InvalidInput("arity mismatch: G has k = " + std::to_string(g->arity) + ", H has k = " +
                                     std::to_string(h->target.arity()));
        const auto map = rcsp::has_homomorphism(g->graph, h->target);
        *found = map ? 1 : 0;
        if (map && mapping)
            for (std::size_t i = 0; i < map->size(); ++i) mapping[i] = (*map)[i];
    });
}

rcsp_status rcsp_criticality_json(const rcsp_distribution* dist, double c, char** out) {
    return guarded([&] {
        need(dist, "dist");
        need(out, "out");
        *out = dup(rcsp::report_to_json(rcsp::classify(dist->named.dist, c)));
    });
}

rcsp_status rcsp_preset_configs(const char* name, uint64_t seed, char** json_array) {
    return guarded([&] {
        need(name, "name");
        need(json_array, "out");
        auto arr = nlohmann::json::array();
        for (const auto& c : rcsp::preset(name, seed)) arr.push_back(nlohmann::json::parse(rcsp::config_to_json(c)));
        *json_array = dup(arr.dump(2));
    });
}

rcsp_status rcsp_preset_names(char** json_array) {
    return guarded([&] {
        need(json_array, "out");
        *json_array = dup(nlohmann::json(rcsp::preset_names()).dump());
    });
}

rcsp_status rcsp_config_normalize(const char* json, char** out) {
    return guarded([&] {
        need(json, "json");
        need(out, "out");
        *out = dup(rcsp::config_to_json(rcsp::config_from_json(json)));
    });
}

rcsp_status rcsp_scan_run(const char* config_json, rcsp_scan** out) {
    return guarded([&] {
        need(config_json, "config");
        need(out, "out");
        auto cfg = rcsp::config_from_json(config_json);
        const auto named = rcsp::distribution_from_spec(cfg.dist, cfg.target);
        rcsp::RunOptions run;
        run.solver.node_budget = cfg.node_budget;
        run.workers = cfg.workers;
        auto result = rcsp::scan(named.dist, named.spec, cfg.model, cfg.n_list, cfg.c_grid, cfg.trials,
                                 rcsp::Seed{cfg.seed}, run);
        auto sharp = rcsp::sharpness_verdict(result, cfg.ratio, cfg.level_hi, cfg.level_lo);
        *out = new rcsp_scan{std::move(cfg), std::move(result), std::move(sharp)};
    });
}

void rcsp_scan_free(rcsp_scan* scan) { delete scan; }

rcsp_status rcsp_scan_csv(const rcsp_scan* scan, char** out) {
    return guarded([&] {
        need(scan, "scan");
        need(out, "out");
        *out = dup(rcsp::scan_to_csv(scan->result, {std::string("rcsp ") + rcsp_version(),
                                                    "seed " + std::to_string(scan->config.seed),
                                                    "config " + provenance_config(scan->config)}));
    });
}

rcsp_status rcsp_scan_json(const rcsp_scan* scan, char** out) {
    return guarded([&] {
        need(scan, "scan");
        need(out, "out");
        auto j = nlohmann::json::parse(rcsp::scan_to_json(scan->result, scan->sharpness));
        j["provenance"] = {{"tool", std::string("rcsp ") + rcsp_version()},
                           {"config", nlohmann::json::parse(rcsp::config_to_json(scan->config))}};
        *out = dup(j.dump(2));
    });
}

rcsp_status rcsp_scan_svg(const rcsp_scan* scan, char** out) {
    return guarded([&] {
        need(scan, "scan");
        need(out, "out");
        *out = dup("<!-- rcsp " + std::string(rcsp_version()) + " config " + provenance_config(scan->config) + " -->\n" +
                   rcsp::scan_to_svg(scan->result));
    });
}

rcsp_status rcsp_verify(const char* preset, uint64_t seed, unsigned workers, char** report, int* all_passed) {
    return guarded([&] {
        need(preset, "preset");
        need(report, "report");
        need(all_passed, "all_passed");
        rcsp::AcceptanceOptions opt;
        opt.seed = seed;
        opt.workers = workers;
        std::string text;
        bool ok = true;
        for (int id : rcsp::verify_preset_criteria(preset)) {
            const auto r = rcsp::run_criterion(id, opt);
            ok = ok && r.pass;
            text += rcsp::format_result(r) + "\n";
        }
        *report = dup(text);
        *all_passed = ok ? 1 : 0;
    });
}

rcsp_status rcsp_verify_preset_names(char** json_array) {
    return guarded([&] {
        need(json_array, "out");
        *json_array = dup(nlohmann::json(rcsp::verify_preset_names()).dump());
    });
}

}  // extern "C"
