#include "rcsp/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "rcsp/error.hpp"

namespace rcsp {

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["name"] = c.name;
    j["dist"] = c.dist;
    j["target"] = c.target;
    j["model"] = to_string(c.model);
    j["n"] = c.n_list;
    j["c"] = c.c_grid;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["node_budget"] = c.node_budget;
    j["workers"] = c.workers;
    j["level_hi"] = c.level_hi;
    j["level_lo"] = c.level_lo;
    j["ratio"] = c.ratio;
    j["csv_out"] = c.csv_out;
    j["json_out"] = c.json_out;
    j["svg_out"] = c.svg_out;
    return j.dump(2);
}

ExperimentConfig config_from_json(std::string_view text, bool check_files) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field, bool required) {
        if (!j.contains(key)) {
            if (required) throw InvalidInput(std::string("config is missing '") + key + "'");
            return;
        }
        try {
            j.at(key).get_to(field);
        } catch (const nlohmann::json::exception&) {
            throw InvalidInput(std::string("config field '") + key + "' has the wrong type");
        }
    };
    std::string model = "simple";
    get("name", c.name, false);
    get("dist", c.dist, true);
    get("target", c.target, false);
    get("model", model, false);
    get("n", c.n_list, true);
    get("c", c.c_grid, true);
    get("trials", c.trials, false);
    get("seed", c.seed, true);
    get("node_budget", c.node_budget, false);
    get("workers", c.workers, false);
    get("level_hi", c.level_hi, false);
    get("level_lo", c.level_lo, false);
    get("ratio", c.ratio, false);
    get("csv_out", c.csv_out, false);
    get("json_out", c.json_out, false);
    get("svg_out", c.svg_out, false);
    c.model = model_from_string(model);
    if (check_files && !c.target.empty() && !std::filesystem::exists(c.target))
        throw InvalidInput("target file '" + c.target + "' does not exist");
    return c;
}

std::vector<double> make_grid(double from, double to, double step) {
    if (!(step > 0.0) || to < from) throw InvalidInput("grid needs step > 0 and to >= from");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(std::round((from + static_cast<double>(i) * step) * 1e9) / 1e9);
    return out;
}

std::vector<std::string> preset_names() { return {"ed3-coarse", "twosat-sharp", "dkt-231", "hom-k3", "split5"}; }

std::vector<ExperimentConfig> preset(const std::string& name, std::uint64_t seed) {
    ExperimentConfig c;
    c.name = name;
    c.seed = seed;
    if (name == "ed3-coarse") {
        c.dist = "ed3";
        c.n_list = {100, 200, 400};
        c.c_grid = make_grid(1.0, 6.0, 0.25);
        c.trials = 400;
        c.ratio = 0.5;
        return {c};
    }
    if (name == "twosat-sharp") {
        c.dist = "dkt:2,2,1";
        c.n_list = {100, 200, 400};
        c.c_grid = make_grid(1.0, 3.0, 0.1);
        c.trials = 400;
        c.ratio = 0.7;
        return {c};
    }
    if (name == "dkt-231") {
        // 3-SAT: about c n / 6 clauses, so the clause ratio 4.27 sits near c = 25.6.
        c.dist = "dkt:2,3,1";
        c.n_list = {50, 100, 150};
        c.c_grid = make_grid(16.0, 36.0, 2.0);
        c.trials = 100;
        return {c};
    }
    if (name == "hom-k3") {
        c.dist = "hom:K3";
        c.n_list = {100, 200, 300};
        c.c_grid = make_grid(3.0, 6.0, 0.25);
        c.trials = 200;
        c.node_budget = 2'000'000;
        c.ratio = 0.7;
        return {c};
    }
    if (name == "split5") {
        std::vector<ExperimentConfig> out;
        for (const char* q : {"0.35", "0.18"}) {
            ExperimentConfig s = c;
            s.name = std::string("split5-q") + q;
            s.dist = std::string("split5:") + q;
            s.n_list = {100, 200, 400};
            s.c_grid = make_grid(1.0, 8.0, 0.5);
            s.trials = 200;
            s.node_budget = 2'000'000;
            out.push_back(s);
        }
        return out;
    }
    throw InvalidInput("unknown preset '" + name + "'");
}

}  // namespace rcsp
