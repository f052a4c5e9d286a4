#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rcsp/scanner.hpp"

namespace rcsp {

/// Everything needed to rerun a scan. Serialized as JSON.
struct ExperimentConfig {
    std::string name;
    std::string dist = "ed3";  // distribution spec, see distribution_from_spec
    std::string target;        // target hypergraph file for a bare `hom` spec
    Model model = Model::simple;
    std::vector<int> n_list;
    std::vector<double> c_grid;
    std::size_t trials = 100;
    std::uint64_t seed = 0;
    std::uint64_t node_budget = 10'000'000;
    unsigned workers = 1;
    double level_hi = 0.8;
    double level_lo = 0.2;
    double ratio = 0.6;
    std::string csv_out;
    std::string json_out;
    std::string svg_out;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

std::string config_to_json(const ExperimentConfig& config);
/// Throws InvalidInput on missing or ill-typed fields, and when `check_files`
/// is set and the target file does not exist.
ExperimentConfig config_from_json(std::string_view text, bool check_files = true);

/// Evenly spaced grid from..to inclusive, rounded to 1e-9 to keep labels clean.
std::vector<double> make_grid(double from, double to, double step);

/// Named experiments. `split5` expands to one config per q.
std::vector<std::string> preset_names();
std::vector<ExperimentConfig> preset(const std::string& name, std::uint64_t seed);

}  // namespace rcsp
