#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcsp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

inline constexpr int kCriterionCount = 11;

/// Runs criterion `id` (1..11) at its stated sizes and tolerances.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// Verify presets: "all", "ac1".."ac11", or a named preset such as
/// "unicyclic-dkt" or "hom-lemmas". Throws InvalidInput for unknown names.
std::vector<int> verify_preset_criteria(const std::string& name);
std::vector<std::string> verify_preset_names();

/// "[PASS] AC7 sharp-threshold shrinkage (12.3 s): detail"
std::string format_result(const CriterionResult& r);

}  // namespace rcsp
