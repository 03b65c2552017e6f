#pragma once

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace dplab {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double measured = 0.0;
    std::string threshold;  ///< human-readable pass rule
    double seconds = 0.0;
    double time_limit = 0.0;  ///< 0 = none
    std::string note;
};

struct AcceptanceOptions {
    bool quick = false;
    std::set<int> criteria;  ///< empty = all 14
    std::filesystem::path out_dir = "dplab_out/verify";
    bool reproducible = false;
    int threads = 1;
    std::function<void(const CriterionResult&)> on_result;
};

constexpr int kCriterionCount = 14;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

/// "[PASS]  3 name  measured=... rule ... (12.3 s)"; timing omitted when reproducible.
std::string format_result_line(const CriterionResult& r, bool reproducible);

/// acceptance.csv and acceptance.json under opt.out_dir.
void write_acceptance_report(const std::vector<CriterionResult>& results, const AcceptanceOptions& opt);

}  // namespace dplab
