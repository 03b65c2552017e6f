#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "dplab/acceptance.hpp"

int main(int argc, char** argv) {
    CLI::App app{"dplab acceptance"};
    dplab::AcceptanceOptions opt;
    std::string out = "acceptance_out";
    std::set<int> expect_fail;
    app.add_flag("--quick", opt.quick, "reduced resolutions");
    app.add_option("--out", out, "output directory");
    app.add_option("--criteria", opt.criteria, "subset")->delimiter(',');
    app.add_option("--expect-fail", expect_fail, "criteria with a documented failure")->delimiter(',');
    CLI11_PARSE(app, argc, argv);
    opt.out_dir = out;
    opt.on_result = [&](const dplab::CriterionResult& r) {
        std::cout << dplab::format_result_line(r, false);
        if (!r.pass && expect_fail.count(r.id)) std::cout << " (known failure)";
        if (r.pass && expect_fail.count(r.id)) std::cout << " (listed as known failure but passed)";
        std::cout << std::endl;
    };
    const auto results = dplab::run_acceptance(opt);
    dplab::write_acceptance_report(results, opt);
    int passed = 0;
    int unexpected = 0;
    for (const auto& r : results) {
        passed += r.pass;
        unexpected += !r.pass && !expect_fail.count(r.id);
    }
    std::cout << passed << "/" << results.size() << " criteria passed";
    if (unexpected == 0 && passed < static_cast<int>(results.size())) std::cout << " (remaining failures documented)";
    std::cout << std::endl;
    return unexpected == 0 ? 0 : 1;
}
