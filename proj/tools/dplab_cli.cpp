#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dplab/acceptance.hpp"
#include "dplab/commands.hpp"
#include "dplab/config.hpp"
#include "dplab/errors.hpp"

namespace {

std::set<int> parse_criteria(const std::string& text) {
    std::set<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                out.insert(std::stoi(item));
            } else {
                const int a = std::stoi(item.substr(0, dash));
                const int b = std::stoi(item.substr(dash + 1));
                for (int k = a; k <= b; ++k) out.insert(k);
            }
        } catch (const std::exception&) {
            throw dplab::ConfigError("bad --criteria entry '" + item + "'");
        }
    }
    for (int k : out) {
        if (k < 1 || k > dplab::kCriterionCount) throw dplab::ConfigError("no acceptance criterion " + std::to_string(k));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dplab: double-porosity homogenization lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out = "dplab_out";
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    bool quick = false;
    bool reproducible = false;
    std::string criteria;

    const auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config_path, "experiment config file");
        if (needs_config) c->required();
        sub->add_option("--out", out, "output directory (DPLB_OUT overrides)");
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quick", quick, "reduced resolutions");
        sub->add_flag("--reproducible", reproducible, "omit timestamps and timings");
    };
    auto* geometry = app.add_subcommand("geometry", "sample and rasterize a geometry");
    auto* cell = app.add_subcommand("cell", "cell problems and homogenized coefficients");
    auto* solve = app.add_subcommand("solve", "one eps-problem with its two-scale expansion");
    auto* sweep = app.add_subcommand("sweep", "error sweep over eps with slope fit");
    auto* extlab = app.add_subcommand("extlab", "extension-constant survey");
    auto* verify = app.add_subcommand("verify", "acceptance suite");
    for (auto* s : {geometry, cell, solve, sweep, extlab}) common(s, true);
    common(verify, false);
    verify->add_option("--criteria", criteria, "subset, e.g. 1,2,5-7");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (const char* env = std::getenv("DPLB_OUT"); env && *env) out = env;

    dplab::RunOptions opt;
    opt.out = out;
    opt.quick = quick;
    opt.reproducible = reproducible;
    opt.threads = threads;
    opt.log = &std::cout;

    try {
        if (*verify) {
            dplab::AcceptanceOptions ao;
            ao.quick = quick;
            ao.criteria = parse_criteria(criteria);
            ao.out_dir = std::filesystem::path(out) / "verify";
            ao.reproducible = reproducible;
            ao.threads = threads;
            ao.on_result = [&](const dplab::CriterionResult& r) {
                std::cout << dplab::format_result_line(r, reproducible) << std::endl;
            };
            const auto results = dplab::run_acceptance(ao);
            dplab::write_acceptance_report(results, ao);
            int failed = 0;
            for (const auto& r : results) failed += !r.pass;
            std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed" << std::endl;
            return failed == 0 ? 0 : 1;
        }
        const dplab::Config cfg = dplab::Config::load(config_path);
        if (*geometry) dplab::cmd_geometry(cfg, opt);
        if (*cell && !dplab::cmd_cell(cfg, opt)) return 3;
        if (*solve) dplab::cmd_solve(cfg, opt);
        if (*sweep) dplab::cmd_sweep(cfg, opt);
        if (*extlab) dplab::cmd_extlab(cfg, opt);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "dplab: " << e.what() << std::endl;
        return dplab::exit_code_for(e);
    }
}
