#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dplab/config.hpp"
#include "dplab/dporosity.hpp"
#include "dplab/geometry.hpp"
#include "dplab/stochastic.hpp"

namespace dplab {

struct RunOptions {
    std::filesystem::path out = "dplab_out";
    bool reproducible = false;
    bool quick = false;
    int threads = 1;
    std::ostream* log = nullptr;
};

/// Geometry described by model = lattice | rsa | poisson | chess | empty and
/// its parameters (see README).
InclusionSet geometry_from_config(const Config& cfg);
EnsembleConfig ensemble_from_config(const Config& cfg);
Domain domain_from_config(const Config& cfg);

/// f = smooth | bump | one | sine; unknown names throw ConfigError.
ScalarFunction named_source(const std::string& name);

/// Each command writes its artifacts under opt.out; every CSV/JSON embeds
/// the config hash. Errors propagate as exceptions.
void cmd_geometry(const Config& cfg, const RunOptions& opt);
/// Returns false when a consistency residual exceeds 1e-6.
bool cmd_cell(const Config& cfg, const RunOptions& opt);
void cmd_solve(const Config& cfg, const RunOptions& opt);
SweepReport cmd_sweep(const Config& cfg, const RunOptions& opt);
void cmd_extlab(const Config& cfg, const RunOptions& opt);

/// Map an exception from a command to the CLI exit code.
int exit_code_for(const std::exception& e);

}  // namespace dplab
