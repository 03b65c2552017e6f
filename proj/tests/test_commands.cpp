#include <doctest.h>

#include <filesystem>

#include "dplab/commands.hpp"
#include "dplab/errors.hpp"
#include "dplab/io.hpp"

using namespace dplab;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto p = std::filesystem::temp_directory_path() / ("dplab_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

std::string text_of(const std::filesystem::path& p) {
    const auto b = read_file(p);
    return std::string(b.begin(), b.end());
}

}  // namespace

TEST_CASE("geometry from config") {
    const Config c = Config::parse("model = lattice\nradius = 0.2\ncenter_x = 0.3\n");
    const InclusionSet s = geometry_from_config(c);
    CHECK(std::get<Disc>(s.inclusions[0].shape).center.x == 0.3);
    CHECK_THROWS_AS(geometry_from_config(Config::parse("model = hexagon\n")), ConfigError);
    CHECK_THROWS_AS(geometry_from_config(Config::parse("model = lattice\n")), ConfigError);
    CHECK_THROWS_AS(named_source("cubic"), ConfigError);
}

TEST_CASE("exit codes") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(GeometryError("x")) == 2);
    CHECK(exit_code_for(InvariantError("x")) == 3);
    CHECK(exit_code_for(NonConvergenceError("x", {})) == 3);
}

TEST_CASE("commands write artifacts with the config hash") {
    const Config c = Config::parse(
        "model = lattice\nradius = 0.25\nresolution = 64\ndomain = box\neps = [1/4, 1/8]\nf = smooth\n"
        "resolutions = [32, 64]\np = [2]\nfields = 2\npower_iterations = 3\n");
    RunOptions o;
    o.out = scratch("cmd");
    o.reproducible = true;
    cmd_geometry(c, o);
    CHECK(cmd_cell(c, o));
    const SweepReport r = cmd_sweep(c, o);
    cmd_extlab(c, o);
    CHECK(r.rows.size() == 2);
    for (const char* f : {"geometry.json", "cell.json", "sweep.json"}) {
        CHECK(Json::parse(text_of(o.out / f))["config_hash"] == c.hash());
    }
    for (const char* f : {"separation.csv", "sweep.csv", "extlab.csv", "cell_residuals.csv"}) {
        CHECK(text_of(o.out / f).rfind("# config_hash=" + c.hash(), 0) == 0);
    }
    CHECK(text_of(o.out / "sweep.svg").find("generated") == std::string::npos);
    CHECK(decode_bitmap(read_file(o.out / "indicator.dplb")).n == 64);
}

TEST_CASE("solve command") {
    const Config c = Config::parse("model = lattice\nradius = 0.25\nresolution = 64\ndomain = torus\neps = 0.25\nf = bump\n");
    RunOptions o;
    o.out = scratch("solve");
    cmd_solve(c, o);
    const Json j = Json::parse(text_of(o.out / "solve.json"));
    CHECK(j["errors"]["h1_outside"].get<double>() > 0.0);
    CHECK(read_grid_function(o.out / "u_eps.dpgf").grid.n == 64);
}

TEST_CASE("ensemble cell command") {
    const Config c = Config::parse(
        "model = rsa\nintensity = 10\nr_min = 0.06\nr_max = 0.1\nmargin = 0.5\nresolution = 48\nrealizations = 2\nseed = 5\n");
    RunOptions o;
    o.out = scratch("ens");
    CHECK(cmd_cell(c, o));
    const Json j = Json::parse(text_of(o.out / "cell.json"));
    CHECK(j["ensemble"]["realizations"] == 2);
}
