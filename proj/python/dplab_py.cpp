#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dplab/acceptance.hpp"
#include "dplab/cell.hpp"
#include "dplab/commands.hpp"
#include "dplab/config.hpp"
#include "dplab/dporosity.hpp"
#include "dplab/errors.hpp"

namespace py = pybind11;
using namespace dplab;

namespace {

Config parse(const std::string& text) { return Config::parse(text, "<python>"); }

py::array_t<std::uint8_t> indicator(const std::string& config, int resolution) {
    const IndicatorGrid g = rasterize(geometry_from_config(parse(config)), resolution);
    py::array_t<std::uint8_t> out({g.n, g.dim == 2 ? g.n : 1});
    auto m = out.mutable_unchecked<2>();
    for (int j = 0; j < (g.dim == 2 ? g.n : 1); ++j) {
        for (int i = 0; i < g.n; ++i) m(i, j) = g.cells[static_cast<std::size_t>(j) * g.n + i];
    }
    return out;
}

py::dict homogenize(const std::string& config, int resolution) {
    HomogenizedOptions ho;
    ho.flux_correctors = false;
    ho.inclusion_corrector = false;
    const HomogenizedData hd = compute_homogenized_data(rasterize(geometry_from_config(parse(config)), resolution), ho);
    py::dict d;
    d["a_bar"] = std::vector<std::vector<double>>{{hd.a_bar[0][0], hd.a_bar[0][1]}, {hd.a_bar[1][0], hd.a_bar[1][1]}};
    d["mean_v"] = hd.mean_v;
    d["vol_frac"] = hd.vol_frac;
    d["disagreement"] = hd.abar_detail.disagreement;
    return d;
}

py::dict slope(const std::vector<double>& eps, const std::vector<double>& err) {
    const SlopeFit f = fit_slope(eps, err);
    py::dict d;
    d["defined"] = f.defined;
    d["slope"] = f.slope;
    d["intercept"] = f.intercept;
    d["dropped_largest"] = f.dropped_largest;
    return d;
}

void run(const std::string& command, const std::string& config, const std::string& out, bool reproducible) {
    const Config cfg = parse(config);
    RunOptions o;
    o.out = out;
    o.reproducible = reproducible;
    if (command == "geometry") cmd_geometry(cfg, o);
    else if (command == "cell") cmd_cell(cfg, o);
    else if (command == "solve") cmd_solve(cfg, o);
    else if (command == "sweep") cmd_sweep(cfg, o);
    else if (command == "extlab") cmd_extlab(cfg, o);
    else throw ConfigError("unknown command " + command);
}

py::list acceptance(const std::vector<int>& criteria, bool quick, const std::string& out) {
    AcceptanceOptions o;
    o.quick = quick;
    o.criteria = {criteria.begin(), criteria.end()};
    o.out_dir = out;
    o.reproducible = true;
    py::list rows;
    for (const auto& r : run_acceptance(o)) {
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["pass"] = r.pass;
        d["measured"] = r.measured;
        d["note"] = r.note;
        rows.append(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_dplab, m) {
    m.doc() = "double-porosity homogenization lab";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<GeometryError>(m, "GeometryError", PyExc_ValueError);
    m.def("config_hash", [](const std::string& text) { return parse(text).hash(); }, py::arg("config"));
    m.def("indicator", &indicator, py::arg("config"), py::arg("resolution"), "rasterized inclusion indicator, indexed [i, j]");
    m.def("homogenize", &homogenize, py::arg("config"), py::arg("resolution"));
    m.def("fit_slope", &slope, py::arg("eps"), py::arg("err"));
    m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("out"), py::arg("reproducible") = true);
    m.def("acceptance", &acceptance, py::arg("criteria"), py::arg("quick") = true, py::arg("out") = "dplab_out/verify");
}
