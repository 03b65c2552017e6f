#include "dplab/commands.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "dplab/errors.hpp"
#include "dplab/extlab.hpp"
#include "dplab/io.hpp"
#include "dplab/svg.hpp"

namespace dplab {

namespace {

void say(const RunOptions& opt, const std::string& s) {
    if (opt.log) *opt.log << s << "\n";
}

Json header(const Config& cfg, const std::string& command) {
    Json j;
    j["command"] = command;
    j["config_hash"] = cfg.hash();
    Json echo;
    for (const auto& [k, e] : cfg.entries()) echo[k] = e.raw;
    j["config"] = std::move(echo);
    return j;
}

std::string csv_header(const Config& cfg) { return "# config_hash=" + cfg.hash() + "\n"; }

int required_resolution(const Config& cfg) {
    const auto n = cfg.get_int("resolution");
    if (n < 4 || n > 16384) throw ConfigError(cfg.source() + ": field 'resolution' must lie in [4, 16384]");
    return static_cast<int>(n);
}

int quick_resolution(const Config& cfg, const RunOptions& opt) {
    const int n = required_resolution(cfg);
    return opt.quick ? std::max(32, n / 2) : n;
}

}  // namespace

InclusionSet geometry_from_config(const Config& cfg) {
    const std::string model = cfg.get_string("model");
    const double period = cfg.get_double("period", 1.0);
    const std::uint64_t seed = cfg.get_uint("seed", 0);
    const int dim = static_cast<int>(cfg.get_int("dim", 2));
    if (dim != 1 && dim != 2) throw ConfigError(cfg.source() + ": field 'dim' must be 1 or 2");
    if (!(period > 0.0)) throw ConfigError(cfg.source() + ": field 'period' must be positive");
    if (model == "empty") {
        InclusionSet s;
        s.dim = dim;
        s.period = period;
        s.seed = seed;
        return s;
    }
    if (model == "lattice") {
        InclusionSet s = sample_periodic_lattice(cfg.get_double("radius"), period, dim);
        if (cfg.has("center_x") || cfg.has("center_y")) {
            Disc& d = std::get<Disc>(s.inclusions.front().shape);
            d.center = {cfg.get_double("center_x", d.center.x), cfg.get_double("center_y", d.center.y)};
            check_inclusion_set(s);
        }
        s.seed = seed;
        return s;
    }
    if (model == "rsa") {
        RsaParams p;
        p.intensity = cfg.get_double("intensity");
        p.radii = RadiusLaw::uniform(cfg.get_double("r_min"), cfg.get_double("r_max"));
        p.margin = cfg.get_double("margin", 0.0);
        p.period = period;
        p.seed = seed;
        p.dim = dim;
        if (cfg.has("target_count")) p.target_count = static_cast<int>(cfg.get_int("target_count"));
        return sample_hard_discs_rsa(p);
    }
    if (model == "poisson") return sample_poisson_halfgap(cfg.get_double("intensity"), period, seed, dim);
    if (model == "chess") return sample_chess_percolation(cfg.get_double("mu"), static_cast<int>(cfg.get_int("lattice_size")), seed);
    throw ConfigError(cfg.source() + ": field 'model' must be lattice, rsa, poisson, chess or empty (got " + model + ")");
}

EnsembleConfig ensemble_from_config(const Config& cfg) {
    EnsembleConfig e;
    const std::string model = cfg.get_string("model");
    if (model == "lattice") e.model = GeometryModel::PeriodicLattice;
    else if (model == "rsa") e.model = GeometryModel::HardDiscsRSA;
    else if (model == "poisson") e.model = GeometryModel::PoissonHalfGap;
    else if (model == "chess") e.model = GeometryModel::ChessPercolation;
    else throw ConfigError(cfg.source() + ": ensembles need a random model (got " + model + ")");
    e.period = model == "chess" ? static_cast<double>(cfg.get_int("lattice_size")) : cfg.get_double("period", 1.0);
    e.realizations = static_cast<int>(cfg.get_int("realizations", 1));
    e.base_seed = cfg.get_uint("seed", 0);
    if (cfg.has("seeds")) {
        for (auto s : cfg.get_ints("seeds")) e.seeds.push_back(static_cast<std::uint64_t>(s));
    }
    e.max_retries = static_cast<int>(cfg.get_int("max_retries", 8));
    e.radius = cfg.get_double("radius", e.radius);
    e.intensity = cfg.get_double("intensity", e.intensity);
    e.r_min = cfg.get_double("r_min", e.r_min);
    e.r_max = cfg.get_double("r_max", e.r_max);
    e.margin = cfg.get_double("margin", e.margin);
    e.mu = cfg.get_double("mu", e.mu);
    e.validate();
    return e;
}

Domain domain_from_config(const Config& cfg) {
    Domain d;
    const std::string kind = cfg.get_string("domain", "box");
    if (kind == "box") d.periodic = false;
    else if (kind == "torus") d.periodic = true;
    else throw ConfigError(cfg.source() + ": field 'domain' must be box or torus (got " + kind + ")");
    d.extent = cfg.get_double("extent", 1.0);
    d.dim = static_cast<int>(cfg.get_int("dim", 2));
    return d;
}

ScalarFunction named_source(const std::string& name) {
    if (name == "smooth") return [](double x, double y) { return 1.0 + x + y * y; };
    if (name == "one") return [](double, double) { return 1.0; };
    if (name == "sine") return [](double x, double y) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y); };
    if (name == "bump") {
        return [](double x, double y) {
            const double r2 = ((x - 0.5) * (x - 0.5) + (y - 0.45) * (y - 0.45)) / 0.09;
            return r2 < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
        };
    }
    throw ConfigError("unknown source f = " + name + " (smooth, bump, one, sine)");
}

void cmd_geometry(const Config& cfg, const RunOptions& opt) {
    const InclusionSet set = geometry_from_config(cfg);
    const int n = required_resolution(cfg);
    Json j = header(cfg, "geometry");
    j["geometry"] = to_json(set);
    Json warnings = Json::array();
    for (const auto& w : set.warnings) warnings.push_back(w);
    j["warnings"] = std::move(warnings);
    write_file(opt.out / "geometry.json", j.dump(2) + "\n");
    const IndicatorGrid chi = rasterize(set, n);
    write_bitmap(opt.out / "indicator.dplb", chi);

    std::string csv = csv_header(cfg) + "id,rho,diameter,nu,mu\n";
    if (set.inclusions.size() >= 2) {
        const SeparationReport rep = separation_moments(set, cfg.get_double("alpha", 2.0));
        for (std::size_t k = 0; k < rep.ids.size(); ++k) {
            csv += std::to_string(rep.ids[k]) + "," + fmt(rep.rho[k]) + "," + fmt(rep.diameter[k]) + "," + fmt(rep.nu[k]) + "," +
                   (std::isnan(rep.mu[k]) ? std::string("nan") : fmt(rep.mu[k])) + "\n";
        }
        csv += "# moment(alpha=" + fmt(rep.alpha) + ")=" + (rep.infinite ? std::string("inf") : fmt(rep.moment)) + "\n";
    }
    write_file(opt.out / "separation.csv", csv);
    say(opt, "geometry: " + std::to_string(set.inclusions.size()) + " inclusions, volume fraction " + fmt(chi.volume_fraction()));
}

bool cmd_cell(const Config& cfg, const RunOptions& opt) {
    const int n = quick_resolution(cfg, opt);
    const InclusionSet set = geometry_from_config(cfg);
    const IndicatorGrid chi = rasterize(set, n);
    HomogenizedOptions ho;
    const HomogenizedData hd = compute_homogenized_data(chi, ho);
    Json j = header(cfg, "cell");
    j["resolution"] = n;
    j["homogenized"] = to_json(hd);
    // Both corrector variants.
    const double eps = cfg.get_double("massive_eps", 0.0625);
    const CorrectorSet massive = solve_corrector_massive(chi, eps, ho.cell);
    j["massive_corrector"] = {{"eps", eps}, {"gradient_distance", corrector_gradient_distance(massive, hd.phi, chi)}};
    const MomentReport mr = corrector_moment_report(hd);
    j["moments"] = {{"phi_max", mr.phi_max},     {"sigma_max", mr.sigma_max}, {"theta_max", mr.theta_max},
                    {"phi_mean", mr.phi_mean},   {"sigma_mean", mr.sigma_mean}, {"theta_mean", mr.theta_mean}};

    double worst = hd.abar_detail.disagreement;
    for (const auto& s : hd.sigma) worst = std::max(worst, s.residual);
    worst = std::max(worst, hd.theta.residual);
    const bool ok = worst <= 1e-6;
    j["max_residual"] = worst;
    j["identities_ok"] = ok;

    if (cfg.has("realizations") && cfg.get_string("model") != "empty") {
        const EnsembleConfig ec = ensemble_from_config(cfg);
        const EnsembleResult er = ensemble_cell_run(ec, n, ho.cell, opt.threads);
        Json e;
        e["realizations"] = er.realizations;
        e["rejections"] = er.rejections;
        Json ab = Json::array();
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) ab.push_back({{"mean", er.a_bar[a][b].mean}, {"stderr", er.a_bar[a][b].stderr_}});
        }
        e["a_bar"] = std::move(ab);
        e["mean_v"] = {{"mean", er.mean_v.mean}, {"stderr", er.mean_v.stderr_}};
        e["vol_frac"] = {{"mean", er.vol_frac.mean}, {"stderr", er.vol_frac.stderr_}};
        Json seeds = Json::array();
        for (const auto& s : er.samples) seeds.push_back(s.seed);
        e["seeds"] = std::move(seeds);
        j["ensemble"] = std::move(e);
    }
    write_file(opt.out / "cell.json", j.dump(2) + "\n");

    std::string csv = csv_header(cfg) + "identity,residual\n";
    csv += "abar_energy_vs_flux," + fmt(hd.abar_detail.disagreement) + "\n";
    for (std::size_t i = 0; i < hd.sigma.size(); ++i) csv += "flux_corrector_" + std::to_string(i) + "," + fmt(hd.sigma[i].residual) + "\n";
    csv += "inclusion_corrector," + fmt(hd.theta.residual) + "\n";
    write_file(opt.out / "cell_residuals.csv", csv);
    say(opt, "cell: a_bar = [[" + fmt(hd.a_bar[0][0]) + ", " + fmt(hd.a_bar[0][1]) + "], [" + fmt(hd.a_bar[1][0]) + ", " +
                 fmt(hd.a_bar[1][1]) + "]], mean_v = " + fmt(hd.mean_v) + ", max residual " + fmt(worst));
    return ok;
}

void cmd_solve(const Config& cfg, const RunOptions& opt) {
    const InclusionSet set = geometry_from_config(cfg);
    const Domain dom = domain_from_config(cfg);
    const double eps = cfg.get_double("eps");
    const int n = quick_resolution(cfg, opt);
    const EpsProblem p = build_eps_problem(set, dom, eps, named_source(cfg.get_string("f", "smooth")), n);
    CellCache cache(set);
    const HomogenizedData& hd = cache.get(p.cell_resolution);
    const EpsSolution ue = solve_eps_problem(p);
    const HomogenizedSolution ub = solve_homogenized(hd, p.f);
    const TwoScaleFields ex = two_scale_expansion(ub.u, hd, p);
    const ErrorRow er = error_report(ue.u, ex, hd, p);
    write_grid_function(opt.out / "u_eps.dpgf", ue.u);
    write_grid_function(opt.out / "u_bar.dpgf", ub.u);
    write_file(opt.out / "u_eps.csv", csv_header(cfg) + grid_function_csv(ue.u));
    write_file(opt.out / "u_bar.csv", csv_header(cfg) + grid_function_csv(ub.u));
    Json j = header(cfg, "solve");
    j["eps"] = eps;
    j["resolution"] = n;
    j["cell_resolution"] = p.cell_resolution;
    j["inclusions_in_domain"] = p.instance_count;
    j["energy_defect"] = ue.energy_defect;
    j["iterations"] = {{"eps", ue.iterations}, {"homogenized", ub.iterations}};
    j["errors"] = {{"h1_outside", er.h1_outside}, {"l2_inside", er.l2_inside}, {"grad_defect", er.grad_defect}};
    Json w = Json::array();
    for (const auto& s : p.warnings) w.push_back(s);
    j["warnings"] = std::move(w);
    write_file(opt.out / "solve.json", j.dump(2) + "\n");
    say(opt, "solve: eps = " + fmt(eps) + ", H1 outside " + fmt(er.h1_outside) + ", L2 inside " + fmt(er.l2_inside));
}

SweepReport cmd_sweep(const Config& cfg, const RunOptions& opt) {
    SweepSpec spec;
    spec.cell_geometry = geometry_from_config(cfg);
    spec.domain = domain_from_config(cfg);
    spec.eps = cfg.get_doubles("eps");
    if (spec.eps.empty()) throw ConfigError(cfg.source() + ": field 'eps' must list at least one value");
    spec.resolution = quick_resolution(cfg, opt);
    spec.f = named_source(cfg.get_string("f", "smooth"));
    spec.coupled = cfg.get_bool("coupled", false);
    spec.inside = cfg.get_bool("inside", false);
    if (cfg.has("mollifier")) spec.mollifier_factor = cfg.get_double("mollifier");
    spec.cg.keep_history = false;
    for (std::size_t k = 0; k < spec.eps.size(); ++k) {
        if (!(spec.eps[k] > 0.0)) throw ConfigError(cfg.source() + ": eps values must be positive");
    }

    // Ensemble-averaged errors when realizations > 1.
    const int R = static_cast<int>(cfg.get_int("realizations", 1));
    SweepReport rep;
    if (R > 1) {
        const EnsembleConfig ec = ensemble_from_config(cfg);
        std::vector<SweepReport> all;
        for (std::uint64_t s : ec.realization_seeds()) {
            Config one = cfg;
            one.set("seed", std::to_string(s));
            spec.cell_geometry = geometry_from_config(one);
            all.push_back(run_sweep(spec));
        }
        rep = all.front();
        for (std::size_t r = 1; r < all.size(); ++r) {
            for (std::size_t k = 0; k < rep.rows.size(); ++k) {
                rep.rows[k].errors.h1_outside += all[r].rows[k].errors.h1_outside;
                rep.rows[k].errors.l2_inside += all[r].rows[k].errors.l2_inside;
                rep.rows[k].errors.grad_defect += all[r].rows[k].errors.grad_defect;
                rep.rows[k].coupled_error += all[r].rows[k].coupled_error;
            }
        }
        std::vector<double> e, c, h, l, cp;
        for (auto& row : rep.rows) {
            row.errors.h1_outside /= R;
            row.errors.l2_inside /= R;
            row.errors.grad_defect /= R;
            row.coupled_error /= R;
            e.push_back(row.eps);
            c.push_back(row.errors.combined());
            h.push_back(row.errors.h1_outside);
            l.push_back(row.errors.l2_inside);
            cp.push_back(row.coupled_error);
        }
        rep.combined = fit_slope(e, c);
        rep.h1_outside = fit_slope(e, h);
        rep.l2_inside = fit_slope(e, l);
        if (spec.coupled) rep.coupled = fit_slope(e, cp);
    } else {
        rep = run_sweep(spec);
    }

    const auto slope_text = [](const SlopeFit& f) { return f.defined ? fmt(f.slope) : std::string("undefined"); };
    std::string csv = csv_header(cfg) + "eps,errH1_outside,errL2_inside,grad_defect,combined,coupled,slope\n";
    for (const auto& r : rep.rows) {
        csv += fmt(r.eps) + "," + fmt(r.errors.h1_outside) + "," + fmt(r.errors.l2_inside) + "," + fmt(r.errors.grad_defect) + "," +
               fmt(r.errors.combined()) + "," + fmt(r.coupled_error) + "," + slope_text(rep.combined) + "\n";
    }
    write_file(opt.out / "sweep.csv", csv);

    Json j = header(cfg, "sweep");
    j["resolution"] = spec.resolution;
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"eps", r.eps},
                        {"cell_resolution", r.cell_resolution},
                        {"h1_outside", r.errors.h1_outside},
                        {"l2_inside", r.errors.l2_inside},
                        {"grad_defect", r.errors.grad_defect},
                        {"combined", r.errors.combined()},
                        {"coupled", r.coupled_error},
                        {"inside_ratio", r.inside.ratio},
                        {"hminus1_defect", r.inside.hminus1_defect},
                        {"a_bar", to_json(r.a_bar)},
                        {"mean_v", r.mean_v},
                        {"iterations", r.iterations}});
    }
    j["rows"] = std::move(rows);
    const auto fit_json = [](const SlopeFit& f) {
        Json o;
        o["defined"] = f.defined;
        if (f.defined) {
            o["slope"] = f.slope;
            o["intercept"] = f.intercept;
            o["rms"] = f.rms;
            o["dropped_largest_eps"] = f.dropped_largest;
        }
        return o;
    };
    j["fit"] = {{"combined", fit_json(rep.combined)}, {"h1_outside", fit_json(rep.h1_outside)}, {"l2_inside", fit_json(rep.l2_inside)}};
    if (spec.coupled) j["fit"]["coupled"] = fit_json(rep.coupled);
    Json w = Json::array();
    for (const auto& s : rep.warnings) w.push_back(s);
    if (!rep.combined.defined) w.push_back("slope undefined: errors are at round-off level");
    j["warnings"] = std::move(w);
    write_file(opt.out / "sweep.json", j.dump(2) + "\n");

    LogLogPlot plot;
    plot.title = "error vs eps";
    plot.comment = "config_hash=" + cfg.hash();
    if (!opt.reproducible) plot.timestamp = utc_timestamp();
    LogLogSeries s;
    s.label = "H1 outside + L2 inside";
    for (const auto& r : rep.rows) {
        s.x.push_back(r.eps);
        s.y.push_back(r.errors.combined());
    }
    if (rep.combined.defined) {
        s.fit_slope = rep.combined.slope;
        s.fit_intercept = rep.combined.intercept;
    }
    plot.series.push_back(std::move(s));
    if (spec.coupled) {
        LogLogSeries c;
        c.label = "coupled system";
        for (const auto& r : rep.rows) {
            c.x.push_back(r.eps);
            c.y.push_back(r.coupled_error);
        }
        if (rep.coupled.defined) {
            c.fit_slope = rep.coupled.slope;
            c.fit_intercept = rep.coupled.intercept;
        }
        plot.series.push_back(std::move(c));
    }
    write_file(opt.out / "sweep.svg", render_loglog_svg(plot));
    say(opt, "sweep: combined slope " + slope_text(rep.combined));
    return rep;
}

void cmd_extlab(const Config& cfg, const RunOptions& opt) {
    const InclusionSet set = geometry_from_config(cfg);
    SurveyOptions so;
    if (cfg.has("p")) so.p = cfg.get_doubles("p");
    so.fields = static_cast<int>(cfg.get_int("fields", 16));
    so.seed = cfg.get_uint("trial_seed", 1);
    so.worst_case = cfg.get_bool("worst_case", true);
    so.power_iterations = static_cast<int>(cfg.get_int("power_iterations", 30));
    so.separate_inclusions = cfg.get_bool("separate_inclusions", true);
    std::vector<int> res;
    if (cfg.has("resolutions")) {
        for (auto n : cfg.get_ints("resolutions")) res.push_back(static_cast<int>(opt.quick ? std::max<std::int64_t>(32, n / 2) : n));
    } else {
        res.push_back(quick_resolution(cfg, opt));
    }
    const std::string family = cfg.get_string("family", cfg.get_string("model"));
    const auto rows = extension_constant_survey(family, set, res, so);
    std::string csv = csv_header(cfg) + "# finite-grid constants show trends only, never the critical exponent\n";
    csv += "family,p,n,constant,random_constant,worst_constant,filled_cells,cleared_cells\n";
    for (const auto& r : rows) {
        csv += r.family + "," + fmt(r.p) + "," + std::to_string(r.n) + "," + fmt(r.constant) + "," + fmt(r.random_constant) + "," +
               fmt(r.worst_constant) + "," + std::to_string(r.filled_cells) + "," + std::to_string(r.cleared_cells) + "\n";
    }
    write_file(opt.out / "extlab.csv", csv);
    if (res.size() >= 2 && cfg.has("trend_p")) {
        const TrendReport t = extension_trend(rows, cfg.get_double("trend_p"), res.front(), res.back());
        Json j = header(cfg, "extlab");
        j["trend"] = {{"c2_coarse", t.c2_coarse}, {"c2_fine", t.c2_fine}, {"cp_coarse", t.cp_coarse},
                      {"cp_fine", t.cp_fine},     {"growth2", t.growth2}, {"change_p", t.change_p},
                      {"pass", t.pass}};
        write_file(opt.out / "extlab.json", j.dump(2) + "\n");
    }
    say(opt, "extlab: " + std::to_string(rows.size()) + " survey rows");
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GeometryError*>(&e)) return 2;
    return 3;
}

}  // namespace dplab
