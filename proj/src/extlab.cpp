#include "dplab/extlab.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dplab/errors.hpp"
#include "dplab/rng.hpp"

namespace dplab {

namespace {

void require_periodic(const IndicatorGrid& chi) {
    if (!chi.periodic) throw Error("extension lab works on the periodic cell");
}

SparseOperator graph_laplacian(const Grid& g, std::span<const std::uint8_t> active) {
    return assemble_operator(uniform_coefficient(g, 1.0, 0.0), BoundaryKind::Periodic, active);
}

}  // namespace

GridFunction harmonic_extension(const GridFunction& u, const IndicatorGrid& chi, const CgOptions& cg) {
    require_periodic(chi);
    const Grid g = grid_of(chi);
    if (!(u.grid == g)) throw Error("field and indicator grids differ");
    GridFunction out = u;
    out.bc = BoundaryKind::Periodic;
    out.mask.clear();
    const std::size_t N = g.cells();
    std::vector<std::int32_t> dof(N, -1);
    std::vector<std::int32_t> cells;
    for (std::size_t c = 0; c < N; ++c) {
        if (chi.cells[c]) {
            dof[c] = static_cast<std::int32_t>(cells.size());
            cells.push_back(static_cast<std::int32_t>(c));
        } else {
            out.values[c] = u.values[c];
        }
    }
    if (cells.empty()) return out;
    TripletBuilder tb(cells.size());
    std::vector<double> b(cells.size(), 0.0);
    for_each_face(g, [&](const FaceRef& f) {
        const auto m = static_cast<std::size_t>(f.minus);
        const auto p = static_cast<std::size_t>(f.plus);
        const bool fm = chi.cells[m] != 0;
        const bool fp = chi.cells[p] != 0;
        if (fm && fp) {
            tb.add(dof[m], dof[m], 1.0);
            tb.add(dof[p], dof[p], 1.0);
            tb.add(dof[m], dof[p], -1.0);
            tb.add(dof[p], dof[m], -1.0);
        } else if (fm) {
            tb.add(dof[m], dof[m], 1.0);
            b[static_cast<std::size_t>(dof[m])] += u.values[p];
        } else if (fp) {
            tb.add(dof[p], dof[p], 1.0);
            b[static_cast<std::size_t>(dof[p])] += u.values[m];
        }
    });
    SparseOperator A = tb.build();
    A.symmetric = true;
    const CgResult res = cg_solve(A, b, cg);
    for (std::size_t k = 0; k < cells.size(); ++k) out.values[static_cast<std::size_t>(cells[k])] = res.x[k];
    return out;
}

std::vector<double> gradient_magnitude(const GridFunction& u) {
    const Grid& g = u.grid;
    std::vector<double> s(g.cells(), 0.0);
    const double h = g.h();
    for_each_face(g, [&](const FaceRef& f) {
        const double um = f.minus >= 0 ? u.values[static_cast<std::size_t>(f.minus)] : 0.0;
        const double up = f.plus >= 0 ? u.values[static_cast<std::size_t>(f.plus)] : 0.0;
        const double d = (up - um) / (f.minus >= 0 && f.plus >= 0 ? h : 0.5 * h);
        if (f.minus >= 0) s[static_cast<std::size_t>(f.minus)] += 0.5 * d * d;
        if (f.plus >= 0) s[static_cast<std::size_t>(f.plus)] += 0.5 * d * d;
    });
    for (double& x : s) x = std::sqrt(x);
    return s;
}

double complement_gradient_norm(const GridFunction& u, const IndicatorGrid& chi) {
    const Grid& g = u.grid;
    const double h = g.h();
    double s = 0.0;
    for_each_face(g, [&](const FaceRef& f) {
        if (f.minus < 0 || f.plus < 0) return;
        if (chi.cells[static_cast<std::size_t>(f.minus)] || chi.cells[static_cast<std::size_t>(f.plus)]) return;
        const double d = (u.values[static_cast<std::size_t>(f.plus)] - u.values[static_cast<std::size_t>(f.minus)]) / h;
        s += d * d;
    });
    return std::sqrt(s * g.volume());
}

double extension_ratio(const GridFunction& pu, const IndicatorGrid& chi, double p) {
    if (!(p >= 1.0)) throw Error("p must be >= 1");
    const double den = complement_gradient_norm(pu, chi);
    const std::vector<double> m = gradient_magnitude(pu);
    double s = 0.0;
    for (double x : m) s += std::pow(x, p);
    const double num = std::pow(s * pu.grid.volume(), 1.0 / p);
    if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

std::vector<GridFunction> fourier_trial_fields(const Grid& g, std::uint64_t seed, int count, int kmax) {
    std::vector<GridFunction> out;
    Random rng(seed);
    const double w = 2.0 * std::numbers::pi / g.extent;
    for (int t = 0; t < count; ++t) {
        GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
        const int ly = g.dim == 2 ? kmax : 0;
        for (int ky = -ly; ky <= ly; ++ky) {
            for (int kx = -kmax; kx <= kmax; ++kx) {
                if (kx == 0 && ky == 0) continue;
                const double a = rng.uniform(-1.0, 1.0);
                const double b = rng.uniform(-1.0, 1.0);
                for (int j = 0; j < g.ny(); ++j) {
                    for (int i = 0; i < g.n; ++i) {
                        const Vec2 x = g.center(i, j);
                        const double ph = w * (kx * x.x + ky * x.y);
                        u.values[g.index(i, j)] += a * std::cos(ph) + b * std::sin(ph);
                    }
                }
            }
        }
        out.push_back(std::move(u));
    }
    return out;
}

WorstField worst_extension_field(const IndicatorGrid& chi, std::uint64_t seed, int iterations, const GridFunction* start) {
    require_periodic(chi);
    const Grid g = grid_of(chi);
    const std::vector<std::uint8_t> comp = complement_mask(chi);
    const SparseOperator L = graph_laplacian(g, {});
    const SparseOperator Lc = graph_laplacian(g, comp);
    WorstField w;
    GridFunction x = fourier_trial_fields(g, seed, 1, 2).front();
    if (start != nullptr && start->grid.n > 0 && g.n % start->grid.n == 0) {
        // Piecewise-constant prolongation of a coarser field.
        const int r = g.n / start->grid.n;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.n; ++i) x.values[g.index(i, j)] = start->values[start->grid.index(i / r, g.dim == 2 ? j / r : 0)];
        }
    }
    std::vector<double> r(g.cells());
    const CgOptions cg{1e-10, 0, false};
    for (int it = 0; it < iterations; ++it) {
        x = harmonic_extension(x, chi);
        L.apply(x.values, r);
        const std::vector<double> rc = Lc.gather(r);
        const MeanZeroResult y = mean_zero_solve(Lc, rc, cg);
        const std::vector<double> full = Lc.scatter(y.x);
        const double nrm = norm2(full);
        if (nrm == 0.0) break;
        for (std::size_t c = 0; c < full.size(); ++c) x.values[c] = comp[c] ? full[c] / nrm : 0.0;
        w.iterations = it + 1;
    }
    w.u = harmonic_extension(x, chi);
    L.apply(w.u.values, r);
    const double num = dot(w.u.values, r);
    const double cn = complement_gradient_norm(w.u, chi);
    w.rayleigh = cn > 0.0 ? num * std::pow(g.h(), g.dim - 2) / (cn * cn) : 1.0;
    return w;
}

std::vector<SurveyRow> extension_constant_survey(const std::string& family, const InclusionSet& set,
                                                 const std::vector<int>& resolutions, const SurveyOptions& opt) {
    for (double p : opt.p) {
        if (!(p >= 1.0 && p <= 2.0)) throw Error("survey exponents must lie in [1, 2]");
    }
    std::vector<SurveyRow> rows;
    GridFunction worst;
    for (int n : resolutions) {
        std::size_t filled = 0;
        std::size_t cleared = 0;
        const IndicatorGrid chi = opt.separate_inclusions ? rasterize_separated(set, n, &cleared, &filled)
                                                          : rasterize_filled(set, n, &filled);
        const Grid g = grid_of(chi);
        std::vector<GridFunction> ext;
        for (const GridFunction& u : fourier_trial_fields(g, opt.seed, opt.fields)) ext.push_back(harmonic_extension(u, chi));
        const bool have_worst = opt.worst_case && chi.count() > 0;
        if (have_worst) worst = worst_extension_field(chi, opt.seed, opt.power_iterations, &worst).u;
        for (double p : opt.p) {
            SurveyRow row;
            row.family = family;
            row.p = p;
            row.n = n;
            row.filled_cells = filled;
            row.cleared_cells = cleared;
            for (const GridFunction& e : ext) row.random_constant = std::max(row.random_constant, extension_ratio(e, chi, p));
            if (have_worst) row.worst_constant = extension_ratio(worst, chi, p);
            row.constant = std::max(row.random_constant, row.worst_constant);
            rows.push_back(row);
        }
    }
    return rows;
}

TrendReport extension_trend(const std::vector<SurveyRow>& rows, double p, int coarse, int fine) {
    TrendReport t;
    bool found[4] = {false, false, false, false};
    for (const SurveyRow& r : rows) {
        if (std::abs(r.p - 2.0) < 1e-12 && r.n == coarse) t.c2_coarse = r.constant, found[0] = true;
        if (std::abs(r.p - 2.0) < 1e-12 && r.n == fine) t.c2_fine = r.constant, found[1] = true;
        if (std::abs(r.p - p) < 1e-12 && r.n == coarse) t.cp_coarse = r.constant, found[2] = true;
        if (std::abs(r.p - p) < 1e-12 && r.n == fine) t.cp_fine = r.constant, found[3] = true;
    }
    if (!(found[0] && found[1] && found[2] && found[3])) throw Error("survey rows miss the requested p or resolution");
    t.growth2 = t.c2_fine / t.c2_coarse - 1.0;
    t.change_p = std::abs(t.cp_fine / t.cp_coarse - 1.0);
    t.pass = t.growth2 >= 0.25 && t.change_p <= 0.25;
    return t;
}

}  // namespace dplab
