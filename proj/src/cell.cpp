#include "dplab/cell.hpp"

#include <algorithm>
#include <cmath>

#include "dplab/errors.hpp"

namespace dplab {

namespace {

GridFunction to_function(const Grid& g, BoundaryKind bc, std::vector<double> values) {
    GridFunction u;
    u.grid = g;
    u.bc = bc;
    u.values = std::move(values);
    return u;
}

CorrectorSet solve_full_grid_corrector(const IndicatorGrid& chi, double eps, BoundaryKind bc, CorrectorVariant variant,
                                       const CellOptions& opt) {
    if (!(eps > 0.0)) throw Error("eps must be positive");
    const CoeffField coeff = coefficient_field(chi, 1.0, eps * eps, eps * eps);
    const SparseOperator A = assemble_operator(coeff, bc);
    CorrectorSet set;
    set.variant = variant;
    set.eps = eps;
    for (int i = 0; i < chi.dim; ++i) {
        const std::vector<double> b = corrector_rhs(coeff, bc, {}, i);
        CgResult res = cg_solve(A, b, opt.cg);
        GridFunction phi = to_function(coeff.grid, bc, std::move(res.x));
        set.grad_phi.push_back(discrete_gradient(phi));
        set.phi.push_back(std::move(phi));
        set.iterations.push_back(res.iterations);
        set.residuals.push_back(res.relative_residual);
    }
    return set;
}

}  // namespace

std::vector<double> corrector_rhs(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active,
                                  int direction) {
    const Grid& g = coeff.grid;
    const double scale = std::pow(g.h(), g.dim - 2);
    const double hd1 = std::pow(g.h(), g.dim - 1);
    std::vector<double> cell_rhs(g.cells(), 0.0);
    for_each_face(g, [&](const FaceRef& f) {
        if (f.dir != direction) return;
        double t = 0.0;
        std::int64_t gc = -1;
        const FaceCoupling kind = face_coupling(coeff, bc, active, f, t, gc);
        if (kind == FaceCoupling::Interior) {
            const double af = t / scale;
            cell_rhs[static_cast<std::size_t>(f.minus)] += hd1 * af;
            cell_rhs[static_cast<std::size_t>(f.plus)] -= hd1 * af;
        } else if (kind == FaceCoupling::Ghost && (f.minus < 0 || f.plus < 0)) {
            const double ac = coeff.a[static_cast<std::size_t>(gc)];
            if (f.plus < 0) cell_rhs[static_cast<std::size_t>(gc)] += hd1 * ac;
            else cell_rhs[static_cast<std::size_t>(gc)] -= hd1 * ac;
        }
    });
    if (active.empty()) return cell_rhs;
    std::vector<double> b;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (active[c]) b.push_back(cell_rhs[c]);
    }
    return b;
}

FaceField complement_face_indicator(const IndicatorGrid& chi) {
    const Grid g = grid_of(chi);
    FaceField w = FaceField::zeros(g);
    for_each_face(g, [&](const FaceRef& f) {
        const bool m = f.minus < 0 || !chi.cells[static_cast<std::size_t>(f.minus)];
        const bool p = f.plus < 0 || !chi.cells[static_cast<std::size_t>(f.plus)];
        w.comp[f.dir][f.face] = (m && p) ? 1.0 : 0.0;
    });
    return w;
}

ResonantCell solve_resonant_cell(const IndicatorGrid& chi, const CellOptions& opt) {
    const Grid g = grid_of(chi);
    ResonantCell out;
    out.v = GridFunction::zeros(g, BoundaryKind::MaskedDirichlet);
    out.v.mask = chi.cells;
    if (chi.count() == 0) return out;
    const CoeffField coeff = uniform_coefficient(g, 1.0, 1.0);
    const SparseOperator A = assemble_operator(coeff, BoundaryKind::MaskedDirichlet, chi.cells);
    const std::vector<double> b(A.rows(), g.volume());
    const CgResult res = cg_solve(A, b, opt.cg);
    out.v.values = A.scatter(res.x);
    out.iterations = res.iterations;
    double s = 0.0;
    for (double x : out.v.values) s += x;
    out.mean_v = s / static_cast<double>(g.cells());
    return out;
}

CorrectorSet solve_corrector_soft(const IndicatorGrid& chi, const CellOptions& opt) {
    if (!chi.periodic) throw Error("soft correctors are posed on the periodic cell");
    check_complement_connected(chi);
    const Grid g = grid_of(chi);
    const std::vector<std::uint8_t> comp = complement_mask(chi);
    const CoeffField coeff = coefficient_field(chi, 1.0, 0.0, 0.0);
    const SparseOperator A = assemble_operator(coeff, BoundaryKind::Periodic, comp);
    const FaceField w = complement_face_indicator(chi);
    CorrectorSet set;
    set.variant = CorrectorVariant::SoftRestricted;
    for (int i = 0; i < chi.dim; ++i) {
        const std::vector<double> b = corrector_rhs(coeff, BoundaryKind::Periodic, comp, i);
        MeanZeroResult res = mean_zero_solve(A, b, opt.cg);
        GridFunction phi = to_function(g, BoundaryKind::Periodic, A.scatter(res.x));
        phi.mask = comp;
        FaceField grad = discrete_gradient(phi);
        for (int k = 0; k < g.dim; ++k) {
            for (std::size_t f = 0; f < grad.comp[k].size(); ++f) grad.comp[k][f] *= w.comp[k][f];
        }
        set.phi.push_back(std::move(phi));
        set.grad_phi.push_back(std::move(grad));
        set.iterations.push_back(res.iterations);
        set.residuals.push_back(res.relative_residual);
    }
    return set;
}

CorrectorSet solve_corrector_massive(const IndicatorGrid& chi, double eps, const CellOptions& opt) {
    if (!chi.periodic) throw Error("massive correctors are posed on the periodic cell");
    return solve_full_grid_corrector(chi, eps, BoundaryKind::Periodic, CorrectorVariant::Massive, opt);
}

CorrectorSet solve_corrector_dirichlet(const IndicatorGrid& chi, double eps, const CellOptions& opt) {
    if (chi.periodic) throw Error("Dirichlet correctors need a bounded grid");
    return solve_full_grid_corrector(chi, eps, BoundaryKind::DirichletZero, CorrectorVariant::DirichletDomain, opt);
}

AbarResult homogenized_matrix(const CorrectorSet& corr, const IndicatorGrid& chi) {
    const int d = chi.dim;
    if (static_cast<int>(corr.grad_phi.size()) != d) throw Error("need one corrector per direction");
    const Grid g = grid_of(chi);
    const FaceField w = complement_face_indicator(chi);
    const double cell = std::pow(g.extent, d);
    const double vol = g.volume();
    AbarResult out;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            double flux = 0.0;
            for (std::size_t f = 0; f < w.comp[j].size(); ++f) {
                flux += w.comp[j][f] * ((i == j ? 1.0 : 0.0) + corr.grad_phi[i].comp[j][f]);
            }
            double energy = 0.0;
            for (int k = 0; k < d; ++k) {
                for (std::size_t f = 0; f < w.comp[k].size(); ++f) {
                    energy += w.comp[k][f] * ((i == k ? 1.0 : 0.0) + corr.grad_phi[i].comp[k][f]) *
                              ((j == k ? 1.0 : 0.0) + corr.grad_phi[j].comp[k][f]);
                }
            }
            out.flux_form[i][j] = flux * vol / cell;
            out.energy_form[i][j] = energy * vol / cell;
        }
    }
    double scale = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            out.a_bar[i][j] = 0.5 * (out.flux_form[i][j] + out.flux_form[j][i]);
            scale = std::max(scale, std::abs(out.energy_form[i][j]));
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double diff = std::abs(out.energy_form[i][j] - out.flux_form[i][j]);
            out.disagreement = std::max(out.disagreement, scale > 0.0 ? diff / scale : diff);
        }
    }
    // Absolute floor: when every entry vanishes (d = 1 with F nonempty) the
    // relative measure is meaningless.
    if (scale < 1e-12) out.disagreement = 0.0;
    if (out.disagreement > 1e-6) {
        throw InvariantError("energy and flux forms of the homogenized matrix disagree (relative " +
                             std::to_string(out.disagreement) + ")");
    }
    return out;
}

FaceField flux_defect(const CorrectorSet& corr, const IndicatorGrid& chi, const Matrix2& a_bar, int i) {
    const FaceField w = complement_face_indicator(chi);
    FaceField q = FaceField::zeros(w.grid);
    for (int k = 0; k < chi.dim; ++k) {
        for (std::size_t f = 0; f < q.comp[k].size(); ++f) {
            q.comp[k][f] = w.comp[k][f] * ((i == k ? 1.0 : 0.0) + corr.grad_phi[i].comp[k][f]) - a_bar[i][k];
        }
    }
    return q;
}

FluxCorrector solve_flux_corrector(const FaceField& q_in, const CellOptions& opt) {
    const Grid& g = q_in.grid;
    if (!g.periodic) throw Error("flux correctors are posed on the periodic cell");
    FaceField q = q_in;
    FluxCorrector out;
    double qnorm2 = 0.0;
    for (int k = 0; k < g.dim; ++k) {
        double m = 0.0;
        for (double x : q.comp[k]) m += x;
        m /= static_cast<double>(q.comp[k].size());
        out.q_mean_defect = std::max(out.q_mean_defect, std::abs(m));
        for (double& x : q.comp[k]) {
            x -= m;
            qnorm2 += g.volume() * x * x;
        }
    }
    const double qnorm = std::sqrt(qnorm2);
    const int d = g.dim;
    out.sigma.assign(static_cast<std::size_t>(d * d), GridFunction::zeros(g, BoundaryKind::Periodic));
    for (auto& s : out.sigma) s.staggering = Staggering::Node;
    if (d == 1) {
        out.residual = qnorm;
    } else {
        const int n = g.n;
        const double h = g.h();
        const double hd1 = std::pow(h, d - 1);
        const auto wrapi = [n](int i) { return (i + n) % n; };
        const auto qx = [&](int i, int j) { return q.comp[0][static_cast<std::size_t>(wrapi(j)) * n + wrapi(i)]; };
        const auto qy = [&](int i, int j) { return q.comp[1][static_cast<std::size_t>(wrapi(j)) * n + wrapi(i)]; };
        std::vector<double> b(g.cells());
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                b[g.index(i, j)] = hd1 * (qx(i, j - 1) - qx(i, j) - qy(i - 1, j) + qy(i, j));
            }
        }
        const SparseOperator L = assemble_operator(uniform_coefficient(g, 1.0, 0.0), BoundaryKind::Periodic);
        MeanZeroResult res = mean_zero_solve(L, b, opt.cg);
        const std::vector<double>& s = res.x;
        double r2 = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double cx = (s[g.index(i, wrapi(j + 1))] - s[g.index(i, j)]) / h;
                const double cy = -(s[g.index(wrapi(i + 1), j)] - s[g.index(i, j)]) / h;
                const double ex = cx - qx(i, j);
                const double ey = cy - qy(i, j);
                r2 += g.volume() * (ex * ex + ey * ey);
            }
        }
        out.residual = std::sqrt(r2);
        out.sigma[1].values = s;
        out.sigma[2].values = s;
        for (double& x : out.sigma[2].values) x = -x;
    }
    if (out.residual > 1e-6 * std::max(qnorm, 1e-300) && out.residual > 1e-14) {
        throw InvariantError("flux corrector identity residual " + std::to_string(out.residual) + " exceeds 1e-6 ||q||");
    }
    return out;
}

InclusionCorrector solve_inclusion_corrector(const GridFunction& v, const CellOptions& opt) {
    const Grid& g = v.grid;
    if (!g.periodic) throw Error("inclusion correctors are posed on the periodic cell");
    double mean = 0.0;
    for (double x : v.values) mean += x;
    mean /= static_cast<double>(v.size());
    std::vector<double> b(v.size());
    for (std::size_t c = 0; c < v.size(); ++c) b[c] = -g.volume() * (v.values[c] - mean);
    const SparseOperator L = assemble_operator(uniform_coefficient(g, 1.0, 0.0), BoundaryKind::Periodic);
    MeanZeroResult res = mean_zero_solve(L, b, opt.cg);
    const GridFunction psi = to_function(g, BoundaryKind::Periodic, std::move(res.x));
    InclusionCorrector out;
    out.theta = discrete_gradient(psi);
    const GridFunction div = discrete_divergence(out.theta);
    double r2 = 0.0;
    for (std::size_t c = 0; c < v.size(); ++c) {
        const double e = div.values[c] - (v.values[c] - mean);
        r2 += e * e;
    }
    out.residual = std::sqrt(r2 * g.volume());
    if (out.residual > 1e-6) {
        throw InvariantError("inclusion corrector identity residual " + std::to_string(out.residual) + " exceeds 1e-6");
    }
    return out;
}

HomogenizedData compute_homogenized_data(const IndicatorGrid& chi, const HomogenizedOptions& opt) {
    HomogenizedData hd;
    hd.dim = chi.dim;
    hd.vol_frac = chi.volume_fraction();
    ResonantCell rc = solve_resonant_cell(chi, opt.cell);
    hd.v = std::move(rc.v);
    hd.mean_v = rc.mean_v;
    hd.phi = solve_corrector_soft(chi, opt.cell);
    hd.abar_detail = homogenized_matrix(hd.phi, chi);
    hd.a_bar = hd.abar_detail.a_bar;
    for (int i = 0; i < chi.dim; ++i) hd.q.push_back(flux_defect(hd.phi, chi, hd.a_bar, i));
    if (opt.flux_correctors) {
        for (int i = 0; i < chi.dim; ++i) hd.sigma.push_back(solve_flux_corrector(hd.q[static_cast<std::size_t>(i)], opt.cell));
    }
    if (opt.inclusion_corrector) hd.theta = solve_inclusion_corrector(hd.v, opt.cell);
    return hd;
}

MomentReport corrector_moment_report(const HomogenizedData& hd) {
    MomentReport m;
    if (hd.phi.phi.empty()) return m;
    const std::size_t cells = hd.phi.phi.front().size();
    for (std::size_t c = 0; c < cells; ++c) {
        double p = 0.0;
        for (const auto& phi : hd.phi.phi) p += phi.values[c] * phi.values[c];
        double s = 0.0;
        for (const auto& fc : hd.sigma) {
            for (const auto& sig : fc.sigma) s += sig.values[c] * sig.values[c];
        }
        m.phi_max = std::max(m.phi_max, p);
        m.sigma_max = std::max(m.sigma_max, s);
        m.phi_mean += p;
        m.sigma_mean += s;
    }
    m.phi_mean /= static_cast<double>(cells);
    m.sigma_mean /= static_cast<double>(cells);
    std::size_t faces = 0;
    for (int k = 0; k < hd.dim; ++k) {
        if (hd.theta.theta.comp[k].empty()) continue;
        for (double t : hd.theta.theta.comp[k]) {
            m.theta_max = std::max(m.theta_max, t * t);
            m.theta_mean += t * t;
        }
        faces = hd.theta.theta.comp[k].size();
    }
    if (faces > 0) m.theta_mean /= static_cast<double>(faces);
    return m;
}

double corrector_gradient_distance(const CorrectorSet& a, const CorrectorSet& b, const IndicatorGrid& chi) {
    const FaceField w = complement_face_indicator(chi);
    double s = 0.0;
    for (std::size_t i = 0; i < a.grad_phi.size(); ++i) {
        for (int k = 0; k < chi.dim; ++k) {
            for (std::size_t f = 0; f < w.comp[k].size(); ++f) {
                const double e = w.comp[k][f] * (a.grad_phi[i].comp[k][f] - b.grad_phi[i].comp[k][f]);
                s += e * e;
            }
        }
    }
    return std::sqrt(s * w.grid.volume());
}

IndicatorGrid rotate90(const IndicatorGrid& chi) {
    if (chi.dim != 2) throw Error("rotation needs a 2-D grid");
    IndicatorGrid r = chi;
    const int n = chi.n;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            r.cells[static_cast<std::size_t>(j) * n + i] = chi.cells[static_cast<std::size_t>(n - 1 - i) * n + j];
        }
    }
    return r;
}

}  // namespace dplab
