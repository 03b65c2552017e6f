#include "dplab/dporosity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dplab/errors.hpp"

namespace dplab {

namespace {

int wrapi(int i, int n) { return ((i % n) + n) % n; }

double l2_of(const Grid& g, std::span<const double> u) { return std::sqrt(cell_inner(g, u, u)); }

/// Row-wise 3x3 stencil accumulator for operators on a structured 2-D/1-D grid.
class StencilMatrix {
public:
    explicit StencilMatrix(const Grid& g) : g_(g), slots_(g.cells() * 9, 0.0) {}

    /// Adds v to A(row cell, cell at row + offset). Offsets lie in [-1, 1]^2.
    void add(int ri, int rj, int ci, int cj, double v) {
        int di = ci - ri;
        int dj = cj - rj;
        if (g_.periodic) {
            if (di > 1) di -= g_.n;
            if (di < -1) di += g_.n;
            if (dj > 1) dj -= g_.n;
            if (dj < -1) dj += g_.n;
        }
        slots_[g_.index(ri, rj) * 9 + static_cast<std::size_t>((dj + 1) * 3 + (di + 1))] += v;
    }

    SparseOperator build() const {
        SparseOperator A;
        A.grid = g_;
        const std::size_t n = g_.cells();
        A.row_ptr.assign(n + 1, 0);
        std::vector<std::pair<std::int32_t, double>> row;
        for (int rj = 0; rj < g_.ny(); ++rj) {
            for (int ri = 0; ri < g_.n; ++ri) {
                const std::size_t r = g_.index(ri, rj);
                row.clear();
                for (int dj = -1; dj <= 1; ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        const double v = slots_[r * 9 + static_cast<std::size_t>((dj + 1) * 3 + (di + 1))];
                        if (v == 0.0 && !(di == 0 && dj == 0)) continue;
                        int ci = ri + di;
                        int cj = rj + dj;
                        if (g_.periodic) {
                            ci = wrapi(ci, g_.n);
                            cj = wrapi(cj, g_.ny());
                        } else if (ci < 0 || ci >= g_.n || cj < 0 || cj >= g_.ny()) {
                            continue;
                        }
                        row.emplace_back(static_cast<std::int32_t>(g_.index(ci, cj)), v);
                    }
                }
                std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
                const std::size_t start = A.col.size();
                for (const auto& [c, v] : row) {
                    if (A.col.size() > start && A.col.back() == c) {
                        A.val.back() += v;
                    } else {
                        A.col.push_back(c);
                        A.val.push_back(v);
                    }
                }
                A.row_ptr[r + 1] = A.col.size();
            }
        }
        A.symmetric = true;
        A.cell_to_dof.resize(n);
        A.dof_to_cell.resize(n);
        for (std::size_t c = 0; c < n; ++c) {
            A.cell_to_dof[c] = static_cast<std::int32_t>(c);
            A.dof_to_cell[c] = static_cast<std::int32_t>(c);
        }
        return A;
    }

private:
    Grid g_;
    std::vector<double> slots_;
};

struct StencilTerm {
    int i;
    int j;
    double c;
};

/// Centered difference along `axis` at cell (i, j); box faces reflect oddly (ghost = -u).
int centered_stencil(const Grid& g, int axis, int i, int j, StencilTerm out[2]) {
    const double w = 1.0 / (2.0 * g.h());
    const int lim = axis == 0 ? g.n : g.ny();
    const int pos = axis == 0 ? i : j;
    int count = 0;
    const auto put = [&](int ii, int jj, double c) {
        for (int k = 0; k < count; ++k) {
            if (out[k].i == ii && out[k].j == jj) {
                out[k].c += c;
                return;
            }
        }
        out[count++] = {ii, jj, c};
    };
    for (int s : {1, -1}) {
        int q = pos + s;
        double c = s * w;
        if (g.periodic) {
            q = wrapi(q, lim);
        } else if (q < 0 || q >= lim) {
            q = pos;
            c = -c;
        }
        if (axis == 0) put(q, j, c);
        else put(i, q, c);
    }
    return count;
}

GridFunction make_function(const Grid& g, BoundaryKind bc, std::vector<double> values) {
    GridFunction u;
    u.grid = g;
    u.bc = bc;
    u.values = std::move(values);
    return u;
}

}  // namespace

GridFunction sample_function(const Grid& grid, const ScalarFunction& fn, BoundaryKind bc) {
    GridFunction u = GridFunction::zeros(grid, bc);
    for (int j = 0; j < grid.ny(); ++j) {
        for (int i = 0; i < grid.n; ++i) {
            const Vec2 c = grid.center(i, j);
            u.values[grid.index(i, j)] = fn(c.x, c.y);
        }
    }
    return u;
}

EpsProblem build_eps_problem(const InclusionSet& cell_geometry, const Domain& domain, double eps, const ScalarFunction& f,
                             int resolution) {
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (resolution < 4) throw ConfigError("resolution must be at least 4");
    if (!cell_geometry.periodic) throw ConfigError("cell geometry must be periodic");
    EpsProblem p;
    p.domain = domain;
    p.domain.dim = cell_geometry.dim;
    p.eps = eps;
    p.resolution = resolution;
    p.geometry = cell_geometry;
    const int dim = cell_geometry.dim;
    const Grid grid{dim, resolution, domain.extent, domain.periodic};
    const BoundaryKind bc = domain.periodic ? BoundaryKind::Periodic : BoundaryKind::DirichletZero;

    IndicatorGrid chi;
    chi.dim = dim;
    chi.n = resolution;
    chi.period = domain.extent;
    chi.periodic = domain.periodic;
    chi.cells.assign(grid.cells(), 0);
    chi.model = cell_geometry.model;
    chi.seed = cell_geometry.seed;
    p.instance.assign(grid.cells(), -1);

    const double cell_len = eps * cell_geometry.period;
    const double copies_real = domain.extent / cell_len;
    const auto inside_box = [&](const Shape& s, int ax, int ay) {
        const auto b = shape_bounds(s, dim);
        const double lx = b[0].x * eps + ax * cell_len;
        const double hx = b[1].x * eps + ax * cell_len;
        bool ok = lx > 0.0 && hx < domain.extent;
        if (dim == 2) {
            const double ly = b[0].y * eps + ay * cell_len;
            const double hy = b[1].y * eps + ay * cell_len;
            ok = ok && ly > 0.0 && hy < domain.extent;
        }
        return ok;
    };

    if (copies_real < 1.0 - 1e-12) {
        // A single period exceeds D: rasterize the surviving inclusions directly.
        if (domain.periodic) throw ConfigError("eps * period must divide the torus extent");
        InclusionSet scaled;
        scaled.dim = dim;
        scaled.period = domain.extent;
        scaled.periodic = false;
        for (std::size_t k = 0; k < cell_geometry.inclusions.size(); ++k) {
            const Shape& s = cell_geometry.inclusions[k].shape;
            if (!inside_box(s, 0, 0)) continue;
            Shape t = s;
            if (auto* d = std::get_if<Disc>(&t)) {
                d->center = eps * d->center;
                d->radius *= eps;
            } else if (auto* c = std::get_if<Capsule>(&t)) {
                c->a = eps * c->a;
                c->b = eps * c->b;
                c->width *= eps;
            } else {
                std::get<CellCluster>(t).cell_size *= eps;
            }
            scaled.inclusions.push_back({t, static_cast<int>(k)});
        }
        LabelGrid labels;
        IndicatorGrid r = rasterize(scaled, resolution, RasterRule::AreaThreshold, &labels);
        chi.cells = r.cells;
        for (std::size_t c = 0; c < chi.cells.size(); ++c) p.instance[c] = labels.label[c];
        p.instance_count = static_cast<int>(scaled.inclusions.size());
        p.copies = 0;
        p.cell_resolution = 0;
        chi.inclusion_count = scaled.inclusions.size();
        p.chi_eps = std::move(chi);
        p.f = sample_function(grid, f, bc);
        return p;
    }

    const int copies = static_cast<int>(std::lround(copies_real));
    if (std::abs(copies - copies_real) > 1e-9 * copies_real) {
        throw ConfigError("eps is incommensurate with the domain: |D| / (eps * period) = " + std::to_string(copies_real) +
                    " is not an integer");
    }
    if (resolution % copies != 0) {
        throw ConfigError("resolution " + std::to_string(resolution) + " is not divisible by the " + std::to_string(copies) +
                    " periods per axis");
    }
    const int m = resolution / copies;
    p.copies = copies;
    p.cell_resolution = m;

    // Resolution rule on the smallest inclusion.
    double dmin = 1e300;
    for (const auto& inc : cell_geometry.inclusions) dmin = std::min(dmin, shape_diameter(inc.shape));
    if (!cell_geometry.inclusions.empty()) {
        const double across = dmin * eps / grid.h();
        if (across < 4.0) {
            throw ConfigError("under-resolved: " + std::to_string(across) + " cells across the smallest inclusion (need >= 4)");
        }
        if (across < 8.0) {
            p.warnings.push_back("only " + std::to_string(across) + " cells across the smallest inclusion (>= 8 advised)");
        }
    }

    LabelGrid labels;
    p.cell_chi = rasterize(cell_geometry, m, RasterRule::AreaThreshold, &labels);
    const int ny_copies = dim == 2 ? copies : 1;
    const int mj = dim == 2 ? m : 1;
    const int ninc = static_cast<int>(cell_geometry.inclusions.size());
    std::map<std::array<int, 3>, std::int32_t> ids;
    for (int J = 0; J < grid.ny(); ++J) {
        for (int I = 0; I < grid.n; ++I) {
            const int i = I % m;
            const int j = J % mj;
            const std::size_t c = p.cell_chi.n > 0 ? static_cast<std::size_t>(j) * m + i : 0;
            if (!p.cell_chi.cells[c]) continue;
            const int k = labels.label[c];
            int ax = I / m + labels.translate[c][0];
            int ay = J / mj + labels.translate[c][1];
            if (domain.periodic) {
                ax = wrapi(ax, copies);
                ay = wrapi(ay, ny_copies);
            } else if (!inside_box(cell_geometry.inclusions[static_cast<std::size_t>(k)].shape, ax, ay)) {
                continue;
            }
            const std::array<int, 3> key{k, ax, ay};
            auto it = ids.find(key);
            if (it == ids.end()) it = ids.emplace(key, static_cast<std::int32_t>(ids.size())).first;
            chi.cells[grid.index(I, J)] = 1;
            p.instance[grid.index(I, J)] = it->second;
        }
    }
    (void)ninc;
    p.instance_count = static_cast<int>(ids.size());
    chi.inclusion_count = ids.size();
    p.chi_eps = std::move(chi);
    p.f = sample_function(grid, f, bc);
    return p;
}

EpsSolution solve_eps_problem(const EpsProblem& p, const CgOptions& cg) {
    const Grid g = p.grid();
    const CoeffField coeff = coefficient_field(p.chi_eps, 1.0, p.eps * p.eps, 1.0);
    const SparseOperator A = assemble_operator(coeff, p.bc());
    std::vector<double> b(g.cells());
    for (std::size_t c = 0; c < b.size(); ++c) b[c] = g.volume() * p.f.values[c];
    EpsSolution out;
    CgOptions opt = cg;
    CgResult res = cg_solve(A, b, opt);
    out.iterations = res.iterations;
    const auto defect = [&](const std::vector<double>& u) {
        const double fu = cell_inner(g, p.f.values, u);
        const double mass = cell_inner(g, u, u);
        const double energy = dirichlet_energy(coeff, p.bc(), {}, u);
        return fu != 0.0 ? std::abs(fu - mass - energy) / std::abs(fu) : std::abs(mass + energy);
    };
    out.energy_defect = defect(res.x);
    // Tighten until the discrete energy identity holds to 1e-10.
    for (int round = 0; round < 3 && out.energy_defect > 1e-10; ++round) {
        opt.tol *= 0.1;
        CgResult more = cg_solve(A, b, opt, res.x);
        out.iterations += more.iterations;
        res = std::move(more);
        out.energy_defect = defect(res.x);
    }
    out.u = make_function(g, p.bc(), std::move(res.x));
    out.l2_u = l2_of(g, out.u.values);
    out.l2_f = l2_of(g, p.f.values);
    if (out.l2_u > out.l2_f * (1.0 + 1e-8) + 1e-300) {
        throw InvariantError("a priori bound ||u|| <= ||f|| violated");
    }
    return out;
}

AuxiliarySolution solve_auxiliary(const EpsProblem& p, const GridFunction& rhs, const CgOptions& cg) {
    const Grid g = p.grid();
    AuxiliarySolution out;
    out.v = GridFunction::zeros(g, BoundaryKind::MaskedDirichlet);
    out.v.mask = p.chi_eps.cells;
    for (double x : rhs.values) out.rhs_max_abs = std::max(out.rhs_max_abs, std::abs(x));
    if (p.chi_eps.count() == 0) return out;
    const CoeffField coeff = uniform_coefficient(g, p.eps * p.eps, 1.0);
    const SparseOperator A = assemble_operator(coeff, BoundaryKind::MaskedDirichlet, p.chi_eps.cells);
    std::vector<double> b(A.rows());
    for (std::size_t r = 0; r < A.rows(); ++r) b[r] = g.volume() * rhs.values[static_cast<std::size_t>(A.dof_to_cell[r])];
    const CgResult res = cg_solve(A, b, cg);
    out.v.values = A.scatter(res.x);
    out.iterations = res.iterations;
    for (double x : out.v.values) out.max_abs = std::max(out.max_abs, std::abs(x));
    if (out.max_abs > out.rhs_max_abs * (1.0 + 1e-8) + 1e-14) {
        throw InvariantError("maximum principle ||v_eps|| <= ||rhs|| violated");
    }
    return out;
}

SparseOperator assemble_homogenized(const Grid& g, const Matrix2& a_bar, double mass) {
    if (g.periodic && g.n < 3) throw Error("periodic homogenized grid needs n >= 3");
    StencilMatrix S(g);
    const double vol = g.volume();
    const double scale = std::pow(g.h(), g.dim - 2);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.n; ++i) S.add(i, j, i, j, mass * vol);
    }
    const int nf = g.faces_along();
    for (int k = 0; k < g.dim; ++k) {
        const double t = a_bar[k][k] * scale;
        const int ni = k == 0 ? nf : g.n;
        const int nj = g.dim == 1 ? 1 : (k == 0 ? g.n : nf);
        for (int fj = 0; fj < nj; ++fj) {
            for (int fi = 0; fi < ni; ++fi) {
                // Cells on either side of the face.
                int mi = fi;
                int mjj = fj;
                if (k == 0) mi = fi - 1;
                else mjj = fj - 1;
                const int lim = k == 0 ? g.n : g.ny();
                const int along_m = k == 0 ? mi : mjj;
                const int along_p = k == 0 ? fi : fj;
                if (g.periodic) {
                    const int ai = k == 0 ? wrapi(mi, g.n) : fi;
                    const int aj = k == 0 ? fj : wrapi(mjj, g.n);
                    S.add(ai, aj, ai, aj, t);
                    S.add(fi, fj, fi, fj, t);
                    S.add(ai, aj, fi, fj, -t);
                    S.add(fi, fj, ai, aj, -t);
                } else if (along_m < 0) {
                    S.add(fi, fj, fi, fj, 2.0 * t);
                } else if (along_p >= lim) {
                    const int ai = k == 0 ? mi : fi;
                    const int aj = k == 0 ? fj : mjj;
                    S.add(ai, aj, ai, aj, 2.0 * t);
                } else {
                    const int ai = k == 0 ? mi : fi;
                    const int aj = k == 0 ? fj : mjj;
                    S.add(ai, aj, ai, aj, t);
                    S.add(fi, fj, fi, fj, t);
                    S.add(ai, aj, fi, fj, -t);
                    S.add(fi, fj, ai, aj, -t);
                }
            }
        }
    }
    const double cross = g.dim == 2 ? a_bar[0][1] : 0.0;
    if (cross != 0.0) {
        const double c = cross * vol;
        StencilTerm dx[2];
        StencilTerm dy[2];
        for (int j = 0; j < g.n; ++j) {
            for (int i = 0; i < g.n; ++i) {
                const int nx = centered_stencil(g, 0, i, j, dx);
                const int ny = centered_stencil(g, 1, i, j, dy);
                for (int a = 0; a < nx; ++a) {
                    for (int b = 0; b < ny; ++b) {
                        const double v = c * dx[a].c * dy[b].c;
                        S.add(dx[a].i, dx[a].j, dy[b].i, dy[b].j, v);
                        S.add(dy[b].i, dy[b].j, dx[a].i, dx[a].j, v);
                    }
                }
            }
        }
    }
    return S.build();
}

HomogenizedSolution solve_homogenized(const Matrix2& a_bar, double mean_v, const GridFunction& f, const CgOptions& cg) {
    if (!(mean_v < 1.0)) throw Error("mean_v must be below 1");
    if (mean_v < 0.0) throw Error("mean_v must be non-negative");
    const Grid& g = f.grid;
    const SparseOperator A = assemble_homogenized(g, a_bar, 1.0 - mean_v);
    std::vector<double> b(g.cells());
    for (std::size_t c = 0; c < b.size(); ++c) b[c] = g.volume() * (1.0 - mean_v) * f.values[c];
    CgResult res = cg_solve(A, b, cg);
    HomogenizedSolution out;
    out.u = make_function(g, f.bc, std::move(res.x));
    out.iterations = res.iterations;
    return out;
}

HomogenizedSolution solve_homogenized(const HomogenizedData& hd, const GridFunction& f, const CgOptions& cg) {
    return solve_homogenized(hd.a_bar, hd.mean_v, f, cg);
}

SparseOperator assemble_coupled(const Matrix2& a_bar, const EpsProblem& p) {
    const Grid g = p.grid();
    const SparseOperator H = assemble_homogenized(g, a_bar, 1.0);
    const std::size_t N = g.cells();
    SparseOperator K;
    const bool has_f = p.chi_eps.count() > 0;
    if (has_f) {
        K = assemble_operator(uniform_coefficient(g, p.eps * p.eps, 1.0), BoundaryKind::MaskedDirichlet, p.chi_eps.cells);
    }
    const std::size_t NF = has_f ? K.rows() : 0;
    const double vol = g.volume();
    SparseOperator A;
    A.grid = g;
    A.row_ptr.assign(N + NF + 1, 0);
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t k = H.row_ptr[r]; k < H.row_ptr[r + 1]; ++k) {
            A.col.push_back(H.col[k]);
            A.val.push_back(H.val[k]);
        }
        if (has_f && K.cell_to_dof[r] >= 0) {
            A.col.push_back(static_cast<std::int32_t>(N) + K.cell_to_dof[r]);
            A.val.push_back(vol);
        }
        A.row_ptr[r + 1] = A.col.size();
    }
    for (std::size_t r = 0; r < NF; ++r) {
        A.col.push_back(K.dof_to_cell[r]);
        A.val.push_back(vol);
        for (std::size_t k = K.row_ptr[r]; k < K.row_ptr[r + 1]; ++k) {
            A.col.push_back(static_cast<std::int32_t>(N) + K.col[k]);
            A.val.push_back(K.val[k]);
        }
        A.row_ptr[N + r + 1] = A.col.size();
    }
    A.symmetric = true;
    A.dof_to_cell.resize(N + NF);
    for (std::size_t r = 0; r < N; ++r) A.dof_to_cell[r] = static_cast<std::int32_t>(r);
    for (std::size_t r = 0; r < NF; ++r) A.dof_to_cell[N + r] = K.dof_to_cell[r];
    return A;
}

CoupledSolution solve_coupled_two_scale(const Matrix2& a_bar, const EpsProblem& p, const CgOptions& cg) {
    if (!p.domain.periodic) throw Error("the coupled two-scale system is posed on the torus");
    const Grid g = p.grid();
    const SparseOperator A = assemble_coupled(a_bar, p);
    const std::size_t N = g.cells();
    std::vector<double> b(A.rows());
    for (std::size_t r = 0; r < A.rows(); ++r) b[r] = g.volume() * p.f.values[static_cast<std::size_t>(A.dof_to_cell[r])];
    CgResult res = cg_solve(A, b, cg);
    CoupledSolution out;
    out.iterations = res.iterations;
    out.u_bar = make_function(g, BoundaryKind::Periodic, std::vector<double>(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(N)));
    out.w = GridFunction::zeros(g, BoundaryKind::MaskedDirichlet);
    out.w.mask = p.chi_eps.cells;
    for (std::size_t r = N; r < A.rows(); ++r) out.w.values[static_cast<std::size_t>(A.dof_to_cell[r])] = res.x[r];
    const double fl2 = l2_of(g, p.f.values);
    const double ubar_h1 = norm(out.u_bar, {}, NormKind::H1);
    const double wl2 = l2_of(g, out.w.values);
    out.bound_ratio = fl2 > 0.0 ? (ubar_h1 + wl2) / fl2 : 0.0;
    return out;
}

GridFunction mollify(const GridFunction& u, double width) {
    const Grid& g = u.grid;
    if (!(width > 0.0)) return u;
    const double h = g.h();
    const int r = std::max(1, static_cast<int>(std::ceil(width / h)));
    std::vector<double> w(static_cast<std::size_t>(2 * r + 1));
    double s = 0.0;
    for (int k = -r; k <= r; ++k) {
        const double t = k * h / width;
        const double v = std::abs(t) < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * t), 2) : 0.0;
        w[static_cast<std::size_t>(k + r)] = v;
        s += v;
    }
    for (double& x : w) x /= s;
    GridFunction out = u;
    std::vector<double> tmp(u.values.size());
    for (int axis = 0; axis < g.dim; ++axis) {
        const std::vector<double>& src = out.values;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.n; ++i) {
                double acc = 0.0;
                for (int k = -r; k <= r; ++k) {
                    int ii = axis == 0 ? i + k : i;
                    int jj = axis == 1 ? j + k : j;
                    if (g.periodic) {
                        ii = wrapi(ii, g.n);
                        jj = wrapi(jj, g.ny());
                    } else if (ii < 0 || ii >= g.n || jj < 0 || jj >= g.ny()) {
                        continue;
                    }
                    acc += w[static_cast<std::size_t>(k + r)] * src[g.index(ii, jj)];
                }
                tmp[g.index(i, j)] = acc;
            }
        }
        out.values.swap(tmp);
    }
    return out;
}

std::array<GridFunction, 2> cell_gradient(const GridFunction& u) {
    const Grid& g = u.grid;
    std::array<GridFunction, 2> out{GridFunction::zeros(g, u.bc), GridFunction::zeros(g, u.bc)};
    const double h = g.h();
    for (int axis = 0; axis < g.dim; ++axis) {
        const int lim = axis == 0 ? g.n : g.ny();
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.n; ++i) {
                const int pos = axis == 0 ? i : j;
                const auto at = [&](int q) { return axis == 0 ? u.values[g.index(q, j)] : u.values[g.index(i, q)]; };
                double d = 0.0;
                if (g.periodic) d = (at(wrapi(pos + 1, lim)) - at(wrapi(pos - 1, lim))) / (2.0 * h);
                else if (pos == 0) d = (at(1) - at(0)) / h;
                else if (pos == lim - 1) d = (at(lim - 1) - at(lim - 2)) / h;
                else d = (at(pos + 1) - at(pos - 1)) / (2.0 * h);
                out[static_cast<std::size_t>(axis)].values[g.index(i, j)] = d;
            }
        }
    }
    return out;
}

TwoScaleFields two_scale_expansion(const GridFunction& u_bar, const HomogenizedData& cell, const EpsProblem& p,
                                   std::optional<double> mollifier_width) {
    const Grid g = p.grid();
    if (!(u_bar.grid == g)) throw Error("u_bar grid does not match the eps problem");
    const int m = p.cell_resolution;
    if (m <= 0 || cell.v.grid.n != m) throw Error("corrector grid is incommensurate with eps");
    TwoScaleFields out;
    out.u_smooth = mollifier_width ? mollify(u_bar, *mollifier_width) : u_bar;
    out.grad_smooth = cell_gradient(out.u_smooth);
    out.outside = out.u_smooth;
    out.inside = out.u_smooth;
    const int mj = g.dim == 2 ? m : 1;
    for (int J = 0; J < g.ny(); ++J) {
        for (int I = 0; I < g.n; ++I) {
            const std::size_t c = g.index(I, J);
            const std::size_t cc = static_cast<std::size_t>(J % mj) * m + static_cast<std::size_t>(I % m);
            double corr = 0.0;
            for (int i = 0; i < g.dim; ++i) {
                corr += cell.phi.phi[static_cast<std::size_t>(i)].values[cc] * out.grad_smooth[static_cast<std::size_t>(i)].values[c];
            }
            out.outside.values[c] += p.eps * corr;
            if (p.chi_eps.cells[c]) out.inside.values[c] += cell.v.values[cc] * (p.f.values[c] - out.u_smooth.values[c]);
        }
    }
    return out;
}

ErrorRow error_report(const GridFunction& u_eps, const TwoScaleFields& ex, const HomogenizedData& cell, const EpsProblem& p) {
    const Grid g = p.grid();
    ErrorRow row;
    row.eps = p.eps;
    const std::vector<std::uint8_t> comp = complement_mask(p.chi_eps);
    GridFunction e = u_eps;
    for (std::size_t c = 0; c < e.size(); ++c) e.values[c] -= ex.outside.values[c];
    row.h1_outside = norm(e, comp, NormKind::H1);
    GridFunction ei = u_eps;
    for (std::size_t c = 0; c < ei.size(); ++c) ei.values[c] -= ex.inside.values[c];
    row.l2_inside = norm(ei, {}, NormKind::L2);

    // Gradient defect on faces between two complement cells.
    const int m = p.cell_resolution;
    const Grid& cg = cell.phi.grad_phi.front().grid;
    const double h = g.h();
    double s = 0.0;
    for_each_face(g, [&](const FaceRef& f) {
        if (f.minus < 0 || f.plus < 0) return;
        if (p.chi_eps.cells[static_cast<std::size_t>(f.minus)] || p.chi_eps.cells[static_cast<std::size_t>(f.plus)]) return;
        const double du = (u_eps.values[static_cast<std::size_t>(f.plus)] - u_eps.values[static_cast<std::size_t>(f.minus)]) / h;
        const int ni = f.dir == 0 ? g.faces_along() : g.n;
        const int I = static_cast<int>(f.face % static_cast<std::size_t>(ni));
        const int J = static_cast<int>(f.face / static_cast<std::size_t>(ni));
        const int ci = I % m;
        const int cj = g.dim == 2 ? J % m : 0;
        const std::size_t cf = f.dir == 0 ? static_cast<std::size_t>(cj) * cg.faces_along() + ci
                                          : static_cast<std::size_t>(cj) * cg.n + ci;
        double model = 0.0;
        for (int i = 0; i < g.dim; ++i) {
            const auto& gs = ex.grad_smooth[static_cast<std::size_t>(i)].values;
            const double gi = 0.5 * (gs[static_cast<std::size_t>(f.minus)] + gs[static_cast<std::size_t>(f.plus)]);
            model += ((i == f.dir ? 1.0 : 0.0) + cell.phi.grad_phi[static_cast<std::size_t>(i)].comp[f.dir][cf]) * gi;
        }
        const double d = du - model;
        s += g.volume() * d * d;
    });
    row.grad_defect = std::sqrt(s);
    return row;
}

std::vector<TestFunction> sine_battery(const Domain& domain, int kmax) {
    std::vector<TestFunction> out;
    const double L = domain.extent;
    out.push_back({0, 0, "psi=1", [](double, double) { return 1.0; }, [](double, double) { return 0.0; }});
    const bool two = domain.dim == 2;
    for (int k = 1; k <= kmax; ++k) {
        for (int l = 1; l <= (two ? kmax : 1); ++l) {
            TestFunction t;
            t.k = k;
            t.l = two ? l : 0;
            if (domain.periodic) {
                const double a = 2.0 * std::numbers::pi * k / L;
                const double b = 2.0 * std::numbers::pi * l / L;
                t.name = "torus(" + std::to_string(k) + "," + std::to_string(t.l) + ")";
                if (two) {
                    t.psi = [a, b](double x, double y) { return std::sin(a * x + 1.0) * std::sin(b * y + 2.0); };
                    t.grad_norm_sq = [a, b](double x, double y) {
                        const double gx = a * std::cos(a * x + 1.0) * std::sin(b * y + 2.0);
                        const double gy = b * std::sin(a * x + 1.0) * std::cos(b * y + 2.0);
                        return gx * gx + gy * gy;
                    };
                } else {
                    t.psi = [a](double x, double) { return std::sin(a * x + 1.0); };
                    t.grad_norm_sq = [a](double x, double) { return std::pow(a * std::cos(a * x + 1.0), 2); };
                }
            } else {
                const double a = std::numbers::pi * k / L;
                const double b = std::numbers::pi * l / L;
                t.name = "sin(" + std::to_string(k) + "," + std::to_string(t.l) + ")";
                if (two) {
                    t.psi = [a, b](double x, double y) { return std::sin(a * x) * std::sin(b * y); };
                    t.grad_norm_sq = [a, b](double x, double y) {
                        const double gx = a * std::cos(a * x) * std::sin(b * y);
                        const double gy = b * std::sin(a * x) * std::cos(b * y);
                        return gx * gx + gy * gy;
                    };
                } else {
                    t.psi = [a](double x, double) { return std::sin(a * x); };
                    t.grad_norm_sq = [a](double x, double) { return std::pow(a * std::cos(a * x), 2); };
                }
            }
            out.push_back(std::move(t));
        }
    }
    return out;
}

InsideDiagnostics inside_error_diagnostics(const GridFunction& u_eps, const GridFunction& u_bar, const GridFunction& v_eps,
                                           const EpsProblem& p) {
    const Grid g = p.grid();
    InsideDiagnostics d;
    double left = 0.0;
    double outside = 0.0;
    std::vector<double> e(g.cells(), 0.0);
    for (std::size_t c = 0; c < g.cells(); ++c) {
        const double diff = u_eps.values[c] - u_bar.values[c];
        if (p.chi_eps.cells[c]) {
            e[c] = diff - v_eps.values[c];
            left += e[c] * e[c];
        } else {
            outside += diff * diff;
        }
    }
    d.left = std::sqrt(left * g.volume());
    d.right = std::sqrt(outside * g.volume()) + p.eps * l2_of(g, p.f.values);
    d.ratio = d.right > 0.0 ? d.left / d.right : 0.0;
    for (const TestFunction& t : sine_battery(p.domain)) {
        if (t.k == 0) continue;
        double pair = 0.0;
        double gn = 0.0;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.n; ++i) {
                const Vec2 x = g.center(i, j);
                pair += e[g.index(i, j)] * t.psi(x.x, x.y);
                gn += t.grad_norm_sq(x.x, x.y);
            }
        }
        pair *= g.volume();
        gn = std::sqrt(gn * g.volume());
        d.hminus1_defect = std::max(d.hminus1_defect, std::abs(pair) / gn);
    }
    return d;
}

std::vector<WeakLimitRow> verify_weak_limit(const std::vector<WeakLimitSample>& samples, const std::vector<TestFunction>& battery) {
    if (samples.size() < 3) throw Error("weak-limit check needs at least three eps values");
    std::vector<WeakLimitRow> rows;
    for (const TestFunction& t : battery) {
        WeakLimitRow row;
        row.psi = t.name;
        for (const WeakLimitSample& s : samples) {
            const Grid& g = s.u_eps.grid;
            const double h = g.h();
            double state = 0.0;
            for (int j = 0; j < g.ny(); ++j) {
                for (int i = 0; i < g.n; ++i) {
                    const std::size_t c = g.index(i, j);
                    const Vec2 x = g.center(i, j);
                    const double r = s.u_eps.values[c] - s.u_bar.values[c] - s.mean_v * (s.f.values[c] - s.u_bar.values[c]);
                    state += t.psi(x.x, x.y) * r;
                }
            }
            state = std::abs(state * g.volume());

            const auto gbar = cell_gradient(s.u_bar);
            std::array<double, 2> flux{0.0, 0.0};
            const int nf = g.faces_along();
            for_each_face(g, [&](const FaceRef& f) {
                const std::int64_t real = f.minus >= 0 ? f.minus : f.plus;
                if ((f.minus >= 0 && s.chi_eps.cells[static_cast<std::size_t>(f.minus)]) ||
                    (f.plus >= 0 && s.chi_eps.cells[static_cast<std::size_t>(f.plus)])) {
                    // Flux of u_eps through F faces is not part of the pairing; the a_bar term still is.
                }
                const bool comp = (f.minus < 0 || !s.chi_eps.cells[static_cast<std::size_t>(f.minus)]) &&
                                  (f.plus < 0 || !s.chi_eps.cells[static_cast<std::size_t>(f.plus)]);
                const bool interior = f.minus >= 0 && f.plus >= 0;
                const double dist = interior ? h : 0.5 * h;
                const auto val = [&](const GridFunction& u, std::int64_t c) { return c >= 0 ? u.values[static_cast<std::size_t>(c)] : 0.0; };
                const double du_eps = (val(s.u_eps, f.plus) - val(s.u_eps, f.minus)) / dist;
                const double du_bar = (val(s.u_bar, f.plus) - val(s.u_bar, f.minus)) / dist;
                double other = 0.0;
                if (g.dim == 2) {
                    const auto& go = gbar[static_cast<std::size_t>(1 - f.dir)].values;
                    other = interior ? 0.5 * (go[static_cast<std::size_t>(f.minus)] + go[static_cast<std::size_t>(f.plus)])
                                     : go[static_cast<std::size_t>(real)];
                }
                const double model = s.a_bar[f.dir][f.dir] * du_bar + (g.dim == 2 ? s.a_bar[f.dir][1 - f.dir] * other : 0.0);
                const int ni = f.dir == 0 ? nf : g.n;
                const int fi = static_cast<int>(f.face % static_cast<std::size_t>(ni));
                const int fj = static_cast<int>(f.face / static_cast<std::size_t>(ni));
                const double x = f.dir == 0 ? fi * h : (fi + 0.5) * h;
                const double y = g.dim == 2 ? (f.dir == 0 ? (fj + 0.5) * h : fj * h) : 0.0;
                const double w = interior ? g.volume() : 0.5 * g.volume();
                flux[static_cast<std::size_t>(f.dir)] += w * t.psi(x, y) * ((comp ? du_eps : 0.0) - model);
            });
            row.state.push_back(state);
            row.flux.push_back(std::abs(flux[0]) + std::abs(flux[1]));
        }
        row.decreasing = row.state.back() < row.state.front() && row.flux.back() < row.flux.front();
        rows.push_back(std::move(row));
    }
    return rows;
}

SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& err) {
    SlopeFit fit;
    if (eps.size() != err.size()) throw Error("slope fit size mismatch");
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(err[k] > 1e-13) || !(eps[k] > 0.0)) return fit;
        x.push_back(std::log(eps[k]));
        y.push_back(std::log(err[k]));
    }
    if (x.size() < 2) return fit;
    const auto lsq = [](const std::vector<double>& xs, const std::vector<double>& ys, double& a, double& b) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        a = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        b = (sy - a * sx) / n;
    };
    double a = 0.0;
    double b = 0.0;
    lsq(x, y, a, b);
    if (x.size() >= 4) {
        // Leave-one-out: the largest eps against the fit of the others.
        const std::size_t big = static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
        std::vector<double> xr = x;
        std::vector<double> yr = y;
        xr.erase(xr.begin() + static_cast<std::ptrdiff_t>(big));
        yr.erase(yr.begin() + static_cast<std::ptrdiff_t>(big));
        double a2 = 0.0;
        double b2 = 0.0;
        lsq(xr, yr, a2, b2);
        double rms = 0.0;
        for (std::size_t k = 0; k < xr.size(); ++k) rms += std::pow(yr[k] - (a2 * xr[k] + b2), 2);
        rms = std::sqrt(rms / static_cast<double>(xr.size()));
        const double rbig = std::abs(y[big] - (a2 * x[big] + b2));
        if (rbig > 3.0 * rms && rbig > 1e-12) {
            x = std::move(xr);
            y = std::move(yr);
            a = a2;
            b = b2;
            fit.dropped_largest = true;
        }
    }
    double rms = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) rms += std::pow(y[k] - (a * x[k] + b), 2);
    fit.rms = std::sqrt(rms / static_cast<double>(x.size()));
    fit.slope = a;
    fit.intercept = b;
    fit.defined = true;
    return fit;
}

const HomogenizedData& CellCache::get(int resolution) {
    auto it = cache_.find(resolution);
    if (it != cache_.end()) return it->second;
    HomogenizedOptions opt;
    opt.cell = opt_;
    opt.flux_correctors = false;
    opt.inclusion_corrector = false;
    const IndicatorGrid chi = rasterize(geometry_, resolution);
    return cache_.emplace(resolution, compute_homogenized_data(chi, opt)).first->second;
}

SweepReport run_sweep(const SweepSpec& spec) {
    SweepReport rep;
    CellCache cache(spec.cell_geometry, spec.cell);
    std::vector<double> eps_list;
    std::vector<double> combined;
    std::vector<double> h1;
    std::vector<double> l2;
    std::vector<double> coupled;
    for (double eps : spec.eps) {
        SweepRow row;
        row.eps = eps;
        try {
            const EpsProblem p = build_eps_problem(spec.cell_geometry, spec.domain, eps, spec.f, spec.resolution);
            for (const auto& w : p.warnings) rep.warnings.push_back("eps=" + std::to_string(eps) + ": " + w);
            row.cell_resolution = p.cell_resolution;
            const HomogenizedData& hd = cache.get(p.cell_resolution);
            row.a_bar = hd.a_bar;
            row.mean_v = hd.mean_v;
            const EpsSolution ue = solve_eps_problem(p, spec.cg);
            const HomogenizedSolution ub = solve_homogenized(hd, p.f, spec.cg);
            row.iterations = ue.iterations + ub.iterations;
            std::optional<double> width;
            if (spec.mollifier_factor) width = *spec.mollifier_factor * eps;
            const TwoScaleFields ex = two_scale_expansion(ub.u, hd, p, width);
            row.errors = error_report(ue.u, ex, hd, p);
            if (spec.inside) {
                GridFunction rhs = p.f;
                for (std::size_t c = 0; c < rhs.size(); ++c) rhs.values[c] -= ub.u.values[c];
                const AuxiliarySolution aux = solve_auxiliary(p, rhs, spec.cg);
                row.inside = inside_error_diagnostics(ue.u, ub.u, aux.v, p);
            }
            if (spec.coupled) {
                const CoupledSolution cs = solve_coupled_two_scale(hd.a_bar, p, spec.cg);
                double s = 0.0;
                for (std::size_t c = 0; c < ue.u.size(); ++c) {
                    const double d = ue.u.values[c] - cs.u_bar.values[c] - cs.w.values[c];
                    s += d * d;
                }
                row.coupled_error = std::sqrt(s * p.grid().volume());
                row.iterations += cs.iterations;
            }
        } catch (const NonConvergenceError& e) {
            throw NonConvergenceError("eps=" + std::to_string(eps) + ": " + e.what(), e.residual_history());
        }
        eps_list.push_back(eps);
        combined.push_back(row.errors.combined());
        h1.push_back(row.errors.h1_outside);
        l2.push_back(row.errors.l2_inside);
        coupled.push_back(row.coupled_error);
        rep.rows.push_back(row);
    }
    rep.combined = fit_slope(eps_list, combined);
    rep.h1_outside = fit_slope(eps_list, h1);
    rep.l2_inside = fit_slope(eps_list, l2);
    if (spec.coupled) rep.coupled = fit_slope(eps_list, coupled);
    return rep;
}

}  // namespace dplab
