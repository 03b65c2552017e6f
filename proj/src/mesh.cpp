#include "dplab/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "dplab/errors.hpp"

namespace dplab {

double Grid::volume() const { return std::pow(h(), dim); }

std::size_t Grid::faces(int k) const {
    if (k >= dim) return 0;
    return static_cast<std::size_t>(faces_along()) * (dim == 2 ? static_cast<std::size_t>(n) : 1);
}

Grid grid_of(const IndicatorGrid& chi) { return Grid{chi.dim, chi.n, chi.period, chi.periodic}; }

GridFunction GridFunction::zeros(const Grid& grid, BoundaryKind bc) {
    GridFunction u;
    u.grid = grid;
    u.bc = bc;
    u.values.assign(grid.cells(), 0.0);
    return u;
}

FaceField FaceField::zeros(const Grid& grid) {
    FaceField f;
    f.grid = grid;
    for (int k = 0; k < grid.dim; ++k) f.comp[k].assign(grid.faces(k), 0.0);
    return f;
}

std::size_t FaceField::face_index(int k, int i, int j) const {
    if (k == 0) return static_cast<std::size_t>(j) * grid.faces_along() + i;
    return static_cast<std::size_t>(j) * grid.n + i;
}

double FaceField::weight(int k, int i, int j) const {
    const double w = grid.volume();
    if (grid.periodic) return w;
    const int along = (k == 0) ? i : j;
    return (along == 0 || along == grid.n) ? 0.5 * w : w;
}

double harmonic_mean(double a, double b) {
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return 2.0 * a * b / (a + b);
}

CoeffField uniform_coefficient(const Grid& grid, double a, double mass) {
    if (!(a >= 0.0) || !(mass >= 0.0)) throw Error("coefficients must be non-negative");
    return CoeffField{grid, std::vector<double>(grid.cells(), a), std::vector<double>(grid.cells(), mass)};
}

CoeffField coefficient_field(const IndicatorGrid& chi, double outside, double inside, double mass) {
    if (!(outside > 0.0)) throw Error("outside conductivity must be positive");
    if (!(inside >= 0.0)) throw Error("inside conductivity must be non-negative");
    if (!(mass >= 0.0)) throw Error("mass density must be non-negative");
    CoeffField c{grid_of(chi), std::vector<double>(chi.size()), std::vector<double>(chi.size(), mass)};
    for (std::size_t k = 0; k < chi.size(); ++k) c.a[k] = chi.cells[k] ? inside : outside;
    return c;
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t nr = rows();
    for (std::size_t r = 0; r < nr; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
        y[r] = s;
    }
}

std::vector<double> SparseOperator::diagonal() const {
    std::vector<double> d(rows(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            if (static_cast<std::size_t>(col[k]) == r) d[r] += val[k];
        }
    }
    return d;
}

double SparseOperator::max_asymmetry() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < rows(); ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const auto c = static_cast<std::size_t>(col[k]);
            const auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[c]);
            const auto end = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[c + 1]);
            const auto it = std::lower_bound(begin, end, static_cast<std::int32_t>(r));
            const double t = (it != end && *it == static_cast<std::int32_t>(r)) ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
            worst = std::max(worst, std::abs(val[k] - t));
        }
    }
    return worst;
}

std::vector<double> SparseOperator::gather(std::span<const double> cell_values) const {
    std::vector<double> x(rows());
    for (std::size_t r = 0; r < rows(); ++r) x[r] = cell_values[static_cast<std::size_t>(dof_to_cell[r])];
    return x;
}

std::vector<double> SparseOperator::scatter(std::span<const double> dof_values) const {
    std::vector<double> u(cell_to_dof.size(), 0.0);
    for (std::size_t r = 0; r < rows(); ++r) u[static_cast<std::size_t>(dof_to_cell[r])] = dof_values[r];
    return u;
}

SparseOperator TripletBuilder::build() {
    SparseOperator A;
    A.row_ptr.assign(rows_ + 1, 0);
    for (const Entry& e : entries_) ++A.row_ptr[static_cast<std::size_t>(e.r) + 1];
    for (std::size_t r = 0; r < rows_; ++r) A.row_ptr[r + 1] += A.row_ptr[r];
    std::vector<std::size_t> fill(A.row_ptr.begin(), A.row_ptr.end() - 1);
    std::vector<std::int32_t> col(entries_.size());
    std::vector<double> val(entries_.size());
    for (const Entry& e : entries_) {
        const std::size_t at = fill[static_cast<std::size_t>(e.r)]++;
        col[at] = e.c;
        val[at] = e.v;
    }
    entries_.clear();
    entries_.shrink_to_fit();

    // Sort each row by column and merge duplicates.
    std::vector<std::size_t> new_ptr(rows_ + 1, 0);
    std::vector<std::pair<std::int32_t, double>> row;
    std::size_t out = 0;
    for (std::size_t r = 0; r < rows_; ++r) {
        row.clear();
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) row.emplace_back(col[k], val[k]);
        std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        new_ptr[r] = out;
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (out > new_ptr[r] && col[out - 1] == row[k].first) {
                val[out - 1] += row[k].second;
            } else {
                col[out] = row[k].first;
                val[out] = row[k].second;
                ++out;
            }
        }
    }
    new_ptr[rows_] = out;
    col.resize(out);
    val.resize(out);
    A.row_ptr = std::move(new_ptr);
    A.col = std::move(col);
    A.val = std::move(val);
    return A;
}

FaceCoupling face_coupling(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active,
                           const FaceRef& f, double& transmissibility, std::int64_t& ghosted) {
    const Grid& g = coeff.grid;
    const double scale = std::pow(g.h(), g.dim - 2);
    const auto is_active = [&](std::int64_t c) { return active.empty() || active[static_cast<std::size_t>(c)] != 0; };
    transmissibility = 0.0;
    ghosted = -1;
    if (f.minus >= 0 && f.plus >= 0) {
        const bool am = is_active(f.minus);
        const bool ap = is_active(f.plus);
        if (am && ap) {
            transmissibility = harmonic_mean(coeff.a[static_cast<std::size_t>(f.minus)], coeff.a[static_cast<std::size_t>(f.plus)]) * scale;
            return FaceCoupling::Interior;
        }
        if (am == ap || bc != BoundaryKind::MaskedDirichlet) return FaceCoupling::None;
        ghosted = am ? f.minus : f.plus;
        transmissibility = 2.0 * coeff.a[static_cast<std::size_t>(ghosted)] * scale;
        return FaceCoupling::Ghost;
    }
    const std::int64_t c = f.minus >= 0 ? f.minus : f.plus;
    if (!is_active(c) || bc == BoundaryKind::Periodic) return FaceCoupling::None;
    ghosted = c;
    transmissibility = 2.0 * coeff.a[static_cast<std::size_t>(c)] * scale;
    return FaceCoupling::Ghost;
}

SparseOperator assemble_operator(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active) {
    const Grid& g = coeff.grid;
    if (coeff.a.size() != g.cells() || coeff.mass.size() != g.cells()) throw Error("coefficient size mismatch");
    if (!active.empty() && active.size() != g.cells()) throw Error("mask size mismatch");
    if (bc == BoundaryKind::MaskedDirichlet && active.empty()) throw Error("masked Dirichlet needs a mask");
    if (bc == BoundaryKind::Periodic && !g.periodic) throw Error("periodic boundary on a non-periodic grid");

    std::vector<std::int32_t> cell_to_dof(g.cells(), -1);
    std::vector<std::int32_t> dof_to_cell;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (active.empty() || active[c]) {
            cell_to_dof[c] = static_cast<std::int32_t>(dof_to_cell.size());
            dof_to_cell.push_back(static_cast<std::int32_t>(c));
        }
    }
    TripletBuilder tb(dof_to_cell.size());
    const double vol = g.volume();
    for (std::size_t r = 0; r < dof_to_cell.size(); ++r) {
        tb.add(static_cast<std::int32_t>(r), static_cast<std::int32_t>(r), coeff.mass[static_cast<std::size_t>(dof_to_cell[r])] * vol);
    }
    for_each_face(g, [&](const FaceRef& f) {
        double t = 0.0;
        std::int64_t gc = -1;
        switch (face_coupling(coeff, bc, active, f, t, gc)) {
            case FaceCoupling::Interior: {
                if (t == 0.0) break;
                const auto m = cell_to_dof[static_cast<std::size_t>(f.minus)];
                const auto p = cell_to_dof[static_cast<std::size_t>(f.plus)];
                tb.add(m, m, t);
                tb.add(p, p, t);
                tb.add(m, p, -t);
                tb.add(p, m, -t);
                break;
            }
            case FaceCoupling::Ghost: {
                const auto c = cell_to_dof[static_cast<std::size_t>(gc)];
                tb.add(c, c, t);
                break;
            }
            case FaceCoupling::None: break;
        }
    });
    SparseOperator A = tb.build();
    A.grid = g;
    A.symmetric = true;
    A.cell_to_dof = std::move(cell_to_dof);
    A.dof_to_cell = std::move(dof_to_cell);
    return A;
}

double dirichlet_energy(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active,
                        std::span<const double> u) {
    double e = 0.0;
    for_each_face(coeff.grid, [&](const FaceRef& f) {
        double t = 0.0;
        std::int64_t gc = -1;
        switch (face_coupling(coeff, bc, active, f, t, gc)) {
            case FaceCoupling::Interior: {
                const double d = u[static_cast<std::size_t>(f.plus)] - u[static_cast<std::size_t>(f.minus)];
                e += t * d * d;
                break;
            }
            case FaceCoupling::Ghost: {
                const double d = u[static_cast<std::size_t>(gc)];
                e += t * d * d;
                break;
            }
            case FaceCoupling::None: break;
        }
    });
    return e;
}

FaceField discrete_gradient(const GridFunction& u) {
    const Grid& g = u.grid;
    FaceField G = FaceField::zeros(g);
    const double h = g.h();
    for_each_face(g, [&](const FaceRef& f) {
        const double um = f.minus >= 0 ? u.values[static_cast<std::size_t>(f.minus)] : 0.0;
        const double up = f.plus >= 0 ? u.values[static_cast<std::size_t>(f.plus)] : 0.0;
        const double dist = (f.minus >= 0 && f.plus >= 0) ? h : 0.5 * h;
        G.comp[f.dir][f.face] = (up - um) / dist;
    });
    return G;
}

GridFunction discrete_divergence(const FaceField& G, BoundaryKind bc) {
    const Grid& g = G.grid;
    GridFunction d = GridFunction::zeros(g, bc);
    const double h = g.h();
    const int nf = g.faces_along();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.n; ++i) {
            const int ip = g.periodic ? (i + 1) % g.n : i + 1;
            double s = G.comp[0][static_cast<std::size_t>(j) * nf + ip] - G.comp[0][static_cast<std::size_t>(j) * nf + i];
            if (g.dim == 2) {
                const int jp = g.periodic ? (j + 1) % g.n : j + 1;
                s += G.comp[1][static_cast<std::size_t>(jp) * g.n + i] - G.comp[1][static_cast<std::size_t>(j) * g.n + i];
            }
            d.values[g.index(i, j)] = s / h;
        }
    }
    return d;
}

double cell_inner(const Grid& g, std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) s += u[c] * v[c];
    return s * g.volume();
}

double face_inner(const FaceField& a, const FaceField& b) {
    const Grid& g = a.grid;
    double s = 0.0;
    const int nf = g.faces_along();
    for (int k = 0; k < g.dim; ++k) {
        const int ni = (k == 0) ? nf : g.n;
        const int nj = (g.dim == 1) ? 1 : ((k == 0) ? g.n : nf);
        for (int j = 0; j < nj; ++j) {
            for (int i = 0; i < ni; ++i) {
                const std::size_t f = static_cast<std::size_t>(j) * ni + i;
                s += a.weight(k, i, j) * a.comp[k][f] * b.comp[k][f];
            }
        }
    }
    return s;
}

namespace {

bool in_mask(std::span<const std::uint8_t> mask, std::int64_t c) {
    return mask.empty() || mask[static_cast<std::size_t>(c)] != 0;
}

}  // namespace

NormResult norm(const GridFunction& u, std::span<const std::uint8_t> mask, NormKind kind, double p) {
    if (p < 1.0) throw Error("norm exponent must be at least 1");
    NormResult res;
    if (!mask.empty() && std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        res.empty_mask = true;
        return res;
    }
    const Grid& g = u.grid;
    const double vol = g.volume();
    double l2 = 0.0;
    double lp = 0.0;
    for (std::size_t c = 0; c < u.size(); ++c) {
        if (!in_mask(mask, static_cast<std::int64_t>(c))) continue;
        l2 += u.values[c] * u.values[c];
        lp += std::pow(std::abs(u.values[c]), p);
    }
    l2 *= vol;
    lp *= vol;
    double semi = 0.0;
    if (kind == NormKind::H1Seminorm || kind == NormKind::H1) {
        const double h = g.h();
        for_each_face(g, [&](const FaceRef& f) {
            if (f.minus >= 0 && f.plus >= 0) {
                if (!in_mask(mask, f.minus) || !in_mask(mask, f.plus)) return;
                const double d = (u.values[static_cast<std::size_t>(f.plus)] - u.values[static_cast<std::size_t>(f.minus)]) / h;
                semi += vol * d * d;
            } else if (mask.empty() && u.bc != BoundaryKind::Periodic) {
                const double v = u.values[static_cast<std::size_t>(f.minus >= 0 ? f.minus : f.plus)];
                const double d = v / (0.5 * h);
                semi += 0.5 * vol * d * d;
            }
        });
    }
    switch (kind) {
        case NormKind::L2: res.value = std::sqrt(l2); break;
        case NormKind::Lp: res.value = std::pow(lp, 1.0 / p); break;
        case NormKind::H1Seminorm: res.value = std::sqrt(semi); break;
        case NormKind::H1: res.value = std::sqrt(l2 + semi); break;
    }
    return res;
}

NormResult face_norm(const FaceField& G, std::span<const std::uint8_t> mask, double p) {
    if (p < 1.0) throw Error("norm exponent must be at least 1");
    NormResult res;
    if (!mask.empty() && std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        res.empty_mask = true;
        return res;
    }
    const Grid& g = G.grid;
    const int nf = g.faces_along();
    double s = 0.0;
    for_each_face(g, [&](const FaceRef& f) {
        if ((f.minus >= 0 && !in_mask(mask, f.minus)) || (f.plus >= 0 && !in_mask(mask, f.plus))) return;
        const int ni = (f.dir == 0) ? nf : g.n;
        const int i = static_cast<int>(f.face % static_cast<std::size_t>(ni));
        const int j = static_cast<int>(f.face / static_cast<std::size_t>(ni));
        s += G.weight(f.dir, i, j) * std::pow(std::abs(G.comp[f.dir][f.face]), p);
    });
    res.value = std::pow(s, 1.0 / p);
    return res;
}

std::vector<std::uint8_t> complement_mask(const IndicatorGrid& chi) {
    std::vector<std::uint8_t> m(chi.size());
    for (std::size_t c = 0; c < chi.size(); ++c) m[c] = chi.cells[c] ? 0 : 1;
    return m;
}

}  // namespace dplab
