#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dplab/geometry.hpp"

namespace dplab {

/// Uniform structured grid: n cells per axis on [0, extent)^dim.
struct Grid {
    int dim = 2;
    int n = 0;
    double extent = 1.0;
    bool periodic = true;

    double h() const { return extent / n; }
    int ny() const { return dim == 2 ? n : 1; }
    std::size_t cells() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(ny()); }
    std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * n + i; }
    /// h^dim
    double volume() const;
    /// Number of k-faces along the k axis: n when periodic, n + 1 for a box.
    int faces_along() const { return periodic ? n : n + 1; }
    std::size_t faces(int k) const;
    Vec2 center(int i, int j = 0) const { return {(i + 0.5) * h(), dim == 2 ? (j + 0.5) * h() : 0.0}; }

    bool operator==(const Grid&) const = default;
};

Grid grid_of(const IndicatorGrid& chi);

enum class BoundaryKind { Periodic, DirichletZero, MaskedDirichlet };
enum class Staggering { Cell, Node, FaceX, FaceY };

/// Scalar field on a Grid. MaskedDirichlet fields are stored densely and are
/// zero off the mask.
struct GridFunction {
    Grid grid;
    BoundaryKind bc = BoundaryKind::Periodic;
    Staggering staggering = Staggering::Cell;
    std::vector<std::uint8_t> mask;
    std::vector<double> values;

    static GridFunction zeros(const Grid& grid, BoundaryKind bc);
    double& operator[](std::size_t c) { return values[c]; }
    double operator[](std::size_t c) const { return values[c]; }
    double& at(int i, int j = 0) { return values[grid.index(i, j)]; }
    double at(int i, int j = 0) const { return values[grid.index(i, j)]; }
    std::size_t size() const { return values.size(); }
};

/// Vector field on faces: comp[k] lives on the faces normal to axis k.
/// x-face (i, j) separates cells (i-1, j) and (i, j); y-face likewise in j.
struct FaceField {
    Grid grid;
    std::array<std::vector<double>, 2> comp;

    static FaceField zeros(const Grid& grid);
    std::size_t face_index(int k, int i, int j) const;
    /// Quadrature weight: h^dim on interior faces, h^dim / 2 on box boundary faces.
    double weight(int k, int i, int j) const;
};

/// One face of the grid with its two adjacent cells; -1 stands for the ghost
/// beyond a box boundary.
struct FaceRef {
    int dir;
    std::size_t face;
    std::int64_t minus;
    std::int64_t plus;
};

template <class Fn>
void for_each_face(const Grid& g, Fn&& fn) {
    const int nf = g.faces_along();
    const int ny = g.ny();
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nf; ++i) {
            std::int64_t m = -1;
            std::int64_t p = -1;
            if (g.periodic) {
                m = static_cast<std::int64_t>(g.index((i + g.n - 1) % g.n, j));
                p = static_cast<std::int64_t>(g.index(i, j));
            } else {
                if (i > 0) m = static_cast<std::int64_t>(g.index(i - 1, j));
                if (i < g.n) p = static_cast<std::int64_t>(g.index(i, j));
            }
            fn(FaceRef{0, static_cast<std::size_t>(j) * nf + i, m, p});
        }
    }
    if (g.dim < 2) return;
    for (int j = 0; j < nf; ++j) {
        for (int i = 0; i < g.n; ++i) {
            std::int64_t m = -1;
            std::int64_t p = -1;
            if (g.periodic) {
                m = static_cast<std::int64_t>(g.index(i, (j + g.n - 1) % g.n));
                p = static_cast<std::int64_t>(g.index(i, j));
            } else {
                if (j > 0) m = static_cast<std::int64_t>(g.index(i, j - 1));
                if (j < g.n) p = static_cast<std::int64_t>(g.index(i, j));
            }
            fn(FaceRef{1, static_cast<std::size_t>(j) * g.n + i, m, p});
        }
    }
}

/// Per-cell conductivity and mass density.
struct CoeffField {
    Grid grid;
    std::vector<double> a;
    std::vector<double> mass;
};

/// a = outside on complement cells and inside on F cells; uniform mass density.
CoeffField coefficient_field(const IndicatorGrid& chi, double outside, double inside, double mass);
CoeffField uniform_coefficient(const Grid& grid, double a, double mass);

/// 2 a b / (a + b), zero when either side vanishes.
double harmonic_mean(double a, double b);

/// Compressed sparse row matrix over a set of active cells.
struct SparseOperator {
    Grid grid;
    std::vector<std::size_t> row_ptr;
    std::vector<std::int32_t> col;
    std::vector<double> val;
    bool symmetric = false;
    std::vector<std::int32_t> dof_to_cell;
    std::vector<std::int32_t> cell_to_dof;  ///< -1 for inactive cells

    std::size_t rows() const { return row_ptr.empty() ? 0 : row_ptr.size() - 1; }
    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> diagonal() const;
    /// max |A_ij - A_ji| over stored entries (absent entries count as 0).
    double max_asymmetry() const;

    std::vector<double> gather(std::span<const double> cell_values) const;
    /// Scatter DOF values into a dense cell array, zero on inactive cells.
    std::vector<double> scatter(std::span<const double> dof_values) const;
};

/// Accumulates (row, col, value) triplets; duplicates are summed on build.
class TripletBuilder {
public:
    explicit TripletBuilder(std::size_t rows) : rows_(rows) {}
    void add(std::int32_t r, std::int32_t c, double v) { entries_.push_back({r, c, v}); }
    SparseOperator build();

private:
    struct Entry {
        std::int32_t r;
        std::int32_t c;
        double v;
    };
    std::size_t rows_;
    std::vector<Entry> entries_;
};

/// Cell-centered finite-volume matrix of u -> m u - div(a grad u), scaled by h^dim.
/// With a non-empty `active` mask only masked cells are unknowns; faces to
/// inactive cells carry a half-cell Dirichlet ghost for MaskedDirichlet and
/// are dropped (no-flux) otherwise. Box faces always carry the Dirichlet ghost.
SparseOperator assemble_operator(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active = {});

/// Face transmissibility used by assemble_operator for the face `f`, and
/// whether the face couples two unknowns, ghosts one, or is dropped.
enum class FaceCoupling { Interior, Ghost, None };
FaceCoupling face_coupling(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active,
                           const FaceRef& f, double& transmissibility, std::int64_t& ghosted);

/// Sum over faces of T_f (jump of u)^2, with the same face rules as assemble_operator.
double dirichlet_energy(const CoeffField& coeff, BoundaryKind bc, std::span<const std::uint8_t> active,
                        std::span<const double> cell_values);

FaceField discrete_gradient(const GridFunction& u);
GridFunction discrete_divergence(const FaceField& g, BoundaryKind bc = BoundaryKind::Periodic);

/// h^dim sum u v over cells.
double cell_inner(const Grid& g, std::span<const double> u, std::span<const double> v);
/// sum weight * G H over faces.
double face_inner(const FaceField& a, const FaceField& b);

enum class NormKind { L2, H1Seminorm, H1, Lp };

struct NormResult {
    double value = 0.0;
    bool empty_mask = false;
    operator double() const { return value; }
};

/// Cell quadrature norms. A mask restricts cells (L2, Lp) and interior faces
/// whose two cells both lie in the mask (H1 seminorm).
NormResult norm(const GridFunction& u, std::span<const std::uint8_t> mask, NormKind kind, double p = 2.0);
/// L^p norm of a face field over the faces whose adjacent cells lie in the mask.
NormResult face_norm(const FaceField& g, std::span<const std::uint8_t> mask, double p = 2.0);

/// 1 - chi, as a cell mask.
std::vector<std::uint8_t> complement_mask(const IndicatorGrid& chi);

}  // namespace dplab
