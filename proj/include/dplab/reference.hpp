#pragma once

#include <cstdint>
#include <vector>

#include "dplab/cell.hpp"
#include "dplab/linalg.hpp"
#include "dplab/mesh.hpp"

namespace dplab {

/// Dense matrices built cell by cell from the four neighbours, without the
/// face loop or the sparse assemblers. Small 2-D grids only.

/// m u - div(a grad u) scaled by h^2 over the active cells (all when empty).
DenseMatrix reference_operator(const CoeffField& coeff, BoundaryKind bc, const std::vector<std::uint8_t>& active = {});

/// mass u - div(a_bar grad u) scaled by h^2, cross term through centered
/// differences with odd reflection at box faces.
DenseMatrix reference_homogenized(const Grid& g, const Matrix2& a_bar, double mass);

/// Block matrix [H, vol P; vol P^T, K] of the coupled system, H with unit mass
/// and K the masked operator with coefficient eps^2 on `chi`.
DenseMatrix reference_coupled(const Grid& g, const Matrix2& a_bar, double eps, const std::vector<std::uint8_t>& chi);

/// Append a row and column of ones (Lagrange multiplier for mean zero).
DenseMatrix bordered(const DenseMatrix& A);

/// max |a - b| / max |b|.
double relative_difference(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace dplab
