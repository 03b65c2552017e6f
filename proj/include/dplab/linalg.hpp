#pragma once

#include <span>
#include <string>
#include <vector>

#include "dplab/mesh.hpp"

namespace dplab {

struct CgOptions {
    double tol = 1e-10;  ///< relative residual ||b - Ax|| / ||b||
    int max_iter = 0;    ///< 0 selects 20 * rows + 1000
    bool keep_history = true;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    std::vector<double> history;  ///< relative residual per iteration
};

/// Jacobi-preconditioned conjugate gradient. Throws NonConvergenceError.
CgResult cg_solve(const SparseOperator& A, std::span<const double> b, const CgOptions& opt = {},
                  std::span<const double> x0 = {});

struct MeanZeroResult {
    std::vector<double> x;
    int iterations = 0;
    double relative_residual = 0.0;
    double rhs_mean = 0.0;     ///< mean removed from the right-hand side
    bool compatibility_warning = false;
    std::vector<double> history;
};

/// Solve a singular system whose kernel is the constant vector. The
/// right-hand side is projected to mean zero and the returned solution has
/// mean zero (uniform weights over the unknowns).
MeanZeroResult mean_zero_solve(const SparseOperator& A, std::span<const double> b, const CgOptions& opt = {});

/// Row-major dense matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> a;
    double& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

DenseMatrix to_dense(const SparseOperator& A);

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError.
std::vector<double> dense_solve(DenseMatrix A, std::vector<double> b);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace dplab
