#include "dplab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "dplab/errors.hpp"

namespace dplab {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

void remove_mean(std::vector<double>& v) {
    if (v.empty()) return;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

CgResult run_cg(const SparseOperator& A, std::span<const double> b, const CgOptions& opt, std::span<const double> x0,
                bool project) {
    const std::size_t n = A.rows();
    if (b.size() != n) throw Error("right-hand side size mismatch");
    CgResult res;
    res.x.assign(n, 0.0);
    if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());
    const double bnorm = norm2(b);
    if (n == 0 || bnorm == 0.0) {
        std::fill(res.x.begin(), res.x.end(), 0.0);
        return res;
    }
    std::vector<double> dinv = A.diagonal();
    for (double& d : dinv) d = d > 0.0 ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), q(n);
    A.apply(res.x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    if (project) remove_mean(r);
    for (std::size_t k = 0; k < n; ++k) z[k] = dinv[k] * r[k];
    p = z;
    double rz = dot(r, z);
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : static_cast<int>(std::min<std::size_t>(20 * n + 1000, 2000000));
    double rel = norm2(r) / bnorm;
    if (opt.keep_history) res.history.push_back(rel);
    int it = 0;
    while (rel > opt.tol) {
        if (it >= max_iter) {
            throw NonConvergenceError("CG did not reach tolerance " + std::to_string(opt.tol) + " in " +
                                          std::to_string(max_iter) + " iterations (residual " + std::to_string(rel) + ")",
                                      res.history);
        }
        A.apply(p, q);
        const double pq = dot(p, q);
        if (!(pq > 0.0)) {
            throw NonConvergenceError("CG breakdown: operator not positive definite on the search space", res.history);
        }
        const double alpha = rz / pq;
        for (std::size_t k = 0; k < n; ++k) {
            res.x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        if (project) remove_mean(r);
        for (std::size_t k = 0; k < n; ++k) z[k] = dinv[k] * r[k];
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        ++it;
        rel = norm2(r) / bnorm;
        if (opt.keep_history) res.history.push_back(rel);
    }
    // Recompute the true residual; the recurrence can drift.
    A.apply(res.x, q);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - q[k];
    if (project) remove_mean(r);
    res.relative_residual = norm2(r) / bnorm;
    res.iterations = it;
    return res;
}

}  // namespace

CgResult cg_solve(const SparseOperator& A, std::span<const double> b, const CgOptions& opt, std::span<const double> x0) {
    CgResult res = run_cg(A, b, opt, x0, false);
    // Polish once when the recursive residual converged but the true one lags.
    if (res.relative_residual > 10.0 * opt.tol) {
        const std::vector<double> start = res.x;
        const auto prev = res.iterations;
        res = run_cg(A, b, opt, start, false);
        res.iterations += prev;
    }
    return res;
}

MeanZeroResult mean_zero_solve(const SparseOperator& A, std::span<const double> b, const CgOptions& opt) {
    const std::size_t n = A.rows();
    MeanZeroResult out;
    std::vector<double> rhs(b.begin(), b.end());
    double mean = 0.0;
    for (double v : rhs) mean += v;
    mean = n ? mean / static_cast<double>(n) : 0.0;
    out.rhs_mean = mean;
    for (double& v : rhs) v -= mean;
    const double bn = norm2(b);
    out.compatibility_warning = std::abs(mean) * std::sqrt(static_cast<double>(n)) > 1e-8 * bn;
    CgResult res = run_cg(A, rhs, opt, {}, true);
    if (res.relative_residual > 10.0 * opt.tol) {
        const std::vector<double> start = res.x;
        const auto prev = res.iterations;
        res = run_cg(A, rhs, opt, start, true);
        res.iterations += prev;
    }
    remove_mean(res.x);
    // A second pass removes the rounding left by the first subtraction.
    remove_mean(res.x);
    out.x = std::move(res.x);
    out.iterations = res.iterations;
    out.relative_residual = res.relative_residual;
    out.history = std::move(res.history);
    return out;
}

DenseMatrix to_dense(const SparseOperator& A) {
    DenseMatrix D;
    D.n = A.rows();
    D.a.assign(D.n * D.n, 0.0);
    for (std::size_t r = 0; r < D.n; ++r) {
        for (std::size_t k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k) D(r, static_cast<std::size_t>(A.col[k])) += A.val[k];
    }
    return D;
}

std::vector<double> dense_solve(DenseMatrix A, std::vector<double> b) {
    const std::size_t n = A.n;
    if (b.size() != n) throw Error("dense system size mismatch");
    if (n > 4096) throw Error("dense_solve is limited to 4096 unknowns");
    double scale = 0.0;
    for (double v : A.a) scale = std::max(scale, std::abs(v));
    const double tiny = scale * static_cast<double>(n) * 1e-15;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(A(r, k)) > std::abs(A(piv, k))) piv = r;
        }
        if (!(std::abs(A(piv, k)) > tiny)) throw SingularMatrixError("matrix is singular to working precision");
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A(k, c), A(piv, c));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / A(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A(r, k) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) A(r, c) -= f * A(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t c = k + 1; c < n; ++c) s -= A(k, c) * x[c];
        x[k] = s / A(k, k);
    }
    return x;
}

}  // namespace dplab
