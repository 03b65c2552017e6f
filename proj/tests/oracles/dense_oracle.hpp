#pragma once

// Test-side oracles, written without the library's assemblers or solvers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

struct Dense {
    std::size_t n = 0;
    std::vector<double> a;
    explicit Dense(std::size_t size = 0) : n(size), a(size * size, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return a[r * n + c]; }
    double operator()(std::size_t r, std::size_t c) const { return a[r * n + c]; }
};

/// Gauss-Jordan with full pivoting.
inline std::vector<double> solve(Dense A, std::vector<double> b) {
    const std::size_t n = A.n;
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k, pc = k;
        double best = 0.0;
        for (std::size_t r = k; r < n; ++r) {
            for (std::size_t c = k; c < n; ++c) {
                if (std::abs(A(r, c)) > best) {
                    best = std::abs(A(r, c));
                    pr = r;
                    pc = c;
                }
            }
        }
        if (best == 0.0) throw std::runtime_error("oracle: singular");
        for (std::size_t c = 0; c < n; ++c) std::swap(A(k, c), A(pr, c));
        std::swap(b[k], b[pr]);
        for (std::size_t r = 0; r < n; ++r) std::swap(A(r, k), A(r, pc));
        std::swap(perm[k], perm[pc]);
        const double p = A(k, k);
        for (std::size_t c = 0; c < n; ++c) A(k, c) /= p;
        b[k] /= p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == k || A(r, k) == 0.0) continue;
            const double f = A(r, k);
            for (std::size_t c = 0; c < n; ++c) A(r, c) -= f * A(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[perm[k]] = b[k];
    return x;
}

/// 5-point finite-volume matrix of m u - div(a grad u) times h^2 on an n x n
/// grid. Face coefficient 2ab/(a+b); box faces use the half-cell ghost 2a.
inline Dense fv_matrix(int n, bool periodic, const std::vector<double>& a, const std::vector<double>& m, double h) {
    Dense A(static_cast<std::size_t>(n) * n);
    const auto id = [n](int i, int j) { return static_cast<std::size_t>(j) * n + i; };
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const std::size_t c = id(i, j);
            A(c, c) += m[c] * h * h;
            const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
            for (const auto& q : nb) {
                int x = q[0], y = q[1];
                if (x < 0 || x >= n || y < 0 || y >= n) {
                    if (!periodic) {
                        A(c, c) += 2.0 * a[c];
                        continue;
                    }
                    x = (x + n) % n;
                    y = (y + n) % n;
                }
                const std::size_t d = id(x, y);
                const double t = 2.0 * a[c] * a[d] / (a[c] + a[d]);
                A(c, c) += t;
                A(c, d) -= t;
            }
        }
    }
    return A;
}

/// Exact mean of the 1-D resonant solution on a period L with the
/// inclusion (c - r, c + r): v = 1 - cosh(x - c)/cosh(r).
inline double resonant_mean_1d(double r, double L) { return (2.0 * r - 2.0 * std::tanh(r)) / L; }

/// Disc average of v = 1 - I0(|x|)/I0(R) on the disc of radius R.
inline double resonant_disc_average(double R) {
    return 1.0 - 2.0 * std::cyl_bessel_i(1.0, R) / (R * std::cyl_bessel_i(0.0, R));
}

/// Least-squares slope of log y on log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]);
        const double ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Small deterministic generator for property tests (xorshift64*).
class Gen {
public:
    explicit Gen(std::uint64_t seed) : s_(seed * 0x9E3779B97F4A7C15ULL + 1) {}
    std::uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1DULL;
    }
    double uniform(double lo = 0.0, double hi = 1.0) { return lo + (hi - lo) * static_cast<double>(next() >> 11) * 0x1.0p-53; }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::uint64_t s_;
};

}  // namespace oracle
