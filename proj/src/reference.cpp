#include "dplab/reference.hpp"

#include <algorithm>
#include <cmath>

#include "dplab/errors.hpp"

namespace dplab {

namespace {

constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

/// Neighbour index or -1 beyond a box face.
long neighbour(const Grid& g, int i, int j, int d) {
    int a = i + kDi[d];
    int b = j + kDj[d];
    if (g.periodic) {
        a = (a + g.n) % g.n;
        b = (b + g.n) % g.n;
    } else if (a < 0 || a >= g.n || b < 0 || b >= g.n) {
        return -1;
    }
    return static_cast<long>(b) * g.n + a;
}

void require_2d(const Grid& g) {
    if (g.dim != 2) throw Error("reference matrices are 2-D only");
    if (g.cells() > 4096) throw Error("reference grid too large");
}

}  // namespace

DenseMatrix reference_operator(const CoeffField& coeff, BoundaryKind bc, const std::vector<std::uint8_t>& active) {
    const Grid& g = coeff.grid;
    require_2d(g);
    std::vector<long> dof(g.cells(), -1);
    long count = 0;
    for (std::size_t c = 0; c < g.cells(); ++c) {
        if (active.empty() || active[c]) dof[c] = count++;
    }
    DenseMatrix A;
    A.n = static_cast<std::size_t>(count);
    A.a.assign(A.n * A.n, 0.0);
    const double h2 = g.h() * g.h();
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            const long c = static_cast<long>(j) * g.n + i;
            const long r = dof[static_cast<std::size_t>(c)];
            if (r < 0) continue;
            const auto R = static_cast<std::size_t>(r);
            const double ac = coeff.a[static_cast<std::size_t>(c)];
            A(R, R) += coeff.mass[static_cast<std::size_t>(c)] * h2;
            for (int d = 0; d < 4; ++d) {
                const long nb = neighbour(g, i, j, d);
                if (nb < 0) {
                    A(R, R) += 2.0 * ac;
                    continue;
                }
                const long s = dof[static_cast<std::size_t>(nb)];
                if (s < 0) {
                    if (bc == BoundaryKind::MaskedDirichlet) A(R, R) += 2.0 * ac;
                    continue;
                }
                const double an = coeff.a[static_cast<std::size_t>(nb)];
                const double t = (ac > 0.0 && an > 0.0) ? 2.0 * ac * an / (ac + an) : 0.0;
                A(R, R) += t;
                A(R, static_cast<std::size_t>(s)) -= t;
            }
        }
    }
    return A;
}

DenseMatrix reference_homogenized(const Grid& g, const Matrix2& a_bar, double mass) {
    require_2d(g);
    const std::size_t N = g.cells();
    DenseMatrix A;
    A.n = N;
    A.a.assign(N * N, 0.0);
    const double h = g.h();
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            const auto r = static_cast<std::size_t>(j) * g.n + i;
            A(r, r) += mass * h * h;
            for (int d = 0; d < 4; ++d) {
                const double t = d < 2 ? a_bar[0][0] : a_bar[1][1];
                const long nb = neighbour(g, i, j, d);
                if (nb < 0) {
                    A(r, r) += 2.0 * t;
                } else {
                    A(r, r) += t;
                    A(r, static_cast<std::size_t>(nb)) -= t;
                }
            }
        }
    }
    if (a_bar[0][1] == 0.0) return A;
    // Difference operators as dense rows: (D u)_c = (u_+ - u_-) / 2h, ghost = -u_c.
    const auto diff_row = [&](int i, int j, int axis) {
        std::vector<std::pair<std::size_t, double>> row;
        const double w = 0.5 / h;
        const int dp = axis == 0 ? 0 : 2;
        const int dm = axis == 0 ? 1 : 3;
        const auto self = static_cast<std::size_t>(j) * g.n + i;
        const long p = neighbour(g, i, j, dp);
        const long m = neighbour(g, i, j, dm);
        row.push_back({p < 0 ? self : static_cast<std::size_t>(p), p < 0 ? -w : w});
        row.push_back({m < 0 ? self : static_cast<std::size_t>(m), m < 0 ? w : -w});
        return row;
    };
    const double c = a_bar[0][1] * h * h;
    for (int j = 0; j < g.n; ++j) {
        for (int i = 0; i < g.n; ++i) {
            const auto dx = diff_row(i, j, 0);
            const auto dy = diff_row(i, j, 1);
            for (const auto& [a, va] : dx) {
                for (const auto& [b, vb] : dy) {
                    A(a, b) += c * va * vb;
                    A(b, a) += c * va * vb;
                }
            }
        }
    }
    return A;
}

DenseMatrix reference_coupled(const Grid& g, const Matrix2& a_bar, double eps, const std::vector<std::uint8_t>& chi) {
    const DenseMatrix H = reference_homogenized(g, a_bar, 1.0);
    CoeffField kc;
    kc.grid = g;
    kc.a.assign(g.cells(), eps * eps);
    kc.mass.assign(g.cells(), 1.0);
    const DenseMatrix K = reference_operator(kc, BoundaryKind::MaskedDirichlet, chi);
    const std::size_t N = g.cells();
    DenseMatrix A;
    A.n = N + K.n;
    A.a.assign(A.n * A.n, 0.0);
    for (std::size_t r = 0; r < N; ++r) {
        for (std::size_t c = 0; c < N; ++c) A(r, c) = H(r, c);
    }
    for (std::size_t r = 0; r < K.n; ++r) {
        for (std::size_t c = 0; c < K.n; ++c) A(N + r, N + c) = K(r, c);
    }
    const double vol = g.h() * g.h();
    std::size_t k = 0;
    for (std::size_t c = 0; c < N; ++c) {
        if (!chi[c]) continue;
        A(c, N + k) = vol;
        A(N + k, c) = vol;
        ++k;
    }
    return A;
}

DenseMatrix bordered(const DenseMatrix& A) {
    DenseMatrix B;
    B.n = A.n + 1;
    B.a.assign(B.n * B.n, 0.0);
    for (std::size_t r = 0; r < A.n; ++r) {
        for (std::size_t c = 0; c < A.n; ++c) B(r, c) = A(r, c);
        B(r, A.n) = 1.0;
        B(A.n, r) = 1.0;
    }
    return B;
}

double relative_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return INFINITY;
    double d = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(a[k] - b[k]));
        s = std::max(s, std::abs(b[k]));
    }
    return s > 0.0 ? d / s : d;
}

}  // namespace dplab
