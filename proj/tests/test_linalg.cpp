#include <doctest.h>

#include <cmath>

#include "dplab/errors.hpp"
#include "dplab/linalg.hpp"
#include "dplab/mesh.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

namespace {

CoeffField random_coeff(oracle::Gen& gen, const Grid& g, double contrast) {
    CoeffField c;
    c.grid = g;
    for (std::size_t k = 0; k < g.cells(); ++k) {
        c.a.push_back(std::exp(gen.uniform(-contrast, contrast)));
        c.mass.push_back(gen.uniform(0.1, 2.0));
    }
    return c;
}

}  // namespace

TEST_CASE("harmonic mean") {
    CHECK(harmonic_mean(1.0, 1.0) == 1.0);
    CHECK(harmonic_mean(1.0, 3.0) == doctest::Approx(1.5));
    CHECK(harmonic_mean(0.0, 3.0) == 0.0);
}

TEST_CASE("property: assembled operator matches the test oracle matrix") {
    oracle::Gen gen(5);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = gen.integer(3, 9);
        const bool periodic = trial % 2 == 0;
        const Grid g{2, n, gen.uniform(0.5, 2.0), periodic};
        const CoeffField c = random_coeff(gen, g, 2.0);
        const SparseOperator A = assemble_operator(c, periodic ? BoundaryKind::Periodic : BoundaryKind::DirichletZero);
        const DenseMatrix D = to_dense(A);
        const oracle::Dense O = oracle::fv_matrix(n, periodic, c.a, c.mass, g.h());
        REQUIRE(D.n == O.n);
        for (std::size_t k = 0; k < O.a.size(); ++k) CHECK(D.a[k] == doctest::Approx(O.a[k]).epsilon(1e-12).scale(1.0));
        CHECK(A.max_asymmetry() <= 1e-14);
    }
}

TEST_CASE("property: CG agrees with dense elimination") {
    oracle::Gen gen(8);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = gen.integer(4, 12);
        const Grid g{2, n, 1.0, trial % 3 != 0};
        const CoeffField c = random_coeff(gen, g, 3.0);
        const SparseOperator A = assemble_operator(c, g.periodic ? BoundaryKind::Periodic : BoundaryKind::DirichletZero);
        std::vector<double> b(g.cells());
        for (auto& x : b) x = gen.uniform(-1.0, 1.0);
        const CgResult r = cg_solve(A, b, CgOptions{1e-13, 0, true});
        const auto ref = oracle::solve(oracle::fv_matrix(n, g.periodic, c.a, c.mass, g.h()), b);
        for (std::size_t k = 0; k < ref.size(); ++k) CHECK(r.x[k] == doctest::Approx(ref[k]).epsilon(1e-9).scale(1.0));
        CHECK_FALSE(r.history.empty());
        CHECK(dense_solve(to_dense(A), b)[0] == doctest::Approx(ref[0]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("mean-zero solve removes the constant kernel") {
    oracle::Gen gen(3);
    const Grid g{2, 8, 1.0, true};
    CoeffField c = random_coeff(gen, g, 1.0);
    std::fill(c.mass.begin(), c.mass.end(), 0.0);
    const SparseOperator A = assemble_operator(c, BoundaryKind::Periodic);
    std::vector<double> b(g.cells());
    for (auto& x : b) x = gen.uniform(0.0, 1.0);
    const MeanZeroResult r = mean_zero_solve(A, b, CgOptions{1e-13, 0, false});
    double s = 0.0;
    for (double x : r.x) s += x;
    CHECK(std::abs(s) < 1e-10);
    CHECK(r.rhs_mean > 0.0);
    std::vector<double> Ax(b.size());
    A.apply(r.x, Ax);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(Ax[k] == doctest::Approx(b[k] - r.rhs_mean).epsilon(1e-8).scale(1.0));
}

TEST_CASE("singular dense system is reported") {
    DenseMatrix A;
    A.n = 2;
    A.a = {1.0, 2.0, 2.0, 4.0};
    CHECK_THROWS_AS(dense_solve(A, {1.0, 2.0}), SingularMatrixError);
}

TEST_CASE("CG reports non-convergence") {
    const Grid g{2, 16, 1.0, false};
    const CoeffField c = uniform_coefficient(g, 1.0, 0.0);
    const SparseOperator A = assemble_operator(c, BoundaryKind::DirichletZero);
    std::vector<double> b(g.cells(), 1.0);
    CHECK_THROWS_AS(cg_solve(A, b, CgOptions{1e-14, 2, true}), NonConvergenceError);
}

TEST_CASE("property: divergence is minus the adjoint of the gradient") {
    oracle::Gen gen(21);
    for (int trial = 0; trial < 6; ++trial) {
        const Grid g{2, gen.integer(3, 10), 1.0, true};
        GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
        for (auto& x : u.values) x = gen.uniform(-1.0, 1.0);
        FaceField q = FaceField::zeros(g);
        for (auto& comp : q.comp) {
            for (auto& x : comp) x = gen.uniform(-1.0, 1.0);
        }
        const double lhs = face_inner(discrete_gradient(u), q);
        const double rhs = -cell_inner(g, u.values, discrete_divergence(q).values);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("masked operator ghosts the mask boundary") {
    const Grid g{2, 4, 1.0, true};
    const CoeffField c = uniform_coefficient(g, 1.0, 0.0);
    std::vector<std::uint8_t> mask(16, 0);
    mask[5] = 1;
    const SparseOperator A = assemble_operator(c, BoundaryKind::MaskedDirichlet, mask);
    REQUIRE(A.rows() == 1);
    CHECK(to_dense(A).a[0] == doctest::Approx(8.0));
    CHECK(A.cell_to_dof[5] == 0);
    CHECK(A.scatter(std::vector<double>{2.0})[5] == 2.0);
}

TEST_CASE("norms") {
    const Grid g{2, 4, 2.0, true};
    GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
    std::fill(u.values.begin(), u.values.end(), 3.0);
    CHECK(norm(u, {}, NormKind::L2).value == doctest::Approx(6.0));
    CHECK(norm(u, {}, NormKind::H1Seminorm).value == doctest::Approx(0.0));
    std::vector<std::uint8_t> none(16, 0);
    CHECK(norm(u, none, NormKind::L2).empty_mask);
}
