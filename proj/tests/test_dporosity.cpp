#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dplab/dporosity.hpp"
#include "dplab/errors.hpp"
#include "dplab/geometry.hpp"
#include "dplab/reference.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

namespace {

ScalarFunction smooth() {
    return [](double x, double y) { return 1.0 + x + y * y; };
}

InclusionSet offcenter() {
    InclusionSet s = sample_periodic_lattice(0.25, 1.0);
    std::get<Disc>(s.inclusions.front().shape).center = {0.35, 0.4};
    return s;
}

}  // namespace

TEST_CASE("eps problem tiles the cell") {
    const EpsProblem p = build_eps_problem(sample_periodic_lattice(0.25, 1.0), Domain{}, 0.25, smooth(), 128);
    CHECK(p.copies == 4);
    CHECK(p.cell_resolution == 32);
    CHECK(p.instance_count == 16);
    CHECK(p.chi_eps.volume_fraction() == doctest::Approx(p.cell_chi.volume_fraction()));
}

TEST_CASE("incommensurate eps and resolutions are configuration errors") {
    const InclusionSet g = sample_periodic_lattice(0.25, 1.0);
    CHECK_THROWS_AS(build_eps_problem(g, Domain{}, 0.3, smooth(), 120), ConfigError);
    CHECK_THROWS_AS(build_eps_problem(g, Domain{}, 0.25, smooth(), 130), ConfigError);
    CHECK_THROWS_AS(build_eps_problem(g, Domain{}, 1.0 / 64, smooth(), 128), ConfigError);
}

TEST_CASE("empty geometry: eps problem equals the homogenized problem") {
    InclusionSet empty;
    const EpsProblem p = build_eps_problem(empty, Domain{}, 0.25, smooth(), 64);
    CellCache cache(empty);
    const HomogenizedData& hd = cache.get(p.cell_resolution);
    const EpsSolution ue = solve_eps_problem(p, CgOptions{1e-12, 0, false});
    const HomogenizedSolution ub = solve_homogenized(hd, p.f, CgOptions{1e-12, 0, false});
    for (std::size_t c = 0; c < ue.u.size(); ++c) CHECK(ue.u[c] == doctest::Approx(ub.u[c]).epsilon(1e-10));
}

TEST_CASE("property: eps solutions satisfy the a priori bound and positivity") {
    oracle::Gen gen(17);
    for (int trial = 0; trial < 5; ++trial) {
        InclusionSet g = sample_periodic_lattice(gen.uniform(0.15, 0.35), 1.0);
        Domain d;
        d.periodic = trial % 2 == 1;
        const double a = gen.uniform(0.1, 2.0);
        const EpsProblem p = build_eps_problem(g, d, 0.25, [a](double x, double y) { return a * (1.0 + std::sin(7 * x * y)); }, 64);
        const EpsSolution s = solve_eps_problem(p);
        CHECK(s.l2_u <= s.l2_f * (1.0 + 1e-8));
        CHECK(s.energy_defect <= 1e-8);
        for (double u : s.u.values) CHECK(u >= -1e-12);
    }
}

TEST_CASE("homogenized assembly with cross term matches the dense reference") {
    oracle::Gen gen(2);
    for (bool periodic : {false, true}) {
        const Grid g{2, 6, 1.0, periodic};
        const Matrix2 a{{{1.0, 0.3}, {0.3, 0.7}}};
        const DenseMatrix S = to_dense(assemble_homogenized(g, a, 0.6));
        const DenseMatrix R = reference_homogenized(g, a, 0.6);
        REQUIRE(S.n == R.n);
        for (std::size_t k = 0; k < R.a.size(); ++k) CHECK(S.a[k] == doctest::Approx(R.a[k]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("homogenized solver rejects mean_v outside [0, 1)") {
    const Grid g{2, 8, 1.0, false};
    const GridFunction f = GridFunction::zeros(g, BoundaryKind::DirichletZero);
    const Matrix2 id{{{1.0, 0.0}, {0.0, 1.0}}};
    CHECK_THROWS(solve_homogenized(id, 1.0, f));
    CHECK_THROWS(solve_homogenized(id, -0.1, f));
}

TEST_CASE("coupled system is symmetric and bounded") {
    Domain d;
    d.periodic = true;
    const EpsProblem p = build_eps_problem(sample_periodic_lattice(0.25, 1.0), d, 0.25, smooth(), 64);
    const Matrix2 a{{{0.7, 0.0}, {0.0, 0.7}}};
    CHECK(assemble_coupled(a, p).max_asymmetry() <= 1e-14);
    const CoupledSolution cs = solve_coupled_two_scale(a, p);
    CHECK(cs.bound_ratio < 10.0);
    for (std::size_t c = 0; c < cs.w.size(); ++c) {
        if (!p.chi_eps.cells[c]) CHECK(cs.w[c] == 0.0);
    }
    Domain box;
    const EpsProblem pb = build_eps_problem(sample_periodic_lattice(0.25, 1.0), box, 0.25, smooth(), 64);
    CHECK_THROWS(solve_coupled_two_scale(a, pb));
}

TEST_CASE("fit_slope recovers an exact power law") {
    const std::vector<double> eps{0.125, 0.0625, 0.03125, 0.015625};
    std::vector<double> err;
    for (double e : eps) err.push_back(3.0 * std::pow(e, 0.6));
    const SlopeFit f = fit_slope(eps, err);
    CHECK(f.defined);
    CHECK(f.slope == doctest::Approx(0.6));
    CHECK(f.slope == doctest::Approx(oracle::loglog_slope(eps, err)));
    CHECK_FALSE(f.dropped_largest);
}

TEST_CASE("fit_slope drops a pre-asymptotic largest eps") {
    const std::vector<double> eps{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    std::vector<double> err;
    for (double e : eps) err.push_back(e * (1.0 + 0.01 * std::sin(1000 * e)));
    err[0] = 10.0;
    const SlopeFit f = fit_slope(eps, err);
    CHECK(f.dropped_largest);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fit_slope is undefined at round-off level") {
    const SlopeFit f = fit_slope({0.25, 0.125}, {0.0, 1e-15});
    CHECK_FALSE(f.defined);
}

TEST_CASE("empty-geometry sweep has undefined slope") {
    SweepSpec sp;
    sp.eps = {0.25, 0.125};
    sp.resolution = 64;
    sp.f = smooth();
    const SweepReport r = run_sweep(sp);
    CHECK_FALSE(r.combined.defined);
    for (const auto& row : r.rows) CHECK(row.errors.combined() < 1e-9);
}

TEST_CASE("mollifier preserves constants away from the boundary") {
    const Grid g{2, 64, 1.0, true};
    GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
    std::fill(u.values.begin(), u.values.end(), 2.5);
    const GridFunction m = mollify(u, 0.05);
    for (double x : m.values) CHECK(x == doctest::Approx(2.5));
}

TEST_CASE("cell gradient is exact for linear functions in the interior") {
    const Grid g{2, 16, 1.0, false};
    GridFunction u = sample_function(g, [](double x, double y) { return 2 * x - 3 * y; }, BoundaryKind::DirichletZero);
    const auto gr = cell_gradient(u);
    CHECK(gr[0].at(8, 8) == doctest::Approx(2.0));
    CHECK(gr[1].at(8, 8) == doctest::Approx(-3.0));
}

TEST_CASE("two-scale error decreases with eps on the box") {
    SweepSpec sp;
    sp.cell_geometry = offcenter();
    sp.eps = {0.25, 0.125};
    sp.resolution = 128;
    sp.f = smooth();
    const SweepReport r = run_sweep(sp);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[1].errors.combined() < r.rows[0].errors.combined());
    CHECK(r.rows[0].mean_v > 0.0);
}

TEST_CASE("sine battery") {
    Domain box;
    const auto b = sine_battery(box);
    CHECK(b.size() == 17);
    CHECK(b[0].psi(0.3, 0.7) == 1.0);
    CHECK(b[1].psi(0.0, 0.5) == doctest::Approx(0.0).scale(1.0));
}
