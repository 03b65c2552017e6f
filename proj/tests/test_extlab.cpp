#include <doctest.h>

#include <cmath>

#include "dplab/extlab.hpp"
#include "dplab/geometry.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

namespace {

IndicatorGrid lattice(int n, double r = 0.25) { return rasterize(sample_periodic_lattice(r, 1.0), n); }

}  // namespace

TEST_CASE("harmonic extension keeps complement values and extends constants") {
    const IndicatorGrid chi = lattice(32);
    const Grid g = grid_of(chi);
    GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
    std::fill(u.values.begin(), u.values.end(), 1.5);
    for (std::size_t c = 0; c < chi.size(); ++c) {
        if (chi.cells[c]) u[c] = -7.0;
    }
    const GridFunction pu = harmonic_extension(u, chi);
    for (double x : pu.values) CHECK(x == doctest::Approx(1.5));
}

TEST_CASE("property: extension satisfies the discrete maximum principle") {
    oracle::Gen gen(31);
    const IndicatorGrid chi = lattice(32, 0.3);
    const Grid g = grid_of(chi);
    for (int trial = 0; trial < 4; ++trial) {
        GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
        for (auto& x : u.values) x = gen.uniform(-1.0, 1.0);
        const GridFunction pu = harmonic_extension(u, chi);
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t c = 0; c < chi.size(); ++c) {
            if (!chi.cells[c]) {
                CHECK(pu[c] == u[c]);
                lo = std::min(lo, u[c]);
                hi = std::max(hi, u[c]);
            }
        }
        for (double x : pu.values) {
            CHECK(x >= lo - 1e-10);
            CHECK(x <= hi + 1e-10);
        }
    }
}

TEST_CASE("property: L2 extension ratio is at least one") {
    oracle::Gen gen(4);
    const IndicatorGrid chi = lattice(32);
    for (const auto& u : fourier_trial_fields(grid_of(chi), gen.next(), 6)) {
        const GridFunction pu = harmonic_extension(u, chi);
        CHECK(extension_ratio(pu, chi, 2.0) >= 1.0 - 1e-12);
    }
}

TEST_CASE("worst field dominates the random battery") {
    const IndicatorGrid chi = lattice(32);
    const WorstField w = worst_extension_field(chi, 1, 20);
    double best = 0.0;
    for (const auto& u : fourier_trial_fields(grid_of(chi), 1, 8)) {
        best = std::max(best, extension_ratio(harmonic_extension(u, chi), chi, 2.0));
    }
    CHECK(std::sqrt(w.rayleigh) >= best * (1.0 - 1e-6));
}

TEST_CASE("survey rows and trend bookkeeping") {
    SurveyOptions so;
    so.p = {4.0 / 3.0, 2.0};
    so.fields = 4;
    so.power_iterations = 5;
    const auto rows = extension_constant_survey("lattice", sample_periodic_lattice(0.25, 1.0), {32, 64}, so);
    CHECK(rows.size() == 4);
    for (const auto& r : rows) CHECK(r.constant >= r.random_constant);
    const TrendReport t = extension_trend(rows, 4.0 / 3.0, 32, 64);
    CHECK(t.growth2 == doctest::Approx(t.c2_fine / t.c2_coarse - 1.0));
    CHECK(t.pass == (t.growth2 >= 0.25 && t.change_p <= 0.25));
    CHECK_THROWS(extension_trend(rows, 1.5, 32, 64));
}

TEST_CASE("gradient magnitude of a linear ramp") {
    const Grid g{2, 8, 1.0, true};
    GridFunction u = GridFunction::zeros(g, BoundaryKind::Periodic);
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i < 8; ++i) u.at(i, j) = 0.125 * j;
    }
    const auto m = gradient_magnitude(u);
    CHECK(m[g.index(3, 3)] == doctest::Approx(1.0));
}
