#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dplab/cell.hpp"
#include "dplab/errors.hpp"
#include "dplab/geometry.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

namespace {

const CellOptions kTight{CgOptions{1e-12, 0, false}};

IndicatorGrid disc_cell(double r, int n, Vec2 c = {0.5, 0.5}) {
    InclusionSet s;
    s.inclusions.push_back({Disc{c, r}, 0});
    return rasterize(s, n);
}

}  // namespace

TEST_CASE("1-D resonant mean against the cosh closed form") {
    InclusionSet s;
    s.dim = 1;
    s.period = 4.0;
    s.inclusions.push_back({Disc{{2.0, 0.0}, 1.0}, 0});
    const ResonantCell rc = solve_resonant_cell(rasterize(s, 2048), kTight);
    CHECK(rc.mean_v == doctest::Approx(oracle::resonant_mean_1d(1.0, 4.0)).epsilon(1e-4));
}

TEST_CASE("2-D resonant disc average against the Bessel form") {
    InclusionSet s;
    s.period = 4.0;
    s.inclusions.push_back({Disc{{2.0, 2.0}, 1.0}, 0});
    const IndicatorGrid chi = rasterize(s, 256);
    const ResonantCell rc = solve_resonant_cell(chi, kTight);
    double sum = 0.0;
    for (double v : rc.v.values) sum += v;
    CHECK(sum / static_cast<double>(chi.count()) == doctest::Approx(oracle::resonant_disc_average(1.0)).epsilon(2e-2));
}

TEST_CASE("empty cell gives the identity matrix and no resonance") {
    IndicatorGrid chi;
    chi.n = 16;
    chi.cells.assign(256, 0);
    const HomogenizedData hd = compute_homogenized_data(chi);
    CHECK(hd.a_bar[0][0] == doctest::Approx(1.0));
    CHECK(hd.a_bar[1][1] == doctest::Approx(1.0));
    CHECK(std::abs(hd.a_bar[0][1]) < 1e-14);
    CHECK(hd.mean_v == 0.0);
}

TEST_CASE("property: resonant solution lies in [0, 1] and vanishes off F") {
    oracle::Gen gen(4);
    for (int trial = 0; trial < 6; ++trial) {
        const IndicatorGrid chi = disc_cell(gen.uniform(0.1, 0.4), 64, {gen.uniform(0.3, 0.7), gen.uniform(0.3, 0.7)});
        const ResonantCell rc = solve_resonant_cell(chi);
        for (std::size_t c = 0; c < chi.size(); ++c) {
            CHECK(rc.v[c] >= 0.0);
            CHECK(rc.v[c] <= 1.0);
            if (!chi.cells[c]) CHECK(rc.v[c] == 0.0);
        }
        CHECK(rc.mean_v < chi.volume_fraction());
    }
}

TEST_CASE("property: homogenized matrix is symmetric and between the bounds") {
    oracle::Gen gen(9);
    for (int trial = 0; trial < 5; ++trial) {
        const IndicatorGrid chi = disc_cell(gen.uniform(0.1, 0.35), 64, {gen.uniform(0.4, 0.6), gen.uniform(0.4, 0.6)});
        HomogenizedOptions ho;
        ho.flux_correctors = false;
        ho.inclusion_corrector = false;
        const HomogenizedData hd = compute_homogenized_data(chi, ho);
        CHECK(hd.a_bar[0][1] == doctest::Approx(hd.a_bar[1][0]).epsilon(1e-10).scale(1.0));
        const double voigt = 1.0 - chi.volume_fraction();
        CHECK(hd.a_bar[0][0] > 0.0);
        CHECK(hd.a_bar[0][0] <= voigt + 1e-12);
        CHECK(hd.a_bar[1][1] <= voigt + 1e-12);
        CHECK(hd.abar_detail.disagreement <= 1e-6);
    }
}

TEST_CASE("rotating the cell swaps the diagonal of the homogenized matrix") {
    InclusionSet s;
    s.inclusions.push_back({Capsule{{0.3, 0.5}, {0.7, 0.5}, 0.2}, 0});
    const IndicatorGrid chi = rasterize(s, 64);
    HomogenizedOptions ho;
    ho.flux_correctors = false;
    ho.inclusion_corrector = false;
    const HomogenizedData a = compute_homogenized_data(chi, ho);
    const HomogenizedData b = compute_homogenized_data(rotate90(chi), ho);
    CHECK(a.a_bar[1][1] < a.a_bar[0][0]);
    CHECK(b.a_bar[0][0] == doctest::Approx(a.a_bar[1][1]).epsilon(1e-9));
    CHECK(b.a_bar[1][1] == doctest::Approx(a.a_bar[0][0]).epsilon(1e-9));
}

TEST_CASE("flux corrector is antisymmetric and inclusion corrector solves its equation") {
    const HomogenizedData hd = compute_homogenized_data(disc_cell(0.25, 64));
    for (const auto& fc : hd.sigma) {
        REQUIRE(fc.sigma.size() == 4);
        for (std::size_t c = 0; c < fc.sigma[1].size(); ++c) CHECK(fc.sigma[1][c] == -fc.sigma[2][c]);
        CHECK(fc.residual <= 1e-8);
    }
    CHECK(hd.theta.residual <= 1e-8);
    const MomentReport m = corrector_moment_report(hd);
    CHECK(m.phi_max >= m.phi_mean);
    CHECK(m.sigma_max >= m.sigma_mean);
}

TEST_CASE("massive corrector approaches the soft corrector") {
    const IndicatorGrid chi = disc_cell(0.25, 64);
    const CorrectorSet soft = solve_corrector_soft(chi, kTight);
    double prev = INFINITY;
    for (double eps : {0.25, 0.125, 0.0625}) {
        const double d = corrector_gradient_distance(solve_corrector_massive(chi, eps, kTight), soft, chi);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("soft corrector has mean zero on the complement") {
    const IndicatorGrid chi = disc_cell(0.3, 32);
    const CorrectorSet soft = solve_corrector_soft(chi, kTight);
    for (const auto& phi : soft.phi) {
        double s = 0.0;
        for (std::size_t c = 0; c < chi.size(); ++c) {
            if (!chi.cells[c]) s += phi[c];
        }
        CHECK(std::abs(s) < 1e-8);
    }
}
