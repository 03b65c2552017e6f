#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dplab/errors.hpp"
#include "dplab/geometry.hpp"
#include "dplab/union_find.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

TEST_CASE("lattice disc rasterizes to its area") {
    const InclusionSet s = sample_periodic_lattice(0.25, 1.0);
    REQUIRE(s.inclusions.size() == 1);
    const IndicatorGrid chi = rasterize(s, 256);
    CHECK(chi.volume_fraction() == doctest::Approx(std::numbers::pi / 16.0).epsilon(5e-3));
    CHECK(complement_components(chi) == 1);
}

TEST_CASE("overlapping discs are rejected") {
    InclusionSet s;
    s.inclusions.push_back({Disc{{0.4, 0.5}, 0.2}, 0});
    s.inclusions.push_back({Disc{{0.6, 0.5}, 0.2}, 1});
    CHECK_THROWS_AS(check_inclusion_set(s), GeometryError);
}

TEST_CASE("periodic images count for overlap") {
    InclusionSet s;
    s.inclusions.push_back({Disc{{0.05, 0.5}, 0.1}, 0});
    s.inclusions.push_back({Disc{{0.9, 0.5}, 0.1}, 1});
    CHECK(shape_distance(s.inclusions[0].shape, s.inclusions[1].shape, 2, 1.0) == doctest::Approx(-0.05));
    CHECK_THROWS_AS(check_inclusion_set(s), GeometryError);
}

TEST_CASE("shape distance of discs") {
    const Shape a = Disc{{0.2, 0.2}, 0.1};
    const Shape b = Disc{{0.6, 0.2}, 0.1};
    CHECK(shape_distance(a, b, 2, std::nullopt) == doctest::Approx(0.2));
    CHECK(shape_diameter(a) == doctest::Approx(0.2));
    CHECK(shape_contains(a, {0.25, 0.2}, 2));
    CHECK_FALSE(shape_contains(a, {0.35, 0.2}, 2));
}

TEST_CASE("disconnected complement raises ConnectivityError") {
    // two full rows of F on the 8x8 torus
    IndicatorGrid g;
    g.n = 8;
    g.cells.assign(64, 0);
    for (int i = 0; i < 8; ++i) g.cells[static_cast<std::size_t>(i)] = 1;
    for (int i = 0; i < 8; ++i) g.cells[static_cast<std::size_t>(4 * 8 + i)] = 1;
    CHECK(complement_components(g) == 2);
    CHECK_THROWS_AS(check_complement_connected(g), ConnectivityError);
}

TEST_CASE("pocket filling leaves one complement component") {
    IndicatorGrid g;
    g.n = 8;
    g.cells.assign(64, 0);
    // ring of F around cell (3, 3)
    for (int dj = -1; dj <= 1; ++dj) {
        for (int di = -1; di <= 1; ++di) {
            if (di || dj) g.cells[static_cast<std::size_t>((3 + dj) * 8 + 3 + di)] = 1;
        }
    }
    REQUIRE(complement_components(g) == 2);
    CHECK(fill_complement_pockets(g) == 1);
    CHECK(complement_components(g) == 1);
    CHECK(g.inside(3, 3));
}

TEST_CASE("property: RSA realizations are admissible") {
    oracle::Gen gen(11);
    for (int trial = 0; trial < 12; ++trial) {
        RsaParams p;
        p.intensity = gen.uniform(5.0, 40.0);
        const double lo = gen.uniform(0.02, 0.06);
        p.radii = RadiusLaw::uniform(lo, lo + gen.uniform(0.0, 0.05));
        p.margin = gen.uniform(0.0, 1.0);
        p.seed = gen.next();
        const InclusionSet s = sample_hard_discs_rsa(p);
        CHECK_NOTHROW(check_inclusion_set(s));
        for (std::size_t a = 0; a < s.inclusions.size(); ++a) {
            const auto& da = std::get<Disc>(s.inclusions[a].shape);
            CHECK(da.radius >= p.radii.r_min - 1e-15);
            CHECK(da.radius <= p.radii.r_max + 1e-15);
            for (std::size_t b = a + 1; b < s.inclusions.size(); ++b) {
                const auto& db = std::get<Disc>(s.inclusions[b].shape);
                const double gap = shape_distance(s.inclusions[a].shape, s.inclusions[b].shape, 2, 1.0);
                CHECK(gap >= p.margin * std::max(da.radius, db.radius) - 1e-12);
            }
        }
    }
}

TEST_CASE("RSA is reproducible from its seed") {
    RsaParams p;
    p.intensity = 30;
    p.radii = RadiusLaw::uniform(0.02, 0.05);
    p.seed = 99;
    const InclusionSet a = sample_hard_discs_rsa(p);
    const InclusionSet b = sample_hard_discs_rsa(p);
    REQUIRE(a.inclusions.size() == b.inclusions.size());
    for (std::size_t k = 0; k < a.inclusions.size(); ++k) {
        CHECK(std::get<Disc>(a.inclusions[k].shape).center.x == std::get<Disc>(b.inclusions[k].shape).center.x);
    }
}

TEST_CASE("property: Poisson half-gap discs are disjoint and some pair touches") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const InclusionSet s = sample_poisson_halfgap(20.0, 1.0, seed);
        if (s.inclusions.size() < 2) continue;
        const SeparationReport rep = separation_moments(s, 1.0);
        double lo = 1.0;
        for (double r : rep.rho) {
            CHECK(r >= -1e-12);
            lo = std::min(lo, r);
        }
        CHECK(lo < 1e-12);
        CHECK(rep.infinite);
    }
}

TEST_CASE("half-gap discs from two points") {
    const std::vector<Vec2> pts{{0.25, 0.5}, {0.75, 0.5}};
    const InclusionSet s = poisson_halfgap_from_points(pts, 1.0);
    REQUIRE(s.inclusions.size() == 2);
    CHECK(std::get<Disc>(s.inclusions[0].shape).radius == doctest::Approx(0.25));
}

TEST_CASE("separation moments of a lattice") {
    const InclusionSet s = sample_periodic_lattice(0.25, 2.0);
    InclusionSet two = s;
    two.inclusions.push_back({Disc{{1.5, 1.5}, 0.25}, 1});
    std::get<Disc>(two.inclusions[0].shape).center = {0.5, 0.5};
    const SeparationReport rep = separation_moments(two, 2.0);
    // nearest distance between the two discs: sqrt(2) - 0.5 (direct and images agree)
    CHECK(rep.rho[0] == doctest::Approx(std::sqrt(2.0) - 0.5));
    CHECK(rep.nu[0] == doctest::Approx(std::min((std::sqrt(2.0) - 0.5) / 0.5, 1.0)));
    CHECK(rep.moment_at(1.0) == doctest::Approx(2.0 / 4.0));
}

TEST_CASE("chess pattern builds clusters") {
    std::vector<std::uint8_t> black(16, 0);
    black[5] = 1;
    const InclusionSet s = chess_from_pattern(black, 4);
    REQUIRE(s.inclusions.size() == 1);
    const IndicatorGrid chi = rasterize(s, 16);
    CHECK(chi.volume_fraction() == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("union find merges components") {
    UnionFind uf(6);
    CHECK(uf.unite(0, 1));
    CHECK(uf.unite(2, 3));
    CHECK_FALSE(uf.unite(1, 0));
    CHECK(uf.unite(1, 3));
    CHECK(uf.find(0) == uf.find(2));
    CHECK(uf.component_size(3) == 4);
    CHECK(uf.find(4) != uf.find(5));
}
