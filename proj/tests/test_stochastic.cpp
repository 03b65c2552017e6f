#include <doctest.h>

#include <cmath>
#include <set>

#include "dplab/errors.hpp"
#include "dplab/rng.hpp"
#include "dplab/stochastic.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

TEST_CASE("derived seeds are distinct and stable") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(42, k));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 3) == derive_seed(42, 3));
}

TEST_CASE("Random is reproducible and in range") {
    Random a(5), b(5);
    for (int k = 0; k < 100; ++k) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("ensemble configuration validation") {
    EnsembleConfig c;
    c.realizations = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.realizations = 2;
    c.seeds = {3, 3};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.seeds = {3, 4};
    CHECK_NOTHROW(c.validate());
    CHECK(c.realization_seeds() == std::vector<std::uint64_t>{3, 4});
}

TEST_CASE("mean and standard error") {
    const EnsembleStat s = mean_and_stderr({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(mean_and_stderr({7.0}).stderr_ == 0.0);
}

TEST_CASE("ensemble results do not depend on the thread count") {
    EnsembleConfig c;
    c.model = GeometryModel::HardDiscsRSA;
    c.realizations = 3;
    c.base_seed = 11;
    c.intensity = 10;
    c.r_min = 0.06;
    c.r_max = 0.1;
    const EnsembleResult one = ensemble_cell_run(c, 48, {}, 1);
    const EnsembleResult three = ensemble_cell_run(c, 48, {}, 3);
    CHECK(one.a_bar[0][0].mean == three.a_bar[0][0].mean);
    CHECK(one.mean_v.mean == three.mean_v.mean);
    CHECK(one.mean_v.stderr_ == three.mean_v.stderr_);
    REQUIRE(one.samples.size() == 3);
    CHECK(std::is_sorted(one.samples.begin(), one.samples.end(), [](const auto& a, const auto& b) { return a.seed < b.seed; }));
}

TEST_CASE("lattice realizations tile the period") {
    EnsembleConfig c;
    c.model = GeometryModel::PeriodicLattice;
    c.radius = 0.2;
    const InclusionSet s = sample_realization(c, 0, 3.0);
    CHECK(s.inclusions.size() == 9);
}

TEST_CASE("property: volume-fraction variance does not grow with the period") {
    EnsembleConfig c;
    c.model = GeometryModel::HardDiscsRSA;
    c.realizations = 8;
    c.base_seed = 3;
    c.intensity = 20;
    c.r_min = 0.05;
    c.r_max = 0.08;
    const ErgodicReport r = ergodic_average_check(c, ErgodicQuantity::VolFrac, {1.0, 2.0}, 32);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.nonincreasing);
    CHECK(r.rows[1].variance <= 1.5 * r.rows[0].variance);
}
