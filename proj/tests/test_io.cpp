#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "dplab/config.hpp"
#include "dplab/errors.hpp"
#include "dplab/geometry.hpp"
#include "dplab/io.hpp"
#include "dplab/svg.hpp"
#include "oracles/dense_oracle.hpp"

using namespace dplab;

TEST_CASE("property: bitmap round trip") {
    oracle::Gen gen(1);
    for (int trial = 0; trial < 6; ++trial) {
        IndicatorGrid g;
        g.n = gen.integer(1, 40);
        g.period = gen.uniform(0.5, 3.0);
        g.periodic = trial % 2 == 0;
        g.cells.resize(static_cast<std::size_t>(g.n) * g.n);
        for (auto& c : g.cells) c = gen.next() & 1;
        const auto bytes = encode_bitmap(g);
        CHECK(bytes.size() == 32 + (g.cells.size() + 7) / 8);
        CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "DPLB");
        const IndicatorGrid h = decode_bitmap(bytes);
        CHECK(h.n == g.n);
        CHECK(h.period == g.period);
        CHECK(h.periodic == g.periodic);
        CHECK(h.cells == g.cells);
    }
}

TEST_CASE("truncated bitmap is rejected") {
    IndicatorGrid g;
    g.n = 4;
    g.cells.assign(16, 1);
    auto bytes = encode_bitmap(g);
    bytes.pop_back();
    CHECK_THROWS(decode_bitmap(bytes));
}

TEST_CASE("grid function round trip keeps the mask") {
    const Grid gr{2, 5, 2.0, false};
    GridFunction u = GridFunction::zeros(gr, BoundaryKind::MaskedDirichlet);
    u.mask.assign(25, 0);
    u.mask[7] = 1;
    u.values[7] = std::acos(-1.0);
    const GridFunction v = decode_grid_function(encode_grid_function(u));
    CHECK(v.values == u.values);
    CHECK(v.mask == u.mask);
    CHECK(v.bc == BoundaryKind::MaskedDirichlet);
    CHECK(v.grid == gr);
}

TEST_CASE("geometry JSON round trip") {
    RsaParams p;
    p.intensity = 20;
    p.radii = RadiusLaw::uniform(0.03, 0.06);
    p.seed = 4;
    const InclusionSet s = sample_hard_discs_rsa(p);
    const InclusionSet t = inclusion_set_from_json(Json::parse(to_json(s).dump()));
    REQUIRE(t.inclusions.size() == s.inclusions.size());
    CHECK(t.seed == 4);
    for (std::size_t k = 0; k < s.inclusions.size(); ++k) {
        CHECK(std::get<Disc>(t.inclusions[k].shape).radius == std::get<Disc>(s.inclusions[k].shape).radius);
    }
}

TEST_CASE("fmt round-trips doubles") {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(fmt(x)) == x);
}

TEST_CASE("config parsing") {
    const Config c = Config::parse("model = rsa\n# comment\n[domain]\nperiodic = true  # trailing\neps = [1/4, 0.125]\nname = \"a b\"\n");
    CHECK(c.get_string("model") == "rsa");
    CHECK(c.get_bool("domain.periodic"));
    CHECK(c.get_doubles("domain.eps") == std::vector<double>{0.25, 0.125});
    CHECK(c.get_string("domain.name") == "a b");
    CHECK(c.get_int("missing", 7) == 7);
    CHECK_THROWS_AS(c.get_double("model"), ConfigError);
    CHECK_THROWS_AS(c.get_double("nope"), ConfigError);
}

TEST_CASE("config errors carry the line number") {
    try {
        Config::parse("a = 1\na = 2\n", "x.cfg");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("x.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse("novalue\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[open\n"), ConfigError);
}

TEST_CASE("config hash ignores order and comments") {
    const Config a = Config::parse("x = 1\ny = 2\n");
    const Config b = Config::parse("# c\ny = 2\nx = 1\n");
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    CHECK(Config::parse("x = 1\ny = 3\n").hash() != a.hash());
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("svg plot contains points, fit and reference slopes") {
    LogLogPlot p;
    p.title = "t";
    p.comment = "config_hash=abc";
    LogLogSeries s;
    s.label = "err";
    s.x = {0.25, 0.125, 0.0625};
    s.y = {0.1, 0.07, 0.05};
    s.fit_slope = 0.5;
    s.fit_intercept = std::log(0.2);
    p.series.push_back(s);
    const std::string svg = render_loglog_svg(p);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("config_hash=abc") != std::string::npos);
    CHECK(svg.find("generated") == std::string::npos);
    std::size_t circles = 0;
    for (std::size_t k = svg.find("<circle"); k != std::string::npos; k = svg.find("<circle", k + 1)) ++circles;
    CHECK(circles == 3);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    p.timestamp = "2026-01-01T00:00:00Z";
    CHECK(render_loglog_svg(p).find("generated 2026-01-01") != std::string::npos);
}
