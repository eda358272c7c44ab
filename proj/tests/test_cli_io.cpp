#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "snapout/config.hpp"
#include "snapout/io.hpp"
#include "snapout/svg.hpp"

using namespace snapout;

TEST_CASE("config parsing") {
    const std::string text =
        "# experiment\n"
        "[outer]\n"
        "kind = circle\n"
        "center = 0 0   # origin\n"
        "radius = 2\n"
        "\n"
        "[barrier.1]\n"
        "kind = spline\n"
        "point = 0 1\n"
        "point = 1 0\n"
        "point = -1 -1\n"
        "[sim]\n"
        "t = 0.01\n"
        "record_dense = true\n"
        "h = auto\n";
    const Config cfg = Config::parse_string(text);
    CHECK(cfg.get("outer", "kind") == "circle");
    CHECK(cfg.get_double("outer", "radius") == 2.0);
    CHECK(cfg.get_doubles("outer", "center") == std::vector<double>{0.0, 0.0});
    CHECK(cfg.get_all("barrier.1", "point").size() == 3);
    CHECK(cfg.get_bool_or("sim", "record_dense", false));
    CHECK(cfg.get_double_or("sim", "h", 123.0) == 123.0);  // "auto" falls back
    CHECK(cfg.get_double_or("sim", "missing", 7.0) == 7.0);
    CHECK(cfg.has_section("barrier.1"));
    CHECK_FALSE(cfg.has_section("barrier.2"));
    CHECK_THROWS_AS(cfg.get("sim", "nope"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("[unterminated\n"), ConfigError);
}

TEST_CASE("sample path CSV round trip is exact") {
    SamplePath p;
    p.t = 0.05;
    p.samples = {{0.1234567890123456, -2.0}, {1.0 / 3.0, 7e-17}, {-5.5, 2.25}};
    p.T = 0.1;
    const std::string file = std::filesystem::temp_directory_path() / "snapout_test_path.csv";
    write_sample_path_csv(file, p);
    const SamplePath q = read_sample_path_csv(file);
    REQUIRE(q.samples.size() == p.samples.size());
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        CHECK(q.samples[i].x == p.samples[i].x);
        CHECK(q.samples[i].y == p.samples[i].y);
    }
    CHECK(q.t == p.t);
    std::remove(file.c_str());
}

TEST_CASE("estimate CSV carries points and regime") {
    EstimateSet est;
    est.regime = Regime::HighFreq;
    est.eps_grid = 0.5;
    est.flagged.push_back({2, -3, 1, 0.01, 20, 0});
    est.points.points.push_back({1.0, -1.5});
    const std::string csv = estimate_csv(est);
    CHECK(csv.find("x,y,regime,diagnostic") == 0);
    CHECK(csv.find("high-freq") != std::string::npos);
    const std::string file = std::filesystem::temp_directory_path() / "snapout_test_est.csv";
    detail::write_file(file, csv);
    std::string regime;
    const PointSet ps = read_estimate_csv(file, &regime);
    REQUIRE(ps.points.size() == 1);
    CHECK(ps.points[0] == Vec2{1.0, -1.5});
    CHECK(regime == "high-freq");
    std::remove(file.c_str());
}

TEST_CASE("manifest text is a pure function of its inputs") {
    const Config cfg = Config::parse_string("[sim]\nt = 1\n");
    const std::string a = manifest_text("simulate", cfg, {1, 2}, {"x.csv"});
    const std::string b = manifest_text("simulate", cfg, {1, 2}, {"x.csv"});
    CHECK(a == b);
    CHECK(a.find("snapout") != std::string::npos);
    CHECK(a.find("| [sim]") != std::string::npos);
}

TEST_CASE("svg plot writes a viewBox in data coordinates") {
    Aabb box;
    box.grow({-2, -1});
    box.grow({2, 1});
    SvgPlot plot(box);
    plot.add_polyline({{-2, 0}, {2, 0}}, "#000000", 0.01);
    plot.add_rect({0, 0}, 0.5, 0.5, "#ff0000", 0.5);
    const std::string svg = plot.str();
    CHECK(svg.find("viewBox=") != std::string::npos);
    CHECK(svg.find("<path") != std::string::npos);
    CHECK(svg.find("<rect") != std::string::npos);
    CHECK(svg.rfind("</svg>\n") == svg.size() - 7);
}
