#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "snapout/geometry.hpp"
#include "snapout/rng.hpp"

using namespace snapout;

namespace {

Environment disk_with_circle(double R, double r, double lp, double lm) {
    return Environment::create(impermeable_barrier(ClosedCurve::circle({0, 0}, R)),
                               {Barrier{ClosedCurve::circle({0, 0}, r), lp, lm}});
}

std::vector<Vec2> squareish_control_points() {
    return {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
}

}  // namespace

TEST_CASE("side_of on the unit circle") {
    const Barrier b{ClosedCurve::circle({0, 0}, 1.0), 1.0, 1.0};
    CHECK(side_of(b, {0, 0}) == Side::Positive);
    CHECK(side_of(b, {2, 0}) == Side::Negative);
    CHECK(side_of(b, {1, 0}) == Side::On);
}

TEST_CASE("nearest_point basics") {
    const Barrier circle{ClosedCurve::circle({0, 0}, 1.0), 1.0, 1.0};

    SECTION("radial query") {
        const NearestPoint n = nearest_point(circle, {2, 0});
        CHECK(distance(n.point, {1, 0}) < 1e-9);
        CHECK(n.dist == Catch::Approx(1.0).margin(1e-9));
        CHECK(n.normal.x == Catch::Approx(-1.0).margin(1e-6));
        CHECK(std::abs(n.normal.y) < 1e-6);
    }
    SECTION("center query is a tie, resolved deterministically") {
        const NearestPoint n1 = nearest_point(circle, {0, 0});
        const NearestPoint n2 = nearest_point(circle, {0, 0});
        CHECK(n1.dist == Catch::Approx(1.0).margin(1e-5));
        CHECK(std::abs(n1.point.norm() - 1.0) < 1e-5);  // on the curve at polyline resolution
        CHECK(n1.point == n2.point);
    }
    SECTION("ellipse major axis") {
        const Barrier ell{ClosedCurve::ellipse({0, 0}, 2.0, 1.0, 0.0), 1.0, 1.0};
        const NearestPoint n = nearest_point(ell, {3, 0});
        CHECK(distance(n.point, {2, 0}) < 1e-5);
        CHECK(n.dist == Catch::Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("normal orientation property") {
    Rng rng(7);
    std::vector<ClosedCurve> curves;
    curves.push_back(ClosedCurve::circle({0.3, -0.2}, 1.7));
    curves.push_back(ClosedCurve::ellipse({-1.0, 0.5}, 2.0, 0.8, 0.4));
    curves.push_back(ClosedCurve::periodic_spline(squareish_control_points()));
    for (const ClosedCurve& c : curves) {
        const Barrier b{c, 1.0, 1.0};
        for (int trial = 0; trial < 200; ++trial) {
            const Vec2 p{rng.uniform(-4, 4), rng.uniform(-4, 4)};
            const NearestPoint n = nearest_point(b, p);
            REQUIRE(std::abs(n.normal.norm() - 1.0) < 1e-9);
            const double delta = 1e-7 * c.diameter();
            CHECK(side_of(b, n.point + n.normal * delta) == Side::Positive);
        }
    }
}

TEST_CASE("max_curvature") {
    CHECK(ClosedCurve::circle({0, 0}, 2.0).max_curvature() == 0.5);
    CHECK(ClosedCurve::ellipse({0, 0}, 2.0, 1.0, 0.0).max_curvature() == 2.0);

    SECTION("kappa * r == 1 exactly for analytic circles") {
        for (double r : {0.5, 1.0, 2.0, 4.0})
            CHECK(ClosedCurve::circle({1, 1}, r).max_curvature() * r == 1.0);
    }

    SECTION("square-ish spline vs dense finite-difference oracle") {
        const auto ctrl = squareish_control_points();
        const double got = ClosedCurve::periodic_spline(ctrl, 4096).max_curvature();
        const double oracle = ClosedCurve::periodic_spline(ctrl, 1 << 16).max_curvature();
        const double circumscribed_radius = std::sqrt(2.0);
        CHECK(got >= 1.0 / circumscribed_radius);
        CHECK(got == Catch::Approx(oracle).epsilon(1e-3));
    }
}

TEST_CASE("min_separation") {
    SECTION("two concentric circles") {
        const Environment env = disk_with_circle(2.0, 1.0, 1.0, 1.0);
        CHECK(min_separation(env) == Catch::Approx(0.5).margin(1e-4));
    }
    SECTION("single circle inside a big one") {
        const Environment env = disk_with_circle(3.0, 1.0, 1.0, 1.0);
        CHECK(min_separation(env) == Catch::Approx(1.0).margin(1e-4));
    }
    SECTION("side-by-side circles, against a brute-force oracle") {
        const Environment env = Environment::create(
            impermeable_barrier(ClosedCurve::circle({0, 0}, 5.0)),
            {Barrier{ClosedCurve::circle({-1.6, 0}, 1.0), 1.0, 1.0},
             Barrier{ClosedCurve::circle({1.6, 0}, 1.0), 1.0, 1.0}});
        const double got = min_separation(env);
        CHECK(got == Catch::Approx(0.6).margin(1e-4));

        double oracle = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < env.barrier_count(); ++i)
            for (std::size_t j = i + 1; j < env.barrier_count(); ++j)
                for (const Vec2& p : env.barrier(i).curve.polyline())
                    for (const Vec2& q : env.barrier(j).curve.polyline())
                        oracle = std::min(oracle, distance(p, q));
        CHECK(got == Catch::Approx(oracle / 2.0).margin(1e-6));
    }
    SECTION("invariant under rigid motions") {
        auto rot = [](Vec2 p, double a, Vec2 shift) {
            return Vec2{p.x * std::cos(a) - p.y * std::sin(a) + shift.x,
                        p.x * std::sin(a) + p.y * std::cos(a) + shift.y};
        };
        const double a = 0.7;
        const Vec2 shift{3.0, -2.0};
        const Environment env1 = Environment::create(
            impermeable_barrier(ClosedCurve::circle({0, 0}, 5.0)),
            {Barrier{ClosedCurve::circle({-1.6, 0}, 1.0), 1.0, 1.0},
             Barrier{ClosedCurve::circle({1.6, 0}, 1.0), 1.0, 1.0}});
        const Environment env2 = Environment::create(
            impermeable_barrier(ClosedCurve::circle(rot({0, 0}, a, shift), 5.0)),
            {Barrier{ClosedCurve::circle(rot({-1.6, 0}, a, shift), 1.0), 1.0, 1.0},
             Barrier{ClosedCurve::circle(rot({1.6, 0}, a, shift), 1.0), 1.0, 1.0}});
        CHECK(min_separation(env1) == Catch::Approx(min_separation(env2)).margin(1e-9));
    }
}

TEST_CASE("side_of is constant on components") {
    Rng rng(11);
    SECTION("analytic membership for primitives") {
        const ClosedCurve circ = ClosedCurve::circle({0.5, -0.3}, 1.2);
        const ClosedCurve ell = ClosedCurve::ellipse({0, 0}, 2.0, 1.0, 0.3);
        for (int trial = 0; trial < 2000; ++trial) {
            const Vec2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
            const double dc = distance(p, {0.5, -0.3});
            if (std::abs(dc - 1.2) > 1e-3) {
                const Side want = dc < 1.2 ? Side::Positive : Side::Negative;
                CHECK(circ.side_of(p) == want);
            }
            const double ca = std::cos(-0.3), sa = std::sin(-0.3);
            const Vec2 q{ca * p.x - sa * p.y, sa * p.x + ca * p.y};
            const double r2 = q.x * q.x / 4.0 + q.y * q.y;
            if (std::abs(r2 - 1.0) > 1e-2) {
                const Side want = r2 < 1.0 ? Side::Positive : Side::Negative;
                CHECK(ell.side_of(p) == want);
            }
        }
    }
    SECTION("parity cross-check on a spline") {
        const ClosedCurve spl = ClosedCurve::periodic_spline(squareish_control_points());
        for (int trial = 0; trial < 2000; ++trial) {
            const Vec2 p{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            if (spl.nearest(p).dist < 1e-6) continue;
            const Side got = spl.side_of(p);
            CHECK(got == (spl.contains_by_parity(p) ? Side::Positive : Side::Negative));
        }
    }
}

TEST_CASE("spline interpolates control points and closes") {
    const auto ctrl = squareish_control_points();
    const ClosedCurve spl = ClosedCurve::periodic_spline(ctrl);
    const auto& pts = spl.polyline();
    CHECK(pts.front() == pts.back());
    for (const Vec2& c : ctrl) {
        bool found = false;
        for (const Vec2& p : pts)
            if (p == c) found = true;
        CHECK(found);
    }
}

TEST_CASE("degenerate and invalid curves are rejected") {
    CHECK_THROWS_AS(ClosedCurve::periodic_spline({{0, 0}, {1, 0}}), InvalidCurveError);
    CHECK_THROWS_AS(ClosedCurve::circle({0, 0}, 0.0), InvalidCurveError);
    // Figure-eight control polygon produces a self-intersecting spline.
    CHECK_THROWS_AS(ClosedCurve::periodic_spline({{-1, -1}, {1, 1}, {1, -1}, {-1, 1}}),
                    InvalidCurveError);
}

TEST_CASE("environment validation") {
    CHECK_THROWS_AS(Environment::create(impermeable_barrier(ClosedCurve::circle({0, 0}, 1.0)),
                                        {Barrier{ClosedCurve::circle({0, 0}, 2.0), 1.0, 1.0}}),
                    InvalidEnvironmentError);
    CHECK_THROWS_AS(Environment::create(impermeable_barrier(ClosedCurve::circle({0, 0}, 2.0)),
                                        {Barrier{ClosedCurve::circle({1.0, 0}, 1.5), 1.0, 1.0}}),
                    InvalidEnvironmentError);
    CHECK_THROWS_AS(Environment::create(Barrier{ClosedCurve::circle({0, 0}, 2.0), 1.0, 1.0}, {}),
                    InvalidEnvironmentError);

    const Environment env = disk_with_circle(2.0, 1.0, 0.5, 2.0);
    CHECK(env.area() == Catch::Approx(M_PI * 4.0).epsilon(1e-4));
    const EnvParameters p = derive_parameters(env);
    CHECK(p.kappa == Catch::Approx(1.0));
    CHECK(p.lambda_max == 2.0);
    CHECK(p.rho == Catch::Approx(0.5).margin(1e-4));
    CHECK_FALSE(p.pi_min.has_value());
}
