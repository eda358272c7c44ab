#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracle_ot.hpp"
#include "snapout/process.hpp"
#include "snapout/estimators.hpp"
#include "snapout/rng.hpp"
#include "snapout/transport.hpp"

using namespace snapout;

namespace {

EmpiricalMeasure random_measure(Rng& rng, int max_atoms, double span, bool uniform_weights) {
    const int k = 1 + static_cast<int>(rng.uniform() * max_atoms);
    std::vector<Vec2> pts;
    for (int i = 0; i < k; ++i) pts.push_back({rng.uniform(-span, span), rng.uniform(-span, span)});
    if (uniform_weights) return EmpiricalMeasure::uniform(std::move(pts));
    std::vector<double> w(k);
    double s = 0.0;
    for (double& v : w) {
        v = rng.uniform_pos();
        s += v;
    }
    for (double& v : w) v /= s;
    // Re-normalize exactly enough for validate().
    return EmpiricalMeasure::weighted(std::move(pts), std::move(w));
}

}  // namespace

TEST_CASE("truncated_w1 basics") {
    const EmpiricalMeasure P = EmpiricalMeasure::uniform({{0, 0}});
    const EmpiricalMeasure Q = EmpiricalMeasure::uniform({{3, 4}});
    CHECK(truncated_w1(P, Q, 10.0) == Catch::Approx(5.0).margin(1e-12));
    CHECK(truncated_w1(P, Q, 2.0) == Catch::Approx(2.0).margin(1e-12));

    SECTION("zero-measure conventions") {
        const EmpiricalMeasure o = EmpiricalMeasure::zero();
        CHECK(truncated_w1(o, o, 0.7) == 0.0);
        CHECK(truncated_w1(P, o, 0.7) == 0.7);
        CHECK(truncated_w1(o, P, 0.7) == 0.7);
    }
    SECTION("negative weights rejected") {
        EmpiricalMeasure bad;
        bad.points = {{0, 0}, {1, 0}};
        bad.weights = {1.5, -0.5};
        CHECK_THROWS_AS(truncated_w1(bad, P, 1.0), InvalidMeasureError);
    }
}

TEST_CASE("truncated_w1 matches the polytope-vertex oracle") {
    Rng rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        const bool uniform = trial % 2 == 0;
        const EmpiricalMeasure P = random_measure(rng, 4, 2.0, uniform);
        const EmpiricalMeasure Q = random_measure(rng, 4, 2.0, !uniform);
        const double u = trial % 3 == 0 ? 0.5 : 10.0;
        const double got = truncated_w1(P, Q, u);
        const double want = oracle::truncated_w1(P, Q, u);
        REQUIRE(got == Catch::Approx(want).margin(1e-9));
    }
}

TEST_CASE("truncated_w1 is a metric") {
    Rng rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const EmpiricalMeasure P = random_measure(rng, 10, 1.0, true);
        const EmpiricalMeasure Q = random_measure(rng, 10, 1.0, false);
        const EmpiricalMeasure R = random_measure(rng, 10, 1.0, true);
        const double u = 0.8;
        const double pq = truncated_w1(P, Q, u);
        CHECK(pq == Catch::Approx(truncated_w1(Q, P, u)).margin(1e-9));
        CHECK(pq <= truncated_w1(P, R, u) + truncated_w1(R, Q, u) + 1e-9);
        CHECK(pq <= u + 1e-12);
        CHECK(truncated_w1(P, P, u) <= 1e-10);
    }
}

TEST_CASE("truncated_w1 bounded by u * TV on disjoint supports") {
    // Supports 100 apart: TV = 1 and every pairing is truncated, so the
    // distance is exactly u.
    const EmpiricalMeasure P = EmpiricalMeasure::uniform({{0, 0}, {1, 0}});
    const EmpiricalMeasure Q = EmpiricalMeasure::uniform({{100, 0}, {101, 0}});
    const double u = 0.3;
    CHECK(truncated_w1(P, Q, u) == Catch::Approx(u).margin(1e-12));
}

TEST_CASE("bin_measure") {
    SECTION("single atom lands at the bin center") {
        const EmpiricalMeasure Q = EmpiricalMeasure::uniform({{0.2, 0.3}});
        const EmpiricalMeasure B = bin_measure(Q, 1.0);
        REQUIRE(B.points.size() == 1);
        CHECK(B.points[0] == Vec2{0.5, 0.5});
        CHECK(B.weights[0] == 1.0);
    }
    SECTION("zero measure stays zero") { CHECK(bin_measure(EmpiricalMeasure::zero(), 1.0).is_zero()); }
    SECTION("mass merges within a bin") {
        const EmpiricalMeasure Q = EmpiricalMeasure::uniform({{0.1, 0.1}, {0.9, 0.9}});
        const EmpiricalMeasure B = bin_measure(Q, 1.0);
        REQUIRE(B.points.size() == 1);
        CHECK(B.weights[0] == Catch::Approx(1.0).margin(1e-15));
    }
    SECTION("per-bin mass is preserved on random measures") {
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            const EmpiricalMeasure Q = random_measure(rng, 12, 2.0, false);
            const double d = trial % 2 ? 0.37 : 1.1;
            const EmpiricalMeasure B = bin_measure(Q, d);
            CHECK(B.total_mass() == Catch::Approx(Q.total_mass()).margin(1e-12));
            for (std::size_t bidx = 0; bidx < B.points.size(); ++bidx) {
                const long bx = static_cast<long>(std::floor(B.points[bidx].x / d));
                const long by = static_cast<long>(std::floor(B.points[bidx].y / d));
                double mass = 0.0;
                for (std::size_t i = 0; i < Q.points.size(); ++i)
                    if (static_cast<long>(std::floor(Q.points[i].x / d)) == bx &&
                        static_cast<long>(std::floor(Q.points[i].y / d)) == by)
                        mass += Q.weights[i];
                CHECK(mass == Catch::Approx(B.weights[bidx]).margin(1e-12));
            }
        }
    }
    SECTION("binning error bound min(sqrt(2) d, u)") {
        Rng rng(17);
        for (int trial = 0; trial < 100; ++trial) {
            const EmpiricalMeasure Q = random_measure(rng, 8, 2.0, trial % 2 == 0);
            for (const double d : {0.1, 1.0}) {
                const EmpiricalMeasure B = bin_measure(Q, d);
                for (const double u : {0.05, 10.0}) {
                    const double bound = std::min(std::sqrt(2.0) * d, u);
                    REQUIRE(truncated_w1(Q, B, u) <= bound + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("hausdorff") {
    const std::vector<Vec2> A = {{0, 0}, {10, 0}};
    CHECK(hausdorff(A, A) == 0.0);
    CHECK(hausdorff({{0, 0}}, {{3, 4}}) == Catch::Approx(5.0).margin(1e-12));
    CHECK(hausdorff(A, {{0, 1}}) == Catch::Approx(std::sqrt(101.0)).margin(1e-12));
    CHECK_THROWS_AS(hausdorff(A, {}), InvalidInputError);

    SECTION("symmetry and rigid-motion invariance") {
        Rng rng(9);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<Vec2> X, Y;
            for (int i = 0; i < 30; ++i) X.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            for (int i = 0; i < 25; ++i) Y.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            const double h1 = hausdorff(X, Y);
            CHECK(h1 == Catch::Approx(hausdorff(Y, X)).margin(1e-12));
            const double a = 1.1;
            auto rot = [&](Vec2 p) {
                return Vec2{p.x * std::cos(a) - p.y * std::sin(a) + 5.0,
                            p.x * std::sin(a) + p.y * std::cos(a) - 2.0};
            };
            std::vector<Vec2> Xr, Yr;
            for (Vec2 p : X) Xr.push_back(rot(p));
            for (Vec2 p : Y) Yr.push_back(rot(p));
            CHECK(hausdorff(Xr, Yr) == Catch::Approx(h1).margin(1e-9));
        }
    }
}

TEST_CASE("empirical_kernel") {
    SamplePath path;
    path.t = 1.0;
    path.T = 3.0;
    path.samples = {{0, 0}, {1, 0}, {0, 0}, {2, 0}};
    const OrientedRect S = OrientedRect::axis_box({-0.25, -0.25}, {0.25, 0.25});

    SECTION("uniform over successors with multiplicity") {
        const EmpiricalMeasure K = empirical_kernel(path, S);
        REQUIRE(K.points.size() == 2);
        CHECK(K.total_mass() == Catch::Approx(1.0).margin(1e-15));
        for (std::size_t i = 0; i < K.points.size(); ++i) CHECK(K.weights[i] == 0.5);
    }
    SECTION("disjoint region gives the zero measure") {
        const OrientedRect far = OrientedRect::axis_box({50, 50}, {51, 51});
        CHECK(empirical_kernel(path, far).is_zero());
    }
    SECTION("final sample has no successor and is excluded") {
        const OrientedRect around_last = OrientedRect::axis_box({1.75, -0.25}, {2.25, 0.25});
        CHECK(empirical_kernel(path, around_last).is_zero());
    }
}
