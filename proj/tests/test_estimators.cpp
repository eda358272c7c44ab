#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "snapout/estimators.hpp"
#include "snapout/process.hpp"

using namespace snapout;

namespace {

SamplePath path_of(std::vector<Vec2> samples, double t) {
    SamplePath p;
    p.t = t;
    p.samples = std::move(samples);
    p.T = static_cast<double>(p.samples.size() - 1) * t;
    return p;
}

bool has_box(const EstimateSet& est, long j, long k) {
    for (const auto& b : est.boxes)
        if (b.j == j && b.k == k) return true;
    return false;
}

bool has_point(const EstimateSet& est, long j, long k) {
    for (const auto& f : est.flagged)
        if (f.j == j && f.k == k) return true;
    return false;
}

}  // namespace

TEST_CASE("fixed-frequency detector, degenerate and handcrafted inputs") {
    SECTION("all samples at one point: nothing flagged") {
        const SamplePath p = path_of({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}, 1.0);
        FixedFreqParams par;
        par.s = 1.0;
        par.u = 0.5;  // below s, so zero-measure neighbors cannot flag
        par.eps_grid = 1.0;
        const EstimateSet est = recover_fixed_frequency(p, par);
        CHECK(est.boxes.empty());
        CHECK(est.points.points.empty());
    }
    SECTION("kernel discontinuity between adjacent boxes") {
        const Vec2 A{0.5, 0.5}, far{10.5, 10.5}, B{1.5, 0.5};
        const SamplePath p = path_of({A, far, A, far, A, far, B, B, B, B}, 1.0);
        FixedFreqParams par;
        par.s = 1.0;
        par.u = 10.0;
        par.eps_grid = 1.0;
        const EstimateSet est = recover_fixed_frequency(p, par);
        CHECK(has_box(est, 0, 0));
        CHECK(has_box(est, 1, 0));
        // Output is a union of grid boxes: five representative points each.
        CHECK(est.points.points.size() == 5 * est.boxes.size());
        for (const auto& b : est.boxes) CHECK(b.w1_max >= par.s);
    }
}

TEST_CASE("refinement sweep, gate and discontinuity") {
    FixedFreqParams par;
    par.s = 1.0;
    par.u = 10.0;
    par.eps_grid = 0.2;
    par.ell = 1.0;
    par.sE = 0.3;

    const Vec2 R0{0.0, 0.0}, sink{50.0, 50.0}, R1{0.0, 0.2};
    const SamplePath p =
        path_of({R0, sink, R0, sink, R0, sink, R1, R1, R1, R1}, 1.0);

    SECTION("gate never passes: empty output") {
        PointSet initial;
        initial.points = {{100.0, 100.0}};
        const EstimateSet est = refine(p, par, initial);
        CHECK(est.flagged.empty());
    }
    SECTION("kernel discontinuity across parallel rectangles flags the grid point") {
        PointSet initial;
        initial.points = {{par.ell, 0.0}, {-par.ell, 0.0}};
        const EstimateSet est = refine(p, par, initial);
        CHECK(has_point(est, 0, 0));
        // Every flag passed the proximity gate for its recorded direction.
        PointGrid gate(initial.points);
        for (const auto& f : est.flagged) {
            const Vec2 pjk{f.j * par.eps_grid, f.k * par.eps_grid};
            const double ang = f.n * par.eps_grid / par.ell;
            const Vec2 w{std::cos(ang), std::sin(ang)};
            CHECK(gate.nearest(pjk + w * par.ell).dist <= par.sE + 2 * par.eps_grid + 1e-12);
            CHECK(gate.nearest(pjk - w * par.ell).dist <= par.sE + 2 * par.eps_grid + 1e-12);
        }
    }
    SECTION("empty initial estimate is rejected") {
        CHECK_THROWS_AS(refine(p, par, PointSet{}), InvalidInputError);
    }
}

TEST_CASE("high-frequency detector, handcrafted counts") {
    const double t = 0.01;  // sqrt(t) = 0.1
    HighFreqParams par;
    par.s = 0.5;
    par.eps_grid = 0.1;
    par.ell = 0.3;

    SECTION("every visit transitions onward: not flagged") {
        par.n0 = 1;
        // Visits to the strip ahead of the origin, successors far behind it.
        const SamplePath p =
            path_of({{0.15, 0.0}, {-5.0, 0.0}, {0.15, 0.0}, {-5.0, 0.0}, {0.15, 0.0}, {-5.0, 0.0}},
                    t);
        const EstimateSet est = recover_high_frequency(p, par);
        CHECK_FALSE(has_point(est, 0, 0));
    }
    SECTION("visits without transitions flag the point; the visit floor is literal") {
        const SamplePath p = path_of({{0.15, 0.0}, {0.15, 0.0}, {0.15, 0.0}, {0.15, 0.0}}, t);
        par.n0 = 3;
        EstimateSet est = recover_high_frequency(p, par);
        CHECK(has_point(est, 0, 0));
        for (const auto& f : est.flagged) {
            CHECK(f.N >= par.n0);
            CHECK(static_cast<double>(f.M) < par.s * static_cast<double>(f.N));
        }
        par.n0 = 4;  // N = 3 < n0: the guard must hold
        est = recover_high_frequency(p, par);
        CHECK(est.flagged.empty());
    }
}

TEST_CASE("estimators are deterministic and scale-equivariant") {
    // A short simulated path in the disk-with-barrier environment.
    const Environment env = Environment::create(
        impermeable_barrier(ClosedCurve::circle({0, 0}, 2.0)),
        {Barrier{ClosedCurve::circle({0, 0}, 1.0), 1.0, 1.0}});
    const double t = 0.01;
    SimConfig cfg;
    cfg.h = default_step(t, 1.0, 0.5);
    Rng rng(4242);
    const SamplePath p = simulate(env, {1.5, 0.0}, {-1}, 40.0, t, cfg, rng);

    FixedFreqParams fpar;
    fpar.s = 0.9 * std::sqrt(t);
    fpar.u = 2.0 * std::sqrt(t);
    fpar.eps_grid = 0.1 / (3.0 * std::sqrt(2.0));

    SECTION("identical inputs give identical estimates") {
        const EstimateSet a = recover_fixed_frequency(p, fpar);
        const EstimateSet b = recover_fixed_frequency(p, fpar);
        REQUIRE(a.boxes.size() == b.boxes.size());
        for (std::size_t i = 0; i < a.boxes.size(); ++i) {
            CHECK(a.boxes[i].j == b.boxes[i].j);
            CHECK(a.boxes[i].k == b.boxes[i].k);
            CHECK(a.boxes[i].w1_max == b.boxes[i].w1_max);
        }
    }
    SECTION("doubling all lengths maps the fixed-frequency flags exactly") {
        SamplePath p2 = p;
        for (Vec2& x : p2.samples) x = x * 2.0;
        p2.t = t * 4.0;  // time scales diffusively
        FixedFreqParams fpar2 = fpar;
        fpar2.s *= 2.0;
        fpar2.u *= 2.0;
        fpar2.eps_grid *= 2.0;
        const EstimateSet a = recover_fixed_frequency(p, fpar);
        const EstimateSet b = recover_fixed_frequency(p2, fpar2);
        REQUIRE(a.boxes.size() == b.boxes.size());
        for (std::size_t i = 0; i < a.boxes.size(); ++i) {
            CHECK(a.boxes[i].j == b.boxes[i].j);
            CHECK(a.boxes[i].k == b.boxes[i].k);
        }
    }
    SECTION("doubling all lengths maps the high-frequency flags exactly") {
        const double thf = 1e-4;
        SimConfig cfg2;
        cfg2.h = 2e-6;
        Rng rng2(7);
        const SamplePath hp = simulate(env, {1.2, 0.0}, {-1}, 2.0, thf, cfg2, rng2);
        HighFreqParams hpar;
        hpar.s = 0.02;
        hpar.eps_grid = std::sqrt(thf);
        hpar.ell = 6.0 * std::sqrt(thf);
        hpar.n0 = 8;
        SamplePath hp2 = hp;
        for (Vec2& x : hp2.samples) x = x * 2.0;
        hp2.t = thf * 4.0;
        HighFreqParams hpar2 = hpar;
        hpar2.eps_grid *= 2.0;
        hpar2.ell *= 2.0;
        const EstimateSet a = recover_high_frequency(hp, hpar);
        const EstimateSet b = recover_high_frequency(hp2, hpar2);
        REQUIRE(a.flagged.size() == b.flagged.size());
        for (std::size_t i = 0; i < a.flagged.size(); ++i) {
            CHECK(a.flagged[i].j == b.flagged[i].j);
            CHECK(a.flagged[i].k == b.flagged[i].k);
            CHECK(a.flagged[i].n == b.flagged[i].n);
            CHECK(a.flagged[i].N == b.flagged[i].N);
            CHECK(a.flagged[i].M == b.flagged[i].M);
        }
    }
}

TEST_CASE("default parameter scalings") {
    const RecoveryConstants c;
    SECTION("sensitivity scales as sqrt(t)") {
        const FixedFreqParams a = default_fixed_params(0.01, 1.0, 0.1, c);
        const FixedFreqParams b = default_fixed_params(0.02, 1.0, 0.1, c);
        CHECK(a.s == Catch::Approx(c.fixed_sens * 0.1).margin(1e-15));
        CHECK(b.s / a.s == Catch::Approx(std::sqrt(2.0)).margin(1e-12));
        CHECK(a.eps_grid == Catch::Approx(0.1 / (3.0 * std::sqrt(2.0))).margin(1e-15));
    }
    SECTION("visit floor scales as ln(T/t)") {
        const HighFreqParams p = default_high_freq_params(1e-4, 100.0, c);
        CHECK(p.n0 == static_cast<long>(std::ceil(c.hf_visits * std::log(1e6))));
        CHECK(p.ell == Catch::Approx(c.hf_len * std::log(1e6) * 1e-2).margin(1e-12));
    }
    SECTION("refinement grid scale is kappa ell^2") {
        const FixedFreqParams p = default_refine_params(0.01, 2.0, 0.1, 0.4, c);
        CHECK(p.eps_grid == Catch::Approx(2.0 * p.ell * p.ell).margin(1e-15));
        CHECK(p.sE == 0.4);
    }
    SECTION("overly large t warns but does not fail") {
        std::vector<std::string> warnings;
        (void)default_fixed_params(100.0, 1.0, 0.1, c, &warnings, 0.0, 1.0);
        REQUIRE(warnings.size() == 1);
        (void)default_fixed_params(1e-4, 1.0, 0.1, c, &warnings, 0.0, 1.0);
        REQUIRE(warnings.size() == 1);  // small t adds nothing
    }
}

TEST_CASE("hit_set") {
    const Barrier b{ClosedCurve::circle({0, 0}, 1.0), 1.0, 1.0};
    SECTION("trace never near the barrier") {
        const std::vector<Vec2> trace = {{0, 0}, {0.1, 0.1}, {0.2, 0.0}};
        CHECK(hit_set(trace, b, 1e-6).points.empty());
    }
    SECTION("exact barrier point is included and projected onto the curve") {
        const std::vector<Vec2> trace = {{0, 0}, {1.0, 0.0}, {0.5, 0.0}};
        const PointSet hs = hit_set(trace, b, 1e-6);
        REQUIRE(hs.points.size() == 1);
        CHECK(distance(hs.points[0], {1.0, 0.0}) < 1e-9);
    }
    SECTION("missing trace") { CHECK_THROWS_AS(hit_set({}, b, 1e-3), MissingTraceError); }
}

TEST_CASE("kernels pool across tracks without cross-track transitions") {
    const SamplePath a = path_of({{0, 0}, {1, 0}, {5, 5}}, 1.0);
    const SamplePath b = path_of({{5, 5}, {0, 0}, {2, 0}}, 1.0);
    const std::vector<SamplePath> paths = {a, b};
    const OrientedRect S = OrientedRect::axis_box({-0.1, -0.1}, {0.1, 0.1});
    const EmpiricalMeasure K = empirical_kernel(paths, S);
    // Successors of (0,0): (1,0) from track a, (2,0) from track b. The jump
    // (5,5) -> (5,5) across tracks must not exist.
    REQUIRE(K.points.size() == 2);
    CHECK(K.weights[0] == 0.5);
    // Box around (5,5): track a's visit is final (excluded); track b's visit
    // has successor (0,0). Concatenating tracks would fabricate a second
    // transition (5,5) -> (5,5); pooling must not.
    const OrientedRect S2 = OrientedRect::axis_box({4.9, 4.9}, {5.1, 5.1});
    const EmpiricalMeasure K2 = empirical_kernel(paths, S2);
    REQUIRE(K2.points.size() == 1);
    CHECK(K2.points[0] == Vec2{0, 0});
    CHECK(K2.weights[0] == 1.0);
}
