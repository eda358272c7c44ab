#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "snapout/error.hpp"
#include "snapout/geometry.hpp"
#include "snapout/rng.hpp"
#include "snapout/vec.hpp"

namespace snapout {

struct SimConfig {
    double h = 0.0;        // Euler step; <= 0 means derive from t (see default_step)
    double burn_in = 0.0;  // time discarded before recording
    bool record_dense = false;
    std::uint64_t seed = 1;
};

// Instantaneous state. Index 0 is the outer barrier (side fixed at +1,
// infinite switch budget); inner barriers follow in order.
struct ProcessState {
    Vec2 position;
    std::vector<int> sides;
    std::vector<double> local_times;
    std::vector<double> switch_budget;
    double clock = 0.0;
};

struct SamplePath {
    double t = 0.0;  // intersample time
    double T = 0.0;  // observation period
    std::vector<Vec2> samples;
    std::uint64_t seed = 0;
    std::vector<Vec2> dense;  // optional per-step trace (empty if not recorded)
    double dense_h = 0.0;

    std::size_t transition_count() const { return samples.empty() ? 0 : samples.size() - 1; }
};

inline int side_sign(Side s) { return s == Side::Negative ? -1 : +1; }

inline double switch_rate(const Barrier& b, int side) {
    // The side process leaves state +1 at rate lambda_minus and state -1 at
    // rate lambda_plus.
    return side > 0 ? b.lambda_minus : b.lambda_plus;
}

inline ProcessState make_state(const Environment& env, Vec2 x0, const std::vector<int>& inner_sides,
                               Rng& rng) {
    const std::size_t m = env.inner_count();
    if (inner_sides.size() != m && inner_sides.size() != m + 1)
        throw InvalidInitialConditionError("sides vector has wrong length");
    const std::size_t off = inner_sides.size() == m + 1 ? 1 : 0;  // allow caller to pass s_0 too

    const Side outer_side = env.outer().curve.side_of(x0);
    if (outer_side == Side::Negative)
        throw InvalidInitialConditionError("initial position outside the outer barrier");

    ProcessState st;
    st.position = x0;
    st.sides.assign(m + 1, +1);
    st.local_times.assign(m + 1, 0.0);
    st.switch_budget.assign(m + 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < m; ++i) {
        const int s = inner_sides[off + i];
        if (s != 1 && s != -1) throw InvalidInitialConditionError("side flags must be +1 or -1");
        const Side actual = env.inner()[i].curve.side_of(x0);
        if (actual != Side::On && side_sign(actual) != s)
            throw InvalidInitialConditionError("side flag inconsistent with the initial position");
        st.sides[i + 1] = s;
        st.switch_budget[i + 1] = rng.exponential(switch_rate(env.inner()[i], s));
    }
    return st;
}

struct StepInfo {
    Vec2 increment;            // the Gaussian proposal increment
    double penetration = 0.0;  // total projected depth this step
    bool side_flip = false;
    bool clipped = false;  // chord was cut at a tunnelling crossing
};

// Euler scheme for the reflected process: free Gaussian proposal, Skorokhod
// projection onto any barrier whose forbidden side the proposal enters, with
// the penetration depth credited to local time. An inner barrier whose
// remaining exponential budget is consumed flips its side and lets the
// proposal stand. Holds per-barrier lower bounds on the distance to the
// current position so far-from-boundary steps skip all geometry queries.
class Stepper {
public:
    explicit Stepper(const Environment& env) : env_(&env) {
        dist_lb_.assign(env.barrier_count(), 0.0);
    }

    void reset(const ProcessState& st) {
        for (std::size_t i = 0; i < dist_lb_.size(); ++i)
            dist_lb_[i] = env_->barrier(i).curve.nearest(st.position).dist;
    }

    void step(ProcessState& st, double h, Rng& rng, StepInfo* info = nullptr) {
        const Vec2 incr = rng.gaussian2() * std::sqrt(h);
        if (info) *info = StepInfo{incr, 0.0, false, false};
        const Vec2 start = st.position;
        Vec2 q = start + incr;
        const double step_len = incr.norm();

        bool any_near = false;
        for (double lb : dist_lb_)
            if (lb <= step_len) any_near = true;

        if (!any_near) {
            st.position = q;
            st.clock += h;
            for (double& lb : dist_lb_) lb -= step_len;
            return;
        }

        bool interacted = false;
        fresh_dist_.assign(dist_lb_.size(), -1.0);
        for (int pass = 0;; ++pass) {
            if (pass >= 8)
                throw StepTooLargeError("step: containment not restored after reflections");
            bool changed = false;
            for (std::size_t i = 0; i < env_->barrier_count(); ++i) {
                // Everything the step can touch lies within 2*step_len of the
                // start; skip clearly unreachable barriers on the first pass.
                if (pass == 0 && dist_lb_[i] > 4.0 * step_len) continue;
                const Barrier& bar = env_->barrier(i);
                const ClosedCurve::Nearest near = bar.curve.nearest(q);
                fresh_dist_[i] = near.dist;
                const double on_eps = 1e-13 * std::max(1.0, bar.curve.diameter());
                Side side = near.dist < on_eps ? Side::On : bar.curve.classify(near, q);
                const bool forbidden = side != Side::On && side_sign(side) != st.sides[i];
                if (forbidden) {
                    const double d = near.dist;
                    if (i > 0 && st.switch_budget[i] <= d) {
                        // Budget consumed: credit local time up to the budget,
                        // flip, and let the proposal stand on the new side.
                        st.local_times[i] += st.switch_budget[i];
                        st.sides[i] = -st.sides[i];
                        st.switch_budget[i] =
                            rng.exponential(switch_rate(bar, st.sides[i]));
                        if (info) info->side_flip = true;
                    } else {
                        st.local_times[i] += d;
                        if (i > 0) st.switch_budget[i] -= d;
                        // Projected point, pulled a hair onto the allowed side
                        // so later chord tests do not see a phantom crossing.
                        // The offset sits far below the "on" tolerance.
                        q = near.point + near.normal * (st.sides[i] * on_eps);
                        changed = true;
                        if (info) info->penetration += d;
                    }
                    interacted = true;
                } else if (side != Side::On) {
                    // Endpoint is allowed; catch chords that tunnel through
                    // the barrier and back (two crossings). A tunnelling
                    // chord leaves the endpoint within one chord length of
                    // the barrier. A single-crossing count here is a
                    // floating-point artifact of a start point on the curve
                    // and is ignored.
                    if (near.dist <= step_len &&
                        bar.curve.chord_crossings(start, q) >= 2) {
                        const double tc = bar.curve.first_crossing(start, q);
                        if (tc <= 1.0) {
                            q = start + (q - start) * (tc * (1.0 - 1e-9));
                            changed = true;
                            interacted = true;
                            if (info) info->clipped = true;
                        }
                    }
                }
            }
            if (!changed) break;
        }

        st.position = q;
        st.clock += h;
        if (interacted) {
            reset(st);
        } else {
            // No projections, so q is the proposal every query saw; fresh
            // distances are exact and the rest decay by the moved length.
            const double moved = (q - start).norm();
            for (std::size_t i = 0; i < dist_lb_.size(); ++i)
                dist_lb_[i] = fresh_dist_[i] >= 0.0 ? fresh_dist_[i]
                                                    : std::max(0.0, dist_lb_[i] - moved);
        }
    }

private:
    const Environment* env_;
    std::vector<double> dist_lb_;
    std::vector<double> fresh_dist_;
};

// Single-step convenience wrapper matching the value-semantics contract.
inline ProcessState step(const ProcessState& state, const Environment& env, double h, Rng& rng,
                         StepInfo* info = nullptr) {
    if (!(h > 0.0)) throw InvalidInputError("step size must be positive");
    ProcessState out = state;
    Stepper stepper(env);
    stepper.reset(out);
    stepper.step(out, h, rng, info);
    return out;
}

// Default Euler step: t/50, capped at (min(1/kappa, rho)/20)^2.
inline double default_step(double t, double kappa, double rho) {
    const double cap = std::pow(std::min(1.0 / kappa, rho) / 20.0, 2);
    return std::min(t / 50.0, cap);
}

inline SamplePath simulate(const Environment& env, Vec2 x0, const std::vector<int>& inner_sides,
                           double T, double t, const SimConfig& cfg, Rng& rng) {
    if (!(t > 0.0)) throw InvalidInputError("intersample time must be positive");
    if (T < 0.0) throw InvalidInputError("observation period must be nonnegative");
    double h = cfg.h;
    if (!(h > 0.0)) throw InvalidInputError("simulate: cfg.h must be positive");
    if (h > t) throw InvalidInputError("simulate: step size must not exceed the intersample time");

    ProcessState st = make_state(env, x0, inner_sides, rng);
    Stepper stepper(env);
    stepper.reset(st);

    if (cfg.burn_in > 0.0) {
        const long nb = static_cast<long>(std::ceil(cfg.burn_in / h - 1e-12));
        const double hb = cfg.burn_in / static_cast<double>(nb);
        for (long k = 0; k < nb; ++k) stepper.step(st, hb, rng);
        st.clock = 0.0;
    }

    const long nsub = std::max(1L, static_cast<long>(std::ceil(t / h - 1e-12)));
    const double hs = t / static_cast<double>(nsub);
    const long nsamples = static_cast<long>(std::floor(T / t));

    SamplePath path;
    path.t = t;
    path.T = T;
    path.seed = cfg.seed;
    path.samples.reserve(nsamples + 1);
    path.samples.push_back(st.position);
    if (cfg.record_dense) {
        path.dense_h = hs;
        path.dense.reserve(nsamples * nsub + 1);
        path.dense.push_back(st.position);
    }
    for (long k = 0; k < nsamples; ++k) {
        for (long s = 0; s < nsub; ++s) {
            stepper.step(st, hs, rng);
            if (cfg.record_dense) path.dense.push_back(st.position);
        }
        path.samples.push_back(st.position);
    }
    return path;
}

// Stationary initial condition. For m = 0 the stationary law is uniform on
// the domain (rejection sampling); for m > 0 a uniform draw is followed by a
// burn-in of cfg.burn_in, a documented approximation.
inline std::pair<Vec2, std::vector<int>> stationary_start(const Environment& env,
                                                          const SimConfig& cfg, Rng& rng) {
    const Aabb& box = env.outer().curve.bbox();
    Vec2 p;
    bool ok = false;
    for (long attempt = 0; attempt < 1000000; ++attempt) {
        p = {rng.uniform(box.lo.x, box.hi.x), rng.uniform(box.lo.y, box.hi.y)};
        if (env.outer().curve.side_of(p) != Side::Positive) continue;
        bool on_inner = false;
        for (const Barrier& b : env.inner())
            if (b.curve.side_of(p) == Side::On) on_inner = true;
        if (on_inner) continue;
        ok = true;
        break;
    }
    if (!ok) throw DegenerateDomainError("stationary_start: rejection sampling failed");

    std::vector<int> sides(env.inner_count() + 1, +1);
    for (std::size_t i = 0; i < env.inner_count(); ++i)
        sides[i + 1] = side_sign(env.inner()[i].curve.side_of(p));

    if (env.inner_count() > 0 && cfg.burn_in > 0.0) {
        double h = cfg.h;
        if (!(h > 0.0)) throw InvalidInputError("stationary_start: cfg.h must be positive");
        ProcessState st = make_state(env, p, std::vector<int>(sides.begin() + 1, sides.end()), rng);
        Stepper stepper(env);
        stepper.reset(st);
        const long nb = static_cast<long>(std::ceil(cfg.burn_in / h - 1e-12));
        const double hb = cfg.burn_in / static_cast<double>(nb);
        for (long k = 0; k < nb; ++k) stepper.step(st, hb, rng);
        return {st.position, st.sides};
    }
    return {p, sides};
}

// Occupation-time estimate of the local time from a dense trace:
// (1 / 2 eps) * h * #{steps within eps of the barrier}. Cross-validation
// oracle for the accumulated local times.
inline double local_time_estimate(const std::vector<Vec2>& dense_trace, double h,
                                  const Barrier& barrier, double eps) {
    if (dense_trace.empty()) throw MissingTraceError("local_time_estimate: no dense trace");
    if (!(eps > 0.0)) throw InvalidInputError("eps must be positive");
    long count = 0;
    for (std::size_t k = 0; k + 1 < dense_trace.size(); ++k)
        if (barrier.curve.nearest(dense_trace[k]).dist < eps) ++count;
    return h * static_cast<double>(count) / (2.0 * eps);
}

}  // namespace snapout
