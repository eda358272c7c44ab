#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "snapout/constants.hpp"
#include "snapout/error.hpp"
#include "snapout/geometry.hpp"
#include "snapout/process.hpp"
#include "snapout/transport.hpp"

namespace snapout {

struct FixedFreqParams {
    double s = 0.0;         // sensitivity threshold (a length; W1 values are lengths)
    double eps_grid = 0.0;  // grid discretization scale
    double u = 0.0;         // truncation level
    double ell = 0.0;       // refinement rectangle half-length
    double sE = 0.0;        // current error bound fed into refinement
};

struct HighFreqParams {
    double s = 0.0;         // dimensionless ratio threshold
    double eps_grid = 0.0;  // grid scale
    double ell = 0.0;       // strip half-width
    long n0 = 1;            // minimum visit count
};

enum class Regime { FixedFreq, Refined, HighFreq };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::FixedFreq: return "fixed-freq";
        case Regime::Refined: return "refined";
        case Regime::HighFreq: return "high-freq";
    }
    return "?";
}

struct EstimateSet {
    Regime regime = Regime::FixedFreq;
    double eps_grid = 0.0;
    // Representative point set: box corners + centers for the fixed-frequency
    // detector, flagged grid points otherwise.
    PointSet points;

    struct BoxDiag {
        long j = 0, k = 0;
        double w1_max = 0.0;
    };
    struct PointDiag {
        long j = 0, k = 0;
        int n = 0;
        double value = 0.0;  // flagging W1 (refined) or M/N ratio (high-freq)
        long N = 0, M = 0;
    };
    std::vector<BoxDiag> boxes;      // fixed-freq
    std::vector<PointDiag> flagged;  // refined / high-freq
};

namespace detail {

inline std::uint64_t pack_cell(long j, long k) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(static_cast<std::int32_t>(j))) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(static_cast<std::int32_t>(k)));
}
inline long cell_j(std::uint64_t key) {
    return static_cast<long>(static_cast<std::int32_t>(key >> 32));
}
inline long cell_k(std::uint64_t key) {
    return static_cast<long>(static_cast<std::int32_t>(key & 0xffffffffu));
}

// All (X_it, X_(i+1)t) transition pairs pooled across tracks; index sets are
// unioned and no cross-track transitions are fabricated.
struct TransitionTable {
    std::vector<Vec2> from, to;
    PointGrid grid;  // over `from`

    explicit TransitionTable(std::span<const SamplePath> paths) {
        std::size_t total = 0;
        for (const SamplePath& p : paths) total += p.transition_count();
        from.reserve(total);
        to.reserve(total);
        for (const SamplePath& p : paths)
            for (std::size_t i = 0; i + 1 < p.samples.size(); ++i) {
                from.push_back(p.samples[i]);
                to.push_back(p.samples[i + 1]);
            }
        grid = PointGrid(from);
    }

    EmpiricalMeasure kernel_in(const OrientedRect& rect) const {
        std::vector<Vec2> succ;
        grid.for_each_within(rect.center, rect.circumradius() + 1e-12, [&](std::size_t i) {
            if (rect.contains(grid.points()[i])) succ.push_back(to[i]);
        });
        return make_kernel(std::move(succ));
    }

    static EmpiricalMeasure make_kernel(std::vector<Vec2> succ) {
        if (succ.empty()) return EmpiricalMeasure::zero();
        // Merge coincident successors; exact, and it shrinks the OT instance.
        std::sort(succ.begin(), succ.end(), [](Vec2 a, Vec2 b) {
            return a.x < b.x || (a.x == b.x && a.y < b.y);
        });
        EmpiricalMeasure m;
        const double w = 1.0 / static_cast<double>(succ.size());
        for (std::size_t i = 0; i < succ.size();) {
            std::size_t j = i;
            while (j < succ.size() && succ[j] == succ[i]) ++j;
            m.points.push_back(succ[i]);
            m.weights.push_back(w * static_cast<double>(j - i));
            i = j;
        }
        return m;
    }
};

inline double common_intersample(std::span<const SamplePath> paths) {
    if (paths.empty()) throw InvalidInputError("no sample paths given");
    const double t = paths.front().t;
    for (const SamplePath& p : paths)
        if (std::abs(p.t - t) > 1e-12 * std::max(1.0, t))
            throw InvalidInputError("sample paths have differing intersample times");
    return t;
}

}  // namespace detail

// Empirical transition kernel of the region S: uniform over the successors
// of the in-window samples, or the zero measure when S was never visited.
inline EmpiricalMeasure empirical_kernel(const SamplePath& path, const OrientedRect& S) {
    std::vector<Vec2> succ;
    for (std::size_t i = 0; i + 1 < path.samples.size(); ++i)
        if (S.contains(path.samples[i])) succ.push_back(path.samples[i + 1]);
    return detail::TransitionTable::make_kernel(std::move(succ));
}

inline EmpiricalMeasure empirical_kernel(std::span<const SamplePath> paths, const OrientedRect& S) {
    std::vector<Vec2> succ;
    for (const SamplePath& path : paths)
        for (std::size_t i = 0; i + 1 < path.samples.size(); ++i)
            if (S.contains(path.samples[i])) succ.push_back(path.samples[i + 1]);
    return detail::TransitionTable::make_kernel(std::move(succ));
}

// Kernel-discontinuity detector over the grid eps * Z^2: a box is flagged
// when its empirical transition kernel is at truncated-W1 distance >= s from
// some box within Chebyshev distance 2. The sweep covers every box whose
// 5x5 neighborhood holds a sample; all other boxes pair zero measures and
// can never be flagged.
inline EstimateSet recover_fixed_frequency(std::span<const SamplePath> paths,
                                           const FixedFreqParams& p) {
    if (!(p.eps_grid > 0.0) || !(p.s > 0.0) || !(p.u > 0.0))
        throw InvalidInputError("fixed-frequency parameters must be positive");
    detail::common_intersample(paths);
    const double eps = p.eps_grid;

    // Successor lists per occupied box.
    std::unordered_map<std::uint64_t, std::vector<Vec2>> succ_by_box;
    std::unordered_set<std::uint64_t> sample_boxes;
    for (const SamplePath& path : paths) {
        for (std::size_t i = 0; i < path.samples.size(); ++i) {
            const Vec2 x = path.samples[i];
            const long j = static_cast<long>(std::floor(x.x / eps));
            const long k = static_cast<long>(std::floor(x.y / eps));
            sample_boxes.insert(detail::pack_cell(j, k));
            if (i + 1 < path.samples.size())
                succ_by_box[detail::pack_cell(j, k)].push_back(path.samples[i + 1]);
        }
    }

    std::unordered_map<std::uint64_t, EmpiricalMeasure> kernels;
    kernels.reserve(succ_by_box.size());
    for (auto& [key, succ] : succ_by_box)
        kernels.emplace(key, detail::TransitionTable::make_kernel(std::move(succ)));
    const EmpiricalMeasure zero = EmpiricalMeasure::zero();
    auto kernel_of = [&](long j, long k) -> const EmpiricalMeasure& {
        const auto it = kernels.find(detail::pack_cell(j, k));
        return it == kernels.end() ? zero : it->second;
    };

    std::vector<std::uint64_t> candidates;
    {
        std::unordered_set<std::uint64_t> cand;
        for (std::uint64_t key : sample_boxes) {
            const long j = detail::cell_j(key), k = detail::cell_k(key);
            for (long hj = -2; hj <= 2; ++hj)
                for (long hk = -2; hk <= 2; ++hk) cand.insert(detail::pack_cell(j + hj, k + hk));
        }
        candidates.assign(cand.begin(), cand.end());
        std::sort(candidates.begin(), candidates.end());
    }

    // Each unordered box pair is solved once.
    struct PairHash {
        std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& q) const {
            return std::hash<std::uint64_t>()(q.first * 0x9e3779b97f4a7c15ull ^ q.second);
        }
    };
    std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, double, PairHash> pair_cache;
    auto pair_w1 = [&](long j0, long k0, long j1, long k1) {
        std::uint64_t a = detail::pack_cell(j0, k0), b = detail::pack_cell(j1, k1);
        if (a > b) std::swap(a, b);
        const auto key = std::make_pair(a, b);
        const auto it = pair_cache.find(key);
        if (it != pair_cache.end()) return it->second;
        const double w = truncated_w1(kernel_of(detail::cell_j(a), detail::cell_k(a)),
                                      kernel_of(detail::cell_j(b), detail::cell_k(b)), p.u);
        pair_cache.emplace(key, w);
        return w;
    };

    EstimateSet out;
    out.regime = Regime::FixedFreq;
    out.eps_grid = eps;
    for (std::uint64_t key : candidates) {
        const long j = detail::cell_j(key), k = detail::cell_k(key);
        double wmax = 0.0;
        for (long hj = -2; hj <= 2; ++hj)
            for (long hk = -2; hk <= 2; ++hk) {
                if (hj == 0 && hk == 0) continue;
                wmax = std::max(wmax, pair_w1(j, k, j + hj, k + hk));
            }
        if (wmax >= p.s) {
            out.boxes.push_back({j, k, wmax});
            const double x0 = j * eps, y0 = k * eps;
            out.points.points.push_back({x0, y0});
            out.points.points.push_back({x0 + eps, y0});
            out.points.points.push_back({x0, y0 + eps});
            out.points.points.push_back({x0 + eps, y0 + eps});
            out.points.points.push_back({x0 + 0.5 * eps, y0 + 0.5 * eps});
        }
    }
    return out;
}

inline EstimateSet recover_fixed_frequency(const SamplePath& path, const FixedFreqParams& p) {
    return recover_fixed_frequency(std::span<const SamplePath>(&path, 1), p);
}

// One refinement sweep: grid points whose +-ell probes in some direction
// land near the current estimate are kept only if the kernels of the five
// parallel rectangles across the probe direction show a discontinuity.
inline EstimateSet refine(std::span<const SamplePath> paths, const FixedFreqParams& p,
                          const PointSet& initial) {
    if (initial.points.empty()) throw InvalidInputError("refine: initial estimate is empty");
    if (!(p.eps_grid > 0.0) || !(p.ell > 0.0) || !(p.s > 0.0) || !(p.u > 0.0) || !(p.sE > 0.0))
        throw InvalidInputError("refine parameters must be positive");
    detail::common_intersample(paths);

    const double eps = p.eps_grid, ell = p.ell, gate = p.sE + 2.0 * eps;
    const detail::TransitionTable table(paths);
    const PointGrid estimate_grid(initial.points);

    Aabb box;
    for (const Vec2& q : initial.points) box.grow(q);
    const double reach = ell + gate;
    const long j0 = static_cast<long>(std::floor((box.lo.x - reach) / eps));
    const long j1 = static_cast<long>(std::ceil((box.hi.x + reach) / eps));
    const long k0 = static_cast<long>(std::floor((box.lo.y - reach) / eps));
    const long k1 = static_cast<long>(std::ceil((box.hi.y + reach) / eps));

    const int ndir = static_cast<int>(std::floor(2.0 * M_PI * ell / eps)) + 1;

    EstimateSet out;
    out.regime = Regime::Refined;
    out.eps_grid = eps;
    for (long j = j0; j <= j1; ++j) {
        for (long k = k0; k <= k1; ++k) {
            const Vec2 pjk{j * eps, k * eps};
            if (estimate_grid.nearest(pjk).dist > reach) continue;
            for (int n = 0; n < ndir; ++n) {
                const double ang = n * eps / ell;
                const Vec2 w{std::cos(ang), std::sin(ang)};
                if (estimate_grid.nearest(pjk + w * ell).dist > gate) continue;
                if (estimate_grid.nearest(pjk - w * ell).dist > gate) continue;
                const Vec2 wp = perp(w);
                OrientedRect rect;
                rect.axis = w;
                rect.half_along = ell / 10.0;
                rect.half_across = eps / 2.0;
                rect.center = pjk;
                const EmpiricalMeasure center_kernel = table.kernel_in(rect);
                double wmax = 0.0;
                for (int h = -2; h <= 2; ++h) {
                    if (h == 0) continue;
                    rect.center = pjk + wp * (h * eps);
                    wmax = std::max(wmax, truncated_w1(center_kernel, table.kernel_in(rect), p.u));
                }
                if (wmax >= p.s) {
                    out.flagged.push_back({j, k, n, wmax, 0, 0});
                    out.points.points.push_back(pjk);
                    break;  // p_jk is in the output; later directions cannot change that
                }
            }
        }
    }
    return out;
}

inline EstimateSet refine(const SamplePath& path, const FixedFreqParams& p, const PointSet& initial) {
    return refine(std::span<const SamplePath>(&path, 1), p, initial);
}

// Iterated refinement: halve the error bound each round until sE/2 <= eps_target.
inline EstimateSet refine_until(std::span<const SamplePath> paths, FixedFreqParams p,
                                const PointSet& initial, double eps_target, int max_rounds = 64) {
    EstimateSet est;
    est.regime = Regime::Refined;
    est.points = initial;
    for (int round = 0; round < max_rounds; ++round) {
        est = refine(paths, p, est.points);
        if (est.points.points.empty()) break;
        if (p.sE / 2.0 <= eps_target) break;
        p.sE /= 2.0;
    }
    return est;
}

// Visit/transition detector for high-frequency data. For each grid point and
// direction, N counts samples in the rectangular strip R+ ahead of the point
// and M counts one-step transitions from R+ into the half-space H- behind
// it; the point is flagged when N >= n0 and M/N < s. Membership in R+ and
// H- is evaluated in polar form so each sample contributes an interval of
// direction indices.
inline EstimateSet recover_high_frequency(std::span<const SamplePath> paths,
                                          const HighFreqParams& p) {
    if (!(p.eps_grid > 0.0) || !(p.ell > 0.0) || !(p.s > 0.0) || p.n0 < 1)
        throw InvalidInputError("high-frequency parameters must be positive");
    const double t = detail::common_intersample(paths);
    const double rt = std::sqrt(t);
    if (p.ell < rt) throw InvalidInputError("high-frequency ell must be at least sqrt(t)");
    const double eps = p.eps_grid, ell = p.ell;
    const int ndir = static_cast<int>(std::floor(2.0 * M_PI * ell / eps)) + 1;
    const double step = eps / ell;  // angular spacing of the direction grid

    const detail::TransitionTable table(paths);

    // Candidate grid points: square dilation of the occupied cells by
    // ceil(3 ell / eps). Points farther than ell + 2 sqrt(t) <= 3 ell from
    // every sample have N = 0 for all directions and can never be flagged,
    // so the sweep is equivalent to the unrestricted one.
    const long rad = static_cast<long>(std::ceil(3.0 * ell / eps));
    std::unordered_set<std::uint64_t> occupied;
    for (const Vec2& x : table.from)
        occupied.insert(detail::pack_cell(static_cast<long>(std::floor(x.x / eps)),
                                          static_cast<long>(std::floor(x.y / eps))));
    std::unordered_set<std::uint64_t> cand_set;
    for (std::uint64_t key : occupied) {
        const long j = detail::cell_j(key), k = detail::cell_k(key);
        for (long dj = -rad; dj <= rad; ++dj)
            for (long dk = -rad; dk <= rad; ++dk)
                cand_set.insert(detail::pack_cell(j + dj, k + dk));
    }
    std::vector<std::uint64_t> candidates(cand_set.begin(), cand_set.end());
    std::sort(candidates.begin(), candidates.end());

    const double r_query = ell + 2.0 * rt;
    std::vector<long> dN(ndir + 1), dM(ndir + 1);

    // Adds +-1 marks for direction angles in [lo, hi] (radians, any range of
    // width < 2 pi).
    auto mark = [&](std::vector<long>& diff, double lo, double hi) {
        if (hi < lo) return;
        double base = std::floor(lo / (2.0 * M_PI)) * 2.0 * M_PI;
        lo -= base;
        hi -= base;
        for (int piece = 0; piece < 2; ++piece) {
            const double a = piece == 0 ? lo : 0.0;
            const double b = piece == 0 ? std::min(hi, 2.0 * M_PI) : hi - 2.0 * M_PI;
            if (b < a) continue;
            const int nlo = std::max(0, static_cast<int>(std::ceil(a / step - 1e-12)));
            const int nhi = std::min(ndir - 1, static_cast<int>(std::floor(b / step + 1e-12)));
            if (nlo > nhi) continue;
            diff[nlo] += 1;
            diff[nhi + 1] -= 1;
        }
    };

    EstimateSet out;
    out.regime = Regime::HighFreq;
    out.eps_grid = eps;
    for (std::uint64_t key : candidates) {
        const long j = detail::cell_j(key), k = detail::cell_k(key);
        const Vec2 pjk{j * eps, k * eps};
        std::fill(dN.begin(), dN.end(), 0);
        std::fill(dM.begin(), dM.end(), 0);
        bool any = false;
        table.grid.for_each_within(pjk, r_query, [&](std::size_t i) {
            const Vec2 d = table.grid.points()[i] - pjk;
            const double r = d.norm();
            if (r < rt) return;
            // X in R+(p, v): r cos(phi - alpha) in [rt, 2 rt] and
            // r |sin(phi - alpha)| <= ell.
            const double psi_lo = std::acos(std::min(2.0 * rt / r, 1.0));
            const double psi_hi =
                std::min(std::acos(std::min(rt / r, 1.0)), std::asin(std::min(ell / r, 1.0)));
            if (psi_hi < psi_lo) return;
            const double phi = std::atan2(d.y, d.x);
            any = true;
            mark(dN, phi - psi_hi, phi - psi_lo);
            if (psi_lo > 0.0) mark(dN, phi + psi_lo, phi + psi_hi);

            // Successor in H-(p, v): r' cos(phi' - alpha) < -rt.
            const Vec2 dsucc = table.to[i] - pjk;
            const double rs = dsucc.norm();
            if (rs <= rt) return;
            const double A = std::acos(std::min(rt / rs, 1.0));  // half-width around pi
            if (A <= 0.0) return;
            const double phis = std::atan2(dsucc.y, dsucc.x);
            // Successor arc: alpha in (phis + pi - A, phis + pi + A).
            // Intersect with the two X arcs.
            const double slo = phis + M_PI - A, shi = phis + M_PI + A;
            auto intersect_mark = [&](double alo, double ahi) {
                // Bring the successor arc near [alo, ahi] and clip.
                double blo = slo, bhi = shi;
                const double shift =
                    std::round(((alo + ahi) * 0.5 - (blo + bhi) * 0.5) / (2.0 * M_PI)) * 2.0 * M_PI;
                blo += shift;
                bhi += shift;
                mark(dM, std::max(alo, blo), std::min(ahi, bhi));
                mark(dM, std::max(alo, blo + 2.0 * M_PI), std::min(ahi, bhi + 2.0 * M_PI));
                mark(dM, std::max(alo, blo - 2.0 * M_PI), std::min(ahi, bhi - 2.0 * M_PI));
            };
            intersect_mark(phi - psi_hi, phi - psi_lo);
            if (psi_lo > 0.0) intersect_mark(phi + psi_lo, phi + psi_hi);
        });
        if (!any) continue;
        long N = 0, M = 0;
        for (int n = 0; n < ndir; ++n) {
            N += dN[n];
            M += dM[n];
            if (N >= p.n0 && static_cast<double>(M) < p.s * static_cast<double>(N)) {
                out.flagged.push_back(
                    {j, k, n, static_cast<double>(M) / static_cast<double>(N), N, M});
                out.points.points.push_back(pjk);
                break;
            }
        }
    }
    return out;
}

inline EstimateSet recover_high_frequency(const SamplePath& path, const HighFreqParams& p) {
    return recover_high_frequency(std::span<const SamplePath>(&path, 1), p);
}

// Emits a warning when the intersample time exceeds the validity scale of
// the theory; the algorithms still run.
inline std::optional<std::string> sampling_condition_warning(double t, double kappa,
                                                             double lambda_max, double rho) {
    double bound = std::min(1.0 / (kappa * kappa), rho * rho);
    if (lambda_max > 0.0) bound = std::min(bound, 1.0 / (lambda_max * lambda_max));
    if (t > bound) {
        return "intersample time t = " + std::to_string(t) +
               " exceeds the theory's validity scale min(1/kappa^2, 1/lambda_max^2, rho^2) = " +
               std::to_string(bound);
    }
    return std::nullopt;
}

inline FixedFreqParams default_fixed_params(double t, double kappa, double eps_target,
                                            const RecoveryConstants& c = {},
                                            std::vector<std::string>* warnings = nullptr,
                                            double lambda_max = 0.0, double rho = 1.0) {
    if (!(t > 0.0) || !(kappa > 0.0) || !(eps_target > 0.0))
        throw InvalidInputError("default params: inputs must be positive");
    FixedFreqParams p;
    p.s = c.fixed_sens * std::sqrt(t);
    p.u = c.fixed_trunc * std::sqrt(t);
    p.eps_grid = eps_target / (3.0 * std::sqrt(2.0));
    p.ell = c.refine_len * std::sqrt(eps_target / kappa);
    p.sE = eps_target;
    if (warnings)
        if (auto w = sampling_condition_warning(t, kappa, lambda_max, rho)) warnings->push_back(*w);
    return p;
}

// Refinement grid scale: eps = kappa * ell^2, per the refinement scaling.
inline FixedFreqParams default_refine_params(double t, double kappa, double eps_target, double sE,
                                             const RecoveryConstants& c = {},
                                             std::vector<std::string>* warnings = nullptr,
                                             double lambda_max = 0.0, double rho = 1.0) {
    FixedFreqParams p = default_fixed_params(t, kappa, eps_target, c, warnings, lambda_max, rho);
    p.eps_grid = kappa * p.ell * p.ell;
    p.sE = sE;
    return p;
}

inline HighFreqParams default_high_freq_params(double t, double T, const RecoveryConstants& c = {},
                                               std::vector<std::string>* warnings = nullptr,
                                               double kappa = 1.0, double lambda_max = 0.0,
                                               double rho = 1.0) {
    if (!(t > 0.0) || !(T > t)) throw InvalidInputError("default params: need T > t > 0");
    const double logTt = std::log(T / t);
    HighFreqParams p;
    p.s = c.hf_ratio;
    p.eps_grid = c.hf_grid * std::sqrt(t);
    p.ell = std::max(std::sqrt(t), c.hf_len * logTt * std::sqrt(t));
    p.n0 = std::max(1L, static_cast<long>(std::ceil(c.hf_visits * logTt)));
    if (warnings)
        if (auto w = sampling_condition_warning(t, kappa, lambda_max, rho)) warnings->push_back(*w);
    return p;
}

// Barrier pieces actually hit by a dense trace: trace points within tol of
// the barrier, projected onto it.
inline PointSet hit_set(const std::vector<Vec2>& dense_trace, const Barrier& barrier, double tol) {
    if (dense_trace.empty()) throw MissingTraceError("hit_set: no dense trace");
    PointSet out;
    for (const Vec2& x : dense_trace) {
        const auto n = barrier.curve.nearest(x);
        if (n.dist <= tol) out.points.push_back(n.point);
    }
    return out;
}

}  // namespace snapout
