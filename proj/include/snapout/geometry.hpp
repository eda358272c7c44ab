#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "snapout/error.hpp"
#include "snapout/grid_index.hpp"
#include "snapout/vec.hpp"

namespace snapout {

enum class Side { Positive, Negative, On };

inline constexpr int kDefaultCurveResolution = 2048;
inline constexpr double kOnToleranceFactor = 1e-9;  // relative to curve diameter

// Smooth simple closed curve. All queries route through a cached polyline;
// the polyline is closed (front() == back()) and oriented counterclockwise,
// so the bounded component ("positive side") lies to the left of travel.
// Immutable after construction; copies share the polyline.
class ClosedCurve {
public:
    enum class Kind { Circle, Ellipse, PeriodicSpline };

    static ClosedCurve circle(Vec2 center, double radius, int resolution = kDefaultCurveResolution) {
        if (!(radius > 0.0)) throw InvalidCurveError("circle radius must be positive");
        resolution = std::max(resolution, 8);
        std::vector<Vec2> pts;
        pts.reserve(resolution + 1);
        for (int k = 0; k < resolution; ++k) {
            const double th = 2.0 * M_PI * k / resolution;
            pts.push_back(center + Vec2{radius * std::cos(th), radius * std::sin(th)});
        }
        pts.push_back(pts.front());
        ClosedCurve c(Kind::Circle, std::move(pts));
        c.circle_radius_ = radius;
        c.finish();
        return c;
    }

    static ClosedCurve ellipse(Vec2 center, double a, double b, double rotation,
                               int resolution = kDefaultCurveResolution) {
        if (!(a > 0.0) || !(b > 0.0)) throw InvalidCurveError("ellipse semi-axes must be positive");
        resolution = std::max(resolution, 8);
        const double cr = std::cos(rotation), sr = std::sin(rotation);
        std::vector<Vec2> pts;
        pts.reserve(resolution + 1);
        for (int k = 0; k < resolution; ++k) {
            const double th = 2.0 * M_PI * k / resolution;
            const double ex = a * std::cos(th), ey = b * std::sin(th);
            pts.push_back(center + Vec2{cr * ex - sr * ey, sr * ex + cr * ey});
        }
        pts.push_back(pts.front());
        ClosedCurve c(Kind::Ellipse, std::move(pts));
        c.ellipse_a_ = a;
        c.ellipse_b_ = b;
        c.finish();
        return c;
    }

    // Periodic C2 cubic spline interpolating the control points, uniform
    // parameterization. Polyline vertices at the knots coincide with the
    // control points exactly.
    static ClosedCurve periodic_spline(const std::vector<Vec2>& control,
                                       int resolution = kDefaultCurveResolution) {
        const std::size_t m = control.size();
        if (m < 3) throw InvalidCurveError("periodic spline needs at least 3 control points");
        const std::vector<double> mx = spline_second_derivatives(control, 0);
        const std::vector<double> my = spline_second_derivatives(control, 1);
        const int per = std::max(2, static_cast<int>((resolution + m - 1) / m));
        std::vector<Vec2> pts;
        pts.reserve(m * per + 1);
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = (i + 1) % m;
            for (int k = 0; k < per; ++k) {
                if (k == 0) {
                    pts.push_back(control[i]);
                    continue;
                }
                const double u = static_cast<double>(k) / per;
                const double a = 1.0 - u;
                const double cx = mx[i] * a * a * a / 6.0 + mx[j] * u * u * u / 6.0 +
                                  (control[i].x - mx[i] / 6.0) * a + (control[j].x - mx[j] / 6.0) * u;
                const double cy = my[i] * a * a * a / 6.0 + my[j] * u * u * u / 6.0 +
                                  (control[i].y - my[i] / 6.0) * a + (control[j].y - my[j] / 6.0) * u;
                pts.push_back({cx, cy});
            }
        }
        pts.push_back(pts.front());
        ClosedCurve c(Kind::PeriodicSpline, std::move(pts));
        c.finish();
        return c;
    }

    Kind kind() const { return kind_; }
    const std::vector<Vec2>& polyline() const { return *pts_; }
    std::size_t segment_count() const { return pts_->size() - 1; }
    double length() const { return cumlen_.back(); }
    double diameter() const { return bbox_.diagonal(); }  // bbox diagonal
    const Aabb& bbox() const { return bbox_; }
    double on_tolerance() const { return kOnToleranceFactor * diameter(); }
    double enclosed_area() const { return area_; }

    struct Nearest {
        Vec2 point;
        double dist = 0.0;
        Vec2 normal;         // unit, points to the positive (bounded) side
        double param = 0.0;  // arc length along the polyline
        std::size_t seg = 0;
        double t = 0.0;
    };

    Nearest nearest(Vec2 p) const {
        const SegmentGrid::Hit h = grid_.nearest(p);
        Nearest out;
        out.point = h.point;
        out.dist = h.dist;
        out.seg = h.seg;
        out.t = h.t;
        out.param = cumlen_[h.seg] + h.t * (cumlen_[h.seg + 1] - cumlen_[h.seg]);
        out.normal = normal_at(h.seg, h.t);
        return out;
    }

    Side side_of(Vec2 p, double on_tol = -1.0) const {
        const Nearest n = nearest(p);
        if (on_tol < 0.0) on_tol = on_tolerance();
        if (n.dist < on_tol) return Side::On;
        return classify(n, p);
    }

    // Crossing-number parity on the polyline; used to cross-check side_of.
    bool contains_by_parity(Vec2 p) const {
        const auto& pts = *pts_;
        bool inside = false;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const Vec2 a = pts[i], b = pts[i + 1];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (p.x < xint) inside = !inside;
            }
        }
        return inside;
    }

    // Strict side of p given its nearest-point record; p must not lie exactly
    // on the polyline. The open segment from p to its nearest point meets the
    // polyline only at the near end, so a local orientation test decides.
    Side classify(const Nearest& n, Vec2 p) const {
        constexpr double kEndTol = 1e-12;
        const auto& pts = *pts_;
        if (n.t > kEndTol && n.t < 1.0 - kEndTol) {
            const Vec2 a = pts[n.seg], b = pts[n.seg + 1];
            return cross(b - a, p - n.point) > 0.0 ? Side::Positive : Side::Negative;
        }
        const std::size_t nseg = segment_count();
        const std::size_t vi = (n.t <= kEndTol) ? n.seg : (n.seg + 1) % nseg;
        const Vec2 v = pts[vi];
        const Vec2 prev = pts[(vi + nseg - 1) % nseg];
        const Vec2 next = pts[vi + 1];
        const Vec2 e_in = v - prev, e_out = next - v;
        const bool left_in = cross(e_in, p - v) > 0.0;
        const bool left_out = cross(e_out, p - v) > 0.0;
        const bool inside = cross(e_in, e_out) >= 0.0 ? (left_in && left_out) : (left_in || left_out);
        return inside ? Side::Positive : Side::Negative;
    }

    double max_curvature() const {
        switch (kind_) {
            case Kind::Circle:
                return 1.0 / circle_radius_;
            case Kind::Ellipse:
                return std::max(ellipse_a_ / (ellipse_b_ * ellipse_b_),
                                ellipse_b_ / (ellipse_a_ * ellipse_a_));
            case Kind::PeriodicSpline:
                return polyline_max_curvature(*pts_);
        }
        return 0.0;
    }

    int chord_crossings(Vec2 a, Vec2 b, double t_min = 1e-12) const {
        return grid_.chord_crossings(a, b, t_min);
    }
    double first_crossing(Vec2 a, Vec2 b, double t_min = 1e-12) const {
        return grid_.first_crossing(a, b, t_min);
    }

    // Finite-difference (Menger) curvature maximum over a closed polyline.
    static double polyline_max_curvature(const std::vector<Vec2>& pts) {
        const std::size_t n = pts.size() - 1;
        double kmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 p0 = pts[(i + n - 1) % n], p1 = pts[i], p2 = pts[i + 1];
            const double a = (p1 - p0).norm(), b = (p2 - p1).norm(), c = (p2 - p0).norm();
            if (a == 0.0 || b == 0.0 || c == 0.0) continue;
            kmax = std::max(kmax, 2.0 * std::abs(cross(p1 - p0, p2 - p1)) / (a * b * c));
        }
        return kmax;
    }

private:
    ClosedCurve(Kind kind, std::vector<Vec2> pts)
        : kind_(kind), pts_(std::make_shared<const std::vector<Vec2>>(std::move(pts))) {}

    void finish() {
        if (pts_->size() < 4) throw InvalidCurveError("degenerate polyline: fewer than 3 vertices");
        if (signed_area() < 0.0) {
            std::vector<Vec2> rev(pts_->rbegin(), pts_->rend());
            pts_ = std::make_shared<const std::vector<Vec2>>(std::move(rev));
        }
        area_ = signed_area();
        if (!(area_ > 0.0)) throw InvalidCurveError("degenerate polyline: zero enclosed area");
        for (const Vec2& p : *pts_) bbox_.grow(p);
        cumlen_.resize(pts_->size());
        cumlen_[0] = 0.0;
        for (std::size_t i = 0; i + 1 < pts_->size(); ++i)
            cumlen_[i + 1] = cumlen_[i] + ((*pts_)[i + 1] - (*pts_)[i]).norm();
        if (!(cumlen_.back() > 0.0)) throw InvalidCurveError("degenerate polyline: zero length");
        grid_ = SegmentGrid(pts_.get());
        check_simple();
    }

    double signed_area() const {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pts_->size(); ++i) s += cross((*pts_)[i], (*pts_)[i + 1]);
        return 0.5 * s;
    }

    // Each segment, viewed as a chord, must cross the rest of the polyline
    // exactly once: the shared vertex with its successor (t = 1, s = 0 under
    // the half-open rule). Anything more is a self-intersection or a pinch.
    void check_simple() const {
        const auto& pts = *pts_;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (grid_.chord_crossings(pts[i], pts[i + 1]) > 1)
                throw InvalidCurveError("polyline is self-intersecting");
    }

    Vec2 normal_at(std::size_t seg, double t) const {
        constexpr double kEndTol = 1e-12;
        const auto& pts = *pts_;
        const std::size_t nseg = segment_count();
        if (t > kEndTol && t < 1.0 - kEndTol) return normalized(perp(pts[seg + 1] - pts[seg]));
        const std::size_t vi = (t <= kEndTol) ? seg : (seg + 1) % nseg;
        const Vec2 prev = pts[(vi + nseg - 1) % nseg];
        const Vec2 v = pts[vi];
        const Vec2 next = pts[vi + 1];
        const Vec2 nrm = normalized(normalized(perp(v - prev)) + normalized(perp(next - v)));
        return nrm.norm2() > 0.0 ? nrm : normalized(perp(next - v));
    }

    static std::vector<double> spline_second_derivatives(const std::vector<Vec2>& q, int axis) {
        const std::size_t n = q.size();
        auto comp = [&](std::size_t i) { return axis == 0 ? q[i % n].x : q[i % n].y; };
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = 6.0 * (comp(i + n - 1) - 2.0 * comp(i) + comp(i + 1));
        // Cyclic tridiagonal (1, 4, 1) via Sherman-Morrison around Thomas.
        const double diag = 4.0, off = 1.0, gamma = -diag;
        std::vector<double> a(n, diag), u(n, 0.0);
        a[0] = diag - gamma;
        a[n - 1] = diag - off * off / gamma;
        u[0] = gamma;
        u[n - 1] = off;
        auto thomas = [&](const std::vector<double>& d, std::vector<double> r) {
            std::vector<double> cp(n, 0.0);
            cp[0] = off / d[0];
            r[0] /= d[0];
            for (std::size_t i = 1; i < n; ++i) {
                const double den = d[i] - off * cp[i - 1];
                cp[i] = off / den;
                r[i] = (r[i] - off * r[i - 1]) / den;
            }
            for (std::size_t i = n - 1; i-- > 0;) r[i] -= cp[i] * r[i + 1];
            return r;
        };
        const std::vector<double> y = thomas(a, rhs);
        const std::vector<double> z = thomas(a, u);
        const double fact = (y[0] + off * y[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
        std::vector<double> m(n);
        for (std::size_t i = 0; i < n; ++i) m[i] = y[i] - fact * z[i];
        return m;
    }

    Kind kind_;
    std::shared_ptr<const std::vector<Vec2>> pts_;
    std::vector<double> cumlen_;
    Aabb bbox_;
    double area_ = 0.0;
    SegmentGrid grid_;
    double circle_radius_ = 0.0;
    double ellipse_a_ = 0.0, ellipse_b_ = 0.0;
};

struct Barrier {
    ClosedCurve curve;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;

    bool impermeable() const { return std::isinf(lambda_plus) && std::isinf(lambda_minus); }
};

inline Barrier impermeable_barrier(ClosedCurve curve) {
    return Barrier{std::move(curve), std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity()};
}

inline Side side_of(const Barrier& b, Vec2 p, double on_tol = -1.0) {
    return b.curve.side_of(p, on_tol);
}

struct NearestPoint {
    Vec2 point;
    double dist;
    Vec2 normal;
};

inline NearestPoint nearest_point(const Barrier& b, Vec2 p) {
    const ClosedCurve::Nearest n = b.curve.nearest(p);
    return {n.point, n.dist, n.normal};
}

inline double max_curvature(const ClosedCurve& c) { return c.max_curvature(); }

// Impermeable outer boundary plus disjoint semipermeable inner barriers,
// all strictly inside the outer curve. Immutable after creation.
class Environment {
public:
    static Environment create(Barrier outer, std::vector<Barrier> inner) {
        if (!outer.impermeable())
            throw InvalidEnvironmentError("outer barrier must be impermeable (infinite rates)");
        for (const Barrier& b : inner) {
            if (std::isinf(b.lambda_plus) || std::isinf(b.lambda_minus))
                throw InvalidEnvironmentError("inner barriers must have finite rates");
            if (b.lambda_plus < 0.0 || b.lambda_minus < 0.0)
                throw InvalidEnvironmentError("permeability rates must be nonnegative");
        }
        Environment env;
        env.outer_ = std::move(outer);
        env.inner_ = std::move(inner);
        env.validate();
        env.area_ = env.outer_->curve.enclosed_area();
        return env;
    }

    const Barrier& outer() const { return *outer_; }
    const std::vector<Barrier>& inner() const { return inner_; }
    std::size_t inner_count() const { return inner_.size(); }
    std::size_t barrier_count() const { return inner_.size() + 1; }
    double area() const { return area_; }

    // Barrier by index: 0 is the outer boundary, 1..m the inner barriers.
    const Barrier& barrier(std::size_t i) const { return i == 0 ? *outer_ : inner_[i - 1]; }

private:
    void validate() const {
        const double tol = outer_->curve.on_tolerance();
        for (const Barrier& b : inner_)
            for (const Vec2& p : b.curve.polyline())
                if (outer_->curve.side_of(p, tol) != Side::Positive)
                    throw InvalidEnvironmentError("inner barrier not strictly inside the outer curve");
        for (std::size_t i = 0; i < barrier_count(); ++i)
            for (std::size_t j = i + 1; j < barrier_count(); ++j)
                if (curves_intersect(barrier(i).curve, barrier(j).curve))
                    throw InvalidEnvironmentError("barriers intersect");
    }

    static bool curves_intersect(const ClosedCurve& a, const ClosedCurve& b) {
        const auto& pa = a.polyline();
        for (std::size_t i = 0; i + 1 < pa.size(); ++i)
            if (b.chord_crossings(pa[i], pa[i + 1], -1.0) > 0) return true;
        return false;
    }

    std::optional<Barrier> outer_;
    std::vector<Barrier> inner_;
    double area_ = 0.0;
};

// Half the minimum of (a) pairwise distance between distinct barriers and
// (b) per-curve bottleneck self-distance. A self pair counts as a bottleneck
// only when its along-curve separation exceeds (pi/2) times the straight-line
// distance, so a convex curve contributes nothing while a U-bend neck is
// caught. Lower-bound surrogate for the ball-connectivity radius; accuracy is
// polyline resolution.
inline double min_separation(const Environment& env) {
    const std::size_t nb = env.barrier_count();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            if (i == j) continue;
            const ClosedCurve& a = env.barrier(i).curve;
            const ClosedCurve& b = env.barrier(j).curve;
            for (const Vec2& p : a.polyline()) best = std::min(best, b.nearest(p).dist);
        }
    if (!(best > 0.0)) throw InvalidEnvironmentError("overlapping barriers");
    for (std::size_t bi = 0; bi < nb; ++bi) {
        const ClosedCurve& c = env.barrier(bi).curve;
        const auto& pts = c.polyline();
        const std::size_t n = pts.size() - 1;
        const std::size_t stride = std::max<std::size_t>(1, n / 4096);
        const double total = c.length();
        std::vector<double> cumlen(n + 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) cumlen[k + 1] = cumlen[k] + (pts[k + 1] - pts[k]).norm();
        for (std::size_t ia = 0; ia < n; ia += stride)
            for (std::size_t ib = ia + stride; ib < n; ib += stride) {
                const double d = (pts[ia] - pts[ib]).norm();
                if (d >= best) continue;
                const double along = cumlen[ib] - cumlen[ia];
                const double arc = std::min(along, total - along);
                if (arc > 0.5 * M_PI * d) best = d;
            }
    }
    return 0.5 * best;
}

struct EnvParameters {
    double kappa = 0.0;       // max unsigned curvature over all barriers
    double rho = 0.0;         // min-separation surrogate
    double lambda_max = 0.0;  // largest permeability rate, 0 when m = 0
    std::optional<double> pi_min;
    std::optional<double> t_mix;
};

inline EnvParameters derive_parameters(const Environment& env,
                                       std::optional<double> pi_min = std::nullopt,
                                       std::optional<double> t_mix = std::nullopt) {
    EnvParameters p;
    p.kappa = env.outer().curve.max_curvature();
    for (const Barrier& b : env.inner()) p.kappa = std::max(p.kappa, b.curve.max_curvature());
    p.rho = min_separation(env);
    for (const Barrier& b : env.inner())
        p.lambda_max = std::max({p.lambda_max, b.lambda_plus, b.lambda_minus});
    p.pi_min = pi_min;
    p.t_mix = t_mix;
    if (!(p.kappa > 0.0) || !(p.rho > 0.0))
        throw InvalidEnvironmentError("environment parameters must be positive");
    return p;
}

}  // namespace snapout
