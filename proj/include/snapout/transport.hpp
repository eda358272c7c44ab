#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "snapout/detail/network_simplex.hpp"
#include "snapout/error.hpp"
#include "snapout/grid_index.hpp"
#include "snapout/vec.hpp"

namespace snapout {

// Weighted finite point set; either a probability measure (total mass 1)
// or the zero measure (no atoms).
struct EmpiricalMeasure {
    std::vector<Vec2> points;
    std::vector<double> weights;

    bool is_zero() const { return points.empty(); }

    static EmpiricalMeasure zero() { return {}; }

    static EmpiricalMeasure uniform(std::vector<Vec2> pts) {
        EmpiricalMeasure m;
        if (pts.empty()) return m;
        const double w = 1.0 / static_cast<double>(pts.size());
        m.weights.assign(pts.size(), w);
        m.points = std::move(pts);
        return m;
    }

    static EmpiricalMeasure weighted(std::vector<Vec2> pts, std::vector<double> ws) {
        EmpiricalMeasure m;
        m.points = std::move(pts);
        m.weights = std::move(ws);
        m.validate();
        return m;
    }

    double total_mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    void validate() const {
        if (points.size() != weights.size()) throw InvalidMeasureError("atom/weight size mismatch");
        for (double w : weights)
            if (w < 0.0 || !std::isfinite(w)) throw InvalidMeasureError("negative weight");
        if (!points.empty() && std::abs(total_mass() - 1.0) > 1e-9)
            throw InvalidMeasureError("weights must sum to 1 (or the measure must be empty)");
    }
};

struct PointSet {
    std::vector<Vec2> points;
};

// Exact truncated Wasserstein-1 with ground cost min(||x-y||, u).
// Conventions for the zero measure o: W(o, o) = 0 and W(P, o) = u.
inline double truncated_w1(const EmpiricalMeasure& P, const EmpiricalMeasure& Q, double u) {
    if (!(u > 0.0)) throw InvalidInputError("truncation level must be positive");
    P.validate();
    Q.validate();
    if (P.is_zero() && Q.is_zero()) return 0.0;
    if (P.is_zero() || Q.is_zero()) return u;

    const std::size_t m = P.points.size(), n = Q.points.size();
    std::vector<double> cost(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i * n + j] = std::min((P.points[i] - Q.points[j]).norm(), u);

    // Rebalance the last atom so both sides sum to exactly the same mass.
    std::vector<double> a = P.weights, b = Q.weights;
    double sa = 0.0, sb = 0.0;
    for (double w : a) sa += w;
    for (double w : b) sb += w;
    b.back() += sa - sb;
    if (b.back() < 0.0) {
        a.back() -= sa - sb;
        b.back() = Q.weights.back();
    }

    detail::TransportSimplex simplex;
    return simplex.solve(a, b, cost);
}

// Hausdorff distance between non-empty finite point sets.
inline double hausdorff(const std::vector<Vec2>& A, const std::vector<Vec2>& B) {
    if (A.empty() || B.empty()) throw InvalidInputError("hausdorff: point set is empty");
    const PointGrid ga(A), gb(B);
    double h = 0.0;
    for (const Vec2& p : A) h = std::max(h, gb.nearest(p).dist);
    for (const Vec2& p : B) h = std::max(h, ga.nearest(p).dist);
    return h;
}

inline double hausdorff(const PointSet& A, const PointSet& B) {
    return hausdorff(A.points, B.points);
}

// Collapses Q onto the grid d*Z^2: one atom per occupied bin at the bin
// center, carrying the bin's mass.
inline EmpiricalMeasure bin_measure(const EmpiricalMeasure& Q, double d) {
    if (!(d > 0.0)) throw InvalidInputError("bin width must be positive");
    if (Q.is_zero()) return EmpiricalMeasure::zero();
    std::map<std::pair<long, long>, double> bins;
    for (std::size_t i = 0; i < Q.points.size(); ++i) {
        const long bx = static_cast<long>(std::floor(Q.points[i].x / d));
        const long by = static_cast<long>(std::floor(Q.points[i].y / d));
        bins[{bx, by}] += Q.weights[i];
    }
    EmpiricalMeasure out;
    out.points.reserve(bins.size());
    out.weights.reserve(bins.size());
    for (const auto& [bin, w] : bins) {
        out.points.push_back({(bin.first + 0.5) * d, (bin.second + 0.5) * d});
        out.weights.push_back(w);
    }
    return out;
}

// Rectangle with arbitrary orientation: |<x - center, axis>| <= half_along,
// |<x - center, perp(axis)>| <= half_across. Membership is closed.
struct OrientedRect {
    Vec2 center;
    Vec2 axis{1.0, 0.0};  // unit
    double half_along = 0.0;
    double half_across = 0.0;

    static OrientedRect axis_box(Vec2 lo, Vec2 hi) {
        OrientedRect r;
        r.center = (lo + hi) * 0.5;
        r.axis = {1.0, 0.0};
        r.half_along = (hi.x - lo.x) * 0.5;
        r.half_across = (hi.y - lo.y) * 0.5;
        return r;
    }

    bool contains(Vec2 p) const {
        const Vec2 d = p - center;
        return std::abs(dot(d, axis)) <= half_along && std::abs(dot(d, perp(axis))) <= half_across;
    }

    double circumradius() const { return std::hypot(half_along, half_across); }
};

}  // namespace snapout
