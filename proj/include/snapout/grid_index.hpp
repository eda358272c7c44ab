#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "snapout/vec.hpp"

namespace snapout {

struct Aabb {
    Vec2 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void grow(Vec2 p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    Vec2 extent() const { return hi - lo; }
    double diagonal() const { return extent().norm(); }
};

namespace detail {

// Shared uniform-grid shape. Cell (0,0) is at bounds.lo; indices are clamped
// on query so points outside the bounds still map to a border cell.
struct GridShape {
    Vec2 origin;
    double cell = 1.0;
    int nx = 1;
    int ny = 1;

    void fit(const Aabb& box, std::size_t item_count) {
        const double pad = 1e-9 + 1e-9 * box.diagonal();
        origin = box.lo - Vec2{pad, pad};
        const Vec2 span = box.extent() + Vec2{2.0 * pad, 2.0 * pad};
        const double target_dim = std::clamp(std::sqrt(4.0 * static_cast<double>(item_count) + 1.0), 8.0, 1024.0);
        cell = std::max(span.x, span.y) / target_dim;
        if (!(cell > 0.0)) cell = 1.0;
        nx = std::max(1, static_cast<int>(std::floor(span.x / cell)) + 1);
        ny = std::max(1, static_cast<int>(std::floor(span.y / cell)) + 1);
    }

    int clamp_ix(double x) const {
        return std::clamp(static_cast<int>(std::floor((x - origin.x) / cell)), 0, nx - 1);
    }
    int clamp_iy(double y) const {
        return std::clamp(static_cast<int>(std::floor((y - origin.y) / cell)), 0, ny - 1);
    }
    std::size_t index(int ix, int iy) const {
        return static_cast<std::size_t>(iy) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix);
    }

    // Every point in a cell with Chebyshev ring >= r around (ci, cj) is at
    // least this far from q. Valid also when q lies outside the grid.
    double ring_lower_bound(Vec2 q, int ci, int cj, int r) const {
        if (r <= 0) return 0.0;
        const double xlo = origin.x + (ci - r + 1) * cell;
        const double xhi = origin.x + (ci + r) * cell;
        const double ylo = origin.y + (cj - r + 1) * cell;
        const double yhi = origin.y + (cj + r) * cell;
        const double d = std::min(std::min(q.x - xlo, xhi - q.x), std::min(q.y - ylo, yhi - q.y));
        return std::max(0.0, d);
    }
};

// CSR-style bucket storage: build once, then immutable.
struct Buckets {
    std::vector<std::uint32_t> start;  // size cells+1
    std::vector<std::uint32_t> items;

    template <typename EmitCells>
    void build(std::size_t cells, std::size_t item_count, EmitCells&& emit) {
        std::vector<std::uint32_t> count(cells + 1, 0);
        for (std::size_t i = 0; i < item_count; ++i)
            emit(i, [&](std::size_t c) { ++count[c + 1]; });
        for (std::size_t c = 0; c < cells; ++c) count[c + 1] += count[c];
        start = count;
        items.resize(start[cells]);
        std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < item_count; ++i)
            emit(i, [&](std::size_t c) { items[cursor[c]++] = static_cast<std::uint32_t>(i); });
    }
};

}  // namespace detail

// Closest-point queries against a fixed point cloud.
class PointGrid {
public:
    PointGrid() = default;

    explicit PointGrid(std::vector<Vec2> points) : points_(std::move(points)) {
        Aabb box;
        for (const Vec2& p : points_) box.grow(p);
        if (points_.empty()) box.grow({0.0, 0.0});
        shape_.fit(box, points_.size());
        buckets_.build(static_cast<std::size_t>(shape_.nx) * shape_.ny, points_.size(),
                       [&](std::size_t i, auto&& add) {
                           add(shape_.index(shape_.clamp_ix(points_[i].x), shape_.clamp_iy(points_[i].y)));
                       });
    }

    bool empty() const { return points_.empty(); }
    const std::vector<Vec2>& points() const { return points_; }

    struct Hit {
        std::size_t index = 0;
        double dist = std::numeric_limits<double>::infinity();
    };

    Hit nearest(Vec2 q) const {
        Hit best;
        if (points_.empty()) return best;
        double best2 = std::numeric_limits<double>::infinity();
        const int ci = shape_.clamp_ix(q.x);
        const int cj = shape_.clamp_iy(q.y);
        const int rmax = std::max(std::max(ci, shape_.nx - 1 - ci), std::max(cj, shape_.ny - 1 - cj));
        for (int r = 0;; ++r) {
            if (r > rmax) break;
            const double bound = shape_.ring_lower_bound(q, ci, cj, r);
            if (best2 <= bound * bound) break;
            visit_ring(ci, cj, r, [&](std::size_t cellidx) {
                for (std::uint32_t k = buckets_.start[cellidx]; k < buckets_.start[cellidx + 1]; ++k) {
                    const std::uint32_t i = buckets_.items[k];
                    const double d2 = (points_[i] - q).norm2();
                    if (d2 < best2 || (d2 == best2 && i < best.index)) {
                        best2 = d2;
                        best.index = i;
                    }
                }
            });
        }
        best.dist = std::sqrt(best2);
        return best;
    }

    // Calls fn(index) for every point within radius of q.
    template <typename Fn>
    void for_each_within(Vec2 q, double radius, Fn&& fn) const {
        if (points_.empty()) return;
        const int ix0 = shape_.clamp_ix(q.x - radius), ix1 = shape_.clamp_ix(q.x + radius);
        const int iy0 = shape_.clamp_iy(q.y - radius), iy1 = shape_.clamp_iy(q.y + radius);
        const double r2 = radius * radius;
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix) {
                const std::size_t c = shape_.index(ix, iy);
                for (std::uint32_t k = buckets_.start[c]; k < buckets_.start[c + 1]; ++k) {
                    const std::uint32_t i = buckets_.items[k];
                    if ((points_[i] - q).norm2() <= r2) fn(static_cast<std::size_t>(i));
                }
            }
    }

private:
    template <typename Fn>
    void visit_ring(int ci, int cj, int r, Fn&& fn) const {
        const int x0 = std::max(0, ci - r), x1 = std::min(shape_.nx - 1, ci + r);
        const int y0 = std::max(0, cj - r), y1 = std::min(shape_.ny - 1, cj + r);
        for (int iy = y0; iy <= y1; ++iy) {
            const bool edge_row = (iy == cj - r || iy == cj + r);
            if (edge_row) {
                for (int ix = x0; ix <= x1; ++ix) fn(shape_.index(ix, iy));
            } else {
                if (ci - r >= 0) fn(shape_.index(ci - r, iy));
                if (ci + r <= shape_.nx - 1 && r > 0) fn(shape_.index(ci + r, iy));
            }
        }
    }

    std::vector<Vec2> points_;
    detail::GridShape shape_;
    detail::Buckets buckets_;
};

// Closest-point and chord-crossing queries against a closed polyline.
// Vertices must satisfy pts.front() == pts.back(); segment i runs from
// pts[i] to pts[i+1].
class SegmentGrid {
public:
    SegmentGrid() = default;

    explicit SegmentGrid(const std::vector<Vec2>* pts) : pts_(pts) {
        Aabb box;
        for (const Vec2& p : *pts_) box.grow(p);
        nseg_ = pts_->size() - 1;
        shape_.fit(box, nseg_);
        buckets_.build(static_cast<std::size_t>(shape_.nx) * shape_.ny, nseg_,
                       [&](std::size_t i, auto&& add) {
                           const Vec2 a = (*pts_)[i], b = (*pts_)[i + 1];
                           const int x0 = shape_.clamp_ix(std::min(a.x, b.x));
                           const int x1 = shape_.clamp_ix(std::max(a.x, b.x));
                           const int y0 = shape_.clamp_iy(std::min(a.y, b.y));
                           const int y1 = shape_.clamp_iy(std::max(a.y, b.y));
                           for (int iy = y0; iy <= y1; ++iy)
                               for (int ix = x0; ix <= x1; ++ix) add(shape_.index(ix, iy));
                       });
    }

    std::size_t segment_count() const { return nseg_; }

    struct Hit {
        std::size_t seg = 0;
        double t = 0.0;  // parameter along the segment, in [0, 1]
        Vec2 point;
        double dist = std::numeric_limits<double>::infinity();
    };

    Hit nearest(Vec2 q) const {
        Hit best;
        double best2 = std::numeric_limits<double>::infinity();
        const int ci = shape_.clamp_ix(q.x);
        const int cj = shape_.clamp_iy(q.y);
        const int rmax = std::max(std::max(ci, shape_.nx - 1 - ci), std::max(cj, shape_.ny - 1 - cj));
        for (int r = 0;; ++r) {
            if (r > rmax) break;
            const double bound = shape_.ring_lower_bound(q, ci, cj, r);
            if (best2 <= bound * bound) break;
            visit_ring(ci, cj, r, [&](std::size_t cellidx) {
                for (std::uint32_t k = buckets_.start[cellidx]; k < buckets_.start[cellidx + 1]; ++k) {
                    const std::uint32_t i = buckets_.items[k];
                    const Vec2 a = (*pts_)[i], b = (*pts_)[i + 1];
                    const Vec2 d = b - a;
                    const double len2 = d.norm2();
                    double t = len2 > 0.0 ? std::clamp(dot(q - a, d) / len2, 0.0, 1.0) : 0.0;
                    const Vec2 c = a + d * t;
                    const double d2 = (c - q).norm2();
                    // Ties resolved toward the smallest arc-length parameter.
                    if (d2 < best2 || (d2 == best2 && (i < best.seg || (i == best.seg && t < best.t)))) {
                        best2 = d2;
                        best.seg = i;
                        best.t = t;
                        best.point = c;
                    }
                }
            });
        }
        best.dist = std::sqrt(best2);
        return best;
    }

    // Proper crossings of the chord [p, q] with the polyline, skipping
    // crossings at chord parameter <= t_min (so a chord starting on the
    // curve does not count its own start). Each polyline segment is counted
    // at most once.
    int chord_crossings(Vec2 p, Vec2 q, double t_min = 1e-12) const {
        const int x0 = shape_.clamp_ix(std::min(p.x, q.x));
        const int x1 = shape_.clamp_ix(std::max(p.x, q.x));
        const int y0 = shape_.clamp_iy(std::min(p.y, q.y));
        const int y1 = shape_.clamp_iy(std::max(p.y, q.y));
        thread_local std::vector<std::uint32_t> scratch;
        scratch.clear();
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) {
                const std::size_t c = shape_.index(ix, iy);
                scratch.insert(scratch.end(), buckets_.items.begin() + buckets_.start[c],
                               buckets_.items.begin() + buckets_.start[c + 1]);
            }
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        int count = 0;
        const Vec2 d = q - p;
        for (std::uint32_t i : scratch) {
            const Vec2 a = (*pts_)[i], b = (*pts_)[i + 1];
            const Vec2 e = b - a;
            const double denom = cross(d, e);
            if (denom == 0.0) continue;
            const double t = cross(a - p, e) / denom;   // along chord
            const double s = cross(a - p, d) / denom;   // along segment
            // Half-open on the segment so a crossing through a shared vertex
            // is counted once, not once per adjacent segment.
            if (t > t_min && t <= 1.0 && s >= 0.0 && s < 1.0) ++count;
        }
        return count;
    }

    // First chord parameter of any crossing, or +inf if none.
    double first_crossing(Vec2 p, Vec2 q, double t_min = 1e-12) const {
        const int x0 = shape_.clamp_ix(std::min(p.x, q.x));
        const int x1 = shape_.clamp_ix(std::max(p.x, q.x));
        const int y0 = shape_.clamp_iy(std::min(p.y, q.y));
        const int y1 = shape_.clamp_iy(std::max(p.y, q.y));
        double best = std::numeric_limits<double>::infinity();
        const Vec2 d = q - p;
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix) {
                const std::size_t c = shape_.index(ix, iy);
                for (std::uint32_t k = buckets_.start[c]; k < buckets_.start[c + 1]; ++k) {
                    const std::uint32_t i = buckets_.items[k];
                    const Vec2 a = (*pts_)[i], b = (*pts_)[i + 1];
                    const Vec2 e = b - a;
                    const double denom = cross(d, e);
                    if (denom == 0.0) continue;
                    const double t = cross(a - p, e) / denom;
                    const double s = cross(a - p, d) / denom;
                    if (t > t_min && t <= 1.0 && s >= 0.0 && s < 1.0) best = std::min(best, t);
                }
            }
        return best;
    }

private:
    template <typename Fn>
    void visit_ring(int ci, int cj, int r, Fn&& fn) const {
        const int x0 = std::max(0, ci - r), x1 = std::min(shape_.nx - 1, ci + r);
        const int y0 = std::max(0, cj - r), y1 = std::min(shape_.ny - 1, cj + r);
        for (int iy = y0; iy <= y1; ++iy) {
            const bool edge_row = (iy == cj - r || iy == cj + r);
            if (edge_row) {
                for (int ix = x0; ix <= x1; ++ix) fn(shape_.index(ix, iy));
            } else {
                if (ci - r >= 0) fn(shape_.index(ci - r, iy));
                if (ci + r <= shape_.nx - 1 && r > 0) fn(shape_.index(ci + r, iy));
            }
        }
    }

    const std::vector<Vec2>* pts_ = nullptr;
    std::size_t nseg_ = 0;
    detail::GridShape shape_;
    detail::Buckets buckets_;
};

}  // namespace snapout
