#pragma once

#include <string>
#include <vector>

#include "snapout/geometry.hpp"
#include "snapout/io.hpp"
#include "snapout/vec.hpp"

namespace snapout {

// Minimal static SVG plot in data coordinates (y up). Self-contained vector
// output; no plotting dependency.
class SvgPlot {
public:
    explicit SvgPlot(const Aabb& data_box) : box_(data_box) {
        const Vec2 ext = box_.extent();
        margin_ = 0.05 * std::max(ext.x, ext.y);
        if (!(margin_ > 0.0)) margin_ = 1.0;
    }

    void add_polyline(const std::vector<Vec2>& pts, const std::string& color, double width) {
        std::string d;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            d += (i == 0 ? "M" : "L");
            d += detail::fmt(pts[i].x) + " " + detail::fmt(-pts[i].y);
        }
        body_ += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
                 detail::fmt(width) + "\"/>\n";
    }

    void add_dots(const std::vector<Vec2>& pts, const std::string& color, double r,
                  std::size_t max_count = 20000) {
        const std::size_t stride = pts.size() > max_count ? pts.size() / max_count : 1;
        for (std::size_t i = 0; i < pts.size(); i += stride)
            body_ += "<circle cx=\"" + detail::fmt(pts[i].x) + "\" cy=\"" + detail::fmt(-pts[i].y) +
                     "\" r=\"" + detail::fmt(r) + "\" fill=\"" + color + "\"/>\n";
    }

    void add_rect(Vec2 lo, double w, double h, const std::string& color, double opacity) {
        body_ += "<rect x=\"" + detail::fmt(lo.x) + "\" y=\"" + detail::fmt(-(lo.y + h)) +
                 "\" width=\"" + detail::fmt(w) + "\" height=\"" + detail::fmt(h) + "\" fill=\"" +
                 color + "\" fill-opacity=\"" + detail::fmt(opacity) + "\"/>\n";
    }

    std::string str() const {
        const double x0 = box_.lo.x - margin_, y0 = -(box_.hi.y + margin_);
        const double w = box_.extent().x + 2 * margin_, h = box_.extent().y + 2 * margin_;
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
        out += detail::fmt(x0) + " " + detail::fmt(y0) + " " + detail::fmt(w) + " " +
               detail::fmt(h) + "\">\n";
        out += "<rect x=\"" + detail::fmt(x0) + "\" y=\"" + detail::fmt(y0) + "\" width=\"" +
               detail::fmt(w) + "\" height=\"" + detail::fmt(h) + "\" fill=\"white\"/>\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

    void write(const std::string& path) const { detail::write_file(path, str()); }

private:
    Aabb box_;
    double margin_ = 1.0;
    std::string body_;
};

}  // namespace snapout
