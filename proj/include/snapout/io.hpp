#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "snapout/config.hpp"
#include "snapout/error.hpp"
#include "snapout/estimators.hpp"
#include "snapout/process.hpp"
#include "snapout/vec.hpp"

namespace snapout {

inline constexpr const char* kVersion = "snapout 0.1.0";

namespace detail {

// Shortest round-trip decimal form; locale-independent and byte-stable.
inline std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace detail

// SamplePath CSV: header "index,time,x,y", one row per sample.
inline std::string sample_path_csv(const SamplePath& path) {
    std::string out = "index,time,x,y\n";
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += detail::fmt(static_cast<double>(i) * path.t);
        out += ',';
        out += detail::fmt(path.samples[i].x);
        out += ',';
        out += detail::fmt(path.samples[i].y);
        out += '\n';
    }
    return out;
}

inline void write_sample_path_csv(const std::string& file, const SamplePath& path) {
    detail::write_file(file, sample_path_csv(path));
}

inline std::string dense_trace_csv(const SamplePath& path) {
    std::string out = "index,time,x,y\n";
    for (std::size_t i = 0; i < path.dense.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += detail::fmt(static_cast<double>(i) * path.dense_h);
        out += ',';
        out += detail::fmt(path.dense[i].x);
        out += ',';
        out += detail::fmt(path.dense[i].y);
        out += '\n';
    }
    return out;
}

inline SamplePath read_sample_path_csv(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty sample path file " + file);
    SamplePath path;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[4];
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(row, cell, ',')) throw IoError("bad row in " + file);
            vals[c] = std::strtod(cell.c_str(), nullptr);
        }
        times.push_back(vals[1]);
        path.samples.push_back({vals[2], vals[3]});
    }
    if (times.size() >= 2) path.t = times[1] - times[0];
    path.T = path.samples.empty() ? 0.0 : static_cast<double>(path.samples.size() - 1) * path.t;
    return path;
}

// EstimateSet CSV: "x,y,regime,diagnostic".
inline std::string estimate_csv(const EstimateSet& est) {
    std::string out = "x,y,regime,diagnostic\n";
    const char* name = regime_name(est.regime);
    if (est.regime == Regime::FixedFreq) {
        for (const auto& b : est.boxes) {
            const double cx = (static_cast<double>(b.j) + 0.5) * est.eps_grid;
            const double cy = (static_cast<double>(b.k) + 0.5) * est.eps_grid;
            out += detail::fmt(cx);
            out += ',';
            out += detail::fmt(cy);
            out += ',';
            out += name;
            out += ',';
            out += detail::fmt(b.w1_max);
            out += '\n';
        }
    } else {
        for (const auto& f : est.flagged) {
            out += detail::fmt(static_cast<double>(f.j) * est.eps_grid);
            out += ',';
            out += detail::fmt(static_cast<double>(f.k) * est.eps_grid);
            out += ',';
            out += name;
            out += ',';
            out += detail::fmt(f.value);
            out += '\n';
        }
    }
    return out;
}

inline std::string diagnostics_csv(const EstimateSet& est) {
    std::string out;
    if (est.regime == Regime::FixedFreq) {
        out = "j,k,cx,cy,w1_max\n";
        for (const auto& b : est.boxes) {
            out += std::to_string(b.j) + ',' + std::to_string(b.k) + ',';
            out += detail::fmt((static_cast<double>(b.j) + 0.5) * est.eps_grid) + ',';
            out += detail::fmt((static_cast<double>(b.k) + 0.5) * est.eps_grid) + ',';
            out += detail::fmt(b.w1_max);
            out += '\n';
        }
    } else {
        out = "j,k,n,x,y,value,N,M\n";
        for (const auto& f : est.flagged) {
            out += std::to_string(f.j) + ',' + std::to_string(f.k) + ',' + std::to_string(f.n) + ',';
            out += detail::fmt(static_cast<double>(f.j) * est.eps_grid) + ',';
            out += detail::fmt(static_cast<double>(f.k) * est.eps_grid) + ',';
            out += detail::fmt(f.value) + ',' + std::to_string(f.N) + ',' + std::to_string(f.M);
            out += '\n';
        }
    }
    return out;
}

// Reads back the representative points of an estimate CSV. For fixed-freq
// estimates the stored points are box centers; the caller reconstructs
// corners if needed.
inline PointSet read_estimate_csv(const std::string& file, std::string* regime = nullptr) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open " + file);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty estimate file " + file);
    PointSet out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string sx, sy, sr;
        std::getline(row, sx, ',');
        std::getline(row, sy, ',');
        std::getline(row, sr, ',');
        if (regime) *regime = sr;
        out.points.push_back({std::strtod(sx.c_str(), nullptr), std::strtod(sy.c_str(), nullptr)});
    }
    return out;
}

inline std::string manifest_text(const std::string& command, const Config& cfg,
                                 const std::vector<std::uint64_t>& seeds,
                                 const std::vector<std::string>& outputs) {
    std::string out;
    out += std::string(kVersion) + "\n";
    out += "command: " + command + "\n";
    out += "seeds:";
    for (auto s : seeds) out += " " + std::to_string(s);
    out += "\noutputs:\n";
    for (const auto& f : outputs) out += "  " + f + "\n";
    out += "config:\n";
    std::istringstream raw(cfg.raw_text());
    std::string line;
    while (std::getline(raw, line)) out += "  | " + line + "\n";
    return out;
}

}  // namespace snapout
