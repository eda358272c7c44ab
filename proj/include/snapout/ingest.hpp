#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "snapout/error.hpp"
#include "snapout/process.hpp"
#include "snapout/vec.hpp"

namespace snapout {

struct RawRecord {
    double time = 0.0;  // seconds
    double x = 0.0;     // planar coordinate or longitude
    double y = 0.0;     // planar coordinate or latitude
};

struct RawTrack {
    std::string id;
    std::vector<RawRecord> records;  // strictly increasing timestamps
};

enum class Crs { Planar, LonLat };

struct TrackSet {
    std::vector<RawTrack> tracks;
    Crs crs = Crs::Planar;
};

struct IngestSchema {
    std::string id_col = "id";
    std::string time_col = "timestamp";
    std::string x_col = "x";  // or the longitude column
    std::string y_col = "y";  // or the latitude column
    Crs crs = Crs::Planar;
    double track_drop_fraction = 0.5;  // drop a track when more of it is missing
    double file_error_fraction = 0.9;  // give up on the file beyond this
};

struct IngestStats {
    long rows_total = 0;
    long rows_dropped = 0;
    long tracks_dropped = 0;
    std::vector<long> bad_rows;  // 1-based line numbers, first few
};

namespace detail {

inline std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    const auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

// Days since the epoch for a civil date (Howard Hinnant's algorithm).
inline long days_from_civil(long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

// Numeric seconds, or "YYYY-MM-DD HH:MM:SS(.fff)" (Movebank style).
inline std::optional<double> parse_timestamp(const std::string& s) {
    if (const auto v = parse_double(s)) return v;
    int y, mo, d, h, mi;
    double sec;
    if (std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%lf", &y, &mo, &d, &h, &mi, &sec) == 6 ||
        std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &h, &mi, &sec) == 6) {
        if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
        return static_cast<double>(days_from_civil(y, mo, d)) * 86400.0 + h * 3600.0 + mi * 60.0 +
               sec;
    }
    return std::nullopt;
}

}  // namespace detail

inline TrackSet load_tracks(std::istream& in, const IngestSchema& schema,
                            IngestStats* stats = nullptr) {
    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty input: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = detail::split_csv_line(line);
    auto col = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw IngestError("missing column '" + name + "' in header");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ci = col(schema.id_col), ct = col(schema.time_col), cx = col(schema.x_col),
                      cy = col(schema.y_col);

    IngestStats local;
    IngestStats& st = stats ? *stats : local;
    struct Acc {
        std::string id;
        std::vector<RawRecord> recs;
        long dropped = 0;
    };
    std::vector<Acc> accs;  // input order
    auto acc_of = [&](const std::string& id) -> Acc& {
        for (Acc& a : accs)
            if (a.id == id) return a;
        accs.push_back({id, {}, 0});
        return accs.back();
    };

    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++st.rows_total;
        const std::vector<std::string> f = detail::split_csv_line(line);
        const std::size_t need = std::max(std::max(ci, ct), std::max(cx, cy));
        bool ok = f.size() > need;
        std::optional<double> tv, xv, yv;
        if (ok) {
            tv = detail::parse_timestamp(f[ct]);
            xv = detail::parse_double(f[cx]);
            yv = detail::parse_double(f[cy]);
            ok = tv && xv && yv && !f[ci].empty();
        }
        if (!ok) {
            ++st.rows_dropped;
            if (st.bad_rows.size() < 32) st.bad_rows.push_back(lineno);
            if (f.size() > ci && !f[ci].empty()) ++acc_of(f[ci]).dropped;
            continue;
        }
        if (schema.crs == Crs::LonLat && (*yv < -90.0 || *yv > 90.0))
            throw IngestError("latitude out of range at line " + std::to_string(lineno));
        acc_of(f[ci]).recs.push_back({*tv, *xv, *yv});
    }
    if (st.rows_total > 0 &&
        static_cast<double>(st.rows_dropped) > schema.file_error_fraction * st.rows_total) {
        std::string msg = "too many unparseable rows; first bad lines:";
        for (long r : st.bad_rows) msg += " " + std::to_string(r);
        throw IngestError(msg);
    }

    TrackSet ts;
    ts.crs = schema.crs;
    for (Acc& a : accs) {
        const long total = static_cast<long>(a.recs.size()) + a.dropped;
        if (total > 0 &&
            static_cast<double>(a.dropped) > schema.track_drop_fraction * total) {
            ++st.tracks_dropped;
            continue;
        }
        if (a.recs.empty()) continue;
        std::stable_sort(a.recs.begin(), a.recs.end(),
                         [](const RawRecord& l, const RawRecord& r) { return l.time < r.time; });
        RawTrack tr;
        tr.id = a.id;
        tr.records.reserve(a.recs.size());
        for (const RawRecord& r : a.recs) {
            if (!tr.records.empty() && !(r.time > tr.records.back().time)) {
                ++st.rows_dropped;  // duplicate timestamp
                continue;
            }
            tr.records.push_back(r);
        }
        ts.tracks.push_back(std::move(tr));
    }
    return ts;
}

inline TrackSet load_tracks(const std::string& path, const IngestSchema& schema,
                            IngestStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);
    return load_tracks(in, schema, stats);
}

// Local equirectangular projection about the dataset centroid:
// x = R cos(lat0) dlon, y = R dlat, in radians, R = 6371 (output unit km
// when the inputs are degrees).
inline TrackSet project_lonlat(const TrackSet& ts) {
    if (ts.crs != Crs::LonLat) throw IngestError("project_lonlat: track set is already planar");
    double lon0 = 0.0, lat0 = 0.0;
    long n = 0;
    for (const RawTrack& tr : ts.tracks)
        for (const RawRecord& r : tr.records) {
            lon0 += r.x;
            lat0 += r.y;
            ++n;
        }
    if (n == 0) {
        TrackSet out = ts;
        out.crs = Crs::Planar;
        return out;
    }
    lon0 /= static_cast<double>(n);
    lat0 /= static_cast<double>(n);
    constexpr double kEarthRadiusKm = 6371.0;
    constexpr double kDeg = M_PI / 180.0;
    TrackSet out;
    out.crs = Crs::Planar;
    out.tracks.reserve(ts.tracks.size());
    for (const RawTrack& tr : ts.tracks) {
        RawTrack o;
        o.id = tr.id;
        o.records.reserve(tr.records.size());
        for (const RawRecord& r : tr.records) {
            if (r.y < -90.0 || r.y > 90.0) throw IngestError("latitude out of range");
            o.records.push_back({r.time, kEarthRadiusKm * std::cos(lat0 * kDeg) * (r.x - lon0) * kDeg,
                                 kEarthRadiusKm * (r.y - lat0) * kDeg});
        }
        out.tracks.push_back(std::move(o));
    }
    return out;
}

// Nearest-record resampling onto the grid t * Z, anchored at each path's
// first record; each record serves at most one grid point. A grid point
// with no unconsumed record within t/2 ends the current path (a path cannot
// represent holes), so every data gap beyond the tolerance splits the track;
// gap_mult is retained from the interface but the split already happens at
// the tolerance. Paths shorter than 2 samples are discarded.
inline std::vector<SamplePath> resample(const TrackSet& ts, double t, double gap_mult = 3.0) {
    if (!(t > 0.0)) throw InvalidInputError("resample: t must be positive");
    (void)gap_mult;
    std::vector<SamplePath> out;
    for (const RawTrack& tr : ts.tracks) {
        const auto& recs = tr.records;
        std::size_t i = 0;
        while (i < recs.size()) {
            const double anchor = recs[i].time;
            SamplePath path;
            path.t = t;
            std::size_t ptr = i;
            bool consumed = false;
            for (long k = 0;; ++k) {
                const double target = anchor + static_cast<double>(k) * t;
                while (ptr + 1 < recs.size() &&
                       std::abs(recs[ptr + 1].time - target) < std::abs(recs[ptr].time - target)) {
                    ++ptr;
                    consumed = false;
                }
                if (!consumed && std::abs(recs[ptr].time - target) <= t / 2.0) {
                    path.samples.push_back({recs[ptr].x, recs[ptr].y});
                    consumed = true;
                } else {
                    break;
                }
            }
            path.T = path.samples.empty() ? 0.0 : static_cast<double>(path.samples.size() - 1) * t;
            if (path.samples.size() >= 2) out.push_back(std::move(path));
            i = consumed ? ptr + 1 : std::max(ptr, i + 1);
        }
    }
    return out;
}

inline double effective_observation_period(const std::vector<SamplePath>& paths) {
    double sum = 0.0;
    for (const SamplePath& p : paths) sum += static_cast<double>(p.transition_count()) * p.t;
    return sum;
}

// Canonical CSV serialization of the parsed fields (round-trip stable).
inline void save_tracks(std::ostream& out, const TrackSet& ts, const IngestSchema& schema) {
    auto num = [](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, res.ptr);
    };
    out << schema.id_col << ',' << schema.time_col << ',' << schema.x_col << ',' << schema.y_col
        << '\n';
    for (const RawTrack& tr : ts.tracks)
        for (const RawRecord& r : tr.records)
            out << tr.id << ',' << num(r.time) << ',' << num(r.x) << ',' << num(r.y) << '\n';
}

}  // namespace snapout
