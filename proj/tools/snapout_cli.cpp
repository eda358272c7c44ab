// Command-line front end: simulation, recovery, evaluation, cover-time and
// track ingestion, driven by an INI-style experiment config. Outputs are a
// pure function of (config, seeds): no timestamps, no machine state.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "snapout/config.hpp"
#include "snapout/estimators.hpp"
#include "snapout/geometry.hpp"
#include "snapout/ingest.hpp"
#include "snapout/io.hpp"
#include "snapout/process.hpp"
#include "snapout/svg.hpp"
#include "snapout/transport.hpp"

namespace fs = std::filesystem;
using namespace snapout;

namespace {

bool g_quiet = false;

void note(const std::string& msg) {
    if (!g_quiet) std::cout << msg << "\n";
}

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

// ---- config -> domain objects ---------------------------------------------

ClosedCurve curve_from(const Config& cfg, const std::string& section) {
    const std::string kind = cfg.get(section, "kind");
    const int res = static_cast<int>(cfg.get_long_or(section, "resolution", kDefaultCurveResolution));
    if (kind == "circle") {
        const auto c = cfg.get_doubles(section, "center");
        if (c.size() != 2) throw ConfigError("[" + section + "] center needs two numbers");
        return ClosedCurve::circle({c[0], c[1]}, cfg.get_double(section, "radius"), res);
    }
    if (kind == "ellipse") {
        const auto c = cfg.get_doubles(section, "center");
        if (c.size() != 2) throw ConfigError("[" + section + "] center needs two numbers");
        return ClosedCurve::ellipse({c[0], c[1]}, cfg.get_double(section, "a"),
                                    cfg.get_double(section, "b"),
                                    cfg.get_double_or(section, "rotation", 0.0), res);
    }
    if (kind == "spline") {
        std::vector<Vec2> ctrl;
        if (cfg.has(section, "points")) {
            const auto v = cfg.get_doubles(section, "points");
            if (v.size() % 2 != 0) throw ConfigError("[" + section + "] points need x y pairs");
            for (std::size_t i = 0; i + 1 < v.size(); i += 2) ctrl.push_back({v[i], v[i + 1]});
        } else {
            for (const std::string& p : cfg.get_all(section, "point")) {
                std::istringstream in(p);
                double x, y;
                if (!(in >> x >> y)) throw ConfigError("[" + section + "] bad point: " + p);
                ctrl.push_back({x, y});
            }
        }
        return ClosedCurve::periodic_spline(ctrl, res);
    }
    throw ConfigError("[" + section + "] unknown curve kind: " + kind);
}

Environment environment_from(const Config& cfg) {
    if (!cfg.has_section("outer")) throw ConfigError("config needs an [outer] section");
    Barrier outer = impermeable_barrier(curve_from(cfg, "outer"));
    std::vector<Barrier> inner;
    for (int i = 1;; ++i) {
        const std::string sec = "barrier." + std::to_string(i);
        if (!cfg.has_section(sec)) break;
        inner.push_back(Barrier{curve_from(cfg, sec), cfg.get_double(sec, "lambda_plus"),
                                cfg.get_double(sec, "lambda_minus")});
    }
    return Environment::create(std::move(outer), std::move(inner));
}

RecoveryConstants constants_from(const Config& cfg) {
    RecoveryConstants c;
    c.fixed_sens = cfg.get_double_or("constants", "fixed_sens", c.fixed_sens);
    c.fixed_trunc = cfg.get_double_or("constants", "fixed_trunc", c.fixed_trunc);
    c.refine_len = cfg.get_double_or("constants", "refine_len", c.refine_len);
    c.hf_ratio = cfg.get_double_or("constants", "hf_ratio", c.hf_ratio);
    c.hf_grid = cfg.get_double_or("constants", "hf_grid", c.hf_grid);
    c.hf_len = cfg.get_double_or("constants", "hf_len", c.hf_len);
    c.hf_visits = cfg.get_double_or("constants", "hf_visits", c.hf_visits);
    return c;
}

struct SimSpec {
    double t = 0.0;
    double T = 0.0;
    SimConfig cfg;
    std::optional<Vec2> x0;
};

SimSpec sim_from(const Config& cfg, const EnvParameters& par) {
    SimSpec s;
    s.t = cfg.get_double("sim", "t");
    s.T = cfg.get_double("sim", "T");
    s.cfg.h = cfg.get_double_or("sim", "h", default_step(s.t, par.kappa, par.rho));
    const double tmix_guess = par.t_mix.value_or(0.0);
    s.cfg.burn_in =
        cfg.get_double_or("sim", "burn_in", tmix_guess > 0.0 ? 4.0 * tmix_guess : 0.1 * s.T);
    s.cfg.record_dense = cfg.get_bool_or("sim", "record_dense", false);
    if (cfg.has("sim", "x0")) {
        const auto v = cfg.get_doubles("sim", "x0");
        if (v.size() != 2) throw ConfigError("[sim] x0 needs two numbers");
        s.x0 = Vec2{v[0], v[1]};
    }
    return s;
}

std::vector<std::uint64_t> seeds_from(const Config& cfg, const std::vector<std::uint64_t>& cli) {
    if (!cli.empty()) return cli;
    if (cfg.has("seeds", "list")) {
        std::vector<std::uint64_t> out;
        for (double v : cfg.get_doubles("seeds", "list"))
            out.push_back(static_cast<std::uint64_t>(v));
        if (!out.empty()) return out;
    }
    return {1};
}

EnvParameters params_from(const Config& cfg, const Environment& env) {
    return derive_parameters(env, cfg.get_optional_double("params", "pi_min"),
                             cfg.get_optional_double("params", "t_mix"));
}

std::string path_file(const std::string& out, std::uint64_t seed) {
    return out + "/path_seed" + std::to_string(seed) + ".csv";
}

void write_manifest(const std::string& out, const std::string& command, const Config& cfg,
                    const std::vector<std::uint64_t>& seeds,
                    const std::vector<std::string>& outputs) {
    detail::write_file(out + "/manifest.txt", manifest_text(command, cfg, seeds, outputs));
}

// ---- subcommands -----------------------------------------------------------

int cmd_simulate(const Config& cfg, const std::string& out,
                 const std::vector<std::uint64_t>& seed_args) {
    const Environment env = environment_from(cfg);
    const EnvParameters par = params_from(cfg, env);
    const SimSpec spec = sim_from(cfg, par);
    const std::vector<std::uint64_t> seeds = seeds_from(cfg, seed_args);
    fs::create_directories(out);

    std::vector<std::string> outputs;
    for (std::uint64_t seed : seeds) {
        outputs.push_back(path_file(out, seed));
        if (spec.cfg.record_dense)
            outputs.push_back(out + "/dense_seed" + std::to_string(seed) + ".csv");
    }

    // Seeds fan out to workers; each writes only its own files.
    const unsigned nw = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                        static_cast<unsigned>(seeds.size())));
    std::vector<std::thread> workers;
    std::vector<std::string> errors(seeds.size());
    for (unsigned w = 0; w < nw; ++w)
        workers.emplace_back([&, w]() {
            for (std::size_t i = w; i < seeds.size(); i += nw) {
                try {
                    SimConfig sc = spec.cfg;
                    sc.seed = seeds[i];
                    Rng rng(seeds[i]);
                    Vec2 x0;
                    std::vector<int> sides;
                    if (spec.x0) {
                        x0 = *spec.x0;
                        sides.assign(env.inner_count() + 1, +1);
                        for (std::size_t b = 0; b < env.inner_count(); ++b)
                            sides[b + 1] = side_sign(env.inner()[b].curve.side_of(x0));
                    } else {
                        std::tie(x0, sides) = stationary_start(env, sc, rng);
                        sc.burn_in = 0.0;  // stationary_start already burned in
                    }
                    const SamplePath path =
                        simulate(env, x0, std::vector<int>(sides.begin() + 1, sides.end()),
                                 spec.T, spec.t, sc, rng);
                    write_sample_path_csv(path_file(out, seeds[i]), path);
                    if (sc.record_dense)
                        detail::write_file(out + "/dense_seed" + std::to_string(seeds[i]) + ".csv",
                                           dense_trace_csv(path));
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    for (auto& th : workers) th.join();
    for (const std::string& e : errors)
        if (!e.empty()) throw Error(e);

    write_manifest(out, "simulate", cfg, seeds, outputs);
    note("wrote " + std::to_string(seeds.size()) + " path file(s) to " + out);
    return 0;
}

std::vector<SamplePath> load_paths(const std::vector<std::string>& files) {
    if (files.empty()) throw InvalidInputError("no path files given");
    std::vector<SamplePath> paths;
    for (const std::string& f : files) paths.push_back(read_sample_path_csv(f));
    return paths;
}

void write_overlay_svg(const Config& cfg, const std::string& file, const EstimateSet& est,
                       const std::vector<SamplePath>& paths) {
    Aabb box;
    for (const SamplePath& p : paths)
        for (const Vec2& x : p.samples) box.grow(x);
    std::optional<Environment> env;
    if (cfg.has_section("outer")) {
        env = environment_from(cfg);
        for (const Vec2& v : env->outer().curve.polyline()) box.grow(v);
    }
    SvgPlot plot(box);
    std::vector<Vec2> all;
    for (const SamplePath& p : paths) all.insert(all.end(), p.samples.begin(), p.samples.end());
    plot.add_dots(all, "#9ecae1", 0.25 * est.eps_grid);
    if (env)
        for (std::size_t b = 0; b < env->barrier_count(); ++b)
            plot.add_polyline(env->barrier(b).curve.polyline(), "#333333", 0.1 * est.eps_grid);
    if (est.regime == Regime::FixedFreq) {
        for (const auto& bx : est.boxes)
            plot.add_rect({bx.j * est.eps_grid, bx.k * est.eps_grid}, est.eps_grid, est.eps_grid,
                          "#e34a33", 0.6);
    } else {
        plot.add_dots(est.points.points, "#e34a33", 0.4 * est.eps_grid);
    }
    plot.write(file);
}

void write_estimate_outputs(const Config& cfg, const std::string& out, const EstimateSet& est,
                            const std::vector<SamplePath>& paths) {
    fs::create_directories(out);
    detail::write_file(out + "/estimate.csv", estimate_csv(est));
    detail::write_file(out + "/diagnostics.csv", diagnostics_csv(est));
    if (cfg.get_bool_or("recover", "svg", true))
        write_overlay_svg(cfg, out + "/overlay.svg", est, paths);
}

// Geometry parameters for deriving defaults: from the environment sections
// when present, overridable by explicit [recover] keys (kappa of unknown
// real-world barriers cannot be estimated before recovery, so it is input).
struct RecoverGeometry {
    double kappa = 0.0;
    double lambda_max = 0.0;
    double rho = 1.0;
};

RecoverGeometry recover_geometry(const Config& cfg) {
    RecoverGeometry g;
    if (cfg.has_section("outer")) {
        const Environment env = environment_from(cfg);
        const EnvParameters par = params_from(cfg, env);
        g.kappa = par.kappa;
        g.lambda_max = par.lambda_max;
        g.rho = par.rho;
    }
    g.kappa = cfg.get_double_or("recover", "kappa", g.kappa);
    g.lambda_max = cfg.get_double_or("recover", "lambda_max", g.lambda_max);
    g.rho = cfg.get_double_or("recover", "rho", g.rho);
    return g;
}

int cmd_recover(const Config& cfg, const std::string& out, const std::vector<std::string>& files,
                bool high_freq) {
    const std::vector<SamplePath> paths = load_paths(files);
    const double t = paths.front().t;
    const RecoveryConstants consts = constants_from(cfg);
    const RecoverGeometry geom = recover_geometry(cfg);
    std::vector<std::string> warnings;

    EstimateSet est;
    if (!high_freq) {
        const double eps_target = cfg.get_double_or("recover", "eps", std::sqrt(t));
        if (!(geom.kappa > 0.0))
            throw ConfigError(
                "recover: kappa unavailable; add [outer]/[barrier.*] or set [recover] kappa");
        FixedFreqParams par = default_fixed_params(t, geom.kappa, eps_target, consts, &warnings,
                                                   geom.lambda_max, geom.rho);
        par.s = cfg.get_double_or("recover", "s", par.s);
        par.u = cfg.get_double_or("recover", "u", par.u);
        par.eps_grid = cfg.get_double_or("recover", "eps_grid", par.eps_grid);
        est = recover_fixed_frequency(paths, par);
        note("fixed-frequency sweep flagged " + std::to_string(est.boxes.size()) + " boxes");
    } else {
        double T_eff = 0.0;
        for (const SamplePath& p : paths) T_eff += p.T;
        HighFreqParams par = default_high_freq_params(t, T_eff, consts, &warnings, geom.kappa,
                                                      geom.lambda_max, geom.rho);
        par.s = cfg.get_double_or("recover", "s", par.s);
        par.eps_grid = cfg.get_double_or("recover", "eps_grid", par.eps_grid);
        par.ell = cfg.get_double_or("recover", "ell", par.ell);
        par.n0 = cfg.get_long_or("recover", "n0", par.n0);
        est = recover_high_frequency(paths, par);
        note("high-frequency sweep flagged " + std::to_string(est.flagged.size()) + " points");
    }
    for (const std::string& w : warnings) warn(w);
    write_estimate_outputs(cfg, out, est, paths);
    write_manifest(out, high_freq ? "recover-hf" : "recover", cfg, {},
                   {out + "/estimate.csv", out + "/diagnostics.csv"});
    return 0;
}

int cmd_refine(const Config& cfg, const std::string& out, const std::string& initial_file,
               const std::vector<std::string>& files) {
    if (initial_file.empty())
        throw ConfigError("refine: an initial estimate file is required (--initial)");
    const std::vector<SamplePath> paths = load_paths(files);
    const double t = paths.front().t;
    const RecoveryConstants consts = constants_from(cfg);
    const RecoverGeometry geom = recover_geometry(cfg);
    if (!(geom.kappa > 0.0))
        throw ConfigError(
            "refine: kappa unavailable; add [outer]/[barrier.*] or set [recover] kappa");
    std::vector<std::string> warnings;

    const double eps_target = cfg.get_double_or("recover", "eps", std::sqrt(t));
    const double sE0 = cfg.get_double_or("recover", "sE", 3.0 * eps_target);
    FixedFreqParams par = default_refine_params(t, geom.kappa, eps_target, sE0, consts, &warnings,
                                                geom.lambda_max, geom.rho);
    par.s = cfg.get_double_or("recover", "s", par.s);
    par.u = cfg.get_double_or("recover", "u", par.u);
    par.ell = cfg.get_double_or("recover", "ell", par.ell);
    par.eps_grid = cfg.get_double_or("recover", "eps_grid", par.eps_grid);
    for (const std::string& w : warnings) warn(w);

    const PointSet initial = read_estimate_csv(initial_file);
    const long rounds = cfg.get_long_or("recover", "rounds", -1);
    EstimateSet est;
    if (rounds > 0) {
        est.points = initial;
        for (long r = 0; r < rounds; ++r) {
            est = refine(paths, par, est.points);
            if (est.points.points.empty()) break;
            par.sE /= 2.0;
        }
    } else {
        est = refine_until(paths, par, initial, eps_target);
    }
    note("refinement flagged " + std::to_string(est.points.points.size()) + " grid points");
    write_estimate_outputs(cfg, out, est, paths);
    write_manifest(out, "refine", cfg, {}, {out + "/estimate.csv", out + "/diagnostics.csv"});
    return 0;
}

int cmd_eval(const Config& cfg, const std::string& out, const std::string& estimate_file) {
    const Environment env = environment_from(cfg);
    const PointSet est = read_estimate_csv(estimate_file);
    if (est.points.empty())
        throw InvalidInputError("eval: estimate is empty; Hausdorff distance is undefined");
    std::vector<Vec2> truth;
    for (std::size_t b = 0; b < env.barrier_count(); ++b)
        for (const Vec2& v : env.barrier(b).curve.polyline()) truth.push_back(v);

    const PointGrid gt(truth), ge(est.points);
    double est_to_truth = 0.0, truth_to_est = 0.0;
    for (const Vec2& p : est.points) est_to_truth = std::max(est_to_truth, gt.nearest(p).dist);
    for (const Vec2& p : truth) truth_to_est = std::max(truth_to_est, ge.nearest(p).dist);
    const double dh = std::max(est_to_truth, truth_to_est);

    std::string report;
    report += "hausdorff: " + detail::fmt(dh) + "\n";
    report += "directed_estimate_to_truth: " + detail::fmt(est_to_truth) + "\n";
    report += "directed_truth_to_estimate: " + detail::fmt(truth_to_est) + "\n";
    report += "false_positive_max_distance: " + detail::fmt(est_to_truth) + "\n";
    std::cout << report;
    if (!out.empty()) {
        fs::create_directories(out);
        detail::write_file(out + "/eval.txt", report);
    }
    return 0;
}

int cmd_covertime(const Config& cfg, const std::string& out,
                  const std::vector<std::uint64_t>& seed_args) {
    const Environment env = environment_from(cfg);
    if (!env.inner().empty()) throw ConfigError("covertime requires an m = 0 environment");
    const double h = cfg.get_double_or("covertime", "h", 1e-4);
    const long npaths = cfg.get_long_or("covertime", "paths", 200);
    const double Tmax = cfg.get_double_or("covertime", "max_T", 400.0);
    std::vector<double> eps_list = cfg.has("covertime", "eps_list")
                                       ? cfg.get_doubles("covertime", "eps_list")
                                       : std::vector<double>{0.1, 0.05};
    std::sort(eps_list.begin(), eps_list.end(), std::greater<double>());
    const std::uint64_t seed0 = seeds_from(cfg, seed_args).front();

    const ClosedCurve& B0 = env.outer().curve;
    const double L = B0.length();

    // Cover time per path: first time every boundary point lies within eps
    // of a recorded hit. Hits are reflection events projected to arc length;
    // the worst angular gap decides coverage (chord of half the gap <= eps).
    std::vector<std::vector<double>> cover_time(eps_list.size(),
                                                std::vector<double>(npaths, -1.0));
    const unsigned nw = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < nw; ++w)
        workers.emplace_back([&, w]() {
            for (long p = w; p < npaths; p += nw) {
                Rng rng(seed0 + 7919 * static_cast<std::uint64_t>(p));
                SimConfig sc;
                sc.h = h;
                const auto [x0, sides] = stationary_start(env, sc, rng);
                (void)sides;
                ProcessState st = make_state(env, x0, {}, rng);
                Stepper stepper(env);
                stepper.reset(st);
                std::vector<double> hits;  // arc-length parameters, sorted
                std::size_t next_eps = 0;
                double last_L = 0.0;
                const long nsteps = static_cast<long>(Tmax / h);
                for (long k = 0; k < nsteps && next_eps < eps_list.size(); ++k) {
                    stepper.step(st, h, rng);
                    if (st.local_times[0] > last_L) {
                        last_L = st.local_times[0];
                        const auto near = B0.nearest(st.position);
                        hits.insert(std::upper_bound(hits.begin(), hits.end(), near.param),
                                    near.param);
                        while (next_eps < eps_list.size() && hits.size() >= 2) {
                            double worst_gap = hits.front() + L - hits.back();
                            for (std::size_t i = 0; i + 1 < hits.size(); ++i)
                                worst_gap = std::max(worst_gap, hits[i + 1] - hits[i]);
                            if (worst_gap / 2.0 <= eps_list[next_eps]) {
                                cover_time[next_eps][p] = st.clock;
                                ++next_eps;
                            } else {
                                break;
                            }
                        }
                    }
                }
            }
        });
    for (auto& th : workers) th.join();

    std::string report = "eps,mean_cover_time,ratio_to_log_sq,limit_constant\n";
    const double limit = 2.0 * env.area() / M_PI;
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        double sum = 0.0;
        for (double v : cover_time[e]) sum += (v >= 0.0 ? v : Tmax);  // censor at Tmax
        const double mean = sum / static_cast<double>(npaths);
        const double lg = std::log(1.0 / eps_list[e]);
        report += detail::fmt(eps_list[e]) + "," + detail::fmt(mean) + "," +
                  detail::fmt(mean / (lg * lg)) + "," + detail::fmt(limit) + "\n";
    }
    std::cout << report;
    if (!out.empty()) {
        fs::create_directories(out);
        detail::write_file(out + "/covertime.csv", report);
        write_manifest(out, "covertime", cfg, {seed0}, {out + "/covertime.csv"});
    }
    return 0;
}

int cmd_ingest(const Config& cfg, const std::string& out) {
    IngestSchema schema;
    schema.id_col = cfg.get_or("ingest", "id_col", schema.id_col);
    schema.time_col = cfg.get_or("ingest", "time_col", schema.time_col);
    schema.x_col = cfg.get_or("ingest", "x_col", schema.x_col);
    schema.y_col = cfg.get_or("ingest", "y_col", schema.y_col);
    schema.crs = cfg.get_or("ingest", "crs", "planar") == "lonlat" ? Crs::LonLat : Crs::Planar;
    schema.track_drop_fraction =
        cfg.get_double_or("ingest", "track_drop_fraction", schema.track_drop_fraction);
    const double t = cfg.get_double("ingest", "t");
    const double gap_mult = cfg.get_double_or("ingest", "gap_mult", 3.0);

    IngestStats stats;
    TrackSet ts = load_tracks(cfg.get("ingest", "file"), schema, &stats);
    if (ts.crs == Crs::LonLat) ts = project_lonlat(ts);
    const std::vector<SamplePath> paths = resample(ts, t, gap_mult);

    fs::create_directories(out);
    std::vector<std::string> outputs;
    double sum_T = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::string f = out + "/track" + std::to_string(i) + ".csv";
        write_sample_path_csv(f, paths[i]);
        outputs.push_back(f);
        sum_T += paths[i].T;
    }
    std::string report;
    report += "tracks_in: " + std::to_string(ts.tracks.size()) + "\n";
    report += "tracks_dropped: " + std::to_string(stats.tracks_dropped) + "\n";
    report += "rows_total: " + std::to_string(stats.rows_total) + "\n";
    report += "rows_dropped: " + std::to_string(stats.rows_dropped) + "\n";
    report += "paths_out: " + std::to_string(paths.size()) + "\n";
    report += "effective_T: " + detail::fmt(sum_T) + "\n";
    detail::write_file(out + "/ingest_report.txt", report);
    outputs.push_back(out + "/ingest_report.txt");
    write_manifest(out, "ingest", cfg, {}, outputs);
    std::cout << report;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"snapping-out Brownian motion: simulation and barrier recovery"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", initial_file, estimate_file;
    std::vector<std::uint64_t> seeds;
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seeds, "seed (repeatable; overrides [seeds] list)");
    app.add_flag("--quiet", g_quiet, "suppress progress notes");

    auto* sim = app.add_subcommand("simulate", "simulate sample paths");
    auto* rec = app.add_subcommand("recover", "fixed-frequency barrier recovery");
    auto* ref = app.add_subcommand("refine", "refine an initial estimate");
    auto* rhf = app.add_subcommand("recover-hf", "high-frequency barrier recovery");
    auto* cov = app.add_subcommand("covertime", "boundary cover-time experiment (m = 0)");
    auto* evl = app.add_subcommand("eval", "evaluate an estimate against the true environment");
    auto* ing = app.add_subcommand("ingest", "load and resample raw tracks");

    std::vector<std::string> path_files;
    rec->add_option("paths", path_files, "sample path CSV files");
    rhf->add_option("paths", path_files, "sample path CSV files");
    ref->add_option("paths", path_files, "sample path CSV files");
    ref->add_option("--initial", initial_file, "initial estimate CSV");
    evl->add_option("estimate", estimate_file, "estimate CSV file")->required();

    try {
        app.parse(argc, argv);
        const Config cfg = Config::parse_file(config_path);
        if (sim->parsed()) return cmd_simulate(cfg, out_dir, seeds);
        if (rec->parsed()) return cmd_recover(cfg, out_dir, path_files, false);
        if (rhf->parsed()) return cmd_recover(cfg, out_dir, path_files, true);
        if (ref->parsed()) return cmd_refine(cfg, out_dir, initial_file, path_files);
        if (cov->parsed()) return cmd_covertime(cfg, out_dir, seeds);
        if (evl->parsed()) return cmd_eval(cfg, out_dir, estimate_file);
        if (ing->parsed()) return cmd_ingest(cfg, out_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
