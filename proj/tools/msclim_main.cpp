// Command-line front end: simulations, equilibrium/region analysis,
// splitting-function tools, parameter sweeps and curve traces, all with
// deterministic file outputs and a replayable run manifest.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msclim/bifurcation.hpp"
#include "msclim/equilibria.hpp"
#include "msclim/integrate.hpp"
#include "msclim/io.hpp"
#include "msclim/melnikov.hpp"
#include "msclim/models.hpp"
#include "msclim/rng.hpp"
#include "msclim/svg.hpp"
#include "msclim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace msclim;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;
constexpr int exit_partial = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("MSCLIM_OUT_DIR")) return env;
    return ".";
}

/// Collects output files and finishes with a manifest that can replay the run.
struct RunWriter {
    fs::path dir;
    std::string prefix;
    std::vector<std::string> argv;  // canonical, fully resolved argument list
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    json extra;

    RunWriter(const std::string& out_dir, std::string pfx, std::vector<std::string> args)
        : dir(out_dir), prefix(std::move(pfx)), argv(std::move(args)) {
        fs::create_directories(dir);
    }

    fs::path path_for(const std::string& suffix) const { return dir / (prefix + suffix); }

    void add(const std::string& suffix, const std::string& content) {
        io::write_file_atomic(path_for(suffix), content);
        outputs.push_back(prefix + suffix);
    }

    void finish() {
        json m;
        m["tool"] = "msclim";
        m["version"] = version_string;
        m["argv"] = argv;
        m["outputs"] = outputs;
        for (auto& [k, v] : extra.items()) m[k] = v;
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        m["wall_clock_sec"] = secs;
        io::write_file_atomic(path_for(".manifest.json"), m.dump(2) + "\n");
    }
};

std::pair<double, double> parse_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos)
        throw UsageError("range must look like lo..hi, got '" + text + "'");
    try {
        const double lo = std::stod(text.substr(0, pos));
        const double hi = std::stod(text.substr(pos + 2));
        if (!(hi > lo)) throw UsageError("range '" + text + "' is empty");
        return {lo, hi};
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        throw UsageError("cannot parse range '" + text + "'");
    }
}

std::string fd(double v) { return io::format_double(v); }

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string model = "ms";
    double p = 1.0, q = 1.2, r = 0.8, s = 0.8;
    double lambda = 0.9, mu = 1.0, eta = 0.01;
    double x0 = 0.5, y0 = 0.3, z0 = -0.2;
    std::optional<std::uint64_t> seed;
    std::string method = "rk45";
    double step = 1e-2, abs_tol = 1e-9, rel_tol = 1e-9, t_end = 100.0;
    long max_steps = 20'000'000;
    std::string out = "orbit";
    std::string out_dir = default_out_dir();
    bool emit_svg = false;
};

IntegratorConfig make_config(const SimulateArgs& a) {
    IntegratorConfig cfg;
    cfg.method = (a.method == "rk4") ? StepMethod::rk4 : StepMethod::rk45;
    cfg.step = a.step;
    cfg.abs_tol = a.abs_tol;
    cfg.rel_tol = a.rel_tol;
    cfg.t_end = a.t_end;
    cfg.max_steps = a.max_steps;
    if (auto reason = invalid_reason(cfg); !reason.empty()) throw UsageError(reason);
    return cfg;
}

std::vector<std::string> simulate_argv(const SimulateArgs& a) {
    std::vector<std::string> v{"simulate", "--model", a.model};
    if (a.model == "ms")
        v.insert(v.end(), {"--p", fd(a.p), "--q", fd(a.q), "--r", fd(a.r), "--s", fd(a.s)});
    else if (a.model == "sym")
        v.insert(v.end(), {"--p", fd(a.p), "--r", fd(a.r)});
    else if (a.model == "asym" || a.model == "rotated")
        v.insert(v.end(), {"--p", fd(a.p), "--r", fd(a.r), "--s", fd(a.s)});
    else
        v.insert(v.end(),
                 {"--lambda", fd(a.lambda), "--mu", fd(a.mu), "--eta", fd(a.eta)});
    if (a.seed) {
        v.insert(v.end(), {"--seed", std::to_string(*a.seed)});
    } else {
        v.insert(v.end(), {"--x0", fd(a.x0), "--y0", fd(a.y0)});
        if (a.model == "ms") v.insert(v.end(), {"--z0", fd(a.z0)});
    }
    v.insert(v.end(), {"--method", a.method, "--step", fd(a.step), "--abs-tol", fd(a.abs_tol),
                       "--rel-tol", fd(a.rel_tol), "--t-end", fd(a.t_end), "--max-steps",
                       std::to_string(a.max_steps), "--out", a.out, "--out-dir", a.out_dir});
    if (a.emit_svg) v.push_back("--svg");
    return v;
}

template <std::size_t N>
int write_orbit_outputs(RunWriter& w, const SimulateArgs& a, const IntegratorConfig& cfg,
                        json params, OrbitRecord<N>& rec) {
    if (a.seed) {
        rec.has_seed = true;
        rec.seed = *a.seed;
        w.extra["seed"] = *a.seed;
    }
    w.add(".csv", io::orbit_csv(rec));
    w.add(".json", io::orbit_json(rec, params, cfg).dump(2) + "\n");
    if (a.emit_svg) w.add(".svg", svg::orbit_chart(rec, a.model));
    w.finish();
    std::cout << "wrote " << rec.times.size() << " samples over t in [0, " << rec.last_good_time
              << "] (" << rec.last_good_time * kyr_per_time_unit << " kyr equivalent)\n";
    if (rec.status != OrbitStatus::ok) {
        std::cerr << "integration ended early: " << to_string(rec.status) << " at t="
                  << rec.last_good_time << "\n";
        return exit_numeric;
    }
    return exit_ok;
}

int run_simulate(const SimulateArgs& a) {
    const IntegratorConfig cfg = make_config(a);
    RunWriter w(a.out_dir, a.out, simulate_argv(a));
    json params{{"model", a.model}};

    if (a.model == "ms") {
        MsParams k{a.p, a.q, a.r, a.s};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        params.update(json{{"p", k.p}, {"q", k.q}, {"r", k.r}, {"s", k.s}});
        State3 ic{a.x0, a.y0, a.z0};
        if (a.seed) {
            std::mt19937_64 eng(*a.seed);
            ic = random_state<3>(eng, 2.5);
        }
        params["initial"] = std::vector<double>{ic[0], ic[1], ic[2]};
        auto rec = integrate<3>(MsField{k}, ic, cfg);
        return write_orbit_outputs(w, a, cfg, params, rec);
    }

    State2 ic{a.x0, a.y0};
    if (a.seed) {
        std::mt19937_64 eng(*a.seed);
        ic = random_state<2>(eng, 2.5);
    }
    params["initial"] = std::vector<double>{ic[0], ic[1]};
    OrbitRecord<2> rec;
    if (a.model == "sym") {
        SymParams k{a.p, a.r};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        params.update(json{{"p", k.p}, {"r", k.r}});
        rec = integrate<2>(SymField{k}, ic, cfg);
    } else if (a.model == "asym" || a.model == "rotated") {
        AsymParams k{a.p, a.r, a.s};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        params.update(json{{"p", k.p}, {"r", k.r}, {"s", k.s}});
        rec = (a.model == "asym") ? integrate<2>(AsymField{k}, ic, cfg)
                                  : integrate<2>(RotatedField{k}, ic, cfg);
    } else if (a.model == "unfolded") {
        UnfoldParams k{a.lambda, a.mu, a.eta};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        params.update(json{{"lambda", k.lambda}, {"mu", k.mu}, {"eta", k.eta}});
        rec = integrate<2>(UnfoldedField{k}, ic, cfg);
    } else {
        throw UsageError("unknown model '" + a.model + "'");
    }
    return write_orbit_outputs(w, a, cfg, params, rec);
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string variant = "sym";
    double p = 1.0, r = 1.0, s = 0.8, q = 1.2;
    std::string out = "analysis";
    std::string out_dir = default_out_dir();
};

template <std::size_t N>
json equilibria_json(const std::vector<EquilibriumReport<N>>& eqs) {
    json arr = json::array();
    for (const auto& e : eqs) arr.push_back(io::to_json(e));
    return arr;
}

int run_analyze(const AnalyzeArgs& a) {
    std::vector<std::string> argv{"analyze", "--variant", a.variant, "--p", fd(a.p),
                                  "--r",     fd(a.r)};
    if (a.variant != "sym") argv.insert(argv.end(), {"--s", fd(a.s)});
    if (a.variant == "ms") argv.insert(argv.end(), {"--q", fd(a.q)});
    argv.insert(argv.end(), {"--out", a.out, "--out-dir", a.out_dir});
    RunWriter w(a.out_dir, a.out, argv);

    json j;
    j["schema"] = "msclim-analysis-v1";
    std::string region_text;

    if (a.variant == "sym") {
        SymParams k{a.p, a.r};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        j["params"] = {{"variant", "sym"}, {"p", k.p}, {"r", k.r}};
        j["equilibria"] = equilibria_json(find_equilibria(k));
        const auto lab = region_classify(k);
        j["region"] = {{"label", to_string(lab.region)},
                       {"boundary", lab.boundary},
                       {"near_curves", lab.near_curves},
                       {"on_spiral_node_c1", lab.on_spiral_node_c1},
                       {"on_spiral_node_c2", lab.on_spiral_node_c2}};
        region_text = to_string(lab.region);
        json bts = json::array();
        for (const auto& bt : bt_points(Variant::sym)) {
            const bool here = std::abs(bt.p - k.p) < 1e-9 && std::abs(bt.r - k.r) < 1e-9;
            bts.push_back({{"p", bt.p}, {"r", bt.r}, {"at_params", here}});
            if (here) region_text += " (double-zero organizing center)";
        }
        j["bt_points"] = bts;
    } else if (a.variant == "asym") {
        AsymParams k{a.p, a.r, a.s};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        j["params"] = {{"variant", "asym"}, {"p", k.p}, {"r", k.r}, {"s", k.s}};
        j["equilibria"] = equilibria_json(find_equilibria(k));
        const auto lab = region_classify(k);
        j["region"] = {{"label", to_string(lab.region)},
                       {"boundary", lab.boundary},
                       {"near_curves", lab.near_curves}};
        region_text = to_string(lab.region);
        json bts = json::array();
        for (const auto& bt : bt_points(Variant::asym, k.s)) {
            const bool here = std::abs(bt.p - k.p) < 1e-9 && std::abs(bt.r - k.r) < 1e-9;
            bts.push_back({{"p", bt.p}, {"r", bt.r}, {"at_params", here}});
            if (here) region_text += " (double-zero organizing center)";
        }
        j["bt_points"] = bts;
    } else if (a.variant == "ms") {
        MsParams k{a.p, a.q, a.r, a.s};
        if (auto reason = invalid_reason(k); !reason.empty()) throw UsageError(reason);
        j["params"] = {{"variant", "ms"}, {"p", k.p}, {"q", k.q}, {"r", k.r}, {"s", k.s}};
        j["equilibria"] = equilibria_json(find_equilibria(k));
        region_text = "(no region atlas for the three-dimensional model)";
    } else {
        throw UsageError("unknown variant '" + a.variant + "'");
    }

    w.add(".json", j.dump(2) + "\n");
    std::cout << "region: " << region_text << "\n";
    for (const auto& e : j["equilibria"]) {
        std::cout << "  " << e["label"].get<std::string>() << " at (";
        const auto& loc = e["location"];
        for (std::size_t i = 0; i < loc.size(); ++i)
            std::cout << (i ? ", " : "") << loc[i].get<double>();
        std::cout << "): " << e["kind"].get<std::string>() << "\n";
    }
    w.finish();
    return exit_ok;
}

// ---------------------------------------------------------------------------
// melnikov
// ---------------------------------------------------------------------------

struct MelnikovArgs {
    std::string task;  // rcurve | fold | census
    int mu_sign = 1;
    double from = 1.01, to = 2.0;
    int n = 50;
    double lambda = 0.9;
    std::string out;
    std::string out_dir = default_out_dir();
};

int run_melnikov(const MelnikovArgs& a) {
    std::vector<std::string> argv{"melnikov", a.task, "--mu-sign", std::to_string(a.mu_sign),
                                  "--out-dir", a.out_dir};
    if (a.task == "rcurve")
        argv.insert(argv.end(), {"--from", fd(a.from), "--to", fd(a.to), "--n",
                                 std::to_string(a.n)});
    if (a.task == "census") argv.insert(argv.end(), {"--lambda", fd(a.lambda)});
    const std::string prefix = a.out.empty() ? ("melnikov_" + a.task) : a.out;
    argv.insert(argv.end(), {"--out", prefix});
    RunWriter w(a.out_dir, prefix, argv);

    if (a.task == "rcurve") {
        const double lo_limit = (a.mu_sign > 0) ? 1.0 : 0.0;
        if (!(a.from > lo_limit) || !(a.to > a.from) || a.n < 2)
            throw UsageError("rcurve needs " + std::string(a.mu_sign > 0 ? "1" : "0") +
                             " < from < to and n >= 2");
        std::vector<double> xs;
        for (int i = 0; i < a.n; ++i)
            xs.push_back(a.from + (a.to - a.from) * i / (a.n - 1));
        const auto samples = R_curve(a.mu_sign, xs);
        w.add(".csv", io::rcurve_csv(samples));
        std::cout << "wrote " << samples.size() << " samples of (x, I0, I2, R)\n";
    } else if (a.task == "fold") {
        const auto fold = find_fold();
        json j{{"schema", "msclim-fold-v1"},
               {"x_star", fold.x_star},
               {"lambda_star", fold.lambda_star},
               {"fold_tangent_slope", pencil_slope(fold.lambda_star, 1.0)},
               {"homoclinic_lambda", 0.8},
               {"homoclinic_tangent_slope", pencil_slope(0.8, 1.0)}};
        w.add(".json", j.dump(2) + "\n");
        std::cout << "x* = " << fold.x_star << ", lambda* = " << fold.lambda_star
                  << " (tangent slope " << pencil_slope(fold.lambda_star, 1.0) << ")\n";
    } else if (a.task == "census") {
        const auto pred = cycle_census_unfolded(a.lambda, a.mu_sign);
        json cycles = json::array();
        for (const auto& c : pred.cycles)
            cycles.push_back({{"stable", c.stable},
                              {"kind", to_string(c.kind)},
                              {"x", c.x},
                              {"mirrored", c.mirrored}});
        json j{{"schema", "msclim-census-v1"},
               {"lambda", a.lambda},
               {"mu_sign", a.mu_sign},
               {"stable", pred.stable_count()},
               {"unstable", pred.unstable_count()},
               {"cycles", cycles}};
        w.add(".json", j.dump(2) + "\n");
        std::cout << "predicted cycles: " << pred.stable_count() << " stable, "
                  << pred.unstable_count() << " unstable\n";
    } else {
        throw UsageError("melnikov task must be rcurve, fold or census");
    }
    w.finish();
    return exit_ok;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string model = "ms";
    double q = 1.2, s = 0.8;
    std::string p_range = "0..3", r_range = "0..3";
    int n = 60, np = 0, nr = 0;
    std::uint64_t seed = 0;
    double t_end = 500.0, transient_fraction = 0.5, abs_tol = 1e-8, rel_tol = 1e-8;
    int threads = 1;
    std::string out = "sweep";
    std::string out_dir = default_out_dir();
    bool emit_svg = false;
};

int run_sweep(const SweepArgs& a) {
    const auto [p_lo, p_hi] = parse_range(a.p_range);
    const auto [r_lo, r_hi] = parse_range(a.r_range);
    const int np = a.np > 0 ? a.np : a.n;
    const int nr = a.nr > 0 ? a.nr : a.n;
    if (np <= 0 || nr <= 0) throw UsageError("grid sizes must be positive");

    ModelKind model;
    if (a.model == "ms") model = ModelKind::ms3;
    else if (a.model == "sym") model = ModelKind::sym2;
    else if (a.model == "asym") model = ModelKind::asym2;
    else throw UsageError("sweep model must be ms, sym or asym");
    if (model == ModelKind::ms3 && !(a.q > 1)) throw UsageError("q > 1 violated");
    const double s_eff = (model == ModelKind::sym2) ? 0.0 : a.s;
    if (s_eff < 0) throw UsageError("s >= 0 violated");

    std::vector<std::string> argv{
        "sweep",        "--model", a.model,
        "--q",          fd(a.q),   "--s",
        fd(a.s),        "--p",     a.p_range,
        "--r",          a.r_range, "--np",
        std::to_string(np),        "--nr",
        std::to_string(nr),        "--seed",
        std::to_string(a.seed),    "--t-end",
        fd(a.t_end),    "--transient-fraction",
        fd(a.transient_fraction),  "--abs-tol",
        fd(a.abs_tol),  "--rel-tol", fd(a.rel_tol),
        "--threads",    std::to_string(a.threads),
        "--out",        a.out,     "--out-dir", a.out_dir};
    if (a.emit_svg) argv.push_back("--svg");
    RunWriter w(a.out_dir, a.out, argv);
    w.extra["seed"] = a.seed;

    SweepOptions opt;
    opt.cfg.t_end = a.t_end;
    opt.cfg.abs_tol = a.abs_tol;
    opt.cfg.rel_tol = a.rel_tol;
    opt.transient_fraction = a.transient_fraction;
    opt.threads = a.threads;
    if (auto reason = invalid_reason(opt.cfg); !reason.empty()) throw UsageError(reason);

    const auto grid = sweep_xbar(model, a.q, s_eff, p_lo, p_hi, np, r_lo, r_hi, nr, a.seed, opt);

    w.add(".csv", io::sweep_csv(grid));
    w.add(".bin", io::sweep_matrix_bytes(grid));
    w.add(".json", io::sweep_json_header(grid, a.out + ".bin").dump(2) + "\n");
    if (a.emit_svg) w.add(".svg", svg::sweep_heatmap(grid, {}, "sup of x"));
    w.finish();

    const auto failed = grid.failed_cells();
    std::cout << "swept " << np * nr << " cells, " << failed << " failed\n";
    if (failed > 0) {
        std::cerr << "warning: " << failed << " cells recorded integrator failures\n";
        return exit_partial;
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// trace
// ---------------------------------------------------------------------------

struct TraceArgs {
    std::string variant = "sym";
    std::string kind = "all";
    double s = 0.8;
    double p_from = 0.0, p_to = 0.0, step = 0.02;  // 0: variant default
    double r_tol = 1e-5;
    std::string seed_eq;
    std::string out = "curves";
    std::string out_dir = default_out_dir();
    bool emit_svg = false;
};

int run_trace(const TraceArgs& a) {
    const Variant variant = (a.variant == "asym") ? Variant::asym : Variant::sym;
    if (a.variant != "sym" && a.variant != "asym")
        throw UsageError("variant must be sym or asym");
    const double s = (variant == Variant::sym) ? 0.0 : a.s;
    double p_from = a.p_from, p_to = a.p_to;
    if (p_from == 0.0 && p_to == 0.0) {
        if (variant == Variant::sym) {
            p_from = 0.6;
            p_to = 0.98;
        } else {
            p_from = 1.45;
            p_to = 1.65;
        }
    }

    std::vector<std::string> argv{"trace",  "--variant", a.variant, "--kind", a.kind,
                                  "--s",    fd(a.s),     "--p-from", fd(p_from), "--p-to",
                                  fd(p_to), "--step",    fd(a.step), "--r-tol", fd(a.r_tol),
                                  "--out",  a.out,       "--out-dir", a.out_dir};
    if (!a.seed_eq.empty()) argv.insert(argv.end(), {"--seed-eq", a.seed_eq});
    if (a.emit_svg) argv.push_back("--svg");
    RunWriter w(a.out_dir, a.out, argv);

    TraceOptions opt;
    opt.r_tol = a.r_tol;
    if (a.seed_eq == "P1") opt.seed_eq = EqLabel::P1;
    else if (a.seed_eq == "P2") opt.seed_eq = EqLabel::P2;
    else if (!a.seed_eq.empty()) throw UsageError("seed-eq must be P1 or P2");

    std::vector<BifurcationCurve> curves;
    auto want = [&](const char* name) { return a.kind == "all" || a.kind == name; };

    if (want("hopf"))
        for (auto& c : hopf_curves(variant, s)) curves.push_back(std::move(c));
    if (want("pitchfork") || want("transcritical") || want("saddle-node")) {
        for (auto& c : codim1_loci(variant, s)) {
            const bool keep = a.kind == "all" ||
                              (a.kind == "pitchfork" && c.kind == CurveKind::pitchfork) ||
                              (a.kind == "transcritical" && c.kind == CurveKind::transcritical) ||
                              (a.kind == "saddle-node" && c.kind == CurveKind::saddle_node_eq);
            if (keep) curves.push_back(std::move(c));
        }
    }
    if (want("homoclinic"))
        curves.push_back(trace_homoclinic(variant, s, p_from, p_to, a.step, opt));
    if (want("cycle-fold"))
        curves.push_back(trace_cycle_fold(variant, s, p_from, p_to, a.step, opt));
    if (curves.empty()) throw UsageError("unknown curve kind '" + a.kind + "'");

    w.add(".csv", io::curves_csv(curves));
    json j{{"schema", "msclim-curves-v1"}, {"curves", json::array()}};
    for (const auto& c : curves) j["curves"].push_back(io::to_json(c));
    w.add(".json", j.dump(2) + "\n");
    if (a.emit_svg) {
        SweepGrid empty;  // curve overlay on an empty canvas-scaled grid
        empty.p_axis = {p_from, std::max(p_to, p_from + 1e-3)};
        empty.r_axis = {0.5, 3.0};
        empty.values = {0, 0, 0, 0};
        empty.status = {1, 1, 1, 1};
        w.add(".svg", svg::sweep_heatmap(empty, curves, "bifurcation curves"));
    }
    w.finish();
    std::cout << "wrote " << curves.size() << " curves\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args);

int run_replay(const std::string& manifest_path, const std::string& out_dir_override) {
    std::ifstream in(manifest_path);
    if (!in) throw UsageError("cannot open manifest '" + manifest_path + "'");
    json m = json::parse(in);
    if (!m.contains("argv")) throw UsageError("manifest has no argv record");
    std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
    if (!out_dir_override.empty()) {
        bool replaced = false;
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--out-dir") {
                args[i + 1] = out_dir_override;
                replaced = true;
            }
        if (!replaced) {
            args.push_back("--out-dir");
            args.push_back(out_dir_override);
        }
    }
    return dispatch(args);
}

// ---------------------------------------------------------------------------
// argument wiring
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Maasch-Saltzman glacial-cycle model toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "integrate one trajectory to files");
    sim_cmd->add_option("--model", sim.model, "ms | sym | asym | rotated | unfolded");
    sim_cmd->add_option("--p", sim.p);
    sim_cmd->add_option("--q", sim.q);
    sim_cmd->add_option("--r", sim.r);
    sim_cmd->add_option("--s", sim.s);
    sim_cmd->add_option("--lambda", sim.lambda);
    sim_cmd->add_option("--mu", sim.mu);
    sim_cmd->add_option("--eta", sim.eta);
    sim_cmd->add_option("--x0", sim.x0);
    sim_cmd->add_option("--y0", sim.y0);
    sim_cmd->add_option("--z0", sim.z0);
    std::uint64_t seed_value = 0;
    auto* seed_opt = sim_cmd->add_option("--seed", seed_value,
                                         "draw the initial state from this seed");
    sim_cmd->add_option("--method", sim.method, "rk45 | rk4");
    sim_cmd->add_option("--step", sim.step);
    sim_cmd->add_option("--abs-tol", sim.abs_tol);
    sim_cmd->add_option("--rel-tol", sim.rel_tol);
    sim_cmd->add_option("--t-end", sim.t_end);
    sim_cmd->add_option("--max-steps", sim.max_steps);
    sim_cmd->add_option("--out", sim.out);
    sim_cmd->add_option("--out-dir", sim.out_dir);
    sim_cmd->add_flag("--svg", sim.emit_svg);

    AnalyzeArgs an;
    auto* an_cmd = app.add_subcommand("analyze", "equilibria, stability and region label");
    an_cmd->add_option("--variant", an.variant, "sym | asym | ms");
    an_cmd->add_option("--p", an.p)->required();
    an_cmd->add_option("--r", an.r)->required();
    an_cmd->add_option("--s", an.s);
    an_cmd->add_option("--q", an.q);
    an_cmd->add_option("--out", an.out);
    an_cmd->add_option("--out-dir", an.out_dir);

    MelnikovArgs mel;
    auto* mel_cmd = app.add_subcommand("melnikov", "splitting-function tools");
    mel_cmd->add_option("task", mel.task, "rcurve | fold | census")->required();
    mel_cmd->add_option("--mu-sign", mel.mu_sign);
    mel_cmd->add_option("--from", mel.from);
    mel_cmd->add_option("--to", mel.to);
    mel_cmd->add_option("--n", mel.n);
    mel_cmd->add_option("--lambda", mel.lambda);
    mel_cmd->add_option("--out", mel.out);
    mel_cmd->add_option("--out-dir", mel.out_dir);

    SweepArgs sw;
    auto* sw_cmd = app.add_subcommand("sweep", "grid of long-run sups over (p, r)");
    sw_cmd->add_option("--model", sw.model, "ms | sym | asym");
    sw_cmd->add_option("--q", sw.q);
    sw_cmd->add_option("--s", sw.s);
    sw_cmd->add_option("--p", sw.p_range, "range lo..hi");
    sw_cmd->add_option("--r", sw.r_range, "range lo..hi");
    sw_cmd->add_option("--n", sw.n);
    sw_cmd->add_option("--np", sw.np);
    sw_cmd->add_option("--nr", sw.nr);
    sw_cmd->add_option("--seed", sw.seed);
    sw_cmd->add_option("--t-end", sw.t_end);
    sw_cmd->add_option("--transient-fraction", sw.transient_fraction);
    sw_cmd->add_option("--abs-tol", sw.abs_tol);
    sw_cmd->add_option("--rel-tol", sw.rel_tol);
    sw_cmd->add_option("--threads", sw.threads);
    sw_cmd->add_option("--out", sw.out);
    sw_cmd->add_option("--out-dir", sw.out_dir);
    sw_cmd->add_flag("--svg", sw.emit_svg);

    TraceArgs tr;
    auto* tr_cmd = app.add_subcommand("trace", "closed-form and traced bifurcation curves");
    tr_cmd->add_option("--variant", tr.variant, "sym | asym");
    tr_cmd->add_option("--kind", tr.kind,
                       "hopf | pitchfork | transcritical | saddle-node | homoclinic | "
                       "cycle-fold | all");
    tr_cmd->add_option("--s", tr.s);
    tr_cmd->add_option("--p-from", tr.p_from);
    tr_cmd->add_option("--p-to", tr.p_to);
    tr_cmd->add_option("--step", tr.step);
    tr_cmd->add_option("--r-tol", tr.r_tol);
    tr_cmd->add_option("--seed-eq", tr.seed_eq, "P1 | P2");
    tr_cmd->add_option("--out", tr.out);
    tr_cmd->add_option("--out-dir", tr.out_dir);
    tr_cmd->add_flag("--svg", tr.emit_svg);

    std::string replay_manifest;
    std::string replay_out_dir;
    auto* rp_cmd = app.add_subcommand("replay", "re-run a recorded manifest");
    rp_cmd->add_option("manifest", replay_manifest)->required();
    rp_cmd->add_option("--out-dir", replay_out_dir);

    std::vector<const char*> argv;
    argv.push_back("msclim");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    if (*sim_cmd) {
        if (seed_opt->count() > 0) sim.seed = seed_value;
        return run_simulate(sim);
    }
    if (*an_cmd) return run_analyze(an);
    if (*mel_cmd) return run_melnikov(mel);
    if (*sw_cmd) return run_sweep(sw);
    if (*tr_cmd) return run_trace(tr);
    if (*rp_cmd) return run_replay(replay_manifest, replay_out_dir);
    return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return dispatch(args);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return exit_numeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "unexpected failure: " << e.what() << "\n";
        return 1;
    }
}
