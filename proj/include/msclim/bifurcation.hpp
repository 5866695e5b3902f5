#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "msclim/curve.hpp"
#include "msclim/equilibria.hpp"
#include "msclim/errors.hpp"
#include "msclim/integrate.hpp"
#include "msclim/models.hpp"
#include "msclim/rng.hpp"

namespace msclim {

// ---------------------------------------------------------------------------
// Hopf curves (closed forms)
// ---------------------------------------------------------------------------

/// Hopf loci in the (p, r) plane. sym: the half-lines {r=1, p>1} (trivial
/// branch, supercritical) and {p=1, r>1} (nontrivial branches, subcritical).
/// asym: {r=1, p>1} plus the two arms of the trace-zero parabola
/// p = 1 - s*x*, r = 1 + x*^2; the left arm belongs to the upper branch, the
/// right arm (beyond the second organizing center) to the lower branch.
inline std::vector<BifurcationCurve> hopf_curves(Variant variant, double s = 0.0,
                                                 const PlotWindow& w = {}) {
    std::vector<BifurcationCurve> out;
    const int n = w.n;

    BifurcationCurve e0;
    e0.kind = CurveKind::hopf_super;
    e0.association = CurveAssociation::P0;
    for (int i = 0; i < n; ++i)
        e0.points.push_back({1.0 + (w.p_max - 1.0) * i / (n - 1), 1.0});
    out.push_back(std::move(e0));

    if (variant == Variant::sym) s = 0.0;

    if (s == 0.0) {
        BifurcationCurve e12;
        e12.kind = CurveKind::hopf_sub;
        e12.association = CurveAssociation::P1;
        e12.note = "P1 and P2 branches coincide";
        for (int i = 0; i < n; ++i)
            e12.points.push_back({1.0, 1.0 + (w.r_max - 1.0) * i / (n - 1)});
        out.push_back(std::move(e12));
        return out;
    }

    // left arm: x* from (1 - p_min)/s down to 0, sorted by increasing p
    BifurcationCurve e1;
    e1.kind = CurveKind::hopf_sub;
    e1.association = CurveAssociation::P1;
    {
        const double x_hi = (1.0 - w.p_min) / s;
        for (int i = 0; i < n; ++i) {
            const double xs = x_hi * (1.0 - static_cast<double>(i) / (n - 1));
            e1.points.push_back({1.0 - s * xs, 1.0 + xs * xs});
        }
    }
    out.push_back(std::move(e1));

    // right arm: x* from -s/2 (tangency with the shifted diagonal) downward
    BifurcationCurve e2;
    e2.kind = CurveKind::hopf_sub;
    e2.association = CurveAssociation::P2;
    {
        const double x_lo = -(w.p_max - 1.0) / s;
        for (int i = 0; i < n; ++i) {
            const double xs = -0.5 * s + (x_lo + 0.5 * s) * i / (n - 1);
            e2.points.push_back({1.0 - s * xs, 1.0 + xs * xs});
        }
    }
    out.push_back(std::move(e2));
    return out;
}

// ---------------------------------------------------------------------------
// Curve tracers (grid in p, bisection in r)
// ---------------------------------------------------------------------------

struct TraceOptions {
    double r_tol = 1e-5;            // bisection tolerance in r
    double saddle_clearance = 1e-3; // loop-to-saddle distance that counts as collision
    std::optional<EqLabel> seed_eq; // reverse-time seeds sit next to this equilibrium;
                                    // defaults to P1 (sym) or P2 (asym)
    double detector_t_end = 0.0;    // 0: scale automatically with the distance to (1,1)
    IntegratorConfig cfg{StepMethod::rk45, 1e-2, 1e-9, 1e-9, 0.0, 40'000'000};
    CycleOptions cycle{};

    TraceOptions() {
        cycle.return_rel_tol = 3e-4;
        cycle.warmup_fraction = 0.1;
    }
};

namespace detail {

enum class ReverseOutcome { small_loop, saddle_loop, self_point, other };

template <class Field>
ReverseOutcome reverse_probe(Field&& field, const std::vector<EquilibriumReport<2>>& eqs,
                             EqLabel seed_label, double saddle_clearance,
                             const IntegratorConfig& cfg, const CycleOptions& cyc) {
    const EquilibriumReport<2>* seed_eq = nullptr;
    const EquilibriumReport<2>* saddle = nullptr;
    for (const auto& e : eqs) {
        if (e.label == seed_label) seed_eq = &e;
        if (e.kind == EquilibriumKind::saddle && !saddle) saddle = &e;
    }
    if (!seed_eq || !attracts_forward(seed_eq->kind)) return ReverseOutcome::self_point;
    if (!saddle) return ReverseOutcome::other;

    // plant the seed a fixed fraction of the way out toward nowhere in
    // particular; scale with the distance to the saddle so the seed stays
    // inside any small repelling loop
    const double scale = 0.15 * dist2(seed_eq->location, saddle->location);
    const State2 seed{seed_eq->location[0] + scale, seed_eq->location[1] - scale};

    auto rev = [&field](const State2& y) {
        auto d = field(y);
        return State2{-d[0], -d[1]};
    };
    auto cap = capture_points<2>(eqs, attracts_reverse);
    const auto res = classify_trajectory<2>(rev, seed, cfg, std::span<const State2>(cap), cyc,
                                            &seed_eq->location);

    using Kind = TrajectoryOutcome<2>::Kind;
    if (res.kind == Kind::equilibrium) {
        if (res.equilibrium_index < 0) return ReverseOutcome::self_point;
        const auto& where = cap[static_cast<std::size_t>(res.equilibrium_index)];
        return dist2(where, seed_eq->location) < 1e-9 ? ReverseOutcome::self_point
                                                      : ReverseOutcome::other;
    }
    if (res.kind != Kind::cycle) return ReverseOutcome::other;

    const int w_saddle = winding_number(res.cycle.loop, saddle->location);
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& y : res.cycle.loop)
        min_dist = std::min(min_dist, dist2(y, saddle->location));
    if (w_saddle != 0) return ReverseOutcome::saddle_loop;
    if (min_dist <= saddle_clearance) return ReverseOutcome::saddle_loop;  // grazing counts
    return ReverseOutcome::small_loop;
}

inline AsymParams as_params(Variant variant, double s, double p, double r) {
    return AsymParams{p, r, variant == Variant::sym ? 0.0 : s};
}

inline double auto_t_end(double p, double r, double override_value) {
    if (override_value > 0) return override_value;
    const double eta2 = std::max(std::abs(r - p), 1e-4);
    return std::clamp(4000.0 / std::sqrt(eta2), 3000.0, 200'000.0);
}

struct LadderPoint {
    double r;
    ReverseOutcome outcome;
};

}  // namespace detail

/// Traces the saddle-connection curve over a p-grid. For each p the detector
/// integrates in reverse time from a seed next to `seed_eq`: a repelling loop
/// that encircles only the seed equilibrium flags one side, a loop that
/// encircles (or grazes within saddle_clearance of) the saddle, or the loss
/// of any loop, flags the other. The crossing is bisected in r.
inline BifurcationCurve trace_homoclinic(Variant variant, double s, double p_from, double p_to,
                                         double step, const TraceOptions& opt = {}) {
    BifurcationCurve curve;
    curve.kind = CurveKind::homoclinic;
    curve.association = CurveAssociation::cycles;
    curve.traced = true;
    curve.bisect_tol = opt.r_tol;

    const EqLabel seed_label = opt.seed_eq.value_or(
        variant == Variant::sym ? EqLabel::P1 : EqLabel::P2);

    std::string saddle_note;
    for (double p = p_from; p <= p_to + 1e-12; p += step) {
        double r_lo, r_hi;
        if (variant == Variant::sym) {
            r_lo = 1.0 + 0.15 * (1.0 - p);
            r_hi = 1.0 + 7.0 * (1.0 - p);
        } else {
            const double base = p - 0.25 * s * s;
            r_lo = std::max(base + 0.12, 1.02);
            r_hi = base + 2.2;
        }

        auto probe = [&](double r) {
            const auto k = detail::as_params(variant, s, p, r);
            IntegratorConfig cfg = opt.cfg;
            cfg.t_end = detail::auto_t_end(p, r, opt.detector_t_end);
            return detail::reverse_probe(AsymField{k}, find_equilibria(k), seed_label,
                                         opt.saddle_clearance, cfg, opt.cycle);
        };

        // coarse ladder to find the transition out of the small-loop regime
        const int rungs = 11;
        std::vector<detail::LadderPoint> ladder;
        for (int i = 0; i < rungs; ++i) {
            const double r = r_lo + (r_hi - r_lo) * i / (rungs - 1);
            ladder.push_back({r, probe(r)});
        }
        double a = 0, b = 0;
        bool found = false;
        for (int i = 0; i + 1 < rungs; ++i) {
            const bool sa = ladder[i].outcome == detail::ReverseOutcome::small_loop;
            const bool sb = ladder[i + 1].outcome == detail::ReverseOutcome::small_loop;
            const bool hopf_side = ladder[i].outcome == detail::ReverseOutcome::self_point ||
                                   ladder[i + 1].outcome == detail::ReverseOutcome::self_point;
            if (sa != sb && !hopf_side) {
                a = ladder[i].r;
                b = ladder[i + 1].r;
                found = true;
                break;
            }
        }
        if (!found) {
            // the whole small-loop band may hide between a sub-onset rung and
            // a rung past the connection; subdivide such gaps until a loop
            // shows up, then bracket its upper edge
            for (int i = 0; i + 1 < rungs && !found; ++i) {
                if (ladder[i].outcome != detail::ReverseOutcome::self_point) continue;
                if (ladder[i + 1].outcome == detail::ReverseOutcome::self_point) continue;
                double lo = ladder[i].r, hi = ladder[i + 1].r;
                for (int depth = 0; depth < 14 && !found; ++depth) {
                    const double m = 0.5 * (lo + hi);
                    const auto om = probe(m);
                    if (om == detail::ReverseOutcome::small_loop) {
                        a = m;
                        b = ladder[i + 1].r;
                        found = true;
                    } else if (om == detail::ReverseOutcome::self_point) {
                        lo = m;  // still below the loop onset
                    } else {
                        hi = m;  // already past the connection
                    }
                }
            }
        }
        if (!found)
            throw DetectorFailed("no small-loop transition in r for p=" + std::to_string(p));

        bool small_at_a = probe(a) == detail::ReverseOutcome::small_loop;
        while (b - a > opt.r_tol) {
            const double m = 0.5 * (a + b);
            const bool small_m = probe(m) == detail::ReverseOutcome::small_loop;
            if (small_m == small_at_a) a = m;
            else b = m;
        }
        curve.points.push_back({p, 0.5 * (a + b)});

        if (saddle_note.empty()) {
            const auto k = detail::as_params(variant, s, p, 0.5 * (a + b));
            for (const auto& e : find_equilibria(k))
                if (e.kind == EquilibriumKind::saddle) saddle_note = to_string(e.label);
        }
    }
    curve.note = "saddle " + (saddle_note.empty() ? std::string("?") : saddle_note) +
                 ", seeded near " + to_string(seed_label);
    return curve;
}

/// Traces the fold of large-amplitude cycles: the boundary in r of the set
/// where a forward run from far outside still settles onto an attracting
/// loop rather than an equilibrium.
inline BifurcationCurve trace_cycle_fold(Variant variant, double s, double p_from, double p_to,
                                         double step, const TraceOptions& opt = {}) {
    BifurcationCurve curve;
    curve.kind = CurveKind::cycle_fold;
    curve.association = CurveAssociation::cycles;
    curve.traced = true;
    curve.bisect_tol = opt.r_tol;

    for (double p = p_from; p <= p_to + 1e-12; p += step) {
        double r_lo, r_hi;
        if (variant == Variant::sym) {
            r_lo = 1.0 + 0.1 * (1.0 - p);
            r_hi = 1.0 + 5.0 * (1.0 - p);
        } else {
            const double base = p - 0.25 * s * s;
            r_lo = std::max(base + 0.2, 1.05);
            r_hi = base + 2.6;
        }

        auto has_big_cycle = [&](double r) {
            const auto k = detail::as_params(variant, s, p, r);
            const auto eqs = find_equilibria(k);
            auto cap = detail::capture_points<2>(eqs, detail::attracts_forward);
            IntegratorConfig cfg = opt.cfg;
            cfg.t_end = detail::auto_t_end(p, r, opt.detector_t_end);
            const State2 far{3.5, -3.5};
            std::array<double, 2> anchor_storage{};
            const auto* anchor = detail::nearest_equilibrium<2>(eqs, State2{0, 0}, anchor_storage);
            auto res = classify_trajectory<2>(AsymField{k}, far, cfg,
                                              std::span<const State2>(cap), opt.cycle, anchor);
            using Kind = TrajectoryOutcome<2>::Kind;
            if (res.kind == Kind::divergent)
                throw DetectorFailed("forward probe diverged at p=" + std::to_string(p));
            // an orbit still circling at the horizon counts as a cycle; near
            // the fold the passage through the bottleneck dominates the run
            return res.kind == Kind::cycle || res.kind == Kind::undetermined;
        };

        bool at_lo = has_big_cycle(r_lo);
        bool at_hi = has_big_cycle(r_hi);
        if (at_lo == at_hi)
            throw DetectorFailed("cycle-existence bracket failed at p=" + std::to_string(p));
        double a = r_lo, b = r_hi;
        while (b - a > opt.r_tol) {
            const double m = 0.5 * (a + b);
            if (has_big_cycle(m) == at_lo) a = m;
            else b = m;
        }
        curve.points.push_back({p, 0.5 * (a + b)});
    }
    curve.note = "existence boundary of the outer attracting loop";
    return curve;
}

/// Sub-partition of the symmetric region III: the traced saddle-connection
/// and cycle-fold curves over a p-grid left of the organizing center.
inline Region3Thresholds region3_subpartition(double p_from = 0.60, double p_to = 0.98,
                                              double step = 0.02, const TraceOptions& opt = {}) {
    Region3Thresholds out;
    out.homoclinic = trace_homoclinic(Variant::sym, 0.0, p_from, p_to, step, opt);
    out.fold = trace_cycle_fold(Variant::sym, 0.0, p_from, p_to, step, opt);
    return out;
}

// ---------------------------------------------------------------------------
// Parameter-plane sweep of the long-run sup
// ---------------------------------------------------------------------------

enum class CellStatus : std::uint8_t { ok = 0, not_converged = 1, nonfinite = 2, step_limit = 3 };

struct SweepGrid {
    ModelKind model = ModelKind::sym2;
    double q = 0.0;  // fixed parameters where applicable
    double s = 0.0;
    std::vector<double> p_axis;
    std::vector<double> r_axis;
    std::vector<double> values;        // row-major: index = ip * r_axis.size() + ir
    std::vector<std::uint8_t> status;  // CellStatus per cell
    std::uint64_t seed = 0;
    double transient_fraction = 0.5;

    double value(std::size_t ip, std::size_t ir) const { return values[ip * r_axis.size() + ir]; }
    CellStatus cell_status(std::size_t ip, std::size_t ir) const {
        return static_cast<CellStatus>(status[ip * r_axis.size() + ir]);
    }
    std::size_t failed_cells() const {
        std::size_t n = 0;
        for (auto c : status) n += (c != 0);
        return n;
    }
};

struct SweepOptions {
    IntegratorConfig cfg{StepMethod::rk45, 1e-2, 1e-8, 1e-8, 500.0, 20'000'000};
    double transient_fraction = 0.5;
    double ic_half_width = 2.5;
    int threads = 1;
};

/// One random initial condition per cell, drawn sequentially from a single
/// seeded stream in row-major cell order, so the grid is reproducible for a
/// given (seed, shape) regardless of the thread count.
inline SweepGrid sweep_xbar(ModelKind model, double q, double s, double p_lo, double p_hi,
                            int np, double r_lo, double r_hi, int nr, std::uint64_t seed,
                            const SweepOptions& opt = {}) {
    if (np <= 0 || nr <= 0) throw std::invalid_argument("sweep axes must be nonempty");
    SweepGrid grid;
    grid.model = model;
    grid.q = q;
    grid.s = s;
    grid.seed = seed;
    grid.transient_fraction = opt.transient_fraction;
    for (int i = 0; i < np; ++i) grid.p_axis.push_back(p_lo + (p_hi - p_lo) * (i + 0.5) / np);
    for (int j = 0; j < nr; ++j) grid.r_axis.push_back(r_lo + (r_hi - r_lo) * (j + 0.5) / nr);

    const std::size_t cells = static_cast<std::size_t>(np) * nr;
    grid.values.assign(cells, std::numeric_limits<double>::quiet_NaN());
    grid.status.assign(cells, static_cast<std::uint8_t>(CellStatus::ok));

    const std::size_t dim = (model == ModelKind::ms3) ? 3 : 2;
    std::vector<double> ics(cells * dim);
    std::mt19937_64 eng(seed);
    for (auto& c : ics) c = uniform_in(eng, -opt.ic_half_width, opt.ic_half_width);

    XbarOptions xopt;
    xopt.transient_fraction = opt.transient_fraction;

    auto run_cell = [&](std::size_t idx) {
        const std::size_t ip = idx / nr;
        const std::size_t ir = idx % nr;
        const double p = grid.p_axis[ip];
        const double r = grid.r_axis[ir];
        try {
            double v;
            if (model == ModelKind::ms3) {
                const State3 ic{ics[idx * 3], ics[idx * 3 + 1], ics[idx * 3 + 2]};
                v = xbar<3>(MsField{MsParams{p, q, r, s}}, ic, opt.cfg, xopt);
            } else if (model == ModelKind::asym2) {
                const State2 ic{ics[idx * 2], ics[idx * 2 + 1]};
                v = xbar<2>(AsymField{AsymParams{p, r, s}}, ic, opt.cfg, xopt);
            } else {
                const State2 ic{ics[idx * 2], ics[idx * 2 + 1]};
                v = xbar<2>(SymField{SymParams{p, r}}, ic, opt.cfg, xopt);
            }
            grid.values[idx] = v;
        } catch (const NotConverged&) {
            grid.status[idx] = static_cast<std::uint8_t>(CellStatus::not_converged);
        } catch (const NonFiniteState&) {
            grid.status[idx] = static_cast<std::uint8_t>(CellStatus::nonfinite);
        } catch (const StepLimitExceeded&) {
            grid.status[idx] = static_cast<std::uint8_t>(CellStatus::step_limit);
        }
    };

    const int workers = std::max(1, opt.threads);
    if (workers == 1) {
        for (std::size_t idx = 0; idx < cells; ++idx) run_cell(idx);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t idx = static_cast<std::size_t>(w); idx < cells;
                     idx += static_cast<std::size_t>(workers))
                    run_cell(idx);
            });
        for (auto& t : pool) t.join();
    }
    return grid;
}

}  // namespace msclim
