#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "msclim/equilibria.hpp"
#include "msclim/errors.hpp"
#include "msclim/models.hpp"

namespace msclim {

enum class StepMethod { rk4, rk45 };
enum class TimeDirection { forward, reverse };

/// Any state component beyond this magnitude counts as divergence.
inline constexpr double divergence_guard = 1e6;

struct IntegratorConfig {
    StepMethod method = StepMethod::rk45;
    double step = 1e-2;      // rk4 step size; initial trial step for rk45
    double abs_tol = 1e-9;   // rk45 absolute tolerance
    double rel_tol = 1e-9;   // rk45 relative tolerance
    double t_end = 100.0;
    long max_steps = 20'000'000;  // accepted + rejected attempts
};

inline std::string invalid_reason(const IntegratorConfig& c) {
    if (!(c.t_end > 0)) return "t_end > 0 violated";
    if (c.method == StepMethod::rk4 && !(c.step > 0)) return "step > 0 violated";
    if (c.method == StepMethod::rk45 && (!(c.abs_tol > 0) || !(c.rel_tol >= 0)))
        return "tolerances > 0 violated";
    if (!(c.max_steps > 0)) return "max_steps > 0 violated";
    return {};
}

enum class OrbitStatus { ok, step_limit, nonfinite };

inline const char* to_string(OrbitStatus s) {
    switch (s) {
        case OrbitStatus::ok: return "ok";
        case OrbitStatus::step_limit: return "step-limit";
        case OrbitStatus::nonfinite: return "nonfinite";
    }
    return "?";
}

/// Time-stamped trajectory. On failure the record keeps everything computed
/// up to the last good time and carries the failure in `status`.
template <std::size_t N>
struct OrbitRecord {
    std::vector<double> times;
    std::vector<std::array<double, N>> states;
    OrbitStatus status = OrbitStatus::ok;
    double last_good_time = 0.0;
    bool has_seed = false;
    std::uint64_t seed = 0;
};

/// Raises the matching typed error when the record did not finish cleanly.
template <std::size_t N>
const OrbitRecord<N>& require_ok(const OrbitRecord<N>& rec) {
    if (rec.status == OrbitStatus::step_limit) throw StepLimitExceeded(rec.last_good_time);
    if (rec.status == OrbitStatus::nonfinite) throw NonFiniteState(rec.last_good_time);
    return rec;
}

namespace detail {

template <std::size_t N>
bool finite_and_bounded(const std::array<double, N>& y) {
    for (double c : y)
        if (!std::isfinite(c) || std::abs(c) > divergence_guard) return false;
    return true;
}

template <std::size_t N>
double dist2(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

template <std::size_t N>
double norm2(const std::array<double, N>& a) {
    double s = 0;
    for (double c : a) s += c * c;
    return std::sqrt(s);
}

template <std::size_t N>
double dot(const std::array<double, N>& a, const std::array<double, N>& b) {
    double s = 0;
    for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
    return s;
}

template <std::size_t N, class Field>
std::array<double, N> rk4_step(Field&& f, const std::array<double, N>& y, double h,
                               const std::array<double, N>& k1) {
    std::array<double, N> tmp, k2, k3, k4;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = f(tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = f(tmp);
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i)
        out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace detail

struct IntegrationOutcome {
    OrbitStatus status = OrbitStatus::ok;
    double last_time = 0.0;
    long accepted_steps = 0;
};

/// Core stepping loop. The observer is called once per accepted step as
/// obs(t0, y0, f0, t1, y1, f1) and may return false to stop early (the
/// outcome still reports ok).
template <std::size_t N, class Field, class Observer>
IntegrationOutcome integrate_steps(Field&& f, std::array<double, N> y,
                                   const IntegratorConfig& cfg, Observer&& obs) {
    IntegrationOutcome out;
    double t = 0.0;
    std::array<double, N> fy = f(y);
    long attempts = 0;

    if (!detail::finite_and_bounded(y)) {
        out.status = OrbitStatus::nonfinite;
        return out;
    }

    if (cfg.method == StepMethod::rk4) {
        const double h0 = cfg.step;
        while (t < cfg.t_end) {
            if (++attempts > cfg.max_steps) {
                out.status = OrbitStatus::step_limit;
                out.last_time = t;
                return out;
            }
            const double h = std::min(h0, cfg.t_end - t);
            auto y1 = detail::rk4_step(f, y, h, fy);
            if (!detail::finite_and_bounded(y1)) {
                out.status = OrbitStatus::nonfinite;
                out.last_time = t;
                return out;
            }
            auto f1 = f(y1);
            ++out.accepted_steps;
            const double t1 = t + h;
            const bool go = obs(t, y, fy, t1, y1, f1);
            t = t1;
            y = y1;
            fy = f1;
            if (!go) break;
        }
        out.last_time = t;
        return out;
    }

    // Dormand-Prince 5(4) with FSAL and a standard controller.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    double h = (cfg.step > 0 ? cfg.step : 1e-2);
    h = std::min(h, cfg.t_end);
    std::array<double, N> k1 = fy, k2, k3, k4, k5, k6, k7, tmp, y1;

    while (t < cfg.t_end) {
        if (++attempts > cfg.max_steps) {
            out.status = OrbitStatus::step_limit;
            out.last_time = t;
            return out;
        }
        h = std::min(h, cfg.t_end - t);
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            out.status = OrbitStatus::step_limit;  // step size underflow
            out.last_time = t;
            return out;
        }

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = f(tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        k6 = f(tmp);
        for (std::size_t i = 0; i < N; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);

        bool finite = detail::finite_and_bounded(y1);
        double err = 0.0;
        if (finite) {
            k7 = f(y1);
            for (std::size_t i = 0; i < N; ++i) {
                const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
                const double scale =
                    cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
                err += (ei / scale) * (ei / scale);
            }
            err = std::sqrt(err / N);
        }

        if (!finite) {
            // shrink and retry; persistent blow-up ends in divergence
            h *= 0.25;
            if (h < 1e-13) {
                out.status = OrbitStatus::nonfinite;
                out.last_time = t;
                return out;
            }
            continue;
        }

        if (err <= 1.0) {
            ++out.accepted_steps;
            const double t1 = t + h;
            const bool go = obs(t, y, k1, t1, y1, k7);
            t = t1;
            y = y1;
            k1 = k7;  // FSAL
            if (!detail::finite_and_bounded(y)) {
                out.status = OrbitStatus::nonfinite;
                out.last_time = t;
                return out;
            }
            if (!go) break;
        }
        const double factor =
            (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    out.last_time = t;
    return out;
}

/// Full-trajectory integration; records every accepted step.
template <std::size_t N, class Field>
OrbitRecord<N> integrate(Field&& f, const std::array<double, N>& y0,
                         const IntegratorConfig& cfg) {
    OrbitRecord<N> rec;
    rec.times.push_back(0.0);
    rec.states.push_back(y0);
    auto obs = [&rec](double, const std::array<double, N>&, const std::array<double, N>&,
                      double t1, const std::array<double, N>& y1,
                      const std::array<double, N>&) {
        rec.times.push_back(t1);
        rec.states.push_back(y1);
        return true;
    };
    const auto outcome = integrate_steps<N>(f, y0, cfg, obs);
    rec.status = outcome.status;
    rec.last_good_time = outcome.last_time;
    return rec;
}

namespace detail {

/// Maximum of the cubic Hermite interpolant of component `c` over one step.
template <std::size_t N>
double hermite_component_max(std::size_t c, double h, const std::array<double, N>& y0,
                             const std::array<double, N>& f0, const std::array<double, N>& y1,
                             const std::array<double, N>& f1) {
    const double v0 = y0[c], v1 = y1[c], d0 = h * f0[c], d1 = h * f1[c];
    double best = std::max(v0, v1);
    // p'(u) = a u^2 + b u + cc on u in [0,1]
    const double a = 6.0 * (v0 - v1) + 3.0 * (d0 + d1);
    const double b = -6.0 * (v0 - v1) - 2.0 * (2.0 * d0 + d1);
    const double cc = d0;
    auto value_at = [&](double u) {
        const double u2 = u * u, u3 = u2 * u;
        return (2 * u3 - 3 * u2 + 1) * v0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * v1 +
               (u3 - u2) * d1;
    };
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) > 1e-300) {
            const double u = -cc / b;
            if (u > 0 && u < 1) best = std::max(best, value_at(u));
        }
        return best;
    }
    const double disc = b * b - 4 * a * cc;
    if (disc >= 0) {
        const double sq = std::sqrt(disc);
        for (double u : {(-b + sq) / (2 * a), (-b - sq) / (2 * a)})
            if (u > 0 && u < 1) best = std::max(best, value_at(u));
    }
    return best;
}

/// Locates the zero of g(y) = n.(y - anchor) inside an accepted step by
/// re-integrating sub-steps and polishing with Newton on the actual flow.
template <std::size_t N, class Field>
std::pair<double, std::array<double, N>> refine_crossing(Field&& f, const std::array<double, N>& y0,
                                                         const std::array<double, N>& f0,
                                                         double h,
                                                         const std::array<double, N>& normal,
                                                         const std::array<double, N>& anchor) {
    auto advance = [&](double dt) {
        if (dt <= 0) return y0;
        std::array<double, N> y = y0;
        std::array<double, N> k = f0;
        const int sub = 4;
        for (int i = 0; i < sub; ++i) {
            y = rk4_step(f, y, dt / sub, k);
            if (i + 1 < sub) k = f(y);
        }
        return y;
    };
    auto gval = [&](const std::array<double, N>& y) {
        std::array<double, N> d;
        for (std::size_t i = 0; i < N; ++i) d[i] = y[i] - anchor[i];
        return dot(d, normal);
    };

    double lo = 0.0, hi = h;
    double dt = 0.5 * h;
    std::array<double, N> y = advance(dt);
    // bisection to bracket tightly, then Newton using g' = n.f
    for (int it = 0; it < 40; ++it) {
        const double g = gval(y);
        if (g < 0) lo = dt;
        else hi = dt;
        if (it >= 8) {
            const double gd = dot(normal, f(y));
            if (std::abs(gd) > 1e-14) {
                double next = dt - g / gd;
                if (next > lo && next < hi) {
                    dt = next;
                    y = advance(dt);
                    if (hi - lo < 1e-12 * std::max(1.0, h)) break;
                    continue;
                }
            }
        }
        dt = 0.5 * (lo + hi);
        y = advance(dt);
        if (hi - lo < 1e-12 * std::max(1.0, h)) break;
    }
    return {dt, y};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Long-run sup estimator (xbar)
// ---------------------------------------------------------------------------

struct XbarOptions {
    double transient_fraction = 0.5;
    double agree_tol = 1e-4;  // the two post-transient half-windows must agree
};

/// Finite-horizon estimate of limsup x(t): the sup of the first component
/// over the post-transient window. Throws NotConverged when the sups of the
/// two halves of the window disagree by more than agree_tol.
template <std::size_t N, class Field>
double xbar(Field&& f, const std::array<double, N>& y0, const IntegratorConfig& cfg,
            const XbarOptions& opt = {}) {
    const double t1 = cfg.t_end * opt.transient_fraction;
    const double tm = 0.5 * (t1 + cfg.t_end);
    double sup_a = -std::numeric_limits<double>::infinity();
    double sup_b = sup_a;
    auto obs = [&](double ta, const std::array<double, N>& ya, const std::array<double, N>& fa,
                   double tb, const std::array<double, N>& yb, const std::array<double, N>& fb) {
        if (tb >= t1) {
            const double m = detail::hermite_component_max<N>(0, tb - ta, ya, fa, yb, fb);
            if (ta <= tm) sup_a = std::max(sup_a, m);
            if (tb > tm) sup_b = std::max(sup_b, m);
        }
        return true;
    };
    const auto outcome = integrate_steps<N>(f, y0, cfg, obs);
    if (outcome.status == OrbitStatus::nonfinite) throw NonFiniteState(outcome.last_time);
    if (outcome.status == OrbitStatus::step_limit) throw StepLimitExceeded(outcome.last_time);
    if (std::abs(sup_a - sup_b) > opt.agree_tol)
        throw NotConverged("window sup still drifting: " + std::to_string(sup_a) + " vs " +
                           std::to_string(sup_b));
    return std::max(sup_a, sup_b);
}

// ---------------------------------------------------------------------------
// Cycle detection via a directed section return map
// ---------------------------------------------------------------------------

template <std::size_t N>
struct CycleEstimate {
    double period = 0.0;
    double amplitude_x = 0.0;  // max of the first component on the cycle
    bool stable = true;
    std::vector<std::array<double, N>> section_points;
    std::vector<std::array<double, N>> loop;  // one resampled period
    double return_gap = std::numeric_limits<double>::infinity();
    std::array<double, N> anchor{};
    std::array<double, N> normal{};
};

struct CycleOptions {
    double warmup_fraction = 0.25;
    double return_rel_tol = 1e-6;   // relative to the section radius
    double return_abs_tol = 1e-9;
    int min_returns = 3;
    int extra_returns = 4;          // averaged into the period after convergence
    int loop_samples = 512;
    double eq_capture_tol = 1e-6;   // distance at which an attracting point captures
    double point_radius_tol = 2e-5; // section radius below which the limit is a point
};

template <std::size_t N>
struct TrajectoryOutcome {
    enum class Kind { equilibrium, cycle, divergent, undetermined };
    Kind kind = Kind::undetermined;
    int equilibrium_index = -1;  // into the capture list
    CycleEstimate<N> cycle;
    double t_reached = 0.0;
};

/// Follows one trajectory and decides what it converges to. `capture` must
/// hold only the equilibria that attract in the direction being integrated;
/// saddles never capture. The section is anchored at `anchor_hint` when given
/// (normally the relevant equilibrium) with the plane normal taken from the
/// flow direction after warmup; if that plane never sees a crossing the
/// section falls back to the post-warmup point itself.
template <std::size_t N, class Field>
TrajectoryOutcome<N> classify_trajectory(Field&& f, const std::array<double, N>& y0,
                                         const IntegratorConfig& cfg,
                                         std::span<const std::array<double, N>> capture,
                                         const CycleOptions& opt = {},
                                         const std::array<double, N>* anchor_hint = nullptr) {
    TrajectoryOutcome<N> out;

    auto captured_by = [&](const std::array<double, N>& y) {
        for (std::size_t i = 0; i < capture.size(); ++i)
            if (detail::dist2(y, capture[i]) < opt.eq_capture_tol) return static_cast<int>(i);
        return -1;
    };

    // warmup: let the trajectory settle toward its limit set
    const double t_w = opt.warmup_fraction * cfg.t_end;
    std::array<double, N> yw = y0;
    bool hit_eq = false;
    int eq_idx = -1;
    {
        IntegratorConfig warm = cfg;
        warm.t_end = std::max(t_w, 1e-9);
        auto obs = [&](double, const std::array<double, N>&, const std::array<double, N>&,
                       double, const std::array<double, N>& y1, const std::array<double, N>&) {
            yw = y1;
            eq_idx = captured_by(y1);
            if (eq_idx >= 0) {
                hit_eq = true;
                return false;
            }
            return true;
        };
        const auto oc = integrate_steps<N>(f, y0, warm, obs);
        out.t_reached = oc.last_time;
        if (oc.status == OrbitStatus::nonfinite) {
            out.kind = TrajectoryOutcome<N>::Kind::divergent;
            return out;
        }
        if (oc.status == OrbitStatus::step_limit) return out;  // undetermined
        if (hit_eq) {
            out.kind = TrajectoryOutcome<N>::Kind::equilibrium;
            out.equilibrium_index = eq_idx;
            return out;
        }
    }

    const auto fw = f(yw);
    const double fw_norm = detail::norm2(fw);
    if (fw_norm < 1e-12) {
        out.kind = TrajectoryOutcome<N>::Kind::equilibrium;
        return out;
    }
    std::array<double, N> normal = fw;
    for (auto& c : normal) c /= fw_norm;

    const double t_rest = cfg.t_end - t_w;

    // one attempt per anchor: the hinted equilibrium first, then the
    // post-warmup point as fallback
    std::vector<std::array<double, N>> anchors;
    if (anchor_hint) anchors.push_back(*anchor_hint);
    anchors.push_back(yw);
    const bool radius_meaningful_first = anchor_hint != nullptr;

    for (std::size_t attempt = 0; attempt < anchors.size(); ++attempt) {
        const auto anchor = anchors[attempt];
        const bool radius_meaningful = radius_meaningful_first && attempt == 0;

        IntegratorConfig rest = cfg;
        rest.t_end = t_rest;

        std::vector<std::array<double, N>> hits;
        std::vector<double> hit_times;
        double prev_gap = std::numeric_limits<double>::infinity();
        bool done = false, point_limit = false, no_crossing_bail = false;
        long accepted_at = -1;  // crossing index where returns first converged
        hit_eq = false;

        auto gfun = [&](const std::array<double, N>& y) {
            std::array<double, N> d;
            for (std::size_t i = 0; i < N; ++i) d[i] = y[i] - anchor[i];
            return detail::dot(d, normal);
        };

        auto obs = [&](double ta, const std::array<double, N>& ya, const std::array<double, N>& fa,
                       double tb, const std::array<double, N>& yb, const std::array<double, N>&) {
            eq_idx = captured_by(yb);
            if (eq_idx >= 0) {
                hit_eq = true;
                return false;
            }
            const double g0 = gfun(ya), g1 = gfun(yb);
            if (g0 < 0.0 && g1 >= 0.0) {
                auto [dt, yc] = detail::refine_crossing(f, ya, fa, tb - ta, normal, anchor);
                hits.push_back(yc);
                hit_times.push_back(ta + dt);
                const std::size_t k = hits.size();
                if (radius_meaningful &&
                    detail::dist2(yc, anchor) < opt.point_radius_tol) {
                    point_limit = true;
                    return false;
                }
                if (accepted_at >= 0) {
                    if (static_cast<long>(k) - 1 - accepted_at >= opt.extra_returns) {
                        done = true;
                        return false;
                    }
                } else if (k >= 2) {
                    const double gap = detail::dist2(hits[k - 1], hits[k - 2]);
                    const double radius = detail::dist2(yc, anchor);
                    const double tol =
                        std::max(opt.return_abs_tol, opt.return_rel_tol * std::max(radius, 1e-6));
                    if (static_cast<int>(k) > opt.min_returns && gap < tol && prev_gap < tol) {
                        accepted_at = static_cast<long>(k) - 1;
                        if (opt.extra_returns <= 0) {
                            done = true;
                            return false;
                        }
                    }
                    prev_gap = gap;
                }
            }
            // bail early if this section never sees the orbit
            if (hits.empty() && ta > 0.45 * t_rest && attempt + 1 < anchors.size()) {
                no_crossing_bail = true;
                return false;
            }
            return true;
        };

        const auto oc = integrate_steps<N>(f, yw, rest, obs);
        out.t_reached = t_w + oc.last_time;
        if (oc.status == OrbitStatus::nonfinite) {
            out.kind = TrajectoryOutcome<N>::Kind::divergent;
            return out;
        }
        if (hit_eq) {
            out.kind = TrajectoryOutcome<N>::Kind::equilibrium;
            out.equilibrium_index = eq_idx;
            return out;
        }
        if (point_limit) {
            out.kind = TrajectoryOutcome<N>::Kind::equilibrium;
            return out;
        }
        if (no_crossing_bail) continue;

        if (accepted_at >= 0 && !done && hits.size() - 1 > static_cast<std::size_t>(accepted_at))
            done = true;  // t_end arrived during the averaging stretch

        if (done) {
            CycleEstimate<N>& est = out.cycle;
            const std::size_t k = hits.size();
            const auto first = static_cast<std::size_t>(accepted_at);
            est.period = (hit_times[k - 1] - hit_times[first]) /
                         static_cast<double>(k - 1 - first);
            est.return_gap = detail::dist2(hits[k - 1], hits[k - 2]);
            est.section_points = hits;
            est.anchor = anchor;
            est.normal = normal;

            // resample one period with fixed steps for amplitude and shape
            const int m = opt.loop_samples;
            const double h = est.period / m;
            std::array<double, N> y = hits.back();
            est.loop.reserve(m);
            double amp = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                est.loop.push_back(y);
                const auto k1 = f(y);
                const auto y1 = detail::rk4_step(f, y, h, k1);
                amp = std::max(amp, detail::hermite_component_max<N>(0, h, y, k1, y1, f(y1)));
                y = y1;
            }
            est.amplitude_x = amp;
            out.kind = TrajectoryOutcome<N>::Kind::cycle;
            return out;
        }
        // ran out of time on this anchor; report what happened
        if (!hits.empty()) return out;  // undetermined (returns did not settle)
    }
    return out;
}

/// Throwing wrapper used when the caller knows a cycle should be there.
template <std::size_t N, class Field>
CycleEstimate<N> estimate_cycle_raw(Field&& f, const std::array<double, N>& near_state,
                                    TimeDirection dir, const IntegratorConfig& cfg,
                                    std::span<const std::array<double, N>> capture,
                                    const std::array<double, N>* anchor_hint,
                                    const CycleOptions& opt = {}) {
    auto run = [&](auto&& field) {
        return classify_trajectory<N>(field, near_state, cfg, capture, opt, anchor_hint);
    };
    TrajectoryOutcome<N> res;
    if (dir == TimeDirection::forward) {
        res = run(f);
    } else {
        auto rev = [&f](const std::array<double, N>& y) {
            auto d = f(y);
            for (auto& c : d) c = -c;
            return d;
        };
        res = run(rev);
    }
    using Kind = typename TrajectoryOutcome<N>::Kind;
    switch (res.kind) {
        case Kind::cycle:
            res.cycle.stable = (dir == TimeDirection::forward);
            return res.cycle;
        case Kind::equilibrium:
            throw NoCycleFound("trajectory converges to an equilibrium");
        case Kind::divergent:
            throw NoCycleFound("trajectory diverges");
        case Kind::undetermined:
        default:
            throw NonConvergentReturns("section returns did not converge before t_end");
    }
}

namespace detail {

template <std::size_t N, class P>
std::vector<std::array<double, N>> capture_points(const std::vector<EquilibriumReport<N>>& eqs,
                                                  P&& pred) {
    std::vector<std::array<double, N>> pts;
    for (const auto& e : eqs)
        if (pred(e.kind)) pts.push_back(e.location);
    return pts;
}

inline bool attracts_forward(EquilibriumKind k) { return is_stable(k); }
inline bool attracts_reverse(EquilibriumKind k) {
    return k == EquilibriumKind::unstable_node || k == EquilibriumKind::unstable_spiral;
}

template <std::size_t N>
const std::array<double, N>* nearest_equilibrium(const std::vector<EquilibriumReport<N>>& eqs,
                                                 const std::array<double, N>& y,
                                                 std::array<double, N>& storage) {
    if (eqs.empty()) return nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : eqs) {
        const double d = dist2(e.location, y);
        if (d < best) {
            best = d;
            storage = e.location;
        }
    }
    return &storage;
}

template <std::size_t N, class Field>
CycleEstimate<N> estimate_cycle_model(Field&& f, const std::vector<EquilibriumReport<N>>& eqs,
                                      const std::array<double, N>& near_state, TimeDirection dir,
                                      const IntegratorConfig& cfg, const CycleOptions& opt) {
    auto capture = (dir == TimeDirection::forward)
                       ? capture_points<N>(eqs, attracts_forward)
                       : capture_points<N>(eqs, attracts_reverse);
    std::array<double, N> anchor_storage{};
    const auto* anchor = nearest_equilibrium<N>(eqs, near_state, anchor_storage);
    return estimate_cycle_raw<N>(f, near_state, dir, cfg,
                                 std::span<const std::array<double, N>>(capture), anchor, opt);
}

}  // namespace detail

/// Cycle detection anchored at the equilibrium nearest to the starting state.
inline CycleEstimate<2> estimate_cycle(const SymParams& k, const State2& near_state,
                                       TimeDirection dir, const IntegratorConfig& cfg,
                                       const CycleOptions& opt = {}) {
    return detail::estimate_cycle_model<2>(SymField{k}, find_equilibria(k), near_state, dir, cfg,
                                           opt);
}

inline CycleEstimate<2> estimate_cycle(const AsymParams& k, const State2& near_state,
                                       TimeDirection dir, const IntegratorConfig& cfg,
                                       const CycleOptions& opt = {}) {
    return detail::estimate_cycle_model<2>(AsymField{k}, find_equilibria(k), near_state, dir, cfg,
                                           opt);
}

inline CycleEstimate<3> estimate_cycle(const MsParams& k, const State3& near_state,
                                       TimeDirection dir, const IntegratorConfig& cfg,
                                       const CycleOptions& opt = {}) {
    return detail::estimate_cycle_model<3>(MsField{k}, find_equilibria(k), near_state, dir, cfg,
                                           opt);
}

// ---------------------------------------------------------------------------
// Planar winding numbers and the attractor census
// ---------------------------------------------------------------------------

/// Winding number of a closed polyline around a point.
inline int winding_number(std::span<const State2> loop, const State2& pt) {
    if (loop.size() < 3) return 0;
    double total = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const auto& a = loop[i];
        const auto& b = loop[(i + 1) % loop.size()];
        const double ax = a[0] - pt[0], ay = a[1] - pt[1];
        const double bx = b[0] - pt[0], by = b[1] - pt[1];
        total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

struct CensusCycle {
    CycleEstimate<2> estimate;
    bool stable = true;
    std::vector<int> winding;  // one entry per equilibrium, same order as `equilibria`
};

struct AttractorCensus {
    std::vector<EquilibriumReport<2>> equilibria;
    std::vector<CensusCycle> cycles;
    std::vector<int> forward_equilibrium_hits;  // per capturable equilibrium order, see notes
    int forward_cycle_hits = 0;
    int divergent = 0;
    int undetermined = 0;

    int stable_cycle_count() const {
        int n = 0;
        for (const auto& c : cycles) n += c.stable ? 1 : 0;
        return n;
    }
    int unstable_cycle_count() const { return static_cast<int>(cycles.size()) - stable_cycle_count(); }
};

struct CensusOptions {
    IntegratorConfig cfg{StepMethod::rk45, 1e-2, 1e-9, 1e-9, 1500.0, 20'000'000};
    CycleOptions cycle{};
    double dedupe_rel = 0.05;          // period/amplitude relative match for duplicates
    double eq_seed_offset = 0.02;      // reverse seeds next to attracting equilibria
    std::vector<double> inward_fractions{0.03, 0.08};  // reverse seeds inside stable loops
    bool reverse_from_grid = false;

    CensusOptions() {
        cycle.return_rel_tol = 1e-4;
        cycle.warmup_fraction = 0.15;
    }
};

namespace detail {

inline bool same_cycle(const CensusCycle& a, const CensusCycle& b, double rel) {
    if (a.stable != b.stable) return false;
    if (a.winding != b.winding) return false;
    const double pscale = std::max(std::abs(a.estimate.period), 1e-9);
    if (std::abs(a.estimate.period - b.estimate.period) > rel * pscale) return false;
    const double ascale = std::max({std::abs(a.estimate.amplitude_x),
                                    std::abs(b.estimate.amplitude_x), 0.2});
    return std::abs(a.estimate.amplitude_x - b.estimate.amplitude_x) <= rel * 4.0 * ascale;
}

}  // namespace detail

/// Deterministic phase-portrait summary for a planar field. Stable cycles
/// come from forward runs over the grid; unstable cycles come from
/// reverse-time runs (valid for planar flows) seeded next to attracting
/// equilibria and just inside each stable loop.
template <class Field>
AttractorCensus census_attractors(Field&& f, const std::vector<EquilibriumReport<2>>& eqs,
                                  std::span<const State2> ic_grid,
                                  const CensusOptions& opt = {}) {
    AttractorCensus out;
    out.equilibria = eqs;

    const auto cap_fwd = detail::capture_points<2>(eqs, detail::attracts_forward);
    const auto cap_rev = detail::capture_points<2>(eqs, detail::attracts_reverse);
    out.forward_equilibrium_hits.assign(cap_fwd.size(), 0);

    auto add_cycle = [&](const CycleEstimate<2>& est, bool stable) {
        CensusCycle c;
        c.estimate = est;
        c.stable = stable;
        for (const auto& e : eqs)
            c.winding.push_back(winding_number(c.estimate.loop, e.location));
        for (const auto& have : out.cycles)
            if (detail::same_cycle(have, c, opt.dedupe_rel)) return;
        out.cycles.push_back(std::move(c));
    };

    auto rev = [&f](const State2& y) {
        auto d = f(y);
        d[0] = -d[0];
        d[1] = -d[1];
        return d;
    };

    std::array<double, 2> anchor_storage{};

    // forward pass
    for (const auto& ic : ic_grid) {
        const auto* anchor = detail::nearest_equilibrium<2>(eqs, ic, anchor_storage);
        auto res = classify_trajectory<2>(f, ic, opt.cfg,
                                          std::span<const State2>(cap_fwd), opt.cycle, anchor);
        using Kind = TrajectoryOutcome<2>::Kind;
        switch (res.kind) {
            case Kind::cycle:
                res.cycle.stable = true;
                add_cycle(res.cycle, true);
                ++out.forward_cycle_hits;
                break;
            case Kind::equilibrium:
                if (res.equilibrium_index >= 0)
                    ++out.forward_equilibrium_hits[static_cast<std::size_t>(res.equilibrium_index)];
                break;
            case Kind::divergent: ++out.divergent; break;
            default: ++out.undetermined; break;
        }
    }

    // reverse seeds
    std::vector<State2> rev_seeds;
    const double d = opt.eq_seed_offset;
    for (const auto& e : eqs) {
        if (!detail::attracts_forward(e.kind)) continue;
        rev_seeds.push_back({e.location[0] + d, e.location[1] - d});
        rev_seeds.push_back({e.location[0] - d, e.location[1] + d});
    }
    std::vector<CensusCycle> stable_found;
    for (const auto& c : out.cycles)
        if (c.stable) stable_found.push_back(c);
    for (const auto& c : stable_found) {
        // point of the loop farthest from its centroid, pulled inward
        State2 centroid{0, 0};
        for (const auto& y : c.estimate.loop) {
            centroid[0] += y[0];
            centroid[1] += y[1];
        }
        centroid[0] /= static_cast<double>(c.estimate.loop.size());
        centroid[1] /= static_cast<double>(c.estimate.loop.size());
        std::size_t far = 0;
        double best = -1;
        for (std::size_t i = 0; i < c.estimate.loop.size(); ++i) {
            const double dd = detail::dist2(c.estimate.loop[i], centroid);
            if (dd > best) {
                best = dd;
                far = i;
            }
        }
        for (double w : opt.inward_fractions) {
            const auto& y = c.estimate.loop[far];
            rev_seeds.push_back({y[0] + w * (centroid[0] - y[0]), y[1] + w * (centroid[1] - y[1])});
        }
    }
    if (opt.reverse_from_grid)
        rev_seeds.insert(rev_seeds.end(), ic_grid.begin(), ic_grid.end());

    for (const auto& seed : rev_seeds) {
        const auto* anchor = detail::nearest_equilibrium<2>(eqs, seed, anchor_storage);
        auto res = classify_trajectory<2>(rev, seed, opt.cfg,
                                          std::span<const State2>(cap_rev), opt.cycle, anchor);
        if (res.kind == TrajectoryOutcome<2>::Kind::cycle) {
            res.cycle.stable = false;
            add_cycle(res.cycle, false);
        }
    }
    return out;
}

inline AttractorCensus census_attractors(const SymParams& k, std::span<const State2> ic_grid,
                                         const CensusOptions& opt = {}) {
    return census_attractors(SymField{k}, find_equilibria(k), ic_grid, opt);
}

inline AttractorCensus census_attractors(const AsymParams& k, std::span<const State2> ic_grid,
                                         const CensusOptions& opt = {}) {
    return census_attractors(AsymField{k}, find_equilibria(k), ic_grid, opt);
}

inline AttractorCensus census_attractors(const UnfoldParams& k, std::span<const State2> ic_grid,
                                         const CensusOptions& opt = {}) {
    std::vector<EquilibriumReport<2>> eqs;
    UnfoldedField f{k};
    auto push = [&](double u, EqLabel label) {
        EquilibriumReport<2> rep;
        rep.location = {u, 0.0};
        rep.jacobian = unfolded_jacobian({u, 0.0}, k);
        rep.eigenvalues = eigenvalues(rep.jacobian);
        rep.kind = classify_eigenvalues<2>(rep.eigenvalues);
        rep.label = label;
        eqs.push_back(rep);
    };
    push(0.0, EqLabel::P0);
    if (k.mu > 0) {
        push(std::sqrt(k.mu), EqLabel::P1);
        push(-std::sqrt(k.mu), EqLabel::P2);
    }
    return census_attractors(f, eqs, ic_grid, opt);
}

}  // namespace msclim
