#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "msclim/errors.hpp"
#include "msclim/models.hpp"

namespace msclim {

// Closed orbits of u' = v, v' = mu*u - u^3 with mu canonicalized to +-1.
// General mu follows from the scaling (u,v,t) -> (a u, a^2 v, t/a) with
// a = sqrt(|mu|), so only the two signed cases matter.

enum class OrbitKind { inner, homoclinic, outer, simple };

inline const char* to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::inner: return "inner";
        case OrbitKind::homoclinic: return "homoclinic";
        case OrbitKind::outer: return "outer";
        case OrbitKind::simple: return "simple";
    }
    return "?";
}

/// Orbits within |x - sqrt(2)| of this switch to the saddle-loop
/// parametrization (u, v) = (sqrt(2) sech t, -sqrt(2) sech t tanh t), whose
/// moments reduce to polynomial integrals; the u-domain route degenerates
/// there because the loop period diverges.
inline constexpr double homoclinic_window = 1e-4;

/// Closed orbit of the conservative flow, labeled by the maximum value x of
/// its first coordinate. For mu = +1: inner orbits have 1 < x < sqrt(2),
/// the saddle loop sits at x = sqrt(2), outer orbits beyond. For mu = -1
/// every x > 0 labels a closed orbit around the origin.
struct HamiltonianOrbit {
    int mu_sign = 1;
    double x = 2.0;
    OrbitKind kind = OrbitKind::outer;
    double level = 0.0;  // H(x, 0)

    static HamiltonianOrbit from_turning_point(double x, int mu_sign) {
        HamiltonianOrbit o;
        o.mu_sign = (mu_sign >= 0) ? 1 : -1;
        o.x = x;
        if (o.mu_sign > 0) {
            if (!(x > 1.0))
                throw std::invalid_argument("turning point must exceed 1 for mu = +1");
            const double root2 = std::sqrt(2.0);
            if (std::abs(x - root2) < homoclinic_window) o.kind = OrbitKind::homoclinic;
            else if (x < root2) o.kind = OrbitKind::inner;
            else o.kind = OrbitKind::outer;
        } else {
            if (!(x > 0.0))
                throw std::invalid_argument("turning point must be positive for mu = -1");
            o.kind = OrbitKind::simple;
        }
        o.level = hamiltonian_value({x, 0.0}, static_cast<double>(o.mu_sign));
        return o;
    }
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
inline constexpr std::array<double, 8> gk_nodes = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr std::array<double, 8> gk_wk = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr std::array<double, 4> gk_wg = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

template <class F>
std::pair<double, double> gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = gk_wk[7] * fc;
    double gauss = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double v = f(c - h * gk_nodes[i]) + f(c + h * gk_nodes[i]);
        kron += gk_wk[i] * v;
        if (i % 2 == 1) gauss += gk_wg[i / 2] * v;
    }
    return {kron * h, std::abs(kron - gauss) * std::abs(h)};
}

template <class F>
double adaptive_quadrature(F&& f, double a, double b, double rel_tol) {
    struct Panel {
        double a, b, value, error;
    };
    auto [v0, e0] = gk15(f, a, b);
    std::vector<Panel> panels{{a, b, v0, e0}};
    double total = v0, total_err = e0;
    const double floor_tol = 1e-300;
    int iterations = 0;
    while (total_err > std::max(rel_tol * std::abs(total), floor_tol)) {
        if (++iterations > 20000)
            throw QuadratureNotConverged("panel budget exhausted; error " +
                                         std::to_string(total_err));
        // split the worst panel
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].error > panels[worst].error) worst = i;
        const Panel p = panels[worst];
        if (p.b - p.a < 1e-15 * std::max(1.0, std::abs(p.a)))
            throw QuadratureNotConverged("interval underflow near " + std::to_string(p.a));
        const double mid = 0.5 * (p.a + p.b);
        auto [v1, er1] = gk15(f, p.a, mid);
        auto [v2, er2] = gk15(f, mid, p.b);
        total += v1 + v2 - p.value;
        total_err += er1 + er2 - p.error;
        panels[worst] = {p.a, mid, v1, er1};
        panels.push_back({mid, p.b, v2, er2});
    }
    return total;
}

/// Saddle-loop moments via w = tanh(t): the integrand becomes the polynomial
/// 2 * 2^(m/2) * (1-w^2)^(m/2) * w^2 on [-1, 1], which one Kronrod panel
/// integrates exactly for even m.
inline double homoclinic_moment(int moment) {
    const double scale = 2.0 * std::pow(std::sqrt(2.0), moment);
    auto f = [moment](double w) {
        return std::pow(1.0 - w * w, moment / 2) * w * w;
    };
    return scale * gk15(f, -1.0, 1.0).first;
}

}  // namespace detail

/// Contour integral (clockwise) of u^moment * v(u) du over the orbit,
/// computed in the u-domain. The substitution u = mid + halfwidth*sin(theta)
/// absorbs the square-root turning points analytically: with
/// v^2 = (u - lo)(hi - u) * W(u) and W polynomial, the integrand becomes
/// halfwidth^2 cos^2(theta) u^m sqrt(W), smooth on the whole panel.
inline double orbit_quadrature(const HamiltonianOrbit& orbit, int moment,
                               double rel_tol = 1e-10) {
    if (moment != 0 && moment != 2)
        throw std::invalid_argument("only moments 0 and 2 are defined");
    if (orbit.kind == OrbitKind::homoclinic) return detail::homoclinic_moment(moment);

    const double x = orbit.x;
    double lo, hi;
    std::function<double(double)> wpoly;
    switch (orbit.kind) {
        case OrbitKind::inner: {
            const double a = std::sqrt(2.0 - x * x);
            lo = a;
            hi = x;
            wpoly = [a, x](double u) { return 0.5 * (u + a) * (x + u); };
            break;
        }
        case OrbitKind::outer:
            lo = -x;
            hi = x;
            wpoly = [x](double u) { return 0.5 * (u * u + x * x - 2.0); };
            break;
        case OrbitKind::simple:
            lo = -x;
            hi = x;
            wpoly = [x](double u) { return 0.5 * (u * u + x * x + 2.0); };
            break;
        default:
            throw std::invalid_argument("unsupported orbit kind");
    }

    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    auto integrand = [&](double theta) {
        const double u = mid + half * std::sin(theta);
        const double w = wpoly(u);
        const double um = (moment == 0) ? 1.0 : u * u;
        const double cth = std::cos(theta);
        return half * half * cth * cth * um * std::sqrt(std::max(w, 0.0));
    };
    return 2.0 * detail::adaptive_quadrature(integrand, -0.5 * M_PI, 0.5 * M_PI, rel_tol);
}

/// Monotonicity branch a sample belongs to: R falls from 1 across the inner
/// family, keeps falling on the outer family until the fold, rises beyond
/// it (quadratically in the end); for mu = -1 it rises everywhere.
enum class RBranch { inner_falling, outer_falling, outer_rising, simple_rising };

inline const char* to_string(RBranch b) {
    switch (b) {
        case RBranch::inner_falling: return "inner-falling";
        case RBranch::outer_falling: return "outer-falling";
        case RBranch::outer_rising: return "outer-rising";
        case RBranch::simple_rising: return "simple-rising";
    }
    return "?";
}

struct MelnikovSample {
    double x = 0.0;
    double I0 = 0.0;
    double I2 = 0.0;
    double R = 0.0;
    RBranch branch = RBranch::outer_rising;
};

struct FoldResult {
    double x_star = 0.0;
    double lambda_star = 0.0;
};

namespace detail {

// ratio without the branch tag; the fold search below builds on this
inline double ratio_raw(double x, int mu_sign, double rel_tol = 1e-10) {
    const auto orbit = HamiltonianOrbit::from_turning_point(x, mu_sign);
    return orbit_quadrature(orbit, 2, rel_tol) / orbit_quadrature(orbit, 0, rel_tol);
}

}  // namespace detail

inline const FoldResult& cached_fold();

inline MelnikovSample melnikov_sample(double x, int mu_sign, double rel_tol = 1e-10) {
    const auto orbit = HamiltonianOrbit::from_turning_point(x, mu_sign);
    MelnikovSample s;
    s.x = x;
    s.I0 = orbit_quadrature(orbit, 0, rel_tol);
    s.I2 = orbit_quadrature(orbit, 2, rel_tol);
    s.R = s.I2 / s.I0;
    if (mu_sign < 0) s.branch = RBranch::simple_rising;
    else if (x < std::sqrt(2.0)) s.branch = RBranch::inner_falling;
    else s.branch = (x < cached_fold().x_star) ? RBranch::outer_falling : RBranch::outer_rising;
    return s;
}

/// First-order splitting measure lambda * I0(x) - I2(x); its zeros mark the
/// closed orbits that survive the eta-perturbation.
inline double melnikov(double lambda, double x, int mu_sign = 1) {
    const auto orbit = HamiltonianOrbit::from_turning_point(x, mu_sign);
    return lambda * orbit_quadrature(orbit, 0) - orbit_quadrature(orbit, 2);
}

inline double melnikov_ratio(double x, int mu_sign = 1, double rel_tol = 1e-10) {
    return detail::ratio_raw(x, mu_sign, rel_tol);
}

/// Samples of (I0, I2, R) over a turning-point grid.
inline std::vector<MelnikovSample> R_curve(int mu_sign, std::span<const double> xs,
                                           double rel_tol = 1e-10) {
    std::vector<MelnikovSample> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(melnikov_sample(x, mu_sign, rel_tol));
    return out;
}

/// Minimum of R on the outer branch (mu = +1) by golden-section search,
/// refined to 1e-6 in x.
inline FoldResult find_fold() {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = std::sqrt(2.0) + 2.0 * homoclinic_window;
    double b = 2.0;
    auto eval = [](double x) { return detail::ratio_raw(x, 1, 1e-11); };
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > 1e-6) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = eval(d);
        }
    }
    FoldResult out;
    out.x_star = 0.5 * (a + b);
    out.lambda_star = eval(out.x_star);
    return out;
}

inline const FoldResult& cached_fold() {
    static const FoldResult fold = find_fold();
    return fold;
}

struct PredictedCycle {
    bool stable = true;
    OrbitKind kind = OrbitKind::outer;
    double x = 0.0;        // turning-point label of the surviving orbit
    bool mirrored = false; // the reflected twin of an inner cycle
};

struct CyclePrediction {
    std::vector<PredictedCycle> cycles;
    int stable_count() const {
        int n = 0;
        for (const auto& c : cycles) n += c.stable ? 1 : 0;
        return n;
    }
    int unstable_count() const { return static_cast<int>(cycles.size()) - stable_count(); }
};

namespace detail {

/// Bisection for R(x) = lambda on a branch where R is strictly monotone.
inline double solve_ratio(double lambda, double lo, double hi, int mu_sign) {
    auto g = [&](double x) { return melnikov_ratio(x, mu_sign) - lambda; };
    double glo = g(lo);
    for (int i = 0; i < 200 && glo * g(hi) > 0; ++i) hi *= 1.5;  // expand upward if needed
    double a = lo, b = hi;
    for (int i = 0; i < 80; ++i) {
        const double m = 0.5 * (a + b);
        if (g(m) * glo <= 0) b = m;
        else {
            a = m;
            glo = g(a);
        }
        if (b - a < 1e-9 * std::max(1.0, b)) break;
    }
    return 0.5 * (a + b);
}

}  // namespace detail

/// Leading-order census of the limit cycles of the eta-perturbed system.
/// Local stability of a surviving orbit follows the slope of R at the zero:
/// R' > 0 gives a stable cycle, R' < 0 an unstable one.
inline CyclePrediction cycle_census_unfolded(double lambda, int mu_sign = 1) {
    CyclePrediction out;
    if (mu_sign < 0) {
        // R increases through (0, inf); a single attracting orbit per lambda
        if (lambda > 0.0) {
            PredictedCycle c;
            c.stable = true;
            c.kind = OrbitKind::simple;
            c.x = detail::solve_ratio(lambda, 1e-4, 2.0, -1);
            out.cycles.push_back(c);
        }
        return out;
    }

    const double lambda_hc = 4.0 / 5.0;
    const double lambda_star = cached_fold().lambda_star;
    if (std::abs(lambda - lambda_hc) < 1e-6)
        throw AtThreshold("lambda at the saddle-loop value 4/5");
    if (std::abs(lambda - lambda_star) < 1e-6)
        throw AtThreshold("lambda at the cycle-fold value");

    const double root2 = std::sqrt(2.0);
    const double xstar = cached_fold().x_star;

    if (lambda > lambda_star) {
        // large orbit on the rising branch of R beyond the fold
        PredictedCycle c;
        c.stable = true;
        c.kind = OrbitKind::outer;
        c.x = detail::solve_ratio(lambda, xstar + 1e-5, 4.0, 1);
        out.cycles.push_back(c);
    }
    if (lambda > lambda_star && lambda < lambda_hc) {
        // companion on the falling branch between the saddle loop and the fold
        PredictedCycle c;
        c.stable = false;
        c.kind = OrbitKind::outer;
        auto g = [&](double x) { return melnikov_ratio(x, 1) - lambda; };
        double a = root2 + 1.5 * homoclinic_window, b = xstar - 1e-5;
        double ga = g(a);
        for (int i = 0; i < 80; ++i) {
            const double m = 0.5 * (a + b);
            if (g(m) * ga <= 0) b = m;
            else {
                a = m;
                ga = g(a);
            }
        }
        c.x = 0.5 * (a + b);
        out.cycles.push_back(c);
    }
    if (lambda > lambda_hc && lambda < 1.0) {
        // the pair of small repelling orbits inside the saddle loops
        auto g = [&](double x) { return melnikov_ratio(x, 1) - lambda; };
        double a = 1.0 + 1e-7, b = root2 - 1.5 * homoclinic_window;
        double ga = g(a);
        for (int i = 0; i < 80; ++i) {
            const double m = 0.5 * (a + b);
            if (g(m) * ga <= 0) b = m;
            else {
                a = m;
                ga = g(a);
            }
        }
        PredictedCycle c;
        c.stable = false;
        c.kind = OrbitKind::inner;
        c.x = 0.5 * (a + b);
        out.cycles.push_back(c);
        c.mirrored = true;
        out.cycles.push_back(c);
    }
    return out;
}

}  // namespace msclim
