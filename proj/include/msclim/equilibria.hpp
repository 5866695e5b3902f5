#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "msclim/curve.hpp"
#include "msclim/errors.hpp"
#include "msclim/models.hpp"

namespace msclim {

enum class EqLabel { P0, P1, P2 };

inline const char* to_string(EqLabel l) {
    switch (l) {
        case EqLabel::P0: return "P0";
        case EqLabel::P1: return "P1";
        case EqLabel::P2: return "P2";
    }
    return "?";
}

enum class EquilibriumKind {
    stable_node,
    stable_spiral,
    unstable_node,
    unstable_spiral,
    saddle,
    nonhyperbolic,
};

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::stable_node: return "stable node";
        case EquilibriumKind::stable_spiral: return "stable spiral";
        case EquilibriumKind::unstable_node: return "unstable node";
        case EquilibriumKind::unstable_spiral: return "unstable spiral";
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::nonhyperbolic: return "nonhyperbolic";
    }
    return "?";
}

/// |Re(lambda)| below this counts as a zero real part.
inline constexpr double nonhyperbolic_tol = 1e-9;

/// Proximity to a defining curve below this flags a boundary point.
inline constexpr double boundary_tol = 1e-9;

template <std::size_t N>
struct EquilibriumReport {
    std::array<double, N> location{};
    std::array<std::array<double, N>, N> jacobian{};
    std::array<std::complex<double>, N> eigenvalues{};
    EquilibriumKind kind = EquilibriumKind::nonhyperbolic;
    EqLabel label = EqLabel::P0;
    bool degenerate = false;  // coincides with another equilibrium
};

inline bool is_stable(EquilibriumKind k) {
    return k == EquilibriumKind::stable_node || k == EquilibriumKind::stable_spiral;
}

// ---------------------------------------------------------------------------
// Closed-form eigenvalue solvers
// ---------------------------------------------------------------------------

/// Roots of z^2 + b z + c.
inline std::array<std::complex<double>, 2> solve_quadratic(double b, double c) {
    const double disc = b * b - 4.0 * c;
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // avoid cancellation: compute the larger-magnitude root first
        const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
        double z1 = q;
        double z2 = (q != 0.0) ? c / q : -b - q;
        if (z1 > z2) std::swap(z1, z2);
        return {std::complex<double>(z1, 0.0), std::complex<double>(z2, 0.0)};
    }
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(re, -im), std::complex<double>(re, im)};
}

/// Roots of z^3 + a z^2 + b z + c. Three real roots come from the
/// trigonometric form; a single real root uses Cardano with the principal
/// real cube root, followed by quadratic deflation.
inline std::array<std::complex<double>, 3> solve_cubic(double a, double b, double c) {
    const double shift = -a / 3.0;
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = -4.0 * p * p * p - 27.0 * q * q;

    std::array<std::complex<double>, 3> roots;
    if (disc >= 0.0 && p < 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = m * std::cos(phi - 2.0 * M_PI * k / 3.0);
            roots[k] = std::complex<double>(t + shift, 0.0);
        }
    } else {
        const double half_q = 0.5 * q;
        const double inner = half_q * half_q + p * p * p / 27.0;
        double t1;
        if (inner >= 0.0) {
            const double sq = std::sqrt(inner);
            const double u = std::cbrt(-half_q + sq);
            const double v = std::cbrt(-half_q - sq);
            t1 = u + v;
        } else {
            // disc > 0 with p >= 0 cannot happen; keep a safe fallback
            t1 = std::cbrt(-q);
        }
        const double quad_b = t1;  // t^2 + t1*t + (p + t1^2) after deflation
        const double quad_c = p + t1 * t1;
        const auto pair = solve_quadratic(quad_b, quad_c);
        roots[0] = std::complex<double>(t1 + shift, 0.0);
        roots[1] = pair[0] + shift;
        roots[2] = pair[1] + shift;
    }

    // one Newton step per root against the original cubic tightens residuals
    for (auto& z : roots) {
        const std::complex<double> f = ((z + a) * z + b) * z + c;
        const std::complex<double> df = (3.0 * z + 2.0 * a) * z + b;
        if (std::abs(df) > 1e-30) z -= f / df;
    }
    return roots;
}

inline std::array<std::complex<double>, 2> eigenvalues(const Mat2& j) {
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    return solve_quadratic(-tr, det);
}

inline std::array<std::complex<double>, 3> eigenvalues(const Mat3& j) {
    const double tr = j[0][0] + j[1][1] + j[2][2];
    const double m0 = j[1][1] * j[2][2] - j[1][2] * j[2][1];
    const double m1 = j[0][0] * j[2][2] - j[0][2] * j[2][0];
    const double m2 = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const double det = j[0][0] * m0 - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                       j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    return solve_cubic(-tr, m0 + m1 + m2, -det);
}

// ---------------------------------------------------------------------------
// Stability classification
// ---------------------------------------------------------------------------

template <std::size_t N>
EquilibriumKind classify_eigenvalues(const std::array<std::complex<double>, N>& ev) {
    bool any_zero = false, any_pos = false, any_neg = false, any_complex = false;
    for (const auto& z : ev) {
        if (std::abs(z.real()) < nonhyperbolic_tol) any_zero = true;
        else if (z.real() > 0) any_pos = true;
        else any_neg = true;
        if (std::abs(z.imag()) > nonhyperbolic_tol) any_complex = true;
    }
    if (any_zero) return EquilibriumKind::nonhyperbolic;
    if (any_pos && any_neg) return EquilibriumKind::saddle;
    if (any_pos) return any_complex ? EquilibriumKind::unstable_spiral : EquilibriumKind::unstable_node;
    return any_complex ? EquilibriumKind::stable_spiral : EquilibriumKind::stable_node;
}

inline EquilibriumKind classify_stability(const Mat2& j) {
    return classify_eigenvalues<2>(eigenvalues(j));
}

inline EquilibriumKind classify_stability(const Mat3& j) {
    return classify_eigenvalues<3>(eigenvalues(j));
}

// ---------------------------------------------------------------------------
// Equilibria of each model
// ---------------------------------------------------------------------------

namespace detail {

inline EquilibriumReport<2> make_report2(const State2& loc, const Mat2& j, EqLabel label) {
    EquilibriumReport<2> rep;
    rep.location = loc;
    rep.jacobian = j;
    rep.eigenvalues = eigenvalues(j);
    rep.kind = classify_eigenvalues<2>(rep.eigenvalues);
    rep.label = label;
    return rep;
}

inline EquilibriumReport<3> make_report3(const State3& loc, const Mat3& j, EqLabel label) {
    EquilibriumReport<3> rep;
    rep.location = loc;
    rep.jacobian = j;
    rep.eigenvalues = eigenvalues(j);
    rep.kind = classify_eigenvalues<3>(rep.eigenvalues);
    rep.label = label;
    return rep;
}

/// Nonzero roots of x^2 + s*x + (p - r) = 0, largest first; empty when the
/// branch pair does not exist.
inline std::vector<double> branch_roots(double p, double r, double s) {
    const double disc = s * s + 4.0 * (r - p);
    if (disc < 0.0) return {};
    const double sq = std::sqrt(disc);
    return {0.5 * (-s + sq), 0.5 * (-s - sq)};
}

}  // namespace detail

inline std::vector<EquilibriumReport<2>> find_equilibria(const SymParams& k) {
    std::vector<EquilibriumReport<2>> out;
    out.push_back(detail::make_report2({0.0, 0.0}, sym_jacobian({0.0, 0.0}, k), EqLabel::P0));
    if (k.r > k.p) {
        const double x = std::sqrt(k.r - k.p);
        out.push_back(detail::make_report2({x, -x}, sym_jacobian({x, -x}, k), EqLabel::P1));
        out.push_back(detail::make_report2({-x, x}, sym_jacobian({-x, x}, k), EqLabel::P2));
    }
    return out;
}

inline std::vector<EquilibriumReport<2>> find_equilibria(const AsymParams& k) {
    std::vector<EquilibriumReport<2>> out;
    out.push_back(detail::make_report2({0.0, 0.0}, asym_jacobian({0.0, 0.0}, k), EqLabel::P0));
    const auto roots = detail::branch_roots(k.p, k.r, k.s);
    if (roots.size() == 2) {
        const EqLabel labels[2] = {EqLabel::P1, EqLabel::P2};
        for (int i = 0; i < 2; ++i) {
            const double x = roots[i];
            State2 loc{x, -x};
            auto rep = detail::make_report2(loc, asym_jacobian(loc, k), labels[i]);
            rep.degenerate = std::abs(roots[0] - roots[1]) < boundary_tol ||
                             std::abs(x) < boundary_tol;
            out.push_back(rep);
        }
    }
    return out;
}

inline std::vector<EquilibriumReport<3>> find_equilibria(const MsParams& k) {
    // equilibria satisfy y = -x, z = -x, x*(x^2 + s*x - (r - p)) = 0
    std::vector<EquilibriumReport<3>> out;
    out.push_back(detail::make_report3({0, 0, 0}, ms_jacobian({0, 0, 0}, k), EqLabel::P0));
    const auto roots = detail::branch_roots(k.p, k.r, k.s);
    if (roots.size() == 2) {
        const EqLabel labels[2] = {EqLabel::P1, EqLabel::P2};
        for (int i = 0; i < 2; ++i) {
            const double x = roots[i];
            State3 loc{x, -x, -x};
            auto rep = detail::make_report3(loc, ms_jacobian(loc, k), labels[i]);
            rep.degenerate = std::abs(roots[0] - roots[1]) < boundary_tol ||
                             std::abs(x) < boundary_tol;
            out.push_back(rep);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Region classification
// ---------------------------------------------------------------------------

enum class SymRegion { O, I, II, III };
enum class AsymRegion { Oa, Ob, I, IIa, III, IIIo };
enum class Region3Sub { none, IIIa, IIIb, IIIc };

inline const char* to_string(SymRegion r) {
    switch (r) {
        case SymRegion::O: return "O";
        case SymRegion::I: return "I";
        case SymRegion::II: return "II";
        case SymRegion::III: return "III";
    }
    return "?";
}

inline const char* to_string(AsymRegion r) {
    switch (r) {
        case AsymRegion::Oa: return "Oa";
        case AsymRegion::Ob: return "Ob";
        case AsymRegion::I: return "I";
        case AsymRegion::IIa: return "IIa";
        case AsymRegion::III: return "III";
        case AsymRegion::IIIo: return "IIIo";
    }
    return "?";
}

inline const char* to_string(Region3Sub r) {
    switch (r) {
        case Region3Sub::none: return "";
        case Region3Sub::IIIa: return "IIIa";
        case Region3Sub::IIIb: return "IIIb";
        case Region3Sub::IIIc: return "IIIc";
    }
    return "?";
}

/// Region-III sub-boundaries in (p, r): the saddle-loop curve and the
/// cycle-fold curve, both graphs over p. Supplied by the curve tracers.
struct Region3Thresholds {
    BifurcationCurve homoclinic;
    BifurcationCurve fold;
};

namespace detail {

inline std::optional<double> interp_r_at_p(const BifurcationCurve& c, double p) {
    const auto& pts = c.points;
    if (pts.size() < 2) return std::nullopt;
    const bool increasing = pts.front()[0] < pts.back()[0];
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i][0], b = pts[i + 1][0];
        const bool inside = increasing ? (p >= a && p <= b) : (p <= a && p >= b);
        if (inside && a != b) {
            const double w = (p - a) / (b - a);
            return pts[i][1] + w * (pts[i + 1][1] - pts[i][1]);
        }
    }
    return std::nullopt;
}

}  // namespace detail

struct SymRegionLabel {
    SymRegion region = SymRegion::O;
    Region3Sub sub = Region3Sub::none;
    bool boundary = false;
    std::vector<std::string> near_curves;  // which defining curves are within tolerance
    bool on_spiral_node_c1 = false;        // p = (r+1)^2/4
    bool on_spiral_node_c2 = false;        // r = (p+1)^2/4
};

struct AsymRegionLabel {
    AsymRegion region = AsymRegion::Ob;
    bool boundary = false;
    std::vector<std::string> near_curves;
};

/// Labels the four open regions of the symmetric parameter plane:
/// O = {r < min(p,1)}, I = {1 < r < p}, II = {1 < p < r}, III = {p < min(r,1) or (p < 1 < r)}.
/// Points within boundary_tol of r = p, r = 1 (p >= 1) or p = 1 (r >= 1) are flagged.
inline SymRegionLabel region_classify(const SymParams& k,
                                      const Region3Thresholds* thresholds = nullptr) {
    SymRegionLabel out;
    const double p = k.p, r = k.r;

    if (std::abs(r - p) < boundary_tol) out.near_curves.push_back("pitchfork r=p");
    if (std::abs(r - 1.0) < boundary_tol && p >= 1.0 - boundary_tol)
        out.near_curves.push_back("hopf r=1");
    if (std::abs(p - 1.0) < boundary_tol && r >= 1.0 - boundary_tol)
        out.near_curves.push_back("hopf p=1");
    out.boundary = !out.near_curves.empty();

    out.on_spiral_node_c1 = std::abs(p - 0.25 * (r + 1.0) * (r + 1.0)) < boundary_tol;
    out.on_spiral_node_c2 = std::abs(r - 0.25 * (p + 1.0) * (p + 1.0)) < boundary_tol;

    if (r < std::min(p, 1.0)) out.region = SymRegion::O;
    else if (r > 1.0 && r < p) out.region = SymRegion::I;
    else if (p > 1.0 && p < r) out.region = SymRegion::II;
    else out.region = SymRegion::III;

    if (out.region == SymRegion::III && thresholds) {
        const auto r_hc = detail::interp_r_at_p(thresholds->homoclinic, p);
        const auto r_fold = detail::interp_r_at_p(thresholds->fold, p);
        if (r_hc && r >= *r_hc) out.sub = Region3Sub::IIIa;
        else if (r_fold && r >= *r_fold) out.sub = Region3Sub::IIIb;
        else if (r_fold) out.sub = Region3Sub::IIIc;
        else if (r <= 1.0) out.sub = Region3Sub::IIIc;  // all cycle-bearing labels have r > 1
    }
    return out;
}

/// Labels the six open regions of the asymmetric plane. Boundaries are the
/// closed forms: shifted diagonal r = p - s^2/4, diagonal r = p (p < 1),
/// r = 1 (p > 1), and the trace-zero conditions of the nontrivial branches.
inline AsymRegionLabel region_classify(const AsymParams& k) {
    AsymRegionLabel out;
    const double p = k.p, r = k.r, s = k.s;

    const double sd = r - (p - 0.25 * s * s);
    if (std::abs(sd) < boundary_tol) out.near_curves.push_back("saddle-node r=p-s^2/4");
    if (std::abs(r - p) < boundary_tol && p <= 1.0 + boundary_tol)
        out.near_curves.push_back("transcritical r=p");
    if (std::abs(r - 1.0) < boundary_tol && p >= 1.0 - boundary_tol)
        out.near_curves.push_back("hopf e0 r=1");

    const bool exists = sd > 0.0;
    bool p0_stable = (r < 1.0) && (r < p);
    bool p1_stable = false, p2_stable = false;
    if (exists) {
        const auto roots = detail::branch_roots(p, r, s);
        const double x1 = roots[0], x2 = roots[1];
        const double tr1 = r - 1.0 - x1 * x1;
        const double det1 = x1 * (2.0 * x1 + s);
        const double tr2 = r - 1.0 - x2 * x2;
        p1_stable = det1 > 0.0 && tr1 < 0.0;
        p2_stable = tr2 < 0.0;  // det at the lower branch is always positive
        if (std::abs(tr1) < boundary_tol && det1 > 0.0) out.near_curves.push_back("hopf e1");
        if (std::abs(tr2) < boundary_tol && x2 * (2.0 * x2 + s) > 0.0)
            out.near_curves.push_back("hopf e2");
    }
    out.boundary = !out.near_curves.empty();

    if (!exists) out.region = p0_stable ? AsymRegion::Ob : AsymRegion::I;
    else if (p0_stable) out.region = AsymRegion::Oa;
    else if (p1_stable) out.region = AsymRegion::III;
    else if (p2_stable) out.region = AsymRegion::IIIo;
    else out.region = AsymRegion::IIa;
    return out;
}

// ---------------------------------------------------------------------------
// Hopf analysis
// ---------------------------------------------------------------------------

struct HopfReport {
    EqLabel equilibrium = EqLabel::P0;
    bool supercritical = false;
    double lyapunov = 0.0;  // first Lyapunov coefficient
    double omega = 0.0;     // natural frequency
};

namespace detail {

/// Second-order form of the planar models: x'' + g(x) x' + f(x) = 0 with
/// f(x) = x^3 + s x^2 - (r-p) x and g(x) = x^2 - (r-1). The symmetric model
/// is s = 0.
struct SecondOrderForm {
    double p, r, s;
    double f(double x) const { return x * x * x + s * x * x - (r - p) * x; }
    double fp(double x) const { return 3.0 * x * x + 2.0 * s * x - (r - p); }
    double fpp(double x) const { return 6.0 * x + 2.0 * s; }
    double g(double x) const { return x * x - (r - 1.0); }
    double gp(double x) const { return 2.0 * x; }
    double gpp(double) const { return 2.0; }
};

inline HopfReport hopf_at(const SecondOrderForm& m, double xstar, EqLabel label) {
    if (std::abs(m.f(xstar)) > 1e-9)
        throw NotOnHopfCurve("point is not an equilibrium of the second-order form");
    if (std::abs(m.g(xstar)) > 1e-9)
        throw NotOnHopfCurve("eigenvalues are not purely imaginary (trace != 0)");
    const double fp = m.fp(xstar);
    if (!(fp > 0.0)) throw NotOnHopfCurve("frequency condition f'(x*) > 0 fails");
    HopfReport rep;
    rep.equilibrium = label;
    rep.omega = std::sqrt(fp);
    // l* = -(omega/8) d/dx [ g'(x)/f'(x) ] at x*
    const double num = m.gpp(xstar) * fp - m.gp(xstar) * m.fpp(xstar);
    rep.lyapunov = -(rep.omega / 8.0) * num / (fp * fp);
    rep.supercritical = rep.lyapunov < 0.0;
    return rep;
}

}  // namespace detail

/// Hopf data for the symmetric model at the given equilibrium; requires the
/// parameters to sit on the corresponding Hopf locus (checked to 1e-9).
inline HopfReport hopf_analysis(const SymParams& k, EqLabel label) {
    const detail::SecondOrderForm m{k.p, k.r, 0.0};
    double xstar = 0.0;
    if (label != EqLabel::P0) {
        if (!(k.r > k.p)) throw NotOnHopfCurve("nontrivial equilibria do not exist here");
        xstar = std::sqrt(k.r - k.p) * (label == EqLabel::P1 ? 1.0 : -1.0);
    }
    return detail::hopf_at(m, xstar, label);
}

inline HopfReport hopf_analysis(const AsymParams& k, EqLabel label) {
    const detail::SecondOrderForm m{k.p, k.r, k.s};
    double xstar = 0.0;
    if (label != EqLabel::P0) {
        const auto roots = detail::branch_roots(k.p, k.r, k.s);
        if (roots.size() != 2) throw NotOnHopfCurve("nontrivial equilibria do not exist here");
        xstar = (label == EqLabel::P1) ? roots[0] : roots[1];
    }
    return detail::hopf_at(m, xstar, label);
}

// ---------------------------------------------------------------------------
// Double-zero (organizing center) points
// ---------------------------------------------------------------------------

struct BtPoint {
    double p = 0.0, r = 0.0;
    EqLabel branch = EqLabel::P0;
    double trace_abs = 0.0;  // rotated-frame Jacobian trace magnitude
    double det_abs = 0.0;    // rotated-frame Jacobian determinant magnitude
};

namespace detail {

inline BtPoint bt_diagnose(double p, double r, double s, double xstar, EqLabel branch) {
    const Mat2 j = rotated_jacobian({xstar, 0.0}, AsymParams{p, r, s});
    BtPoint out;
    out.p = p;
    out.r = r;
    out.branch = branch;
    out.trace_abs = std::abs(j[0][0] + j[1][1]);
    out.det_abs = std::abs(j[0][0] * j[1][1] - j[0][1] * j[1][0]);
    return out;
}

}  // namespace detail

/// Points where the rotated-frame Jacobian has a double-zero eigenvalue.
/// sym: the single point (1,1). asym: (1,1) on the trivial branch plus
/// (1 + s^2/2, 1 + s^2/4) where the nontrivial branches collide.
inline std::vector<BtPoint> bt_points(Variant variant, double s = 0.0) {
    if (variant == Variant::sym) s = 0.0;
    std::vector<BtPoint> out;
    out.push_back(detail::bt_diagnose(1.0, 1.0, s, 0.0, EqLabel::P0));
    if (variant == Variant::asym) {
        const double p2 = 1.0 + 0.5 * s * s;
        const double r2 = 1.0 + 0.25 * s * s;
        out.push_back(detail::bt_diagnose(p2, r2, s, -0.5 * s, EqLabel::P1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Codimension-one equilibrium bifurcation loci (closed forms)
// ---------------------------------------------------------------------------

struct PlotWindow {
    double p_min = 1e-3, p_max = 3.0;
    double r_min = 1e-3, r_max = 3.0;
    int n = 121;
};

namespace detail {

template <class F>
BifurcationCurve sampled_curve(CurveKind kind, CurveAssociation assoc, double a, double b,
                               int n, F&& r_of_p) {
    BifurcationCurve c;
    c.kind = kind;
    c.association = assoc;
    c.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double p = a + (b - a) * i / (n - 1);
        c.points.push_back({p, r_of_p(p)});
    }
    return c;
}

}  // namespace detail

/// Pitchfork diagonal for the symmetric model; transcritical segment and the
/// shifted-diagonal saddle-node line for the asymmetric model.
inline std::vector<BifurcationCurve> codim1_loci(Variant variant, double s = 0.0,
                                                 const PlotWindow& w = {}) {
    std::vector<BifurcationCurve> out;
    if (variant == Variant::sym) {
        out.push_back(detail::sampled_curve(CurveKind::pitchfork, CurveAssociation::P1,
                                            w.p_min, w.p_max, w.n, [](double p) { return p; }));
        return out;
    }
    out.push_back(detail::sampled_curve(CurveKind::transcritical, CurveAssociation::P1,
                                        w.p_min, 1.0, w.n, [](double p) { return p; }));
    const double shift = 0.25 * s * s;
    out.push_back(detail::sampled_curve(CurveKind::saddle_node_eq, CurveAssociation::P1,
                                        std::max(w.p_min, shift + w.r_min), w.p_max, w.n,
                                        [shift](double p) { return p - shift; }));
    return out;
}

/// Boundaries between spiral and node behavior reported for the symmetric
/// variant: C1 = {p = (r+1)^2/4} and C2 = {r = (p+1)^2/4}.
inline std::vector<std::vector<std::array<double, 2>>> sym_spiral_node_curves(
    const PlotWindow& w = {}) {
    std::vector<std::vector<std::array<double, 2>>> out(2);
    for (int i = 0; i < w.n; ++i) {
        const double r = w.r_min + (w.r_max - w.r_min) * i / (w.n - 1);
        out[0].push_back({0.25 * (r + 1.0) * (r + 1.0), r});
    }
    for (int i = 0; i < w.n; ++i) {
        const double p = w.p_min + (w.p_max - w.p_min) * i / (w.n - 1);
        out[1].push_back({p, 0.25 * (p + 1.0) * (p + 1.0)});
    }
    return out;
}

}  // namespace msclim
