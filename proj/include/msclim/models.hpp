#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace msclim {

using State2 = std::array<double, 2>;
using State3 = std::array<double, 3>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Closed enumeration of the model family. Tooling iterates over this to test
/// every variant; no runtime strings are involved in dispatch.
enum class ModelKind { ms3, sym2, asym2, rotated2, unfolded2 };

enum class Variant { sym, asym };

// ---------------------------------------------------------------------------
// Parameter records
// ---------------------------------------------------------------------------

/// Three-dimensional model: anomalies of ice mass (x), CO2 (y) and deep-water
/// volume (z). p is the CO2 sensitivity to the deep-water anomaly, q the
/// relative deep-water rate (q > 1), r the CO2 growth rate, s the asymmetry.
struct MsParams {
    double p = 1.0;
    double q = 1.2;
    double r = 0.8;
    double s = 0.8;
};

/// Planar reduction with the reflection symmetry (x,y) -> (-x,-y).
struct SymParams {
    double p = 1.0;
    double r = 1.0;
};

/// Planar reduction with the quadratic symmetry-breaking term s*x^2.
/// With s = 0 this is exactly the symmetric model.
struct AsymParams {
    double p = 1.0;
    double r = 1.0;
    double s = 0.0;
};

/// Rescaled system near the organizing center (1,1): u' = v,
/// v' = mu*u - u^3 + eta*(lambda - u^2)*v. eta = 0 is Hamiltonian.
struct UnfoldParams {
    double lambda = 0.0;
    double mu = 1.0;
    double eta = 0.01;
};

/// Dimensionless coefficient set of the three-variable system before the
/// final state rescaling; collapses onto MsParams via nondimensionalize().
struct HatParams {
    double a1h = 1.0;
    double b1h = 1.0;
    double b2h = 1.0;
    double b3h = 1.0;
    double b4h = 1.0;
    double c0h = 1.0;
    double c2h = 1.0;
};

/// Empty string when the record satisfies its domain constraints, otherwise a
/// one-line description of the first violated constraint.
inline std::string invalid_reason(const MsParams& k) {
    if (!(k.p > 0)) return "p > 0 violated";
    if (!(k.q > 1)) return "q > 1 violated";
    if (!(k.r > 0)) return "r > 0 violated";
    if (!(k.s >= 0)) return "s >= 0 violated";
    return {};
}

inline std::string invalid_reason(const SymParams& k) {
    if (!(k.p > 0)) return "p > 0 violated";
    if (!(k.r > 0)) return "r > 0 violated";
    return {};
}

inline std::string invalid_reason(const AsymParams& k) {
    if (!(k.p > 0)) return "p > 0 violated";
    if (!(k.r > 0)) return "r > 0 violated";
    if (!(k.s >= 0)) return "s >= 0 violated";
    return {};
}

inline std::string invalid_reason(const UnfoldParams& k) {
    if (!(k.eta >= 0)) return "eta >= 0 violated";
    return {};
}

// ---------------------------------------------------------------------------
// Vector fields (pure, allocation free)
// ---------------------------------------------------------------------------

inline State3 ms_vector_field(const State3& v, const MsParams& k) {
    const double x = v[0], y = v[1], z = v[2];
    return {-x - y, k.r * y - k.p * z + k.s * z * z - y * z * z, -k.q * x - k.q * z};
}

inline State2 sym_vector_field(const State2& v, const SymParams& k) {
    const double x = v[0], y = v[1];
    return {-x - y, k.r * y + k.p * x - x * x * y};
}

inline State2 asym_vector_field(const State2& v, const AsymParams& k) {
    const double x = v[0], y = v[1];
    return {-x - y, k.r * y + k.p * x + k.s * x * x - x * x * y};
}

/// Same flow as asym_vector_field after the change of frame
/// (x, -(x+y)) -> (x, y); equilibria sit on the x-axis here.
inline State2 rotated_vector_field(const State2& v, const AsymParams& k) {
    const double x = v[0], y = v[1];
    return {y, (k.r - k.p) * x + (k.r - 1.0) * y - (k.s + y) * x * x - x * x * x};
}

inline State2 unfolded_vector_field(const State2& v, const UnfoldParams& k) {
    const double u = v[0], w = v[1];
    return {w, k.mu * u - u * u * u + k.eta * (k.lambda - u * u) * w};
}

/// eta = 0 limit of the unfolded field.
inline State2 hamiltonian_vector_field(const State2& v, double mu) {
    const double u = v[0], w = v[1];
    return {w, mu * u - u * u * u};
}

/// H(u,v) = v^2/2 - mu*u^2/2 + u^4/4; conserved along the eta = 0 flow.
inline double hamiltonian_value(const State2& v, double mu) {
    const double u = v[0], w = v[1];
    return 0.5 * w * w - 0.5 * mu * u * u + 0.25 * u * u * u * u;
}

// ---------------------------------------------------------------------------
// Jacobians (analytic, valid at arbitrary states)
// ---------------------------------------------------------------------------

inline Mat3 ms_jacobian(const State3& v, const MsParams& k) {
    const double y = v[1], z = v[2];
    return {{{-1.0, -1.0, 0.0},
             {0.0, k.r - z * z, -k.p + 2.0 * k.s * z - 2.0 * y * z},
             {-k.q, 0.0, -k.q}}};
}

inline Mat2 sym_jacobian(const State2& v, const SymParams& k) {
    const double x = v[0], y = v[1];
    return {{{-1.0, -1.0}, {k.p - 2.0 * x * y, k.r - x * x}}};
}

inline Mat2 asym_jacobian(const State2& v, const AsymParams& k) {
    const double x = v[0], y = v[1];
    return {{{-1.0, -1.0}, {k.p + 2.0 * k.s * x - 2.0 * x * y, k.r - x * x}}};
}

inline Mat2 rotated_jacobian(const State2& v, const AsymParams& k) {
    const double x = v[0], y = v[1];
    return {{{0.0, 1.0},
             {k.r - k.p - 2.0 * (k.s + y) * x - 3.0 * x * x, k.r - 1.0 - x * x}}};
}

inline Mat2 unfolded_jacobian(const State2& v, const UnfoldParams& k) {
    const double u = v[0], w = v[1];
    return {{{0.0, 1.0},
             {k.mu - 3.0 * u * u - 2.0 * k.eta * u * w, k.eta * (k.lambda - u * u)}}};
}

// ---------------------------------------------------------------------------
// Field functors, for use with the generic integrator
// ---------------------------------------------------------------------------

struct MsField {
    MsParams k;
    State3 operator()(const State3& v) const { return ms_vector_field(v, k); }
    Mat3 jacobian(const State3& v) const { return ms_jacobian(v, k); }
};

struct SymField {
    SymParams k;
    State2 operator()(const State2& v) const { return sym_vector_field(v, k); }
    Mat2 jacobian(const State2& v) const { return sym_jacobian(v, k); }
};

struct AsymField {
    AsymParams k;
    State2 operator()(const State2& v) const { return asym_vector_field(v, k); }
    Mat2 jacobian(const State2& v) const { return asym_jacobian(v, k); }
};

struct RotatedField {
    AsymParams k;
    State2 operator()(const State2& v) const { return rotated_vector_field(v, k); }
    Mat2 jacobian(const State2& v) const { return rotated_jacobian(v, k); }
};

struct UnfoldedField {
    UnfoldParams k;
    State2 operator()(const State2& v) const { return unfolded_vector_field(v, k); }
    Mat2 jacobian(const State2& v) const { return unfolded_jacobian(v, k); }
};

struct HamiltonianField {
    double mu = 1.0;
    State2 operator()(const State2& v) const { return hamiltonian_vector_field(v, mu); }
};

// ---------------------------------------------------------------------------
// Parameter transforms
// ---------------------------------------------------------------------------

/// (p,r) -> (lambda,mu) for a given scale eta > 0:
/// lambda = (r-1)/eta^2, mu = (r-p)/eta^2.
inline UnfoldParams unfolding_map(double p, double r, double eta) {
    if (!(eta > 0)) throw std::invalid_argument("unfolding_map: eta must be positive");
    const double e2 = eta * eta;
    return {(r - 1.0) / e2, (r - p) / e2, eta};
}

/// Inverse of unfolding_map: r = 1 + lambda*eta^2, p = r - mu*eta^2.
/// The image satisfies (lambda - mu)*(r - 1) = lambda*(p - 1), a pencil of
/// lines through (1,1) with slope lambda/(lambda - mu).
inline SymParams pencil_line(double lambda, double mu, double eta) {
    const double e2 = eta * eta;
    const double r = 1.0 + lambda * e2;
    return {r - mu * e2, r};
}

/// Slope (r-1)/(p-1) of the pencil line selected by (lambda, mu).
inline double pencil_slope(double lambda, double mu) {
    return lambda / (lambda - mu);
}

/// Collapses the hatted coefficient set onto (p, q, r, s).
inline MsParams nondimensionalize(const HatParams& h) {
    const double all[] = {h.a1h, h.b1h, h.b2h, h.b4h, h.c0h, h.c2h};
    for (double c : all)
        if (!(c > 0)) throw std::invalid_argument("nondimensionalize: coefficients must be positive");
    if (!(h.b3h >= 0)) throw std::invalid_argument("nondimensionalize: b3h must be nonnegative");
    MsParams k;
    k.p = h.a1h * h.b2h * h.c0h / h.c2h;
    k.q = h.c2h;
    k.r = h.b1h;
    k.s = h.a1h * h.b3h * h.c0h / (h.c2h * std::sqrt(h.b4h));
    return k;
}

/// Conversion between the dimensionless clock and calendar time:
/// one time unit corresponds to roughly 10 kyr.
inline constexpr double kyr_per_time_unit = 10.0;

}  // namespace msclim
