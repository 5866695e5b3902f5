#pragma once

#include <array>
#include <string>
#include <vector>

namespace msclim {

enum class CurveKind {
    hopf_super,
    hopf_sub,
    homoclinic,
    cycle_fold,
    pitchfork,
    transcritical,
    saddle_node_eq,
};

enum class CurveAssociation { P0, P1, P2, cycles };

inline const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::hopf_super: return "hopf-super";
        case CurveKind::hopf_sub: return "hopf-sub";
        case CurveKind::homoclinic: return "homoclinic";
        case CurveKind::cycle_fold: return "cycle-fold";
        case CurveKind::pitchfork: return "pitchfork";
        case CurveKind::transcritical: return "transcritical";
        case CurveKind::saddle_node_eq: return "saddle-node-eq";
    }
    return "?";
}

inline const char* to_string(CurveAssociation a) {
    switch (a) {
        case CurveAssociation::P0: return "P0";
        case CurveAssociation::P1: return "P1";
        case CurveAssociation::P2: return "P2";
        case CurveAssociation::cycles: return "cycles";
    }
    return "?";
}

/// Typed polyline in the (p, r) parameter plane. Closed-form curves carry
/// provenance "closed-form"; curves produced by a bisection tracer carry
/// "traced" plus the tolerance the bisection achieved.
struct BifurcationCurve {
    CurveKind kind{};
    CurveAssociation association = CurveAssociation::cycles;
    std::vector<std::array<double, 2>> points;  // (p, r), monotone in p
    bool traced = false;
    double bisect_tol = 0.0;
    std::string note;  // tracer diagnostics, e.g. which saddle was involved
};

}  // namespace msclim
