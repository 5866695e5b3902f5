#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "msclim/bifurcation.hpp"
#include "msclim/curve.hpp"
#include "msclim/integrate.hpp"

namespace msclim::svg {

// Minimal SVG emission: polyline charts for trajectories and a rect-cell
// heatmap for sweeps. No external renderer involved.

struct Series {
    std::string name;
    std::string color = "#1f77b4";
    std::vector<std::array<double, 2>> points;  // (t, value)
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Box {
    double x0, x1, y0, y1;
};

inline Box bounds(std::span<const Series> series) {
    Box b{std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest(),
          std::numeric_limits<double>::max(), std::numeric_limits<double>::lowest()};
    for (const auto& s : series)
        for (const auto& p : s.points) {
            b.x0 = std::min(b.x0, p[0]);
            b.x1 = std::max(b.x1, p[0]);
            b.y0 = std::min(b.y0, p[1]);
            b.y1 = std::max(b.y1, p[1]);
        }
    if (b.x0 >= b.x1) b.x1 = b.x0 + 1;
    if (b.y0 >= b.y1) b.y1 = b.y0 + 1;
    return b;
}

}  // namespace detail

/// Line chart of one or more (t, value) series with a plain frame.
inline std::string line_chart(std::span<const Series> series, const std::string& title = {}) {
    const int w = 900, h = 480, ml = 60, mr = 20, mt = 30, mb = 40;
    const auto b = detail::bounds(series);
    auto X = [&](double x) { return ml + (x - b.x0) / (b.x1 - b.x0) * (w - ml - mr); };
    auto Y = [&](double y) { return h - mb - (y - b.y0) / (b.y1 - b.y0) * (h - mt - mb); };

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\">\n";
    out += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
           std::to_string(w - ml - mr) + "\" height=\"" + std::to_string(h - mt - mb) +
           "\" fill=\"white\" stroke=\"black\"/>\n";
    if (!title.empty())
        out += "<text x=\"" + std::to_string(w / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
               title + "</text>\n";
    for (const auto& s : series) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1\" points=\"";
        for (const auto& p : s.points)
            out += detail::num(X(p[0])) + "," + detail::num(Y(p[1])) + " ";
        out += "\"/>\n";
    }
    // axis extremes
    out += "<text x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(h - 8) + "\">" +
           detail::num(b.x0) + "</text>\n";
    out += "<text x=\"" + std::to_string(w - mr) + "\" y=\"" + std::to_string(h - 8) +
           "\" text-anchor=\"end\">" + detail::num(b.x1) + "</text>\n";
    out += "<text x=\"8\" y=\"" + std::to_string(h - mb) + "\">" + detail::num(b.y0) +
           "</text>\n";
    out += "<text x=\"8\" y=\"" + std::to_string(mt + 12) + "\">" + detail::num(b.y1) +
           "</text>\n";
    out += "</svg>\n";
    return out;
}

template <std::size_t N>
std::string orbit_chart(const OrbitRecord<N>& rec, const std::string& title = {}) {
    static const char* colors[3] = {"#000000", "#d62728", "#1f77b4"};
    static const char* names[3] = {"x", "y", "z"};
    std::vector<Series> series;
    for (std::size_t c = 0; c < N; ++c) {
        Series s;
        s.name = names[c];
        s.color = colors[c];
        for (std::size_t i = 0; i < rec.times.size(); ++i)
            s.points.push_back({rec.times[i], rec.states[i][c]});
        series.push_back(std::move(s));
    }
    return line_chart(series, title);
}

/// Three-way coloring of the long-run sup: near zero, negative (equilibrium),
/// positive (cycle or positive-branch equilibrium), with failures hatched gray.
inline std::string sweep_heatmap(const SweepGrid& g,
                                 std::span<const BifurcationCurve> overlay = {},
                                 const std::string& title = {}) {
    const int w = 720, h = 720, ml = 60, mr = 20, mt = 30, mb = 40;
    const std::size_t np = g.p_axis.size(), nr = g.r_axis.size();
    const double p0 = g.p_axis.front(), p1 = g.p_axis.back();
    const double r0 = g.r_axis.front(), r1 = g.r_axis.back();
    const double dp = (np > 1) ? (p1 - p0) / (np - 1) : 1.0;
    const double dr = (nr > 1) ? (r1 - r0) / (nr - 1) : 1.0;
    auto X = [&](double p) {
        return ml + (p - (p0 - 0.5 * dp)) / ((p1 + 0.5 * dp) - (p0 - 0.5 * dp)) * (w - ml - mr);
    };
    auto Y = [&](double r) {
        return h - mb -
               (r - (r0 - 0.5 * dr)) / ((r1 + 0.5 * dr) - (r0 - 0.5 * dr)) * (h - mt - mb);
    };

    double vmax = 1e-12;
    for (double v : g.values)
        if (!std::isnan(v)) vmax = std::max(vmax, std::abs(v));

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\">\n";
    if (!title.empty())
        out += "<text x=\"" + std::to_string(w / 2) + "\" y=\"20\" text-anchor=\"middle\">" +
               title + "</text>\n";
    for (std::size_t ip = 0; ip < np; ++ip)
        for (std::size_t ir = 0; ir < nr; ++ir) {
            const double v = g.value(ip, ir);
            std::string fill = "#bbbbbb";  // failed cell
            if (g.cell_status(ip, ir) == CellStatus::ok) {
                if (std::abs(v) <= 1e-4) fill = "#c8e6b0";        // trivial state
                else if (v < 0) fill = "#1b6b27";                 // nontrivial equilibrium
                else if (v < 0.55 * vmax) fill = "#ff8c00";       // modest positive sup
                else fill = "#ff69b4";                            // large positive sup
            }
            const double xa = X(g.p_axis[ip] - 0.5 * dp), xb = X(g.p_axis[ip] + 0.5 * dp);
            const double yb = Y(g.r_axis[ir] - 0.5 * dr), ya = Y(g.r_axis[ir] + 0.5 * dr);
            out += "<rect x=\"" + detail::num(xa) + "\" y=\"" + detail::num(ya) + "\" width=\"" +
                   detail::num(xb - xa) + "\" height=\"" + detail::num(yb - ya) + "\" fill=\"" +
                   fill + "\"/>\n";
        }
    for (const auto& c : overlay) {
        const char* stroke = "#000000";
        switch (c.kind) {
            case CurveKind::hopf_super:
            case CurveKind::hopf_sub: stroke = "#d62728"; break;
            case CurveKind::homoclinic: stroke = "#1f77b4"; break;
            case CurveKind::cycle_fold: stroke = "#000000"; break;
            default: stroke = "#7f7f7f"; break;
        }
        out += "<polyline fill=\"none\" stroke=\"";
        out += stroke;
        out += "\" stroke-width=\"2\" points=\"";
        for (const auto& pt : c.points) {
            if (pt[0] < p0 - 0.5 * dp || pt[0] > p1 + 0.5 * dp || pt[1] < r0 - 0.5 * dr ||
                pt[1] > r1 + 0.5 * dr)
                continue;
            out += detail::num(X(pt[0])) + "," + detail::num(Y(pt[1])) + " ";
        }
        out += "\"/>\n";
    }
    out += "<rect x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(mt) + "\" width=\"" +
           std::to_string(w - ml - mr) + "\" height=\"" + std::to_string(h - mt - mb) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace msclim::svg
