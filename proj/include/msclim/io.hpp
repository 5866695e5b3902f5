#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "msclim/bifurcation.hpp"
#include "msclim/curve.hpp"
#include "msclim/equilibria.hpp"
#include "msclim/integrate.hpp"
#include "msclim/melnikov.hpp"
#include "msclim/models.hpp"

namespace msclim::io {

using nlohmann::json;

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Writes via a temporary in the same directory and renames into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

template <std::size_t N>
std::string orbit_csv(const OrbitRecord<N>& rec) {
    static_assert(N == 2 || N == 3);
    std::string out = "# msclim orbit v1\n";
    out += (N == 2) ? "t,x,y\n" : "t,x,y,z\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        out += format_double(rec.times[i]);
        for (std::size_t c = 0; c < N; ++c) {
            out += ',';
            out += format_double(rec.states[i][c]);
        }
        out += '\n';
    }
    return out;
}

inline std::string curves_csv(std::span<const BifurcationCurve> curves) {
    std::string out = "# msclim curves v1\ncurve_id,kind,association,p,r\n";
    for (std::size_t id = 0; id < curves.size(); ++id) {
        const auto& c = curves[id];
        for (const auto& pt : c.points) {
            out += std::to_string(id);
            out += ',';
            out += to_string(c.kind);
            out += ',';
            out += to_string(c.association);
            out += ',';
            out += format_double(pt[0]);
            out += ',';
            out += format_double(pt[1]);
            out += '\n';
        }
    }
    return out;
}

inline std::string rcurve_csv(std::span<const MelnikovSample> samples) {
    std::string out = "# msclim rcurve v1\nx,I0,I2,R\n";
    for (const auto& s : samples) {
        out += format_double(s.x);
        out += ',';
        out += format_double(s.I0);
        out += ',';
        out += format_double(s.I2);
        out += ',';
        out += format_double(s.R);
        out += '\n';
    }
    return out;
}

/// Long-format sweep table; status 0 marks a clean cell.
inline std::string sweep_csv(const SweepGrid& g) {
    std::string out = "# msclim sweep v1\np,r,xbar,status\n";
    for (std::size_t ip = 0; ip < g.p_axis.size(); ++ip)
        for (std::size_t ir = 0; ir < g.r_axis.size(); ++ir) {
            out += format_double(g.p_axis[ip]);
            out += ',';
            out += format_double(g.r_axis[ir]);
            out += ',';
            const double v = g.value(ip, ir);
            out += std::isnan(v) ? "nan" : format_double(v);
            out += ',';
            out += std::to_string(static_cast<int>(g.cell_status(ip, ir)));
            out += '\n';
        }
    return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline json to_json(const IntegratorConfig& c) {
    return json{{"method", c.method == StepMethod::rk4 ? "rk4" : "rk45"},
                {"step", c.step},
                {"abs_tol", c.abs_tol},
                {"rel_tol", c.rel_tol},
                {"t_end", c.t_end},
                {"max_steps", c.max_steps}};
}

template <std::size_t N>
json orbit_json(const OrbitRecord<N>& rec, const json& params, const IntegratorConfig& cfg) {
    json j;
    j["schema"] = "msclim-orbit-v1";
    j["params"] = params;
    j["config"] = to_json(cfg);
    j["status"] = to_string(rec.status);
    j["last_good_time"] = rec.last_good_time;
    if (rec.has_seed) j["seed"] = rec.seed;
    j["times"] = rec.times;
    auto& states = j["states"] = json::array();
    for (const auto& y : rec.states) states.push_back(std::vector<double>(y.begin(), y.end()));
    return j;
}

template <std::size_t N>
json to_json(const EquilibriumReport<N>& e) {
    json j;
    j["label"] = to_string(e.label);
    j["location"] = std::vector<double>(e.location.begin(), e.location.end());
    auto& jac = j["jacobian"] = json::array();
    for (const auto& row : e.jacobian) jac.push_back(std::vector<double>(row.begin(), row.end()));
    auto& ev = j["eigenvalues"] = json::array();
    for (const auto& z : e.eigenvalues) ev.push_back(json{{"re", z.real()}, {"im", z.imag()}});
    j["kind"] = to_string(e.kind);
    j["stable"] = is_stable(e.kind);
    j["degenerate"] = e.degenerate;
    return j;
}

inline json to_json(const BifurcationCurve& c) {
    json j;
    j["kind"] = to_string(c.kind);
    j["association"] = to_string(c.association);
    j["provenance"] = c.traced ? "traced" : "closed-form";
    if (c.traced) j["bisect_tol"] = c.bisect_tol;
    if (!c.note.empty()) j["note"] = c.note;
    auto& pts = j["points"] = json::array();
    for (const auto& pt : c.points) pts.push_back(std::vector<double>{pt[0], pt[1]});
    return j;
}

/// Self-describing header for a sweep; the matrix itself goes to a raw
/// little-endian float64 sidecar in row-major order.
inline json sweep_json_header(const SweepGrid& g, const std::string& data_file) {
    json j;
    j["schema"] = "msclim-sweep-v1";
    switch (g.model) {
        case ModelKind::ms3: j["model"] = "ms"; break;
        case ModelKind::asym2: j["model"] = "asym"; break;
        default: j["model"] = "sym"; break;
    }
    j["q"] = g.q;
    j["s"] = g.s;
    j["seed"] = g.seed;
    j["transient_fraction"] = g.transient_fraction;
    j["p_axis"] = g.p_axis;
    j["r_axis"] = g.r_axis;
    j["dtype"] = "float64";
    j["order"] = "row-major";
    j["shape"] = std::vector<std::size_t>{g.p_axis.size(), g.r_axis.size()};
    j["data_file"] = data_file;
    j["status"] = g.status;
    return j;
}

inline std::string sweep_matrix_bytes(const SweepGrid& g) {
    return std::string(reinterpret_cast<const char*>(g.values.data()),
                       g.values.size() * sizeof(double));
}

}  // namespace msclim::io
