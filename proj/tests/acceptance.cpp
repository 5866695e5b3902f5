// Acceptance suite: every criterion below runs at its stated tolerance and
// prints one [PASS]/[FAIL] line. The binary exits with the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "msclim/bifurcation.hpp"
#include "msclim/equilibria.hpp"
#include "msclim/integrate.hpp"
#include "msclim/melnikov.hpp"
#include "msclim/models.hpp"
#include "msclim/rng.hpp"
#include "msclim/version.hpp"
#include "oracle.hpp"

using namespace msclim;

namespace {

int failures = 0;

class Criterion {
  public:
    Criterion(int id, std::string name) : id_(id), name_(std::move(name)) {
        t0_ = std::chrono::steady_clock::now();
    }

    void require(bool ok, const std::string& detail) {
        if (!ok && why_.empty()) why_ = detail;
        ok_ = ok_ && ok;
    }

    template <class T>
    void require_close(T value, T target, T tol, const std::string& what) {
        std::ostringstream ss;
        ss << what << " = " << value << " (want " << target << " +- " << tol << ")";
        require(std::abs(value - target) <= tol, ss.str());
    }

    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

    ~Criterion() {
        const double secs = seconds();
        if (ok_) {
            std::printf("[PASS] %2d. %s (%.1fs)\n", id_, name_.c_str(), secs);
        } else {
            std::printf("[FAIL] %2d. %s (%.1fs): %s\n", id_, name_.c_str(), secs, why_.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }

  private:
    int id_;
    std::string name_;
    bool ok_ = true;
    std::string why_;
    std::chrono::steady_clock::time_point t0_;
};

std::vector<State2> lattice_grid(double half, int n) {
    std::vector<State2> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.push_back({-half + 2 * half * (i + 0.5) / n, -half + 2 * half * (j + 0.5) / n});
    return g;
}

void criterion_1_ms_cycle() {
    Criterion c(1, "three-variable limit cycle: period 10 +- 1.5 units, < 5 s");
    try {
        IntegratorConfig cfg;
        cfg.t_end = 300.0;
        auto est = estimate_cycle(MsParams{1.0, 1.2, 0.8, 0.8}, {0.5, 0.3, -0.2},
                                  TimeDirection::forward, cfg);
        c.require(est.stable, "cycle not flagged stable");
        c.require_close(est.period, 10.0, 1.5, "period");
        c.require(c.seconds() < 5.0, "runtime exceeded 5 s");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_2_homoclinic_constants() {
    Criterion c(2, "saddle-loop moments 4/3 and 16/15 to 1e-8; zero at 4/5");
    try {
        const double root2 = std::sqrt(2.0);
        const auto orbit = HamiltonianOrbit::from_turning_point(root2, 1);
        const double i0 = orbit_quadrature(orbit, 0);
        const double i2 = orbit_quadrature(orbit, 2);
        c.require_close(i0, 4.0 / 3.0, 1e-8, "I0");
        c.require_close(i2, 16.0 / 15.0, 1e-8, "I2");
        c.require_close(i2 / i0, 0.8, 1e-8, "zero of the splitting function");
        c.require(std::abs(melnikov(0.8, root2)) <= 1e-8, "M(4/5, sqrt 2) not ~ 0");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_3_fold_constants() {
    Criterion c(3, "fold at x* ~ 1.471, lambda* ~ 0.752; tangent slopes -4 and -3.03");
    try {
        const auto fold = cached_fold();
        c.require(fold.x_star >= 1.466 && fold.x_star <= 1.476,
                  "x* = " + std::to_string(fold.x_star));
        c.require(fold.lambda_star >= 0.750 && fold.lambda_star <= 0.754,
                  "lambda* = " + std::to_string(fold.lambda_star));
        c.require(std::abs(pencil_slope(0.8, 1.0) - (-4.0)) <= 1e-12,
                  "homoclinic tangent slope not -4");
        c.require_close(pencil_slope(fold.lambda_star, 1.0), -3.03, 0.03, "fold tangent slope");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_4_r_curve_shape() {
    Criterion c(4, "ratio curve: R(1+)=1, decreasing to 0.8 at sqrt 2, then quadratic");
    try {
        c.require_close(melnikov_ratio(1.0 + 1e-3), 1.0, 5e-3, "R(1+1e-3)");
        c.require_close(melnikov_ratio(std::sqrt(2.0)), 0.8, 1e-6, "R(sqrt 2)");

        const std::vector<double> inner{1.01, 1.08, 1.16, 1.24, 1.32, 1.38, 1.41};
        for (std::size_t i = 0; i + 1 < inner.size(); ++i)
            c.require(melnikov_ratio(inner[i]) > melnikov_ratio(inner[i + 1]),
                      "R not decreasing between " + std::to_string(inner[i]) + " and " +
                          std::to_string(inner[i + 1]));

        const double xs = cached_fold().x_star;
        const std::vector<double> outer{xs + 0.01, 1.55, 1.8, 2.2, 3.0};
        for (std::size_t i = 0; i + 1 < outer.size(); ++i)
            c.require(melnikov_ratio(outer[i]) < melnikov_ratio(outer[i + 1]),
                      "R not increasing past the fold");

        double lo = 1e300, hi = -1e300;
        for (double x : {10.0, 15.0, 20.0, 25.0, 30.0}) {
            const double v = melnikov_ratio(x) / (x * x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        c.require(hi / lo < 1.05, "R(x)/x^2 varies by more than 5% on [10,30]");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_5_bt_points() {
    Criterion c(5, "double-zero points: rotated trace and det vanish to 1e-12");
    try {
        const auto pts = bt_points(Variant::asym, 0.8);
        c.require(pts.size() == 2, "expected two organizing centers");
        c.require_close(pts[0].p, 1.0, 1e-12, "Q1 p");
        c.require_close(pts[0].r, 1.0, 1e-12, "Q1 r");
        c.require_close(pts[1].p, 1.32, 1e-9, "Q2 p");
        c.require_close(pts[1].r, 1.16, 1e-9, "Q2 r");
        for (const auto& pt : pts) {
            c.require(pt.trace_abs <= 1e-12, "trace residual " + std::to_string(pt.trace_abs));
            c.require(pt.det_abs <= 1e-12, "det residual " + std::to_string(pt.det_abs));
        }
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

bool stable2(const EquilibriumReport<2>& e) {
    return e.eigenvalues[0].real() < 0 && e.eigenvalues[1].real() < 0;
}

void criterion_6_region_atlas() {
    Criterion c(6, "region atlas vs eigenvalues at 10^4 points per variant");
    try {
        const double tube = 1e-6;
        std::mt19937_64 eng(616);
        int sym_checked = 0, asym_checked = 0, mismatches = 0;
        while (sym_checked < 10000 || asym_checked < 10000) {
            const double p = uniform_in(eng, 0.02, 3.0);
            const double r = uniform_in(eng, 0.02, 3.0);

            if (sym_checked < 10000) {
                const bool near_boundary = std::abs(r - p) < tube ||
                                           (std::abs(r - 1) < tube && p > 1 - tube) ||
                                           (std::abs(p - 1) < tube && r > 1 - tube);
                if (!near_boundary) {
                    ++sym_checked;
                    const SymParams k{p, r};
                    const auto lab = region_classify(k).region;
                    const auto eqs = find_equilibria(k);
                    const bool p0 = stable2(eqs[0]);
                    const bool pair_stable =
                        eqs.size() == 3 && stable2(eqs[1]) && stable2(eqs[2]);
                    bool ok = false;
                    switch (lab) {
                        case SymRegion::O: ok = p0 && eqs.size() == 1; break;
                        case SymRegion::I: ok = !p0 && eqs.size() == 1; break;
                        case SymRegion::II:
                            ok = !p0 && eqs.size() == 3 && !stable2(eqs[1]) && !stable2(eqs[2]);
                            break;
                        case SymRegion::III:
                            ok = !p0 && (eqs.size() == 1 || pair_stable);
                            break;
                    }
                    if (!ok) ++mismatches;
                }
            }
            if (asym_checked < 10000) {
                const double s = 0.8;
                const double sd = r - (p - 0.25 * s * s);
                bool near_boundary = std::abs(sd) < tube || std::abs(r - p) < tube ||
                                     (std::abs(r - 1) < tube && p > 1 - tube);
                if (sd > 0) {
                    const auto roots = detail::branch_roots(p, r, s);
                    near_boundary = near_boundary ||
                                    std::abs(r - 1 - roots[0] * roots[0]) < tube ||
                                    std::abs(r - 1 - roots[1] * roots[1]) < tube;
                }
                if (!near_boundary) {
                    ++asym_checked;
                    const AsymParams k{p, r, s};
                    const auto lab = region_classify(k).region;
                    const auto eqs = find_equilibria(k);
                    const bool p0 = stable2(eqs[0]);
                    const bool pair = eqs.size() == 3;
                    const bool p1 = pair && stable2(eqs[1]);
                    const bool p2 = pair && stable2(eqs[2]);
                    bool ok = false;
                    switch (lab) {
                        case AsymRegion::Ob: ok = p0 && !pair; break;
                        case AsymRegion::I: ok = !p0 && !pair; break;
                        case AsymRegion::Oa: ok = p0 && pair && !p1 && p2; break;
                        case AsymRegion::III: ok = !p0 && p1 && p2; break;
                        case AsymRegion::IIIo: ok = !p0 && pair && !p1 && p2; break;
                        case AsymRegion::IIa: ok = !p0 && pair && !p1 && !p2; break;
                    }
                    if (!ok) ++mismatches;
                }
            }
        }
        c.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_7_census_equivalence() {
    Criterion c(7, "rescaled-system cycle census equals the splitting prediction, < 60 s");
    try {
        CensusOptions copt;
        copt.cfg.t_end = 30000.0;
        copt.cfg.abs_tol = copt.cfg.rel_tol = 1e-9;
        copt.cycle.return_rel_tol = 1e-3;
        copt.eq_seed_offset = 0.1;
        const auto grid = lattice_grid(2.0, 2);

        for (double lambda : {1.2, 0.9, 0.78, 0.7}) {
            const auto predicted = cycle_census_unfolded(lambda, 1);
            const auto census = census_attractors(UnfoldParams{lambda, 1.0, 0.01}, grid, copt);
            std::ostringstream tag;
            tag << "lambda = " << lambda << ": simulated " << census.stable_cycle_count() << "+"
                << census.unstable_cycle_count() << " vs predicted " << predicted.stable_count()
                << "+" << predicted.unstable_count();
            c.require(census.stable_cycle_count() == predicted.stable_count() &&
                          census.unstable_cycle_count() == predicted.unstable_count(),
                      tag.str());
        }
        c.require(c.seconds() < 60.0, "runtime exceeded 60 s");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_8_phase_portraits() {
    Criterion c(8, "asymmetric phase-portrait census across six frames");
    try {
        const auto grid = lattice_grid(2.5, 4);
        CensusOptions copt;
        copt.cfg.t_end = 3000.0;

        struct Frame {
            double r;
            int stable, unstable;
            bool unstable_small;  // repelling loop encircles only the lower branch
        };
        const std::vector<Frame> frames = {{1.2, 1, 0, false}, {1.45, 1, 0, false},
                                           {1.6, 1, 1, true},  {2.0, 1, 0, false},
                                           {2.5, 1, 1, false}, {3.0, 0, 0, false}};
        for (const auto& f : frames) {
            const AsymParams k{1.55, f.r, 0.8};
            const auto census = census_attractors(k, grid, copt);
            std::ostringstream tag;
            tag << "r = " << f.r << ": got " << census.stable_cycle_count() << " stable, "
                << census.unstable_cycle_count() << " unstable (want " << f.stable << ", "
                << f.unstable << ")";
            c.require(census.stable_cycle_count() == f.stable &&
                          census.unstable_cycle_count() == f.unstable,
                      tag.str());
            for (const auto& cyc : census.cycles) {
                if (cyc.stable) continue;
                // nesting: small repelling loop encircles P2 only; the large
                // one encircles all three equilibria
                bool winds_all = true, winds_p2_only = true;
                for (std::size_t i = 0; i < census.equilibria.size(); ++i) {
                    const bool winds = cyc.winding[i] != 0;
                    winds_all = winds_all && winds;
                    const bool is_p2 = census.equilibria[i].label == EqLabel::P2;
                    winds_p2_only = winds_p2_only && (winds == is_p2);
                }
                c.require(f.unstable_small ? winds_p2_only : winds_all,
                          "repelling loop nesting wrong at r = " + std::to_string(f.r));
            }
            if (f.r == 3.0) {
                c.require(census.forward_cycle_hits == 0, "cycles still attract at r = 3");
                int p2_hits = 0, total_eq_hits = 0;
                for (std::size_t i = 0; i < census.forward_equilibrium_hits.size(); ++i)
                    total_eq_hits += census.forward_equilibrium_hits[i];
                // the capture list at r = 3 holds only the stable P2
                if (!census.forward_equilibrium_hits.empty())
                    p2_hits = census.forward_equilibrium_hits[0];
                c.require(total_eq_hits == p2_hits && p2_hits > 0,
                          "P2 is not the sole attractor at r = 3");
            }
        }
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_9_sweep_partition() {
    Criterion c(9, "60x60 sweep reproduces the three-way partition, < 5 min");
    try {
        TraceOptions topt;
        topt.r_tol = 1e-4;
        const auto part = region3_subpartition(0.60, 0.98, 0.02, topt);

        SweepOptions sopt;
        sopt.cfg.t_end = 500.0;
        const auto g = sweep_xbar(ModelKind::sym2, 0, 0, 0.0, 3.0, 60, 0.0, 3.0, 60, 7, sopt);

        const double margin = 0.06;
        int tested = 0, exceptions = 0;
        for (std::size_t ip = 0; ip < g.p_axis.size(); ++ip) {
            for (std::size_t ir = 0; ir < g.r_axis.size(); ++ir) {
                const double p = g.p_axis[ip], r = g.r_axis[ir];
                if (std::abs(r - p) < margin) continue;
                if (std::abs(r - 1.0) < margin && p > 1.0 - margin) continue;
                if (std::abs(p - 1.0) < margin && r > 1.0 - margin) continue;
                const auto lab = region_classify(SymParams{p, r}, &part);
                bool in_O = lab.region == SymRegion::O;
                bool in_I_II = lab.region == SymRegion::I || lab.region == SymRegion::II;
                bool in_IIIc = false;
                if (lab.region == SymRegion::III) {
                    const auto rh = detail::interp_r_at_p(part.homoclinic, p);
                    const auto rf = detail::interp_r_at_p(part.fold, p);
                    if (rh && std::abs(r - *rh) < margin) continue;
                    if (rf && std::abs(r - *rf) < margin) continue;
                    in_IIIc = lab.sub == Region3Sub::IIIc;
                }
                if (!in_O && !in_I_II && !in_IIIc) continue;
                ++tested;
                if (g.cell_status(ip, ir) != CellStatus::ok) {
                    ++exceptions;
                    continue;
                }
                const double v = g.value(ip, ir);
                bool ok = true;
                if (in_O) ok = std::abs(v) <= 1e-4;
                else if (in_I_II) ok = v > 1e-4;
                else {
                    const double eq = std::sqrt(r - p);
                    ok = std::min(std::abs(v - eq), std::abs(v + eq)) <= 2e-2;
                }
                if (!ok) ++exceptions;
            }
        }
        std::ostringstream tag;
        tag << exceptions << " exceptions over " << tested << " tested cells";
        c.require(tested > 2000, "too few testable cells: " + std::to_string(tested));
        c.require(exceptions <= tested / 100, tag.str());
        c.require(c.seconds() < 300.0, "runtime exceeded 5 min");
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

void criterion_10_numerical_hygiene() {
    Criterion c(10, "fixed-step order 4, conservative drift, quadrature cross-check");
    try {
        // (a) order-4 convergence on a closed conservative orbit
        const HamiltonianField f{1.0};
        const State2 y0{1.2, 0.0};
        IntegratorConfig ref_cfg;
        ref_cfg.abs_tol = ref_cfg.rel_tol = 1e-13;
        ref_cfg.t_end = 10.0;
        const auto ref = integrate<2>(f, y0, ref_cfg);
        const State2 target = ref.states.back();
        std::vector<double> errors;
        for (double h : {0.08, 0.04, 0.02, 0.01}) {
            IntegratorConfig cfg;
            cfg.method = StepMethod::rk4;
            cfg.step = h;
            cfg.t_end = 10.0;
            const auto rec = integrate<2>(f, y0, cfg);
            errors.push_back(std::hypot(rec.states.back()[0] - target[0],
                                        rec.states.back()[1] - target[1]));
        }
        for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
            const double ratio = errors[i] / errors[i + 1];
            c.require(ratio >= 13.0 && ratio <= 19.0,
                      "error ratio per halving = " + std::to_string(ratio));
        }

        // (b) energy drift at eta = 0
        IntegratorConfig cfg;
        cfg.abs_tol = 1e-10;
        cfg.rel_tol = 0.0;
        cfg.t_end = 50.0;
        const State2 start{std::sqrt(2.0) - 1e-4, 0.0};
        const double h0 = hamiltonian_value(start, 1.0);
        double drift = 0.0;
        auto obs = [&](double, const State2&, const State2&, double, const State2& y1,
                       const State2&) {
            drift = std::max(drift, std::abs(hamiltonian_value(y1, 1.0) - h0));
            return true;
        };
        integrate_steps<2>(f, start, cfg, obs);
        c.require(drift <= 1e-8, "energy drift = " + std::to_string(drift));

        // (c) u-domain vs time-domain quadrature on twenty orbits
        const std::vector<std::pair<double, int>> cases = {
            {1.02, 1}, {1.05, 1}, {1.1, 1}, {1.2, 1},  {1.3, 1},  {1.38, 1}, {1.405, 1},
            {1.43, 1}, {1.45, 1}, {1.5, 1}, {1.6, 1},  {1.8, 1},  {2.0, 1},  {2.5, 1},
            {0.3, -1}, {0.6, -1}, {1.0, -1}, {1.5, -1}, {2.0, -1}, {3.0, -1}};
        for (const auto& [x, mu] : cases) {
            const auto td = oracle::time_domain_moments(x, mu);
            const auto s = melnikov_sample(x, mu);
            c.require(std::abs(s.I0 - td.I0) <= 1e-6 * std::abs(td.I0),
                      "I0 mismatch at x = " + std::to_string(x));
            c.require(std::abs(s.I2 - td.I2) <= 1e-6 * std::abs(td.I2),
                      "I2 mismatch at x = " + std::to_string(x));
        }
    } catch (const std::exception& e) {
        c.require(false, e.what());
    }
}

}  // namespace

int main() {
    std::printf("acceptance suite, library version %s\n", version_string);
    criterion_1_ms_cycle();
    criterion_2_homoclinic_constants();
    criterion_3_fold_constants();
    criterion_4_r_curve_shape();
    criterion_5_bt_points();
    criterion_6_region_atlas();
    criterion_7_census_equivalence();
    criterion_8_phase_portraits();
    criterion_9_sweep_partition();
    criterion_10_numerical_hygiene();
    if (failures == 0) std::printf("all criteria passed\n");
    else std::printf("%d criteria failed\n", failures);
    return failures;
}
