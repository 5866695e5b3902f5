#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "msclim/integrate.hpp"
#include "msclim/models.hpp"
#include "msclim/rng.hpp"

using namespace msclim;
using Catch::Approx;

namespace {

std::vector<State2> lattice_grid(double half, int n) {
    std::vector<State2> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = -half + 2 * half * (i + 0.5) / n;
            const double y = -half + 2 * half * (j + 0.5) / n;
            g.push_back({x, y});
        }
    return g;
}

}  // namespace

TEST_CASE("constant orbit from an exact equilibrium", "[integrate]") {
    IntegratorConfig cfg;
    cfg.t_end = 20.0;
    auto rec = integrate<2>(SymField{SymParams{1.3, 0.7}}, {0.0, 0.0}, cfg);
    REQUIRE(rec.status == OrbitStatus::ok);
    for (const auto& y : rec.states) {
        CHECK(y[0] == 0.0);
        CHECK(y[1] == 0.0);
    }
}

TEST_CASE("failure statuses are recorded, not fatal", "[integrate]") {
    IntegratorConfig tiny;
    tiny.t_end = 100.0;
    tiny.max_steps = 10;
    auto rec = integrate<2>(SymField{SymParams{2.0, 1.5}}, {1.0, 1.0}, tiny);
    CHECK(rec.status == OrbitStatus::step_limit);
    CHECK(rec.last_good_time < 100.0);
    CHECK_THROWS_AS(require_ok(rec), StepLimitExceeded);

    // reverse flow out of the stable region blows up past the guard
    auto rev = [](const State2& y) {
        auto d = sym_vector_field(y, SymParams{2.0, 0.5});
        return State2{-d[0], -d[1]};
    };
    IntegratorConfig cfg;
    cfg.t_end = 200.0;
    auto bad = integrate<2>(rev, {1.2, 1.2}, cfg);
    CHECK(bad.status == OrbitStatus::nonfinite);
    CHECK_THROWS_AS(require_ok(bad), NonFiniteState);
}

TEST_CASE("energy drift of the conservative flow stays tiny", "[integrate][acceptance]") {
    IntegratorConfig cfg;
    cfg.abs_tol = 1e-10;
    cfg.rel_tol = 0.0;
    cfg.t_end = 50.0;
    const State2 y0{std::sqrt(2.0) - 1e-4, 0.0};
    const double h0 = hamiltonian_value(y0, 1.0);
    double worst = 0.0;
    auto obs = [&](double, const State2&, const State2&, double, const State2& y1,
                   const State2&) {
        worst = std::max(worst, std::abs(hamiltonian_value(y1, 1.0) - h0));
        return true;
    };
    auto outcome = integrate_steps<2>(HamiltonianField{1.0}, y0, cfg, obs);
    REQUIRE(outcome.status == OrbitStatus::ok);
    CHECK(worst <= 1e-8);
}

TEST_CASE("fixed-step method shows fourth-order convergence", "[integrate][acceptance]") {
    const HamiltonianField f{1.0};
    const State2 y0{1.2, 0.0};
    const double T = 10.0;

    IntegratorConfig ref_cfg;
    ref_cfg.abs_tol = 1e-13;
    ref_cfg.rel_tol = 1e-13;
    ref_cfg.t_end = T;
    auto ref = integrate<2>(f, y0, ref_cfg);
    REQUIRE(ref.status == OrbitStatus::ok);
    const State2 target = ref.states.back();

    std::vector<double> errors;
    for (double h : {0.08, 0.04, 0.02, 0.01}) {
        IntegratorConfig cfg;
        cfg.method = StepMethod::rk4;
        cfg.step = h;
        cfg.t_end = T;
        auto rec = integrate<2>(f, y0, cfg);
        REQUIRE(rec.status == OrbitStatus::ok);
        const auto& last = rec.states.back();
        errors.push_back(std::hypot(last[0] - target[0], last[1] - target[1]));
    }
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double ratio = errors[i] / errors[i + 1];
        CHECK(ratio > 12.8);
        CHECK(ratio < 19.2);
    }
}

TEST_CASE("identical inputs give bit-identical orbits", "[integrate]") {
    IntegratorConfig cfg;
    cfg.t_end = 80.0;
    auto a = integrate<3>(MsField{MsParams{1.0, 1.2, 0.8, 0.8}}, {0.5, 0.3, -0.2}, cfg);
    auto b = integrate<3>(MsField{MsParams{1.0, 1.2, 0.8, 0.8}}, {0.5, 0.3, -0.2}, cfg);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(State3)) == 0);
    CHECK(std::memcmp(a.times.data(), b.times.data(), a.times.size() * sizeof(double)) == 0);
}

TEST_CASE("long-run sup estimator across the attractor types", "[integrate][xbar]") {
    IntegratorConfig cfg;
    cfg.t_end = 500.0;

    std::mt19937_64 eng(99);
    const State2 ic = random_state<2>(eng, 2.5);

    // trivial state
    CHECK(std::abs(xbar<2>(SymField{SymParams{2.0, 0.5}}, ic, cfg)) <= 1e-4);

    // nontrivial equilibria at +-sqrt(0.3)
    const double v = xbar<2>(SymField{SymParams{0.5, 0.8}}, ic, cfg);
    CHECK(std::min(std::abs(v - std::sqrt(0.3)), std::abs(v + std::sqrt(0.3))) <= 1e-3);

    // limit cycle: strictly positive sup
    CHECK(xbar<2>(SymField{SymParams{2.0, 1.5}}, ic, cfg) > 1e-2);
}

TEST_CASE("sup estimator is reflection-consistent on a grid", "[integrate][xbar][property]") {
    IntegratorConfig cfg;
    cfg.t_end = 400.0;
    const SymField f{SymParams{0.6, 0.9}};

    auto grid = lattice_grid(2.0, 3);
    std::vector<double> direct, negated;
    for (const auto& ic : grid) {
        direct.push_back(xbar<2>(f, ic, cfg));
        negated.push_back(xbar<2>(f, State2{-ic[0], -ic[1]}, cfg));
    }
    std::sort(direct.begin(), direct.end());
    std::sort(negated.begin(), negated.end());
    for (std::size_t i = 0; i < direct.size(); ++i)
        CHECK(std::abs(direct[i] - negated[i]) <= 1e-3);
}

TEST_CASE("tightening tolerances does not move the answers", "[integrate]") {
    std::mt19937_64 eng(4);
    const State2 ic = random_state<2>(eng, 2.0);

    IntegratorConfig coarse;
    coarse.abs_tol = coarse.rel_tol = 1e-6;
    coarse.t_end = 500.0;
    IntegratorConfig fine = coarse;
    fine.abs_tol = fine.rel_tol = 1e-7;

    const SymField f{SymParams{2.0, 1.5}};
    const double xa = xbar<2>(f, ic, coarse);
    const double xb = xbar<2>(f, ic, fine);
    CHECK(std::abs(xa - xb) < 1e-6);

    coarse.t_end = fine.t_end = 300.0;
    auto ca = estimate_cycle(SymParams{2.0, 1.5}, ic, TimeDirection::forward, coarse);
    auto cb = estimate_cycle(SymParams{2.0, 1.5}, ic, TimeDirection::forward, fine);
    // the enforced per-step weight is abs_tol + rel_tol*|y|; compare against it
    const double coarse_weight = coarse.abs_tol + coarse.rel_tol * ca.amplitude_x;
    CHECK(std::abs(ca.period - cb.period) < coarse_weight);
}

TEST_CASE("limit cycle of the three-dimensional model", "[integrate][cycle][acceptance]") {
    IntegratorConfig cfg;
    cfg.t_end = 300.0;
    auto est = estimate_cycle(MsParams{1.0, 1.2, 0.8, 0.8}, {0.5, 0.3, -0.2},
                              TimeDirection::forward, cfg);
    CHECK(est.stable);
    CHECK(est.period == Approx(10.0).margin(1.5));
    CHECK(est.amplitude_x > 0.5);
    CHECK(est.return_gap < 1e-5);
}

TEST_CASE("reverse-time detection of a small repelling cycle", "[integrate][cycle]") {
    const AsymParams k{1.55, 1.6, 0.8};
    auto eqs = find_equilibria(k);
    REQUIRE(eqs.size() == 3);
    const auto p2 = eqs[2].location;

    IntegratorConfig cfg;
    cfg.t_end = 1500.0;
    CycleOptions opt;
    opt.return_rel_tol = 1e-5;
    auto est = estimate_cycle(k, {p2[0] + 0.02, p2[1] - 0.02}, TimeDirection::reverse, cfg, opt);
    CHECK(!est.stable);
    CHECK(winding_number(est.loop, p2) != 0);
    CHECK(winding_number(est.loop, eqs[0].location) == 0);  // origin excluded
    CHECK(winding_number(est.loop, eqs[1].location) == 0);
}

TEST_CASE("cycle amplitude scales like sqrt(r-1) past the soft onset", "[integrate][cycle]") {
    const double delta = 1e-3;
    const SymParams k{2.0, 1.0 + delta};
    IntegratorConfig cfg;
    cfg.t_end = 20000.0;
    cfg.abs_tol = cfg.rel_tol = 1e-9;
    CycleOptions opt;
    opt.return_rel_tol = 2e-3;
    opt.warmup_fraction = 0.5;
    auto est = estimate_cycle(k, {0.05, -0.02}, TimeDirection::forward, cfg, opt);
    CHECK(est.stable);
    const double root = std::sqrt(delta);
    CHECK(est.amplitude_x > 0.5 * root);
    CHECK(est.amplitude_x < 5.0 * root);
}

TEST_CASE("no cycle reported when the flow settles or escapes", "[integrate][cycle]") {
    IntegratorConfig cfg;
    cfg.t_end = 300.0;
    // region O: everything lands on the origin
    CHECK_THROWS_AS(
        estimate_cycle(SymParams{2.0, 0.5}, {0.4, 0.4}, TimeDirection::forward, cfg),
        NoCycleFound);
    // reverse time from the same start escapes instead
    CHECK_THROWS_AS(
        estimate_cycle(SymParams{2.0, 0.5}, {0.4, 0.4}, TimeDirection::reverse, cfg),
        NoCycleFound);
}

TEST_CASE("stable-from-outside cycle is unstable for the reverse detector",
          "[integrate][cycle]") {
    // between the saddle-loop and cycle-fold boundaries of the symmetric model
    const SymParams k{0.9, 1.36};
    IntegratorConfig cfg;
    cfg.t_end = 2500.0;
    CycleOptions opt;
    opt.return_rel_tol = 1e-4;

    auto outer = estimate_cycle(k, {3.0, -3.0}, TimeDirection::forward, cfg, opt);
    CHECK(outer.stable);

    // slide just inside the stable loop and integrate backwards
    State2 centroid{0, 0};
    for (const auto& y : outer.loop) {
        centroid[0] += y[0];
        centroid[1] += y[1];
    }
    centroid[0] /= static_cast<double>(outer.loop.size());
    centroid[1] /= static_cast<double>(outer.loop.size());
    std::size_t far = 0;
    double best = -1;
    for (std::size_t i = 0; i < outer.loop.size(); ++i) {
        const double d = std::hypot(outer.loop[i][0] - centroid[0],
                                    outer.loop[i][1] - centroid[1]);
        if (d > best) {
            best = d;
            far = i;
        }
    }
    const State2 seed{outer.loop[far][0] + 0.05 * (centroid[0] - outer.loop[far][0]),
                      outer.loop[far][1] + 0.05 * (centroid[1] - outer.loop[far][1])};
    auto inner = estimate_cycle(k, seed, TimeDirection::reverse, cfg, opt);
    CHECK(!inner.stable);
    CHECK(inner.amplitude_x < outer.amplitude_x);
    CHECK(winding_number(inner.loop, {0.0, 0.0}) != 0);  // repelling loop encloses the saddle
}

TEST_CASE("attractor census reproduces selected phase portraits", "[integrate][census]") {
    const auto grid = lattice_grid(2.5, 4);
    CensusOptions opt;
    opt.cfg.t_end = 3000.0;

    // one attracting loop around the lone unstable equilibrium
    auto a = census_attractors(AsymParams{1.55, 1.2, 0.8}, grid, opt);
    CHECK(a.equilibria.size() == 1);
    CHECK(!is_stable(a.equilibria[0].kind));
    CHECK(a.stable_cycle_count() == 1);
    CHECK(a.unstable_cycle_count() == 0);

    // repelling loop nested inside the attracting one, both large
    auto e = census_attractors(AsymParams{1.55, 2.5, 0.8}, grid, opt);
    CHECK(e.stable_cycle_count() == 1);
    CHECK(e.unstable_cycle_count() == 1);
    for (const auto& c : e.cycles)
        for (int w : c.winding) CHECK(w != 0);  // both loops enclose all three equilibria

    // all loops gone; lower equilibrium attracts everything
    auto f = census_attractors(AsymParams{1.55, 3.0, 0.8}, grid, opt);
    CHECK(f.stable_cycle_count() == 0);
    CHECK(f.unstable_cycle_count() == 0);
    REQUIRE(f.equilibria.size() == 3);
    CHECK(is_stable(f.equilibria[2].kind));
    CHECK(f.forward_cycle_hits == 0);
}
