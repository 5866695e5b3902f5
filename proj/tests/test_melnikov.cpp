#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "msclim/melnikov.hpp"
#include "msclim/models.hpp"
#include "oracle.hpp"

using namespace msclim;
using Catch::Approx;

TEST_CASE("saddle-loop moments", "[melnikov][acceptance]") {
    const double root2 = std::sqrt(2.0);
    const auto hc = HamiltonianOrbit::from_turning_point(root2, 1);
    CHECK(hc.kind == OrbitKind::homoclinic);
    CHECK(hc.level == Approx(0.0).margin(1e-14));

    const double i0 = orbit_quadrature(hc, 0);
    const double i2 = orbit_quadrature(hc, 2);
    CHECK(std::abs(i0 - 4.0 / 3.0) <= 1e-8);
    CHECK(std::abs(i2 - 16.0 / 15.0) <= 1e-8);

    // zero of lambda -> lambda*I0 - I2 sits at 4/5
    CHECK(std::abs(i2 / i0 - 0.8) <= 1e-8);
    CHECK(std::abs(melnikov(0.8, root2)) <= 1e-8);

    // independent route: Simpson on the sech parametrization
    CHECK(std::abs(oracle::homoclinic_moment_simpson(0) - 4.0 / 3.0) <= 1e-8);
    CHECK(std::abs(oracle::homoclinic_moment_simpson(2) - 16.0 / 15.0) <= 1e-8);
}

TEST_CASE("u-domain and time-domain quadratures agree", "[melnikov][acceptance]") {
    struct Case {
        double x;
        int mu;
    };
    // twenty orbits spanning all families
    const std::vector<Case> cases = {
        {1.02, 1}, {1.05, 1}, {1.1, 1}, {1.2, 1},  {1.3, 1},  {1.38, 1}, {1.405, 1},
        {1.43, 1}, {1.45, 1}, {1.5, 1}, {1.6, 1},  {1.8, 1},  {2.0, 1},  {2.5, 1},
        {0.3, -1}, {0.6, -1}, {1.0, -1}, {1.5, -1}, {2.0, -1}, {3.0, -1}};
    REQUIRE(cases.size() == 20);
    for (const auto& c : cases) {
        const auto td = oracle::time_domain_moments(c.x, c.mu);
        const auto s = melnikov_sample(c.x, c.mu);
        CHECK(std::abs(s.I0 - td.I0) <= 1e-6 * std::abs(td.I0));
        CHECK(std::abs(s.I2 - td.I2) <= 1e-6 * std::abs(td.I2));
    }
}

TEST_CASE("area identity for the zeroth moment", "[melnikov]") {
    for (double x : {1.3, 2.0}) {
        const auto td = oracle::time_domain_moments(x, 1, 20000);
        const double area = oracle::polygon_area(td.path);
        const double i0 = orbit_quadrature(HamiltonianOrbit::from_turning_point(x, 1), 0);
        CHECK(std::abs(i0 - area) <= 1e-6 * area);
        CHECK(i0 > 0.0);
    }
}

TEST_CASE("shape of the ratio curve", "[melnikov][acceptance]") {
    CHECK(melnikov_ratio(std::sqrt(2.0)) == Approx(0.8).margin(1e-6));
    CHECK(melnikov_ratio(1.0 + 1e-3) == Approx(1.0).margin(5e-3));

    // decreasing toward the saddle loop
    std::vector<double> left{1.01, 1.1, 1.2, 1.3, 1.38, 1.41};
    auto samples = R_curve(1, left);
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
        CHECK(samples[i].R > samples[i + 1].R);
    for (const auto& s : samples) CHECK(s.I0 > 0.0);

    // increasing past the minimum
    const double xs = cached_fold().x_star;
    CHECK(melnikov_ratio(3.0) > melnikov_ratio(2.0));
    CHECK(melnikov_ratio(2.0) > melnikov_ratio(xs));

    // quadratic growth: R(x)/x^2 settles to a constant
    double lo = 1e300, hi = -1e300;
    for (double x : {10.0, 15.0, 20.0, 25.0, 30.0}) {
        const double v = melnikov_ratio(x) / (x * x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo < 1.05);

    // zeros sit where they were built to sit
    for (double x : {1.25, 1.9}) {
        const double lam = melnikov_ratio(x);
        CHECK(std::abs(melnikov(lam, x)) <= 1e-9);
    }

    // monotonicity metadata tags each sample with its branch
    CHECK(melnikov_sample(1.2, 1).branch == RBranch::inner_falling);
    CHECK(melnikov_sample(1.45, 1).branch == RBranch::outer_falling);
    CHECK(melnikov_sample(2.0, 1).branch == RBranch::outer_rising);
    CHECK(melnikov_sample(1.0, -1).branch == RBranch::simple_rising);

    // mu = -1 branch: both R and R' increase
    std::vector<double> xs_simple{0.3, 0.8, 1.5, 2.5};
    auto simple = R_curve(-1, xs_simple);
    double prev_r = -1e300, prev_slope = -1e300;
    for (std::size_t i = 0; i + 1 < simple.size(); ++i) {
        const double slope =
            (simple[i + 1].R - simple[i].R) / (simple[i + 1].x - simple[i].x);
        CHECK(simple[i].R > prev_r);
        CHECK(slope > prev_slope);
        prev_r = simple[i].R;
        prev_slope = slope;
    }
}

TEST_CASE("fold of the ratio curve", "[melnikov][acceptance]") {
    const auto fold = cached_fold();
    CHECK(fold.x_star >= 1.466);
    CHECK(fold.x_star <= 1.476);
    CHECK(fold.lambda_star >= 0.750);
    CHECK(fold.lambda_star <= 0.754);

    // derivative changes sign across the minimum
    const double d = 2e-3;
    const double left = melnikov_ratio(fold.x_star) - melnikov_ratio(fold.x_star - d);
    const double right = melnikov_ratio(fold.x_star + d) - melnikov_ratio(fold.x_star);
    CHECK(left < 0.0);
    CHECK(right > 0.0);

    // mapped tangent slopes at the organizing center (exact up to the
    // binary rounding of 4/5)
    CHECK(pencil_slope(0.8, 1.0) == Approx(-4.0).margin(1e-12));
    CHECK(pencil_slope(fold.lambda_star, 1.0) == Approx(-3.03).margin(0.03));
}

TEST_CASE("predicted cycle census by parameter range", "[melnikov][acceptance]") {
    auto ii = cycle_census_unfolded(1.2, 1);
    CHECK(ii.stable_count() == 1);
    CHECK(ii.unstable_count() == 0);
    REQUIRE(ii.cycles.size() == 1);
    CHECK(ii.cycles[0].kind == OrbitKind::outer);
    CHECK(melnikov_ratio(ii.cycles[0].x) == Approx(1.2).margin(1e-6));

    auto iiia = cycle_census_unfolded(0.9, 1);
    CHECK(iiia.stable_count() == 1);
    CHECK(iiia.unstable_count() == 2);
    int inner = 0;
    for (const auto& c : iiia.cycles)
        if (c.kind == OrbitKind::inner) {
            ++inner;
            CHECK(!c.stable);
            CHECK(c.x > 1.0);
            CHECK(c.x < std::sqrt(2.0));
        }
    CHECK(inner == 2);

    auto iiib = cycle_census_unfolded(0.78, 1);
    CHECK(iiib.stable_count() == 1);
    CHECK(iiib.unstable_count() == 1);
    for (const auto& c : iiib.cycles) CHECK(c.kind == OrbitKind::outer);

    auto iiic = cycle_census_unfolded(0.7, 1);
    CHECK(iiic.cycles.empty());

    CHECK_THROWS_AS(cycle_census_unfolded(0.8, 1), AtThreshold);
    CHECK_THROWS_AS(cycle_census_unfolded(cached_fold().lambda_star + 1e-8, 1), AtThreshold);

    auto region1 = cycle_census_unfolded(0.5, -1);
    CHECK(region1.stable_count() == 1);
    CHECK(region1.unstable_count() == 0);
    CHECK(region1.cycles[0].kind == OrbitKind::simple);
    CHECK(cycle_census_unfolded(-0.1, -1).cycles.empty());
}

TEST_CASE("quadrature failure is reported as such", "[melnikov]") {
    // oscillation far beyond what the panel budget can resolve
    auto hostile = [](double t) { return std::sin(1e9 * t); };
    CHECK_THROWS_AS(detail::adaptive_quadrature(hostile, 0.0, 1.0, 1e-12),
                    QuadratureNotConverged);

    const auto orbit = HamiltonianOrbit::from_turning_point(1.2, 1);
    CHECK_THROWS_AS(orbit_quadrature(orbit, 1), std::invalid_argument);
    CHECK_THROWS_AS(HamiltonianOrbit::from_turning_point(0.9, 1), std::invalid_argument);
    CHECK_THROWS_AS(HamiltonianOrbit::from_turning_point(-0.5, -1), std::invalid_argument);
}
