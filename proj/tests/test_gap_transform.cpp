#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lzsm/gap_transform.hpp"
#include "lzsm/schrodinger.hpp"

using namespace lzsm;

TEST_CASE("constant gap: the time map is the identity")
{
    SweepProfile p = SweepProfile::make(Family::Linear, {{"v", 1.3}, {"delta", 0.8}});
    TimeMap m = build_time_map(p, 0.8);
    for (double t : {-5.0, -0.7, 0.0, 2.0, 9.0}) {
        CHECK(m.forward(t) == doctest::Approx(t).epsilon(1e-10));
        CHECK(m.forward_derivative(t) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SweepProfile q = equivalent_profile(p);
    CHECK(q.gap(1.7) == doctest::Approx(0.8));
    CHECK(q.bias(1.7) == doctest::Approx(p.bias(1.7)).epsilon(1e-10));
}

TEST_CASE("time map round trip and derivative")
{
    SweepProfile p = SweepProfile::make(Family::TanhGap,
                                        {{"v", 1.0}, {"Delta0", 1.0}, {"alpha", 0.5}, {"T", 10.0}});
    TimeMap m = build_time_map(p, 1.0);
    for (double tt : {-20.0, -3.0, 0.0, 1.0, 4.0, 15.0}) {
        double t = m.forward(tt);
        CHECK(m.inverse(t) == doctest::Approx(tt).epsilon(1e-9));
        // G' = target / gap(G)
        CHECK(m.forward_derivative(tt) == doctest::Approx(1.0 / p.gap(t)).epsilon(1e-8));
    }
    // the map is monotone and odd-ish around the crossing only when the gap
    // is even; for this profile it is merely monotone
    CHECK(m.forward(1.0) > m.forward(0.5));
    CHECK(m.forward(0.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("equivalent derivatives follow the chain rule")
{
    SweepProfile p = SweepProfile::make(Family::TanhGap,
                                        {{"v", 0.9}, {"Delta0", 1.1}, {"alpha", 0.3}, {"T", 5.0}});
    EquivalentDerivatives d = equivalent_derivatives(p);
    SweepProfile q = equivalent_profile(p);
    const double h = 1e-3;
    double fd1 = (-q.bias(2 * h) + 8 * q.bias(h) - 8 * q.bias(-h) + q.bias(-2 * h)) / (12 * h);
    double fd2 =
        (-q.bias(2 * h) + 16 * q.bias(h) - 30 * q.bias(0.0) + 16 * q.bias(-h) - q.bias(-2 * h)) /
        (12 * h * h);
    double fd3 = (q.bias(2 * h) - 2 * q.bias(h) + 2 * q.bias(-h) - q.bias(-2 * h)) / (2 * h * h * h);
    CHECK(d.d1 == doctest::Approx(fd1).epsilon(1e-7));
    CHECK(d.d2 == doctest::Approx(fd2).epsilon(1e-5));
    CHECK(d.d3 == doctest::Approx(fd3).epsilon(1e-3));
}

TEST_CASE("gap slope maps onto the sweep nonlinearity parameters")
{
    // bias v t with gap Delta0 (1 + alpha tanh(t/T)): slope s = Delta0^2
    // alpha / (v T) at the crossing, and the equivalent constant-gap problem
    // carries chi2 = -3 s, chi3 = 15 s^2 (the gap curvature vanishes here)
    SweepProfile p = SweepProfile::make(Family::TanhGap,
                                        {{"v", 0.8}, {"Delta0", 1.0}, {"alpha", 0.4}, {"T", 8.0}});
    CrossingData c = p.crossing_derivatives();
    double s = c.gap1 / c.v0;
    auto [c2, c3] = equivalent_nonlinearity(p);
    CHECK(c2 == doctest::Approx(-3.0 * s).epsilon(1e-8));
    CHECK(c3 == doctest::Approx(15.0 * s * s).epsilon(1e-6));
}

TEST_CASE("transition probability is invariant under the reparameterization")
{
    SweepProfile p = SweepProfile::make(Family::TanhGap,
                                        {{"v", 0.7}, {"Delta0", 1.0}, {"alpha", 0.5}, {"T", 10.0}});
    double orig = diabatic_persistence_probability(p, 1e-10, 1e-7).probability;
    SweepProfile q = equivalent_profile(p);
    double trans = diabatic_persistence_probability(q, 1e-10, 1e-7).probability;
    CHECK(std::abs(orig - trans) < 1e-5);
}

TEST_CASE("bounded gap integral raises a coverage error")
{
    // Gaussian gap: int gap dt is finite, so the map cannot reach arbitrary
    // transformed times
    SweepProfile p = SweepProfile::make(Family::GaussianGap,
                                        {{"v", 1.0}, {"Delta0", 1.0}, {"T", 1.0}});
    TimeMap m = build_time_map(p, 1.0);
    CHECK_NOTHROW(m.forward(0.5));
    CHECK_THROWS_AS(m.forward(1e3), CoverageError);
}

TEST_CASE("transformed profiles have no complex continuation")
{
    SweepProfile p = SweepProfile::make(Family::TanhGap,
                                        {{"v", 1.0}, {"Delta0", 1.0}, {"alpha", 0.3}, {"T", 5.0}});
    SweepProfile q = equivalent_profile(p);
    CHECK(!q.analytic());
    CHECK_THROWS_AS(q.bias(cplx(0.1, 0.2)), UnsupportedError);
}
