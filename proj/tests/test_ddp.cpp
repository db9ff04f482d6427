#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "lzsm/closed_form.hpp"
#include "lzsm/ddp.hpp"
#include "lzsm/quadrature.hpp"
#include "lzsm/schrodinger.hpp"

using namespace lzsm;

// the exponential law; named to avoid shadowing the namespace
inline double exp_law(double delta) { return lzsm::lzsm(delta); }

TEST_CASE("linear sweep: single zero, exact action, unit Gamma")
{
    for (double v : {0.2, 0.7, 1.0, 2.5, 8.0}) {
        CAPTURE(v);
        SweepProfile p = SweepProfile::make(Family::Linear, {{"v", v}, {"delta", 1.0}});
        ZeroSearch zs = find_upper_zeros(p, default_search_box(p), 4);
        REQUIRE(zs.zeros.size() == 1);
        const DdpZero& z = zs.zeros[0];
        CHECK(std::abs(z.t_c - cplx(0.0, 1.0 / v)) < 1e-10 / v);
        // D(i delta / v) = i pi delta^2 / (4 v)
        CHECK(std::abs(z.action - cplx(0.0, M_PI / (4.0 * v))) < 1e-10);
        CHECK(std::abs(z.gamma - cplx(1.0, 0.0)) < 1e-8);
        CHECK(!z.multiplicity_flag);
    }
}

TEST_CASE("linear sweep: contour result equals the exponential law to 1e-9")
{
    for (int i = 0; i < 10; ++i) {
        double delta = 0.05 * std::pow(20.0 / 0.05, i / 9.0); // delta = 1/(4v)
        double v = 1.0 / (4.0 * delta);
        CAPTURE(delta);
        SweepProfile p = SweepProfile::make(Family::Linear, {{"v", v}, {"delta", 1.0}});
        TransitionResult r = standard_probability(p);
        CHECK(std::abs(r.probability - exp_law(delta)) < 1e-9);
        TransitionResult g = generalized_probability(p, 1);
        CHECK(std::abs(g.probability - exp_law(delta)) < 1e-9);
    }
}

TEST_CASE("sine sweep: action against an independent real quadrature")
{
    // eps = A sin(t/T): the lowest zero sits at t_c = i T asinh(delta/A), and
    // on the imaginary axis E = sqrt(delta^2 - A^2 sinh^2(u/T)) is real, so
    // Im D reduces to a real integral
    const double A = 1.3, T = 0.9, delta = 0.7;
    SweepProfile p = SweepProfile::make(Family::Sine, {{"A", A}, {"T", T}, {"delta", delta}});
    const double y = T * std::asinh(delta / A);

    // the zeros repeat at Re = k pi T on the same height; take the on-axis one
    ZeroSearch zs = find_upper_zeros(p, default_search_box(p), 8);
    REQUIRE(!zs.zeros.empty());
    const DdpZero* z0 = nullptr;
    for (const auto& z : zs.zeros)
        if (std::abs(z.t_c.real()) < 1e-8 && (!z0 || z.t_c.imag() < z0->t_c.imag())) z0 = &z;
    REQUIRE(z0 != nullptr);
    CHECK(std::abs(z0->t_c - cplx(0.0, y)) < 1e-10);

    auto integrand = [&](double u) {
        double s = A * std::sinh(u / T);
        return std::sqrt(std::max(0.0, delta * delta - s * s));
    };
    double im_d = adaptive_gk(integrand, 0.0, y, 1e-12, 0.0);
    CHECK(std::abs(z0->action.imag() - im_d) < 1e-8);
    CHECK(std::abs(z0->action.real()) < 1e-8);

    cplx d = action_integral(p, z0->t_c);
    CHECK(std::abs(d.imag() - im_d) < 1e-8);
}

TEST_CASE("sinh sweep: merged zeros at xi = 1 are flagged")
{
    SweepProfile p = SweepProfile::make(Family::Sinh, {{"A", 1.0}, {"T", 1.0}, {"delta", 1.0}});
    ZeroSearch zs = find_upper_zeros(p, default_search_box(p), 4);
    REQUIRE(!zs.zeros.empty());
    // eps^2 + delta^2 = 1 - sinh^2 has a double zero at t = i pi / 2
    bool flagged = false;
    for (const auto& z : zs.zeros)
        if (z.multiplicity_flag) flagged = true;
    CHECK(flagged);
}

TEST_CASE("sinh sweep: two-zero sum matches the interference quadratures")
{
    for (double xi : {1.5, 2.0, 3.0}) {
        CAPTURE(xi);
        const double A = 1.0, T = 1.0;
        SweepProfile p = SweepProfile::make(Family::Sinh, {{"A", A}, {"T", T}, {"delta", xi * A}});
        TransitionResult r = generalized_probability(p, 2);
        double ref = sinh_large_xi(A, T, xi * A);
        CHECK(std::abs(r.probability - ref) < 1e-8);
    }
}

TEST_CASE("pulse model: paired zeros reproduce the exact probability asymptotically")
{
    // bias 2B tanh(t/T), gap 2A sech(t/T): E^2 vanishes on the imaginary axis
    // at T asin(A/B) and T (pi - asin(A/B)), flanking the pole at pi T / 2;
    // the two-zero sum converges exponentially to the exact value as T grows
    const double A = 0.4, B = 1.0;
    double prev_rel = 1e9;
    for (double T : {0.8, 1.2, 1.6}) {
        CAPTURE(T);
        SweepProfile p = SweepProfile::make(Family::DemkovKunike, {{"A", A}, {"B", B}, {"T", T}});
        ZeroSearch zs = find_upper_zeros(p, default_search_box(p), 2);
        REQUIRE(zs.zeros.size() >= 2);
        double y1 = T * std::asin(A / B), y2 = T * (M_PI - std::asin(A / B));
        CHECK(std::abs(zs.zeros[0].t_c - cplx(0.0, y1)) < 1e-8);
        CHECK(std::abs(zs.zeros[1].t_c - cplx(0.0, y2)) < 1e-8);

        TransitionResult r = generalized_probability(p, 2);
        double rel = std::abs(r.probability / demkov_kunike(A, B, T) - 1.0);
        CHECK(rel < prev_rel);
        prev_rel = rel;
    }
    CHECK(prev_rel < 5e-3);
}

TEST_CASE("modulated-rate sweep: zero ladder structure")
{
    // eps = v0 t (1 + alpha tanh(t/T)): poles at i pi T (k + 1/2) with zero
    // pairs around them; every Gamma is a unit phase equal to +-1 and every
    // action has a positive imaginary part
    SweepProfile p = SweepProfile::make(Family::TanhModulated,
                                        {{"v0", 0.5}, {"alpha", 0.8}, {"T", 0.3}, {"delta", 1.0}});
    ZeroSearch zs = find_upper_zeros(p, default_search_box(p), 6);
    REQUIRE(zs.zeros.size() >= 5);
    for (std::size_t k = 0; k < zs.zeros.size(); ++k) {
        CAPTURE(k);
        const DdpZero& z = zs.zeros[k];
        CHECK(std::abs(std::abs(z.gamma) - 1.0) < 1e-6);
        CHECK(std::min(std::abs(z.gamma - 1.0), std::abs(z.gamma + 1.0)) < 1e-6);
        CHECK(z.action.imag() > 0.0);
        // the bias reaches +-i gap exactly at a zero of E^2
        CHECK(std::abs(p.quasi_energy_sq(z.t_c)) < 1e-8);
        if (k > 0) CHECK(z.t_c.imag() >= zs.zeros[k - 1].t_c.imag());
    }
    // ordering: actions grow (weakly) with the zero height on this profile
    CHECK(zs.zeros.back().action.imag() > zs.zeros.front().action.imag());
}

TEST_CASE("modulated-rate sweep: pair cancellation in the adiabatic regime")
{
    SweepProfile p = SweepProfile::make(Family::TanhModulated,
                                        {{"v0", 0.05}, {"alpha", 0.8}, {"T", 0.3}, {"delta", 1.0}});
    TransitionResult r2 = generalized_probability(p, 2);
    double integ = diabatic_persistence_probability(p, 1e-11, 1e-8).probability;
    // both are tiny; the paired zeros nearly cancel instead of adding
    CHECK(r2.probability < 10.0 * std::max(integ, 1e-4));
    CHECK(r2.probability >= 0.0);
}

TEST_CASE("search diagnostics")
{
    SweepProfile p = SweepProfile::make(Family::Linear, {{"v", 1.0}, {"delta", 1.0}});
    SearchBox empty{5.0, 6.0, 5.0, 6.0}; // nowhere near i
    ZeroSearch zs = find_upper_zeros(p, empty, 2);
    CHECK(zs.zeros.empty());
    CHECK(!zs.diagnostic.empty());

    SearchBox box = default_search_box(p);
    CHECK(box.im_max > 1.0);
    CHECK(box.im_min >= 0.0);
    CHECK(box.width() > 0.0);
    CHECK(box.diagonal() > 0.0);
}

TEST_CASE("double passage formula")
{
    CHECK_THROWS_AS(double_passage_probability(0.0, 0.1, 1.0), ValidationError);
    CHECK_THROWS_AS(double_passage_probability(1.0, 0.0, 1.0), ValidationError);

    DoublePassageResult r = double_passage_probability(0.25, 0.015, 1.0);
    CHECK(r.reliable);
    CHECK(r.probability >= 0.0);
    // fast-passage, phase engineered near pi: the formula exceeds 1
    DoublePassageResult fast = double_passage_probability(4.0, 0.52, 1.0);
    CHECK(!fast.reliable);
    CHECK(fast.probability > 1.0);
}

TEST_CASE("probability routes agree on a nonlinear single-passage sweep")
{
    SweepProfile p = SweepProfile::make(Family::TanhModulated,
                                        {{"v0", 1.0}, {"alpha", 0.4}, {"T", 3.0}, {"delta", 1.0}});
    double integ = diabatic_persistence_probability(p, 1e-10, 1e-7).probability;
    TransitionResult ddp = standard_probability(p);
    CHECK(std::abs(ddp.probability - integ) < 0.02);
}
