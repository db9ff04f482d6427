#include "lzsm/closed_form.hpp"

#include <cmath>

#include "lzsm/errors.hpp"
#include "lzsm/quadrature.hpp"

namespace lzsm {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_delta(double delta)
{
    if (!(delta >= 0.0)) throw ValidationError("adiabaticity delta must be >= 0");
}
} // namespace

bool PerturbativeInput::advisory() const
{
    return std::abs(chi2) >= 0.3 || std::abs(chi3) >= 0.3;
}

double lzsm(double delta)
{
    check_delta(delta);
    return std::exp(-2.0 * kPi * delta);
}

double quadratic_corrected(double delta, double chi2)
{
    check_delta(delta);
    return std::exp(-2.0 * kPi * delta * (1.0 - 3.0 * chi2 * chi2 / 8.0));
}

double quadratic_corrected_alt(double delta, double chi2)
{
    check_delta(delta);
    return lzsm(delta) * (1.0 + 0.75 * kPi * delta * chi2 * chi2);
}

double cubic_corrected(double delta, double chi3)
{
    check_delta(delta);
    return std::exp(-2.0 * kPi * delta * (1.0 + chi3 / 8.0));
}

double cubic_corrected_linearized(double delta, double chi3)
{
    check_delta(delta);
    return lzsm(delta) * (1.0 - kPi * delta * chi3 / 4.0);
}

double unified_corrected(double delta, double chi2, double chi3)
{
    check_delta(delta);
    return std::exp(-2.0 * kPi * delta *
                    (1.0 - 3.0 * chi2 * chi2 / 8.0 + chi3 / 8.0));
}

double variable_gap_corrected(double delta, double gap_slope_over_v)
{
    check_delta(delta);
    double s = gap_slope_over_v;
    return std::exp(-2.0 * kPi * delta * (1.0 - 1.5 * s * s));
}

double demkov_kunike(double A, double B, double T)
{
    if (!(A >= 0.0) || !(B >= 0.0) || !(T >= 0.0))
        throw ValidationError("demkov_kunike: A, B, T must be >= 0");
    // cosh(pi sqrt(B^2-A^2) T) with the real branch cosh(ix) = cos(x)
    double num = B >= A ? std::cosh(kPi * std::sqrt(B * B - A * A) * T)
                        : std::cos(kPi * std::sqrt(A * A - B * B) * T);
    double den = std::cosh(kPi * B * T);
    double c = num / den;
    return c * c;
}

double rosen_zener(double a, double b, double T)
{
    if (!(T >= 0.0)) throw ValidationError("rosen_zener: T must be >= 0");
    double s = std::sin(kPi * b * T) / std::cosh(kPi * a * T);
    return 1.0 - s * s;
}

double rotating_field(double x, double theta)
{
    if (!(x >= 0.0)) throw ValidationError("rotating_field: x must be >= 0");
    return 0.5 * x * x / (1.0 + x * x) * (1.0 - std::cos(theta));
}

double rotating_field_half_turn(double x)
{
    if (!(x >= 0.0)) throw ValidationError("rotating_field: x must be >= 0");
    if (x == 0.0) return 0.0;
    return rotating_field(x, std::sqrt(1.0 + 1.0 / (x * x)) * kPi);
}

double square_pulse_limit(double A, double delta)
{
    if (!(A >= 0.0) || !(delta >= 0.0))
        throw ValidationError("square_pulse_limit: A and delta must be >= 0");
    if (A == 0.0 && delta == 0.0)
        throw ValidationError("square_pulse_limit: A and delta cannot both vanish");
    return A * A / (delta * delta + A * A);
}

double sinh_large_xi(double A, double T, double delta)
{
    if (!(A > 0.0) || !(T > 0.0) || !(delta > 0.0))
        throw ValidationError("sinh_large_xi: A, T, delta must be > 0");
    const double xi = delta / A;
    if (xi < 1.0)
        throw ValidationError("sinh_large_xi: requires xi = delta/A > 1 "
                              "(single-zero regime below)");
    if (xi == 1.0)
        throw SingularityError("sinh_large_xi: xi = 1 gives a double zero; "
                               "the interference formula does not apply");

    // real part of E^2/A^2 along the vertical leg from arccosh(xi) up to the
    // zero: xi^2 + (cosh(2z) - 1)/2 with z = arccosh(xi) + i y
    auto u1 = [&](double y) {
        return xi * xi + 0.5 * ((2.0 * xi * xi - 1.0) * std::cos(2.0 * y) - 1.0);
    };
    auto u2 = [&](double y) {
        return xi * std::sqrt(xi * xi - 1.0) * std::sin(2.0 * y);
    };
    auto j = [&](double y) {
        double a = u1(y), b = u2(y);
        return std::sqrt(0.5 * (a + std::hypot(a, b)));
    };
    auto r = [&](double y) { return u2(y) / (2.0 * j(y)); };

    const double scale = A * T;
    const double rtol = 1e-10;
    double im_d = scale * adaptive_gk(j, 0.0, kPi / 2.0, rtol, 1e-12 * scale);
    auto arc = [&](double x) {
        double sh = std::sinh(x);
        return std::sqrt(xi * xi + sh * sh);
    };
    double xmax = std::log(xi + std::sqrt(xi * xi - 1.0));
    double re_d = scale * (adaptive_gk(arc, 0.0, xmax, rtol, 1e-12 * scale) -
                           adaptive_gk(r, 0.0, kPi / 2.0, rtol, 1e-12 * scale));
    return 2.0 * std::exp(-2.0 * im_d) * (1.0 + std::cos(2.0 * re_d));
}

} // namespace lzsm
