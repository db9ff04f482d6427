#include "lzsm/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <type_traits>

namespace lzsm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

struct FamilyName {
    const char* name;
    Family family;
};

constexpr std::array<FamilyName, 20> kFamilyNames{{
    {"linear", Family::Linear},
    {"quadratic", Family::Quadratic},
    {"cubic", Family::Cubic},
    {"tanh-modulated", Family::TanhModulated},
    {"superlinear", Family::Superlinear},
    {"sublinear", Family::Sublinear},
    {"sine", Family::Sine},
    {"sinh", Family::Sinh},
    {"tanh", Family::Tanh},
    {"parabolic", Family::Parabolic},
    {"power-law", Family::PowerLaw},
    {"erf", Family::Erf},
    {"tangent", Family::Tangent},
    {"demkov-kunike", Family::DemkovKunike},
    {"rosen-zener", Family::RosenZener},
    {"rotating", Family::Rotating},
    {"gaussian-gap", Family::GaussianGap},
    {"tanh-gap", Family::TanhGap},
    {"power-gap", Family::PowerGap},
    {"numeric", Family::Numeric},
}};

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

Family family_from_string(std::string_view name)
{
    for (const auto& fn : kFamilyNames)
        if (name == fn.name) return fn.family;
    throw ValidationError("unknown sweep family: " + std::string(name));
}

const char* to_string(Family f)
{
    for (const auto& fn : kFamilyNames)
        if (f == fn.family) return fn.name;
    return "?";
}

double crossing_duration(double v, double delta)
{
    if (v <= 0.0) throw SingularityError("crossing_duration: v must be positive");
    if (delta < 0.0) throw SingularityError("crossing_duration: delta must be nonnegative");
    return (1.0 / std::sqrt(v)) * std::max(1.0, delta / (2.0 * std::sqrt(v)));
}

double SweepProfile::param(const std::string& key) const
{
    auto it = params_.find(key);
    if (it == params_.end())
        throw ValidationError(std::string(to_string(family_)) + ": missing parameter '" + key + "'");
    return it->second;
}

SweepProfile SweepProfile::make(std::string_view family, const Params& params)
{
    return make(family_from_string(family), params);
}

SweepProfile SweepProfile::make(Family family, const Params& params)
{
    SweepProfile p;
    p.family_ = family;
    p.params_ = params;
    p.validate_and_finish();
    return p;
}

SweepProfile SweepProfile::from_functions(std::function<double(double)> bias,
                                          std::function<double(double)> gap,
                                          CrossingData crossing, double energy_scale,
                                          double timescale)
{
    SweepProfile p;
    p.family_ = Family::Numeric;
    p.bias_fn_ = std::move(bias);
    p.gap_fn_ = std::move(gap);
    p.numeric_crossing_ = crossing;
    p.analytic_ = false;
    p.analyticity_distance_ = 0.0;
    p.constant_gap_ = false;
    p.energy_scale_ = energy_scale;
    p.timescale_ = timescale;
    p.domain_min_ = -kInf;
    p.domain_max_ = kInf;
    return p;
}

void SweepProfile::validate_and_finish()
{
    auto require_positive = [&](const char* key) {
        double v = param(key);
        if (!(v > 0.0))
            throw ValidationError(std::string(to_string(family_)) + ": parameter '" + key +
                                  "' must be positive");
        return v;
    };
    auto require_nonneg = [&](const char* key) {
        double v = param(key);
        if (v < 0.0)
            throw ValidationError(std::string(to_string(family_)) + ": parameter '" + key +
                                  "' must be nonnegative");
        return v;
    };

    domain_min_ = -kInf;
    domain_max_ = kInf;
    analytic_ = true;
    analyticity_distance_ = kInf;
    constant_gap_ = true;
    timescale_ = 0.0;

    switch (family_) {
    case Family::Linear: {
        double v = require_positive("v");
        double d = require_nonneg("delta");
        energy_scale_ = d > 0.0 ? d : std::sqrt(v);
        break;
    }
    case Family::Quadratic: {
        double v0 = require_positive("v0");
        param("v1");
        double d = require_nonneg("delta");
        energy_scale_ = d > 0.0 ? d : std::sqrt(v0);
        double v1 = param("v1");
        timescale_ = v1 != 0.0 ? std::abs(v0 / v1) : 0.0;
        break;
    }
    case Family::Cubic: {
        require_positive("v0");
        param("chi3");
        energy_scale_ = require_positive("delta");
        break;
    }
    case Family::TanhModulated: {
        require_positive("v0");
        double alpha = param("alpha");
        if (std::abs(alpha) >= 1.0)
            throw ValidationError("tanh-modulated: |alpha| must be < 1 (v(t) would change sign)");
        timescale_ = require_positive("T");
        energy_scale_ = require_nonneg("delta");
        if (energy_scale_ == 0.0) energy_scale_ = std::sqrt(param("v0"));
        analyticity_distance_ = kPi * timescale_ / 2.0;
        meromorphic_ = true;
        break;
    }
    case Family::Superlinear:
    case Family::Sublinear: {
        double v = require_positive("v");
        double lam = require_positive("lambda");
        double d = require_nonneg("delta");
        energy_scale_ = d > 0.0 ? d : std::sqrt(v);
        // branch point of (1 + c lambda t^2)^p at |t| = 1/sqrt(c lambda)
        double c = family_ == Family::Superlinear ? 1.0 : 2.0;
        analyticity_distance_ = 1.0 / std::sqrt(c * lam);
        break;
    }
    case Family::Sine:
    case Family::Sinh:
    case Family::Tanh: {
        require_positive("A");
        timescale_ = require_positive("T");
        energy_scale_ = require_nonneg("delta");
        if (energy_scale_ == 0.0) energy_scale_ = param("A");
        if (family_ == Family::Tanh) {
            analyticity_distance_ = kPi * timescale_ / 2.0;
            meromorphic_ = true;
        }
        break;
    }
    case Family::Parabolic: {
        param("eps0");
        param("alpha");
        double d = require_nonneg("delta");
        energy_scale_ = d > 0.0 ? d : std::sqrt(std::abs(param("alpha")));
        break;
    }
    case Family::PowerLaw: {
        require_positive("A");
        timescale_ = require_positive("T");
        require_nonneg("delta");
        double a = param("a");
        if (!(a > 0.0)) throw ValidationError("power-law: exponent 'a' must be positive");
        energy_scale_ = std::max(param("delta"), param("A"));
        analytic_ = false;
        analyticity_distance_ = 0.0;
        break;
    }
    case Family::Erf: {
        require_positive("A");
        require_positive("sigma");
        timescale_ = require_positive("T");
        require_nonneg("delta");
        energy_scale_ = std::max(param("delta"), param("A"));
        analytic_ = false; // complex continuation not provided
        analyticity_distance_ = 0.0;
        break;
    }
    case Family::Tangent: {
        require_positive("A");
        require_positive("B");
        timescale_ = require_positive("T");
        energy_scale_ = 2.0 * param("A");
        domain_min_ = -kPi * timescale_ / 2.0;
        domain_max_ = kPi * timescale_ / 2.0;
        break;
    }
    case Family::DemkovKunike: {
        require_nonneg("A");
        require_nonneg("B");
        timescale_ = require_positive("T");
        energy_scale_ = std::max(2.0 * param("A"), 2.0 * param("B"));
        constant_gap_ = false;
        analyticity_distance_ = kPi * timescale_ / 2.0;
        meromorphic_ = true;
        break;
    }
    case Family::RosenZener: {
        require_nonneg("a");
        require_nonneg("b");
        timescale_ = require_positive("T");
        energy_scale_ = std::max(2.0 * param("a"), 2.0 * param("b"));
        constant_gap_ = false;
        analyticity_distance_ = kPi * timescale_ / 2.0;
        meromorphic_ = true;
        break;
    }
    case Family::Rotating: {
        double Om = require_positive("Omega");
        double om = require_positive("omega");
        energy_scale_ = Om;
        timescale_ = 1.0 / om;
        constant_gap_ = false;
        break;
    }
    case Family::GaussianGap: {
        require_positive("v");
        energy_scale_ = require_positive("Delta0");
        timescale_ = require_positive("T");
        constant_gap_ = false;
        break;
    }
    case Family::TanhGap: {
        require_positive("v");
        energy_scale_ = require_positive("Delta0");
        timescale_ = require_positive("T");
        double alpha = param("alpha");
        if (std::abs(alpha) >= 1.0)
            throw ValidationError("tanh-gap: |alpha| must be < 1 (gap would reach zero)");
        constant_gap_ = false;
        analyticity_distance_ = kPi * timescale_ / 2.0;
        meromorphic_ = true;
        break;
    }
    case Family::PowerGap: {
        require_positive("v");
        require_positive("d0");
        timescale_ = require_positive("T");
        double a = param("a");
        if (!(a > 0.0)) throw ValidationError("power-gap: exponent 'a' must be positive");
        energy_scale_ = param("d0");
        constant_gap_ = false;
        analytic_ = false;
        analyticity_distance_ = 0.0;
        break;
    }
    case Family::Numeric:
        throw ValidationError("numeric profiles are built with from_functions()");
    }
}

void SweepProfile::check_complex(cplx z) const
{
    if (z.imag() == 0.0) return;
    if (!analytic_)
        throw UnsupportedError(std::string(to_string(family_)) +
                               ": complex evaluation unsupported (non-analytic family)");
    switch (family_) {
    case Family::TanhModulated:
    case Family::Tanh:
    case Family::DemkovKunike:
    case Family::RosenZener:
    case Family::TanhGap: {
        // tanh/sech profiles are meromorphic: the only singularities are the
        // poles at i pi T (k + 1/2), so complex evaluation is allowed
        // anywhere except in their immediate vicinity
        double T = param("T");
        double k = std::round(z.imag() / (kPi * T) - 0.5);
        cplx pole(0.0, kPi * T * (k + 0.5));
        if (std::abs(z - pole) < 1e-10 * T)
            throw SingularityError(std::string(to_string(family_)) +
                                   ": point at a pole of the profile");
        return;
    }
    default:
        break;
    }
    if (std::abs(z.imag()) >= analyticity_distance_)
        throw SingularityError(std::string(to_string(family_)) +
                               ": point at/beyond the nearest singularity of the strip");
}

template <class S> S SweepProfile::bias_impl(S t) const
{
    constexpr bool real = std::is_same_v<S, double>;
    switch (family_) {
    case Family::Linear:
        return param("v") * t;
    case Family::Quadratic:
        return param("v0") * t + param("v1") * t * t;
    case Family::Cubic: {
        double v0 = param("v0"), d = param("delta");
        S u = v0 * t;
        return u + param("chi3") * u * u * u / (6.0 * d * d);
    }
    case Family::TanhModulated:
        return param("v0") * t * (1.0 + param("alpha") * std::tanh(t / param("T")));
    case Family::Superlinear:
        return param("v") * t * std::sqrt(S(1.0) + param("lambda") * t * t);
    case Family::Sublinear:
        return param("v") * t * std::pow(S(1.0) + 2.0 * param("lambda") * t * t, -0.25);
    case Family::Sine:
        return param("A") * std::sin(t / param("T"));
    case Family::Sinh:
        return param("A") * std::sinh(t / param("T"));
    case Family::Tanh:
        return param("A") * std::tanh(t / param("T"));
    case Family::Parabolic:
        return param("eps0") + param("alpha") * t * t;
    case Family::PowerLaw:
        if constexpr (real)
            return param("A") * sgn(t) * std::pow(std::abs(t / param("T")), param("a"));
        break;
    case Family::Erf:
        if constexpr (real)
            return param("A") * std::erf(t / (std::sqrt(2.0) * param("sigma") * param("T")));
        break;
    case Family::Tangent: {
        if constexpr (real)
            if (t <= domain_min_ || t >= domain_max_)
                throw SingularityError("tangent: time outside (-pi T/2, pi T/2)");
        return 2.0 * param("B") * std::tan(t / param("T"));
    }
    case Family::DemkovKunike:
        return 2.0 * param("B") * std::tanh(t / param("T"));
    case Family::RosenZener:
        return S(2.0 * param("a"));
    case Family::Rotating:
        return param("Omega") * std::cos(param("omega") * t);
    case Family::GaussianGap:
    case Family::TanhGap:
    case Family::PowerGap:
        return param("v") * t;
    case Family::Numeric:
        if constexpr (real) return bias_fn_(t);
        break;
    }
    throw UnsupportedError(std::string(to_string(family_)) + ": complex bias evaluation unsupported");
}

template <class S> S SweepProfile::gap_impl(S t) const
{
    constexpr bool real = std::is_same_v<S, double>;
    switch (family_) {
    case Family::Tangent:
        return S(2.0 * param("A"));
    case Family::DemkovKunike:
        return 2.0 * param("A") / std::cosh(t / param("T"));
    case Family::RosenZener:
        return 2.0 * param("b") / std::cosh(t / param("T"));
    case Family::Rotating:
        return param("Omega") * std::sin(param("omega") * t);
    case Family::GaussianGap:
        return param("Delta0") * std::exp(-(t / param("T")) * (t / param("T")));
    case Family::TanhGap:
        return param("Delta0") * (1.0 + param("alpha") * std::tanh(t / param("T")));
    case Family::PowerGap:
        if constexpr (real)
            return param("d0") * std::pow(std::abs(t / param("T")), param("a"));
        break;
    case Family::Numeric:
        if constexpr (real) return gap_fn_(t);
        break;
    default:
        return S(param("delta"));
    }
    throw UnsupportedError(std::string(to_string(family_)) + ": complex gap evaluation unsupported");
}

template <class S> S SweepProfile::bias_dot_impl(S t) const
{
    switch (family_) {
    case Family::Linear:
        return S(param("v"));
    case Family::Quadratic:
        return param("v0") + 2.0 * param("v1") * t;
    case Family::Cubic: {
        double v0 = param("v0"), d = param("delta");
        S u = v0 * t;
        return v0 * (S(1.0) + param("chi3") * u * u / (2.0 * d * d));
    }
    case Family::TanhModulated: {
        S u = t / param("T");
        S sech2 = S(1.0) - std::tanh(u) * std::tanh(u);
        return param("v0") * (S(1.0) + param("alpha") * std::tanh(u)) +
               param("v0") * t * param("alpha") * sech2 / param("T");
    }
    case Family::Superlinear: {
        S q = S(1.0) + param("lambda") * t * t;
        return param("v") * (S(1.0) + 2.0 * param("lambda") * t * t) / std::sqrt(q);
    }
    case Family::Sublinear: {
        S q = S(1.0) + 2.0 * param("lambda") * t * t;
        return param("v") * (S(1.0) + param("lambda") * t * t) * std::pow(q, -1.25);
    }
    case Family::Sine:
        return param("A") / param("T") * std::cos(t / param("T"));
    case Family::Sinh:
        return param("A") / param("T") * std::cosh(t / param("T"));
    case Family::Tanh: {
        S th = std::tanh(t / param("T"));
        return param("A") / param("T") * (S(1.0) - th * th);
    }
    case Family::Parabolic:
        return 2.0 * param("alpha") * t;
    case Family::Tangent: {
        S c = std::cos(t / param("T"));
        return 2.0 * param("B") / param("T") / (c * c);
    }
    case Family::DemkovKunike: {
        S th = std::tanh(t / param("T"));
        return 2.0 * param("B") / param("T") * (S(1.0) - th * th);
    }
    case Family::RosenZener:
        return S(0.0);
    case Family::Rotating:
        return -param("Omega") * param("omega") * std::sin(param("omega") * t);
    case Family::GaussianGap:
    case Family::TanhGap:
    case Family::PowerGap:
        return S(param("v"));
    default:
        throw UnsupportedError(std::string(to_string(family_)) + ": bias derivative unsupported");
    }
}

template <class S> S SweepProfile::gap_dot_impl(S t) const
{
    switch (family_) {
    case Family::DemkovKunike: {
        S u = t / param("T");
        return -2.0 * param("A") / param("T") * std::tanh(u) / std::cosh(u);
    }
    case Family::RosenZener: {
        S u = t / param("T");
        return -2.0 * param("b") / param("T") * std::tanh(u) / std::cosh(u);
    }
    case Family::Rotating:
        return param("Omega") * param("omega") * std::cos(param("omega") * t);
    case Family::GaussianGap:
        return param("Delta0") * (-2.0 * t / (param("T") * param("T"))) *
               std::exp(-(t / param("T")) * (t / param("T")));
    case Family::TanhGap: {
        S th = std::tanh(t / param("T"));
        return param("Delta0") * param("alpha") / param("T") * (S(1.0) - th * th);
    }
    case Family::PowerGap:
        throw UnsupportedError("power-gap: gap derivative unsupported (non-smooth at origin)");
    case Family::Numeric:
        throw UnsupportedError("numeric: gap derivative unsupported");
    default:
        return S(0.0);
    }
}

double SweepProfile::bias(double t) const { return bias_impl<double>(t); }
double SweepProfile::gap(double t) const { return gap_impl<double>(t); }

cplx SweepProfile::bias(cplx z) const
{
    if (z.imag() == 0.0) return cplx(bias_impl<double>(z.real()), 0.0);
    check_complex(z);
    return bias_impl<cplx>(z);
}

cplx SweepProfile::gap(cplx z) const
{
    if (z.imag() == 0.0) return cplx(gap_impl<double>(z.real()), 0.0);
    check_complex(z);
    return gap_impl<cplx>(z);
}

cplx SweepProfile::bias_dot(cplx z) const
{
    if (z.imag() == 0.0) return cplx(bias_dot_impl<double>(z.real()), 0.0);
    check_complex(z);
    return bias_dot_impl<cplx>(z);
}

cplx SweepProfile::gap_dot(cplx z) const
{
    if (z.imag() == 0.0) return cplx(gap_dot_impl<double>(z.real()), 0.0);
    check_complex(z);
    return gap_dot_impl<cplx>(z);
}

double SweepProfile::quasi_energy(double t) const
{
    return std::hypot(bias_impl<double>(t), gap_impl<double>(t));
}

cplx SweepProfile::quasi_energy(cplx z) const { return std::sqrt(quasi_energy_sq(z)); }

cplx SweepProfile::quasi_energy_sq(cplx z) const
{
    cplx e = bias(z), d = gap(z);
    return e * e + d * d;
}

cplx SweepProfile::quasi_energy_sq_dot(cplx z) const
{
    return 2.0 * bias(z) * bias_dot(z) + 2.0 * gap(z) * gap_dot(z);
}

CrossingData SweepProfile::crossing_derivatives() const
{
    CrossingData c;
    switch (family_) {
    case Family::Linear:
        c = {param("v"), 0.0, 0.0, param("delta"), 0.0, 0.0, 0.0};
        break;
    case Family::Quadratic:
        c = {param("v0"), 2.0 * param("v1"), 0.0, param("delta"), 0.0, 0.0, 0.0};
        break;
    case Family::Cubic: {
        double v0 = param("v0"), d = param("delta");
        c = {v0, 0.0, param("chi3") * v0 * v0 * v0 / (d * d), d, 0.0, 0.0, 0.0};
        break;
    }
    case Family::TanhModulated: {
        double v0 = param("v0"), T = param("T");
        c = {v0, 2.0 * param("alpha") * v0 / T, 0.0, param("delta"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::Superlinear:
        c = {param("v"), 0.0, 3.0 * param("v") * param("lambda"), param("delta"), 0.0, 0.0, 0.0};
        break;
    case Family::Sublinear:
        c = {param("v"), 0.0, -3.0 * param("v") * param("lambda"), param("delta"), 0.0, 0.0, 0.0};
        break;
    case Family::Sine: {
        double A = param("A"), T = param("T");
        c = {A / T, 0.0, -A / (T * T * T), param("delta"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::Sinh: {
        double A = param("A"), T = param("T");
        c = {A / T, 0.0, A / (T * T * T), param("delta"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::Tanh: {
        double A = param("A"), T = param("T");
        c = {A / T, 0.0, -2.0 * A / (T * T * T), param("delta"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::Parabolic:
        c = {0.0, 2.0 * param("alpha"), 0.0, param("delta"), 0.0, 0.0, 0.0};
        break;
    case Family::PowerLaw: {
        double a = param("a"), A = param("A"), T = param("T");
        if (a == 1.0)
            c = {A / T, 0.0, 0.0, param("delta"), 0.0, 0.0, 0.0};
        else if (a == 2.0)
            c = {0.0, 2.0 * A / (T * T), 0.0, param("delta"), 0.0, 0.0, 0.0};
        else if (a == 3.0)
            c = {0.0, 0.0, 6.0 * A / (T * T * T), param("delta"), 0.0, 0.0, 0.0};
        else if (a > 3.0 && a == std::floor(a))
            c = {0.0, 0.0, 0.0, param("delta"), 0.0, 0.0, 0.0};
        else
            throw UnsupportedError("power-law: derivatives at t=0 undefined for this exponent");
        break;
    }
    case Family::Erf: {
        double cc = 1.0 / (std::sqrt(2.0) * param("sigma") * param("T"));
        double A = param("A");
        double f = 2.0 / std::sqrt(kPi);
        c = {A * f * cc, 0.0, -2.0 * A * f * cc * cc * cc, param("delta"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::Tangent: {
        double B = param("B"), T = param("T");
        c = {2.0 * B / T, 0.0, 4.0 * B / (T * T * T), 2.0 * param("A"), 0.0, 0.0, 0.0};
        break;
    }
    case Family::DemkovKunike: {
        double A = param("A"), B = param("B"), T = param("T");
        c = {2.0 * B / T, 0.0, -4.0 * B / (T * T * T), 2.0 * A, 0.0, -2.0 * A / (T * T), 0.0};
        break;
    }
    case Family::RosenZener: {
        double b = param("b"), T = param("T");
        c = {0.0, 0.0, 0.0, 2.0 * b, 0.0, -2.0 * b / (T * T), 0.0};
        break;
    }
    case Family::Rotating: {
        double Om = param("Omega"), om = param("omega");
        c = {0.0, -Om * om * om, 0.0, 0.0, Om * om, 0.0, 0.0};
        break;
    }
    case Family::GaussianGap: {
        double D0 = param("Delta0"), T = param("T");
        c = {param("v"), 0.0, 0.0, D0, 0.0, -2.0 * D0 / (T * T), 0.0};
        break;
    }
    case Family::TanhGap: {
        double D0 = param("Delta0"), T = param("T");
        c = {param("v"), 0.0, 0.0, D0, D0 * param("alpha") / T, 0.0, 0.0};
        break;
    }
    case Family::PowerGap:
        throw UnsupportedError("power-gap: gap not differentiable at t=0");
    case Family::Numeric:
        if (numeric_crossing_) {
            c = *numeric_crossing_;
            break;
        }
        throw UnsupportedError("numeric: crossing derivatives unavailable");
    }
    c.delta = c.v0 > 0.0 ? c.gap0 * c.gap0 / (4.0 * c.v0) : kNaN;
    return c;
}

std::pair<double, double> SweepProfile::nonlinearity_params() const
{
    CrossingData c = crossing_derivatives();
    if (!(c.v0 > 0.0))
        throw UnsupportedError(std::string(to_string(family_)) +
                               ": nonlinearity parameters undefined for v0 <= 0 (essential nonlinearity)");
    double chi2 = c.gap0 * c.eps2 / (c.v0 * c.v0);
    double chi3 = c.gap0 * c.gap0 * c.eps3 / (c.v0 * c.v0 * c.v0);
    return {chi2, chi3};
}

} // namespace lzsm
