#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "lzsm/errors.hpp"

namespace lzsm {

using cplx = std::complex<double>;

// Sweep/gap profile families. Parameter keys follow the symbols used for
// each functional form (v, delta, v0, alpha, T, lambda, A, B, a, b, sigma,
// Omega, omega, chi3, eps0, d0).
enum class Family {
    Linear,        // eps = v t,                        gap = delta
    Quadratic,     // eps = v0 t + v1 t^2,              gap = delta
    Cubic,         // eps = v0 t + chi3 (v0 t)^3/(6 delta^2)
    TanhModulated, // eps = v0 t (1 + alpha tanh(t/T))
    Superlinear,   // eps = v t (1 + lambda t^2)^{1/2}
    Sublinear,     // eps = v t (1 + 2 lambda t^2)^{-1/4}
    Sine,          // eps = A sin(t/T)
    Sinh,          // eps = A sinh(t/T)
    Tanh,          // eps = A tanh(t/T)
    Parabolic,     // eps = eps0 + alpha t^2
    PowerLaw,      // eps = A sgn(t) |t/T|^a
    Erf,           // eps = A erf(t / (sqrt(2) sigma T))
    Tangent,       // eps = 2B tan(t/T), gap = 2A, |t| < pi T / 2
    DemkovKunike,  // eps = 2B tanh(t/T), gap = 2A / cosh(t/T)
    RosenZener,    // eps = 2a,           gap = 2b / cosh(t/T)
    Rotating,      // eps = Omega cos(omega t), gap = Omega sin(omega t)
    GaussianGap,   // eps = v t, gap = Delta0 exp(-(t/T)^2)
    TanhGap,       // eps = v t, gap = Delta0 (1 + alpha tanh(t/T))
    PowerGap,      // eps = v t, gap = d0 |t/T|^a
    Numeric,       // real-axis-only bias/gap supplied as callables
};

Family family_from_string(std::string_view name);
const char* to_string(Family f);

// Closed-form derivatives of bias and gap at t = 0.
struct CrossingData {
    double v0 = 0.0;   // d eps / dt
    double eps2 = 0.0; // d^2 eps / dt^2
    double eps3 = 0.0; // d^3 eps / dt^3
    double gap0 = 0.0; // gap at the crossing
    double gap1 = 0.0; // d gap / dt
    double gap2 = 0.0; // d^2 gap / dt^2
    double delta = 0.0; // gap0^2 / (4 v0); NaN when v0 <= 0
};

using Params = std::map<std::string, double>;

class SweepProfile {
public:
    static SweepProfile make(Family family, const Params& params);
    static SweepProfile make(std::string_view family, const Params& params);

    // Real-axis-only profile backed by callables (used by gap_transform).
    static SweepProfile from_functions(std::function<double(double)> bias,
                                       std::function<double(double)> gap,
                                       CrossingData crossing,
                                       double energy_scale,
                                       double timescale);

    Family family() const { return family_; }
    const Params& params() const { return params_; }
    double param(const std::string& key) const;

    double bias(double t) const;
    double gap(double t) const;
    cplx bias(cplx z) const;
    cplx gap(cplx z) const;
    cplx bias_dot(cplx z) const;
    cplx gap_dot(cplx z) const;

    // sqrt(eps^2 + gap^2), principal branch (positive real on the real axis).
    double quasi_energy(double t) const;
    cplx quasi_energy(cplx z) const;
    // eps^2 + gap^2 and its derivative; the zero-search target.
    cplx quasi_energy_sq(cplx z) const;
    cplx quasi_energy_sq_dot(cplx z) const;

    CrossingData crossing_derivatives() const;
    // (chi2, chi3) per the Taylor-coefficient definitions.
    std::pair<double, double> nonlinearity_params() const;

    bool analytic() const { return analytic_; }
    // Distance from the real axis to the nearest singularity (inf if entire).
    double analyticity_distance() const { return analyticity_distance_; }
    // True when the complex continuation has isolated poles off the real
    // axis (tanh/sech profiles); evaluation is then valid beyond
    // analyticity_distance() except at the poles themselves.
    bool meromorphic() const { return meromorphic_; }
    bool constant_gap() const { return constant_gap_; }
    // Finite real-time domain (tangent family); +-inf otherwise.
    double domain_min() const { return domain_min_; }
    double domain_max() const { return domain_max_; }
    // Representative energy and time scales for search boxes and windows.
    double energy_scale() const { return energy_scale_; }
    double timescale() const { return timescale_; }

private:
    SweepProfile() = default;
    void validate_and_finish();
    template <class S> S bias_impl(S t) const;
    template <class S> S gap_impl(S t) const;
    template <class S> S bias_dot_impl(S t) const;
    template <class S> S gap_dot_impl(S t) const;
    void check_complex(cplx z) const;

    Family family_ = Family::Linear;
    Params params_;
    bool analytic_ = true;
    bool meromorphic_ = false;
    bool constant_gap_ = true;
    double analyticity_distance_ = 0.0;
    double domain_min_ = 0.0;
    double domain_max_ = 0.0;
    double energy_scale_ = 0.0;
    double timescale_ = 0.0;
    std::function<double(double)> bias_fn_;
    std::function<double(double)> gap_fn_;
    std::optional<CrossingData> numeric_crossing_;
};

// Eq.-(7)-style estimate of the crossing duration.
double crossing_duration(double v, double delta);

} // namespace lzsm
