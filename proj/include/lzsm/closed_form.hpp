#pragma once

// Closed-form and perturbative transition probabilities as pure scalar
// functions. All inputs dimensionless or in natural (hbar = 1) units.

namespace lzsm {

// Perturbative inputs with a validity advisory (the perturbative formulas
// are derived for |chi| << 1 but remain usable, and plottable, outside it).
struct PerturbativeInput {
    double delta = 0.0; // adiabaticity gap^2 / (4 v0)
    double chi2 = 0.0;
    double chi3 = 0.0;
    bool advisory() const;
};

double lzsm(double delta);

// exp{-2 pi delta (1 - 3 chi2^2 / 8)}
double quadratic_corrected(double delta, double chi2);

// P_lzsm * (1 + (3/4) pi delta chi2^2)
double quadratic_corrected_alt(double delta, double chi2);

// exp{-2 pi delta (1 + chi3 / 8)}
double cubic_corrected(double delta, double chi3);

// P_lzsm * (1 - pi delta chi3 / 4)
double cubic_corrected_linearized(double delta, double chi3);

// exp{-2 pi delta (1 - 3 chi2^2 / 8 + chi3 / 8)}
double unified_corrected(double delta, double chi2, double chi3);

// exp{-2 pi delta (1 - 3 s^2 / 2)}, s = gap'/v at the crossing
double variable_gap_corrected(double delta, double gap_slope_over_v);

// eps = 2B tanh(t/T), gap = 2A sech(t/T):
// P = cosh^2(pi sqrt(B^2-A^2) T) / cosh^2(pi B T); for A > B the numerator
// becomes cos^2(pi sqrt(A^2-B^2) T) (real branch). Also exact for the
// bounded tangent sweep eps = 2B tan(t/T), gap = 2A.
double demkov_kunike(double A, double B, double T);

// eps = 2a, gap = 2b sech(t/T): P = 1 - sin^2(pi b T)/cosh^2(pi a T)
double rosen_zener(double a, double b, double T);

// circularly rotating field, x = omega/Omega, theta = sqrt(Omega^2+omega^2) t:
// P = (1/2) x^2/(1+x^2) (1 - cos theta)
double rotating_field(double x, double theta);

// half turn t = pi/omega: theta = sqrt(1 + 1/x^2) pi
double rotating_field_half_turn(double x);

// fast-passage limit of a pulsed bias with amplitude A across a gap
double square_pulse_limit(double A, double delta);

// eps = A sinh(t/T) with xi = delta/A > 1: two-zero interference formula
// evaluated from its real quadratures (1e-8 accuracy).
// xi <= 1 is a domain error; xi == 1 additionally has a merged double zero.
double sinh_large_xi(double A, double T, double delta);

} // namespace lzsm
