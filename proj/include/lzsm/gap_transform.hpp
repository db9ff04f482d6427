#pragma once

#include <memory>
#include <utility>

#include "lzsm/sweep.hpp"

namespace lzsm {

// Monotone reparameterization of time that trades a varying gap for a
// constant one: G satisfies  int_0^G gap(s) ds = target_gap * t~.
// Built lazily: the cumulative-integral table grows on demand, and a
// coverage error is raised only when a requested point is unreachable
// (bounded integral of the gap). Thread-safe to evaluate.
class TimeMap {
public:
    double target_gap() const;
    double forward(double t_tilde) const; // t~ -> t  (the function G)
    double inverse(double t) const;       // t  -> t~
    double forward_derivative(double t_tilde) const; // G' = target_gap/gap(G)

private:
    friend TimeMap build_time_map(const SweepProfile&, double);
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

TimeMap build_time_map(const SweepProfile& p, double target_gap);

// Constant-gap profile equivalent to p: gap~ = gap(0) (or the explicit
// target), bias~(t~) = bias(G(t~)) * gap~/gap(G(t~)). Numeric bias: real
// axis only, so the DDP contour route does not apply to the result.
SweepProfile equivalent_profile(const SweepProfile& p);
SweepProfile equivalent_profile(const SweepProfile& p, double target_gap);

struct EquivalentDerivatives {
    double d1, d2, d3; // d bias~/dt~, d2 bias~/dt~^2, d3 bias~/dt~^3 at 0
};

// Chain-rule derivatives of the transformed bias at the crossing.
EquivalentDerivatives equivalent_derivatives(const SweepProfile& p);
EquivalentDerivatives equivalent_derivatives(const SweepProfile& p, double target_gap);

// (chi2, chi3) of the equivalent constant-gap problem.
std::pair<double, double> equivalent_nonlinearity(const SweepProfile& p);

} // namespace lzsm
