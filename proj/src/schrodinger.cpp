#include "lzsm/schrodinger.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lzsm {

namespace {

struct Amps {
    cplx up, down;
};

Amps operator+(Amps a, Amps b) { return {a.up + b.up, a.down + b.down}; }
Amps operator*(double s, Amps a) { return {s * a.up, s * a.down}; }

// i d/dt (up, down) = H (up, down) with H = [[eps, gap], [gap, -eps]] / 2
Amps rhs(const SweepProfile& p, double t, const Amps& y)
{
    const double e = p.bias(t), d = p.gap(t);
    const cplx mihalf(0.0, -0.5);
    return {mihalf * (e * y.up + d * y.down), mihalf * (d * y.up - e * y.down)};
}

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

} // namespace

EvolveResult evolve(const SweepProfile& p, double t0, double t1, TwoLevelState psi0, double rtol,
                    std::vector<TwoLevelState>* trajectory)
{
    if (t0 == t1) return {psi0, std::abs(psi0.norm() - 1.0), 0};
    if (rtol < 1e-13 || rtol > 1e-6)
        throw IntegrationError("evolve: rtol outside [1e-13, 1e-6]");

    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double t = t0;
    Amps y{psi0.up, psi0.down};
    Amps k1 = rhs(p, t, y);
    double norm_defect = std::abs(psi0.norm() - 1.0);
    std::size_t steps = 0;
    if (trajectory) trajectory->push_back({y.up, y.down, t});

    double h = std::min(span, 0.01 / std::max(p.quasi_energy(t), 1e-30));
    const double hmin = std::max(span * 1e-15, 1e-300);
    // floor below which steps are accepted unconditionally: lets the walker hop
    // over isolated non-smooth points (e.g. |t|^a bias kinks) where the local
    // error estimate cannot be driven below tolerance by shrinking h
    const double hforce = std::max(span * 1e-12, 1e-300);
    std::size_t forced = 0;

    while (dir * (t1 - t) > 0.0) {
        const double Eq = std::max(p.quasi_energy(t), 1e-300);
        double cap = 0.05 / Eq;
        h = std::min({h, cap, std::abs(t1 - t)});
        if (h < hmin)
            throw IntegrationError("evolve: step underflow near t = " + std::to_string(t));
        const double hs = dir * h;
        const bool force = h <= hforce;

        Amps k2 = rhs(p, t + c2 * hs, y + hs * a21 * k1);
        Amps k3 = rhs(p, t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        Amps k4 = rhs(p, t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        Amps k5 = rhs(p, t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Amps k6 = rhs(p, t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Amps y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Amps k7 = rhs(p, t + hs, y5);
        Amps ed = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        // local error per unit time <= rtol, floored at the roundoff noise of
        // the stage combination (~ eps * E per unit time with an O(100) stage
        // factor): below that, rejecting steps cannot improve the solution
        double err = std::sqrt(std::norm(ed.up) + std::norm(ed.down));
        double tol = std::max(rtol, 1e4 * std::numeric_limits<double>::epsilon() * Eq) * h *
                     std::max(1.0, std::sqrt(std::norm(y.up) + std::norm(y.down)));
        if (force && ++forced > 100000)
            throw IntegrationError("evolve: persistent step failure near t = " + std::to_string(t));
        if (err <= tol || force) {
            t += hs;
            y = y5;
            k1 = k7; // FSAL
            ++steps;
            norm_defect = std::max(norm_defect, std::abs(std::norm(y.up) + std::norm(y.down) - 1.0));
            if (trajectory) trajectory->push_back({y.up, y.down, t});
        }
        double ratio = err > 0.0 ? std::pow(tol / err, 0.2) : 5.0;
        h = std::max(h * std::clamp(0.9 * ratio, 0.2, 5.0), hmin);
    }
    return {{y.up, y.down, t}, norm_defect, steps};
}

std::pair<cplx, cplx> adiabatic_excited(const SweepProfile& p, double t)
{
    const double e = p.bias(t), d = p.gap(t);
    const double E = std::hypot(e, d);
    if (std::abs(d) <= 1e-300 * std::abs(e))
        return e >= 0.0 ? std::pair<cplx, cplx>{1.0, 0.0} : std::pair<cplx, cplx>{0.0, 1.0};
    // eigenvector for +E/2: (d, E - e), written to stay well conditioned
    double u0 = d, u1 = E - e;
    if (e > 0.0) u1 = d * d / (E + e); // avoid cancellation
    double n = std::hypot(u0, u1);
    return {u0 / n, u1 / n};
}

std::pair<cplx, cplx> adiabatic_ground(const SweepProfile& p, double t)
{
    const double e = p.bias(t), d = p.gap(t);
    const double E = std::hypot(e, d);
    if (std::abs(d) <= 1e-300 * std::abs(e))
        return e >= 0.0 ? std::pair<cplx, cplx>{0.0, 1.0} : std::pair<cplx, cplx>{1.0, 0.0};
    double u0 = E - e, u1 = -d;
    if (e > 0.0) u0 = d * d / (E + e);
    double n = std::hypot(u0, u1);
    return {u0 / n, u1 / n};
}

namespace {

// Reference vector for the diabatic up state at a window edge: the
// instantaneous eigenstate aligned with (1,0). Its population converges much
// faster in W than the raw diabatic one (the residual eigenstate mixing decays
// with the edge oscillation), and for saturating biases (near-square pulses)
// the eigenstate populations are the only W-independent readout. The raw basis
// is kept only when the bias is negligible and the up/down assignment of the
// eigenvectors would be arbitrary.
std::pair<cplx, cplx> edge_up_vector(const SweepProfile& p, double t)
{
    const double e = p.bias(t), d = p.gap(t);
    if (std::abs(e) > 1e-6 * std::abs(d)) {
        auto ex = adiabatic_excited(p, t);
        auto gr = adiabatic_ground(p, t);
        bool up_is_excited = std::norm(ex.first) >= std::norm(gr.first);
        auto base = up_is_excited ? ex : gr;
        auto other = up_is_excited ? gr : ex;
        // first superadiabatic correction: the frame still rotates at
        // theta' = d/dt atan2(gap, eps), mixing the adiabatic pair at
        // O(theta'/2E). The mixing coefficient is obtained by matching the
        // first-order amplitude equation beta' = -iE beta - theta'/2 to its
        // decaying tail solution, which for E' / E^2 = q locally constant
        // (covers both slowly varying edges, q -> 0, and 1/s bias poles at a
        // bounded domain edge) gives beta = (theta'/2E) / (q -+ i); the
        // corrected vector removes that order from the window-truncation
        // error
        double h = 6e-6 * std::max({std::abs(t), p.timescale(), 1e-30});
        if (std::isfinite(p.domain_max()))
            h = std::min(h, 0.45 * (p.domain_max() - std::abs(t)));
        if (h > 0.0) {
            auto theta = [&](double s) { return std::atan2(p.gap(s), p.bias(s)); };
            double td = (theta(t + h) - theta(t - h)) / (2.0 * h);
            double E = std::hypot(e, d);
            double q = (p.quasi_energy(t + h) - p.quasi_energy(t - h)) / (2.0 * h) / (E * E);
            cplx c = up_is_excited ? -td / (2.0 * E) / cplx(q, 1.0)
                                   : td / (2.0 * E) / cplx(q, -1.0);
            if (std::abs(c) < 0.1) {
                cplx u0 = base.first + c * other.first, u1 = base.second + c * other.second;
                double n = std::sqrt(std::norm(u0) + std::norm(u1));
                return {u0 / n, u1 / n};
            }
        }
        return base;
    }
    return {1.0, 0.0};
}

} // namespace

double persistence_probability_fixed_window(const SweepProfile& p, double window, double rtol,
                                            double* norm_defect)
{
    const double t0 = -window, t1 = window;
    auto [u0, d0] = edge_up_vector(p, t0);
    TwoLevelState psi0{u0, d0, t0};
    EvolveResult r = evolve(p, t0, t1, psi0, rtol);
    auto [u1, d1] = edge_up_vector(p, t1);
    if (norm_defect) *norm_defect = r.norm_defect;
    cplx ov = std::conj(u1) * r.state.up + std::conj(d1) * r.state.down;
    return std::norm(ov);
}

WindowResult converge_window(const SweepProfile& p, double tol, double rtol)
{
    // gapless: decoupled equations, P = 1 identically
    bool gapless = p.constant_gap() && p.gap(0.0) == 0.0;

    CrossingData c{};
    double v0 = 0.0;
    try {
        c = p.crossing_derivatives();
        v0 = c.v0;
    } catch (const UnsupportedError&) {
        v0 = 0.0;
    }
    const bool bounded_domain = std::isfinite(p.domain_max());
    double w0 = 0.0;
    if (v0 > 0.0)
        w0 = std::max(10.0 * crossing_duration(v0, c.gap0), 20.0 / std::sqrt(v0));
    w0 = std::max(w0, 5.0 * p.timescale());
    if (w0 <= 0.0) w0 = 10.0;
    // fast-growing biases (e.g. sinh) reach the adiabatic edge regime long
    // before the generic window estimate; cut w0 back to where |eps| already
    // dwarfs the gap, or doubling becomes exponentially expensive
    double edge_ref = 1e3 * std::max(c.gap0, p.energy_scale());
    if (edge_ref > 0.0 && !bounded_domain) {
        auto edge_bias = [&](double w) {
            return std::min(std::abs(p.bias(w)), std::abs(p.bias(-w)));
        };
        double ws = std::max({0.05 * w0, p.timescale(), 1e-3});
        while (ws < w0 && edge_bias(ws) < edge_ref) ws *= 1.1892; // 2^(1/4)
        if (ws < w0 && edge_bias(0.5 * ws) >= edge_ref) ws *= 0.5;
        w0 = std::min(w0, ws);
    }
    // bounded domains (e.g. tangent-shaped bias with a pole at the edge):
    // approach the edge only until the bias dwarfs every other energy scale;
    // past that point the tail is adiabatically frozen but the step cap makes
    // the integration arbitrarily expensive
    double w_sat = std::numeric_limits<double>::infinity();
    if (bounded_domain) {
        const double dm = p.domain_max();
        double ref = 1e3 * std::max(c.gap0, p.energy_scale());
        double g = 0.1 * dm;
        if (ref > 0.0)
            while (g > 1e-12 * dm &&
                   std::min(std::abs(p.bias(dm - g)), std::abs(p.bias(-(dm - g)))) < ref)
                g *= 0.5;
        w_sat = dm - g;
        w0 = std::min(dm * 0.9, w_sat);
    }

    WindowResult res;
    res.window = w0;
    if (gapless) {
        res.probability = 1.0;
        res.converged = true;
        return res;
    }

    double defect = 0.0;
    double prev = persistence_probability_fixed_window(p, w0, rtol, &defect);
    res.norm_defect = defect;
    for (int k = 1; k <= 12; ++k) {
        // grow slowly once the edges are deep in the adiabatic regime, where
        // a full doubling is exponentially expensive for growing biases
        double factor = 2.0;
        if (std::min(std::abs(p.bias(res.window)), std::abs(p.bias(-res.window))) >=
            1e3 * std::max(c.gap0, p.energy_scale()))
            factor = 1.25;
        double w = bounded_domain
                       ? std::min(p.domain_max() * (1.0 - 0.1 * std::pow(16.0, -k)), w_sat)
                       : res.window * factor;
        double cur = persistence_probability_fixed_window(p, w, rtol, &defect);
        res.window = w;
        res.doublings = k;
        res.residual = std::abs(cur - prev);
        res.norm_defect = std::max(res.norm_defect, defect);
        prev = cur;
        if (res.residual < tol) {
            res.converged = true;
            res.probability = cur;
            return res;
        }
    }
    res.probability = prev;
    throw IntegrationError("converge_window: no convergence after 12 doublings "
                           "(non-asymptotic profile?); last residual " +
                           std::to_string(res.residual));
}

TransitionResult diabatic_persistence_probability(const SweepProfile& p, double rtol, double tol)
{
    WindowResult w = converge_window(p, tol, rtol);
    TransitionResult r;
    r.probability = w.probability;
    r.method = "integrator";
    r.window = w.window;
    r.converged = w.converged;
    r.residual = w.residual;
    r.norm_defect = w.norm_defect;
    return r;
}

TransitionResult adiabatic_transition_probability(const SweepProfile& p, double t0, double t1,
                                                  double rtol)
{
    auto [g0, g1] = adiabatic_ground(p, t0);
    TwoLevelState psi0{g0, g1, t0};
    EvolveResult r = evolve(p, t0, t1, psi0, rtol);
    auto [x0, x1] = adiabatic_excited(p, t1);
    cplx ov = std::conj(x0) * r.state.up + std::conj(x1) * r.state.down;
    TransitionResult out;
    out.probability = std::norm(ov);
    out.method = "integrator";
    out.window = t1 - t0;
    out.converged = true;
    out.residual = 0.0;
    out.norm_defect = r.norm_defect;
    return out;
}

} // namespace lzsm
