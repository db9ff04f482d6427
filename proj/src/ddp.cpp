#include "lzsm/ddp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lzsm/quadrature.hpp"

namespace lzsm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

// local magnitude of E^2 terms, for residual scaling
double local_scale(const SweepProfile& p, cplx z)
{
    double s = std::norm(p.bias(z)) + std::norm(p.gap(z));
    double floor = p.energy_scale() * p.energy_scale();
    return std::max(s, floor);
}

struct NewtonResult {
    cplx z;
    double fabs;
    bool converged;
};

NewtonResult newton_on_esq(const SweepProfile& p, cplx seed, const SearchBox& box)
{
    const double diag = box.diagonal();
    cplx z = seed;
    for (int it = 0; it < 80; ++it) {
        cplx f, df;
        try {
            f = p.quasi_energy_sq(z);
            df = p.quasi_energy_sq_dot(z);
        } catch (const Error&) {
            return {z, kNaN, false};
        }
        double m = local_scale(p, z);
        if (std::abs(f) <= 5e-14 * m) {
            // polish once more if the derivative allows
            if (std::abs(df) > 0.0) {
                cplx z2 = z - f / df;
                try {
                    if (std::abs(p.quasi_energy_sq(z2)) < std::abs(f)) z = z2;
                } catch (const Error&) {
                }
            }
            return {z, std::abs(p.quasi_energy_sq(z)), true};
        }
        if (!(std::abs(df) > 0.0)) return {z, std::abs(f), false};
        cplx step = f / df;
        double cap = diag / 5.0;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        // bail out when the iterate strays far from the search region
        if (z.real() < box.re_min - box.width() || z.real() > box.re_max + box.width() ||
            z.imag() < -box.height() || z.imag() > box.im_max + box.height())
            return {z, std::abs(f), false};
    }
    return {z, std::abs(p.quasi_energy_sq(z)), false};
}

// Branch-tracked integral of E along the straight segment [za, zb].
// e_start is the tracked value of E at za; returns the integral and the
// tracked value at zb. min_interior_w reports min |w|/scale strictly inside.
struct SegmentResult {
    cplx integral;
    cplx e_end;
    double min_interior_w;
};

SegmentResult branch_tracked_segment(const SweepProfile& p, cplx za, cplx zb, cplx e_start,
                                     double reltol)
{
    const cplx dz = zb - za;
    auto w_at = [&](double x) { return p.quasi_energy_sq(za + x * dz); };

    // march a fine grid to determine the sign of sqrt(w) relative to the
    // principal branch
    int n = 512;
    std::vector<double> flips; // x positions where the sign changes
    double min_w = std::numeric_limits<double>::infinity();
    for (int attempt = 0;; ++attempt) {
        flips.clear();
        min_w = std::numeric_limits<double>::infinity();
        cplx prev = e_start;
        int prev_sign = 1;
        {
            cplx r0 = std::sqrt(w_at(0.0));
            prev_sign = std::abs(r0 - e_start) <= std::abs(-r0 - e_start) ? 1 : -1;
        }
        bool ambiguous = false;
        cplx wprev = w_at(0.0);
        for (int i = 1; i <= n; ++i) {
            double x = double(i) / n;
            cplx w = w_at(x);
            double m = local_scale(p, za + x * dz);
            if (i < n) min_w = std::min(min_w, std::abs(w) / m);
            cplx r = std::sqrt(w);
            // near a zero of E^2 the sign choice is immaterial (sqrt -> 0);
            // keep the running sign instead of flagging the Hoelder kink
            if (std::abs(r) <= 1e-4 * (std::abs(prev) + 1e-300)) {
                prev = double(prev_sign) * r;
                continue;
            }
            // the branch is tracked through the phase of w; an unresolved
            // winding (e.g. passing close to a pole of the profile) aliases
            // the sign, so demand a well-resolved phase step
            if (std::abs(wprev) > 0.0 && std::abs(std::arg(w / wprev)) > 2.0) {
                ambiguous = true;
                break;
            }
            wprev = w;
            int sign = std::abs(r - prev) <= std::abs(-r - prev) ? 1 : -1;
            double jump = std::abs(double(sign) * r - prev);
            if (jump > 0.5 * (std::abs(r) + std::abs(prev)) + 1e-14 * std::sqrt(m)) {
                ambiguous = true;
                break;
            }
            if (sign != prev_sign) {
                // refine where w crosses the negative real axis
                double lo = double(i - 1) / n, hi = x;
                double im_lo = w_at(lo).imag();
                for (int b = 0; b < 60; ++b) {
                    double mid = 0.5 * (lo + hi);
                    double im_mid = w_at(mid).imag();
                    if ((im_mid >= 0.0) == (im_lo >= 0.0)) {
                        lo = mid;
                        im_lo = im_mid;
                    } else {
                        hi = mid;
                    }
                }
                flips.push_back(0.5 * (lo + hi));
                prev_sign = sign;
            }
            prev = double(sign) * r;
        }
        if (!ambiguous) break;
        if (attempt >= 5)
            throw ContourError("branch tracking ambiguous along the contour segment");
        n *= 4;
    }

    // integrate piecewise between sign flips
    int sign0;
    {
        cplx r0 = std::sqrt(w_at(0.0));
        sign0 = std::abs(r0 - e_start) <= std::abs(-r0 - e_start) ? 1 : -1;
    }
    std::vector<double> cuts{0.0};
    cuts.insert(cuts.end(), flips.begin(), flips.end());
    cuts.push_back(1.0);
    cplx total = 0.0;
    int sign = sign0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double s = double(sign);
        auto f = [&](double x) { return s * std::sqrt(w_at(x)); };
        total += adaptive_gk(f, cuts[k], cuts[k + 1], reltol,
                             reltol * p.energy_scale());
        if (k + 2 < cuts.size()) sign = -sign;
    }
    cplx e_end = double(sign) * std::sqrt(w_at(1.0));
    return {total * dz, e_end, min_w};
}

} // namespace

double SearchBox::diagonal() const { return std::hypot(width(), height()); }

SearchBox default_search_box(const SweepProfile& p)
{
    CrossingData c = p.crossing_derivatives();
    double tgap = c.v0 > 0.0 ? c.gap0 / c.v0 : p.timescale();
    if (!(tgap > 0.0)) tgap = 1.0;
    double r = 10.0 * std::max(p.timescale(), tgap);
    double im_top = 10.0 * tgap;
    if (p.meromorphic()) {
        // zeros pair up around the pole ladder at odd multiples of the
        // analyticity distance; cover the first few rungs
        im_top = 8.0 * p.analyticity_distance();
    } else if (std::isfinite(p.analyticity_distance())) {
        im_top = std::min(im_top, 0.95 * p.analyticity_distance());
    }
    return {-r, r, 0.0, im_top};
}

ZeroSearch find_upper_zeros(const SweepProfile& p, const SearchBox& box, int max_count)
{
    if (!p.analytic())
        throw UnsupportedError("find_upper_zeros: profile is not analytic");
    if (box.im_max <= 0.0)
        throw ValidationError("find_upper_zeros: search box must lie in the upper half plane");

    const int nx = 40, ny = 20;
    const double diag = box.diagonal();
    const double dedup_tol = 1e-8 * diag;
    double coincide_tol = 1e-4 * diag;
    if (p.meromorphic())
        coincide_tol = std::min(coincide_tol, 1e-2 * p.analyticity_distance());

    std::vector<cplx> found;
    int converged_seeds = 0;
    double best_grid_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            cplx seed(box.re_min + (i + 0.5) / nx * box.width(),
                      std::max(box.im_min, 0.0) + (j + 0.5) / ny * box.height());
            try {
                best_grid_f = std::min(best_grid_f, std::abs(p.quasi_energy_sq(seed)) /
                                                       local_scale(p, seed));
            } catch (const Error&) {
                continue;
            }
            NewtonResult nr = newton_on_esq(p, seed, box);
            if (!nr.converged) continue;
            ++converged_seeds;
            cplx z = nr.z;
            if (z.imag() <= std::max(box.im_min, dedup_tol)) continue;
            if (z.imag() > box.im_max || z.real() < box.re_min || z.real() > box.re_max)
                continue;
            bool dup = false;
            for (const cplx& u : found)
                if (std::abs(u - z) < dedup_tol) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(z);
        }
    }

    // refinement seeds: Newton restarted from rings around promising centers
    auto ring_seed = [&](cplx z0, double radius) {
        for (int a = 0; a < 8; ++a) {
            cplx seed = z0 + radius * std::polar(1.0, (a + 0.5) * kPi / 4.0);
            try {
                p.quasi_energy_sq(seed);
            } catch (const Error&) {
                continue;
            }
            NewtonResult nr = newton_on_esq(p, seed, box);
            if (!nr.converged) continue;
            cplx z = nr.z;
            if (z.imag() <= std::max(box.im_min, dedup_tol)) continue;
            if (z.imag() > box.im_max || z.real() < box.re_min || z.real() > box.re_max)
                continue;
            bool dup = false;
            for (const cplx& u : found)
                if (std::abs(u - z) < dedup_tol) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(z);
        }
    };

    // zeros flank the poles of a meromorphic profile in tight pairs, far
    // closer together than the grid spacing when the sweep is slow; seed
    // rings of several radii around every pole of the ladder
    if (p.meromorphic()) {
        double h1 = p.analyticity_distance();
        for (double y = h1; y < box.im_max; y += 2.0 * h1)
            for (double f : {0.01, 0.03, 0.08, 0.2, 0.5, 0.9})
                ring_seed(cplx(0.0, y), f * h1);
    }
    // a tight pair can also share one grid cell away from any pole; re-seed
    // on shrinking rings around every find
    for (std::size_t q = 0; q < found.size(); ++q) {
        cplx z0 = found[q];
        double base = std::max({std::abs(z0), p.timescale(), 1e-3 * diag});
        for (double f : {0.3, 0.1, 0.03, 0.01, 0.003})
            ring_seed(z0, f * base);
    }

    ZeroSearch out;
    if (found.empty()) {
        if (converged_seeds == 0 && best_grid_f > 1e-3) {
            out.diagnostic = "no zeros: E^2 bounded away from zero over the search grid";
            return out;
        }
        if (converged_seeds == 0)
            throw SearchError("find_upper_zeros: Newton failed to converge from every seed");
        out.diagnostic = "zeros found only outside the requested rectangle";
        return out;
    }

    std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
        if (a.imag() != b.imag()) return a.imag() < b.imag();
        return a.real() < b.real();
    });

    for (const cplx& z : found) {
        DdpZero zr;
        zr.t_c = z;
        zr.newton_residual = std::sqrt(std::abs(p.quasi_energy_sq(z)));
        out.zeros.push_back(zr);
    }
    for (std::size_t i = 0; i < out.zeros.size(); ++i)
        for (std::size_t j = i + 1; j < out.zeros.size(); ++j)
            if (std::abs(out.zeros[i].t_c - out.zeros[j].t_c) < coincide_tol) {
                out.zeros[i].multiplicity_flag = true;
                out.zeros[j].multiplicity_flag = true;
            }
    for (DdpZero& z : out.zeros) {
        z.action = action_integral(p, z.t_c);
        if (z.multiplicity_flag) {
            z.gamma = cplx(kNaN, kNaN);
            continue;
        }
        try {
            z.gamma = gamma_factor(p, z.t_c);
        } catch (const UnsupportedError&) {
            // dE^2/dt vanishes: a merged (non-simple) zero
            z.multiplicity_flag = true;
            z.gamma = cplx(kNaN, kNaN);
        }
    }
    // keep the zeros closest to the real axis
    if ((int)out.zeros.size() > max_count) out.zeros.resize(max_count);
    return out;
}

cplx action_integral(const SweepProfile& p, cplx t_c)
{
    if (t_c == cplx(0.0)) return 0.0;
    const double reltol = 1e-11;
    cplx e0(p.quasi_energy(0.0), 0.0);

    if (p.meromorphic()) {
        // the poles of tanh/sech profiles sit on the imaginary axis with the
        // zeros of E^2 flanking them in pairs; a straight contour can slip
        // between a pole and its partner zero and continue on the wrong
        // branch.  Route instead through a side channel clear of the ladder
        // and approach the zero horizontally at its own height from its own
        // side; such paths never cross the cuts pairing the zeros.
        double side = (t_c.real() >= 0.0 ? 1.0 : -1.0);
        double x = side * std::max({2.0 * std::abs(t_c.real()),
                                    2.0 * p.timescale(), 0.5 * std::abs(t_c)});
        if (std::isfinite(p.domain_max()))
            x = std::clamp(x, 0.9 * p.domain_min(), 0.9 * p.domain_max());
        try {
            cplx a(x, 0.0), b(x, t_c.imag());
            SegmentResult s1 = branch_tracked_segment(p, 0.0, a, e0, reltol);
            SegmentResult s2 = branch_tracked_segment(p, a, b, s1.e_end, reltol);
            SegmentResult s3 = branch_tracked_segment(p, b, t_c, s2.e_end, reltol);
            if (std::min({s1.min_interior_w, s2.min_interior_w,
                          s3.min_interior_w}) > 1e-8)
                return s1.integral + s2.integral + s3.integral;
        } catch (const Error&) {
        }
    }

    cplx dir = t_c / std::abs(t_c);
    // try the straight segment first, then bow the contour sideways to clear
    // a zero (or pole) sitting on or next to it; small bows first so the
    // deformation stays in the same homotopy class
    for (double s : {0.0, 0.1, -0.1, 0.25, -0.25}) {
        try {
            if (s == 0.0) {
                SegmentResult d = branch_tracked_segment(p, 0.0, t_c, e0, reltol);
                if (d.min_interior_w > 1e-8) return d.integral;
                continue;
            }
            cplx mid = 0.5 * t_c + s * std::abs(t_c) * cplx(0.0, 1.0) * dir;
            if (mid.imag() <= 0.0) continue;
            SegmentResult a = branch_tracked_segment(p, 0.0, mid, e0, reltol);
            if (a.min_interior_w < 1e-8) continue;
            SegmentResult b = branch_tracked_segment(p, mid, t_c, a.e_end, reltol);
            if (b.min_interior_w < 1e-8) continue;
            return a.integral + b.integral;
        } catch (const Error&) {
            continue;
        }
    }
    throw ContourError("action_integral: contour passes through another zero; "
                       "path deformation failed");
}

cplx gamma_factor(const SweepProfile& p, cplx t_c)
{
    cplx dEsq = p.quasi_energy_sq_dot(t_c);
    double m = local_scale(p, t_c);
    if (std::abs(dEsq) < 1e-8 * m / std::max(std::abs(t_c), 1e-30))
        throw UnsupportedError("gamma_factor: zero is not simple (vanishing dE^2/dt)");
    cplx num = p.bias_dot(t_c) * p.gap(t_c) - p.bias(t_c) * p.gap_dot(t_c);
    return 2.0 * cplx(0.0, 1.0) * num / dEsq;
}

TransitionResult generalized_probability(const SweepProfile& p, int n_zeros)
{
    // profiles whose bias has poles above the real axis (e.g. tanh-shaped
    // sweep rates) carry a ladder of zero pairs clustered around the poles;
    // grow the search region until enough zeros are in view
    SearchBox box = default_search_box(p);
    for (int grow = 0; grow < 6; ++grow) {
        try {
            return generalized_probability(p, n_zeros, box);
        } catch (const SearchError&) {
            box.im_max *= 2.5;
            box.re_min *= 1.5;
            box.re_max *= 1.5;
        }
    }
    return generalized_probability(p, n_zeros, box);
}

TransitionResult generalized_probability(const SweepProfile& p, int n_zeros, const SearchBox& box)
{
    ZeroSearch zs = find_upper_zeros(p, box, n_zeros);
    if ((int)zs.zeros.size() < n_zeros)
        throw SearchError("generalized_probability: found " + std::to_string(zs.zeros.size()) +
                          " zeros, need " + std::to_string(n_zeros) +
                          (zs.diagnostic.empty() ? "" : " (" + zs.diagnostic + ")"));
    cplx sum = 0.0;
    for (int k = 0; k < n_zeros; ++k) {
        const DdpZero& z = zs.zeros[k];
        if (z.multiplicity_flag)
            throw UnsupportedError("generalized_probability: near-coincident zeros "
                                   "(DDP condition 3 violated)");
        sum += z.gamma * std::exp(cplx(0.0, 1.0) * z.action);
    }
    TransitionResult r;
    r.probability = std::norm(sum);
    r.method = "ddp-" + std::to_string(n_zeros) + "-zeros";
    r.converged = true;
    return r;
}

TransitionResult standard_probability(const SweepProfile& p)
{
    return standard_probability(p, default_search_box(p));
}

TransitionResult standard_probability(const SweepProfile& p, const SearchBox& box)
{
    ZeroSearch zs = find_upper_zeros(p, box, 1);
    if (zs.zeros.empty())
        throw SearchError("standard_probability: no zeros found" +
                          (zs.diagnostic.empty() ? std::string() : " (" + zs.diagnostic + ")"));
    TransitionResult r;
    r.probability = std::exp(-2.0 * zs.zeros[0].action.imag());
    r.method = "ddp-standard";
    r.converged = true;
    return r;
}

DoublePassageResult double_passage_probability(double v0, double v1, double delta)
{
    if (!(v0 > 0.0) || !(delta > 0.0))
        throw ValidationError("double_passage_probability: v0 and delta must be positive");
    if (v1 == 0.0)
        throw ValidationError("double_passage_probability: v1 must be nonzero");
    const double adiab = delta * delta / (4.0 * v0);
    const double chi2 = 2.0 * v1 * delta / (v0 * v0);
    auto esq = [&](double s) {
        double e = v0 * s + v1 * s * s;
        return std::sqrt(e * e + delta * delta);
    };
    double dyn = adaptive_gk(esq, 0.0, -v0 / v1, 1e-12, 0.0);
    double phi = (2.0 / 3.0) * delta * delta / v0 * chi2 - dyn;
    double plz = std::exp(-2.0 * kPi * adiab);
    DoublePassageResult r;
    r.phase = phi;
    r.probability = plz * (1.0 + 0.75 * kPi * adiab * chi2 * chi2) *
                    std::norm(1.0 - std::exp(cplx(0.0, phi)));
    r.reliable = adiab >= 1.0;
    return r;
}

} // namespace lzsm
