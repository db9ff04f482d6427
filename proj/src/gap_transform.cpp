#include "lzsm/gap_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "lzsm/errors.hpp"
#include "lzsm/quadrature.hpp"

namespace lzsm {

namespace {
constexpr double kQuadRtol = 1e-12;

double checked_gap(const SweepProfile& p, double t)
{
    double g = p.gap(t);
    if (g < 0.0 || (g == 0.0 && t != 0.0))
        throw ValidationError("time map: gap must be positive on the real axis");
    return g;
}
} // namespace

struct TimeMap::Impl {
    SweepProfile profile;
    double dgap;
    double h0; // base anchor spacing in t
    mutable std::recursive_mutex mu;
    // cumulative integral I(t) = int_0^t gap; anchors outward from 0
    mutable std::vector<double> pos_t{0.0}, pos_i{0.0}; // ascending t
    mutable std::vector<double> neg_t{0.0}, neg_i{0.0}; // descending t
    // interpolation nodes for G(t~): t~ -> (G, G', interval-to-next certified)
    struct Node {
        double g;
        double gp; // dG/dt~ = dgap/gap(G); +inf where the gap vanishes
        bool certified = false;
    };
    mutable std::map<double, Node> nodes;

    explicit Impl(const SweepProfile& p, double target) : profile(p), dgap(target)
    {
        h0 = p.timescale() > 0.0 ? 0.25 * p.timescale() : 0.25;
    }

    double panel(double a, double b) const
    {
        if (a == b) return 0.0;
        auto g = [&](double s) { return checked_gap(profile, s); };
        return adaptive_gk(g, a, b, kQuadRtol, 1e-14 * dgap * h0);
    }

    // grow one side of the anchor table until its |I| reaches i_need or its
    // |t| reaches t_need
    void extend(bool positive, double t_need, double i_need) const
    {
        auto& ts = positive ? pos_t : neg_t;
        auto& is = positive ? pos_i : neg_i;
        double dir = positive ? 1.0 : -1.0;
        double h = ts.size() > 1 ? std::abs(ts.back() - ts[ts.size() - 2]) : h0;
        int stalled = 0;
        while (std::abs(ts.back()) < t_need || std::abs(is.back()) < i_need) {
            double a = ts.back();
            double inc = panel(a, a + dir * h);
            ts.push_back(a + dir * h);
            is.push_back(is.back() + inc);
            h = std::min(h * 1.25, 1e3 * h0);
            if (std::abs(ts.back()) >= t_need) {
                // still chasing an integral target: detect saturation
                stalled = std::abs(inc) <= 1e-16 * i_need ? stalled + 1 : 0;
                if (stalled >= 3 || std::abs(ts.back()) > 1e9 * h0)
                    throw CoverageError("time map: gap integral saturates before "
                                        "reaching the requested value");
            }
        }
    }

    double cumulative(double t) const
    {
        if (t == 0.0) return 0.0;
        std::lock_guard<std::recursive_mutex> lock(mu);
        bool positive = t > 0.0;
        extend(positive, std::abs(t), 0.0);
        const auto& ts = positive ? pos_t : neg_t;
        const auto& is = positive ? pos_i : neg_i;
        auto cmp = [positive](double a, double b) { return positive ? a < b : a > b; };
        auto it = std::upper_bound(ts.begin(), ts.end(), t, cmp);
        std::size_t k = (it - ts.begin()) - 1;
        return is[k] + panel(ts[k], t);
    }

    // solve I(G) = target by bracketed Newton on the anchor table
    double solve(double target, double ttol) const
    {
        if (target == 0.0) return 0.0;
        std::lock_guard<std::recursive_mutex> lock(mu);
        bool positive = target > 0.0;
        extend(positive, 0.0, std::abs(target));
        const auto& ts = positive ? pos_t : neg_t;
        const auto& is = positive ? pos_i : neg_i;
        auto cmp = [positive](double a, double b) { return positive ? a < b : a > b; };
        auto it = std::upper_bound(is.begin(), is.end(), target, cmp);
        std::size_t k = (it - is.begin()) - 1;
        if (k + 1 >= ts.size()) k = ts.size() - 2;
        double lo = ts[k], hi = ts[k + 1];
        double ilo = is[k];
        double g = lo + (hi - lo) * (target - ilo) / (is[k + 1] - ilo);
        const double ftol = dgap * ttol;
        for (int iter = 0; iter < 100; ++iter) {
            double f = ilo + panel(lo, g) - target;
            if (std::abs(f) <= ftol) return g;
            if ((f > 0.0) == positive)
                hi = g;
            else {
                ilo = f + target;
                lo = g;
            }
            double d = checked_gap(profile, g);
            double step = d > 0.0 ? -f / d : 0.0;
            double gn = g + step;
            if (step == 0.0 || gn <= std::min(lo, hi) || gn >= std::max(lo, hi))
                gn = 0.5 * (lo + hi);
            g = gn;
        }
        throw SearchError("time map: root solve for G did not converge");
    }

    double solve_tolerance(double t_tilde) const
    {
        return 0.25 * (1e-10 * std::abs(t_tilde) + 1e-12);
    }

    Node make_node(double tt) const
    {
        double g = solve(dgap * tt, solve_tolerance(tt));
        double gp;
        double gv = checked_gap(profile, g);
        gp = gv > 0.0 ? dgap / gv : std::numeric_limits<double>::infinity();
        return {g, gp, false};
    }

    // Exact evaluation (root solve), bypassing interpolation.
    double forward_exact(double tt) const { return solve(dgap * tt, solve_tolerance(tt)); }

    static double hermite(double a, const Node& na, double b, const Node& nb, double x)
    {
        double h = b - a, s = (x - a) / h;
        double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * na.g + (s3 - 2 * s2 + s) * h * na.gp +
               (-2 * s3 + 3 * s2) * nb.g + (s3 - s2) * h * nb.gp;
    }

    // Interpolated G with on-demand cell refinement, certified against the
    // exact solver at cell midpoints.
    double forward(double tt) const
    {
        if (tt == 0.0) return 0.0;
        std::lock_guard<std::recursive_mutex> lock(mu);
        if (nodes.empty()) nodes.emplace(0.0, Node{0.0, 0.0, false});
        if (nodes.begin()->second.gp == 0.0) {
            // fill in G'(0) lazily (needs no solve)
            double gv = checked_gap(profile, 0.0);
            nodes.begin()->second.gp =
                gv > 0.0 ? dgap / gv : std::numeric_limits<double>::infinity();
        }
        // seed nodes outward at spacing h0 until tt is covered
        while (nodes.rbegin()->first < tt) {
            double next = nodes.rbegin()->first + h0;
            nodes.emplace(next, make_node(next));
        }
        while (nodes.begin()->first > tt) {
            double next = nodes.begin()->first - h0;
            nodes.emplace(next, make_node(next));
        }
        for (int depth = 0; depth < 48; ++depth) {
            auto hi_it = nodes.upper_bound(tt);
            auto lo_it = std::prev(hi_it);
            if (hi_it == nodes.end()) return lo_it->second.g; // tt == last key
            double a = lo_it->first, b = hi_it->first;
            const Node& na = lo_it->second;
            const Node& nb = hi_it->second;
            if (!std::isfinite(na.gp) || !std::isfinite(nb.gp))
                return forward_exact(tt); // gap vanishes at a node: no Hermite
            if (na.certified) return hermite(a, na, b, nb, tt);
            double mid = 0.5 * (a + b);
            Node nm = make_node(mid);
            double pred = hermite(a, na, b, nb, mid);
            // certification in t~ units: |dG| * gap/dgap is the round-trip error
            double err_tt = std::abs(pred - nm.g) * (na.gp > 0 ? 1.0 / na.gp : 0.0);
            bool ok = err_tt <= solve_tolerance(std::abs(a) + std::abs(b)) ||
                      (b - a) <= 1e-6 * (std::abs(tt) + 1.0);
            nm.certified = ok;
            lo_it->second.certified = ok;
            nodes.emplace(mid, nm);
        }
        return forward_exact(tt);
    }
};

double TimeMap::target_gap() const { return impl_->dgap; }

double TimeMap::forward(double t_tilde) const { return impl_->forward(t_tilde); }

double TimeMap::inverse(double t) const { return impl_->cumulative(t) / impl_->dgap; }

double TimeMap::forward_derivative(double t_tilde) const
{
    double g = checked_gap(impl_->profile, forward(t_tilde));
    if (g == 0.0)
        throw SingularityError("time map: G' undefined where the gap vanishes");
    return impl_->dgap / g;
}

TimeMap build_time_map(const SweepProfile& p, double target_gap)
{
    if (!(target_gap > 0.0))
        throw ValidationError("build_time_map: target gap must be positive");
    TimeMap m;
    m.impl_ = std::make_shared<TimeMap::Impl>(p, target_gap);
    return m;
}

EquivalentDerivatives equivalent_derivatives(const SweepProfile& p)
{
    double d0 = p.gap(0.0);
    if (!(d0 > 0.0))
        throw UnsupportedError("equivalent_derivatives: gap(0) = 0; pass an "
                               "explicit target gap");
    return equivalent_derivatives(p, d0);
}

EquivalentDerivatives equivalent_derivatives(const SweepProfile& p, double target_gap)
{
    if (std::abs(p.bias(0.0)) > 1e-12 * p.energy_scale())
        throw UnsupportedError("equivalent_derivatives: crossing must sit at t = 0");
    CrossingData c = p.crossing_derivatives();
    double d = c.gap0;
    if (!(d > 0.0))
        throw UnsupportedError("equivalent_derivatives: vanishing gap at the crossing");
    double g = target_gap;
    double d2 = d * d, d3 = d2 * d, d4 = d3 * d, d5 = d4 * d, d6 = d5 * d;
    EquivalentDerivatives out;
    out.d1 = g * g * c.v0 / d2;
    out.d2 = g * g * g * (c.eps2 / d3 - 3.0 * c.v0 * c.gap1 / d4);
    out.d3 = g * g * g * g *
             (c.eps3 / d4 - 6.0 * c.eps2 * c.gap1 / d5 - 4.0 * c.v0 * c.gap2 / d5 +
              15.0 * c.v0 * c.gap1 * c.gap1 / d6);
    return out;
}

std::pair<double, double> equivalent_nonlinearity(const SweepProfile& p)
{
    EquivalentDerivatives e = equivalent_derivatives(p);
    if (!(e.d1 > 0.0))
        throw UnsupportedError("equivalent_nonlinearity: needs a positive sweep rate");
    double g = p.gap(0.0);
    double chi2 = g * e.d2 / (e.d1 * e.d1);
    double chi3 = g * g * e.d3 / (e.d1 * e.d1 * e.d1);
    return {chi2, chi3};
}

SweepProfile equivalent_profile(const SweepProfile& p)
{
    double d0 = p.gap(0.0);
    if (!(d0 > 0.0))
        throw ValidationError("equivalent_profile: gap(0) = 0; pass an explicit "
                              "target gap");
    return equivalent_profile(p, d0);
}

SweepProfile equivalent_profile(const SweepProfile& p, double target_gap)
{
    TimeMap map = build_time_map(p, target_gap);
    SweepProfile src = p;
    double dgap = target_gap;
    auto bias = [map, src, dgap](double tt) {
        double t = map.forward(tt);
        double g = src.gap(t);
        if (g == 0.0) {
            if (src.bias(t) == 0.0) return 0.0; // crossing point by continuity
            throw SingularityError("equivalent bias undefined where the gap vanishes");
        }
        return src.bias(t) * dgap / g;
    };
    auto gap = [dgap](double) { return dgap; };

    CrossingData c;
    try {
        EquivalentDerivatives e = equivalent_derivatives(p, target_gap);
        c.v0 = e.d1;
        c.eps2 = e.d2;
        c.eps3 = e.d3;
        c.delta = c.v0 > 0.0 ? dgap * dgap / (4.0 * c.v0)
                             : std::numeric_limits<double>::quiet_NaN();
    } catch (const Error&) {
        // non-smooth source (e.g. power-law gap): derivative data unavailable
        double nan = std::numeric_limits<double>::quiet_NaN();
        c.v0 = nan;
        c.eps2 = nan;
        c.eps3 = nan;
        c.delta = nan;
    }
    c.gap0 = dgap;
    c.gap1 = 0.0;
    c.gap2 = 0.0;

    double tscale = p.timescale() > 0.0 ? std::abs(map.inverse(p.timescale())) : 0.0;
    if (!(tscale > 0.0)) tscale = p.timescale();
    return SweepProfile::from_functions(bias, gap, c,
                                        std::max(p.energy_scale(), dgap), tscale);
}

} // namespace lzsm
