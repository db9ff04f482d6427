#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "lzsm/errors.hpp"

namespace lzsm {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
namespace gk {
inline constexpr std::array<double, 15> nodes = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};
inline constexpr std::array<double, 15> kronrod_w = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};
// Gauss weights on the odd Kronrod nodes (1, 3, ..., 13).
inline constexpr std::array<double, 7> gauss_w = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};
} // namespace gk

// One GK15 panel; returns (integral, error estimate).
template <class F, class R = decltype(std::declval<F>()(0.0))>
std::pair<R, double> gk15_panel(F&& f, double a, double b)
{
    const double h = 0.5 * (b - a), c = 0.5 * (a + b);
    R kr{}, ga{};
    for (std::size_t i = 0; i < 15; ++i) {
        R v = f(c + h * gk::nodes[i]);
        kr += gk::kronrod_w[i] * v;
        if (i % 2 == 1) ga += gk::gauss_w[i / 2] * v;
    }
    kr *= h;
    ga *= h;
    return {kr, std::abs(kr - ga)};
}

// Adaptive Gauss-Kronrod on [a, b]; bisects the worst panel until the total
// error estimate meets abs/rel tolerance. Works for double or complex values.
template <class F, class R = decltype(std::declval<F>()(0.0))>
R adaptive_gk(F&& f, double a, double b, double reltol, double abstol = 0.0,
              std::size_t max_panels = 4000)
{
    struct Panel {
        double a, b, err;
        R val;
    };
    auto make = [&](double x0, double x1) {
        auto [v, e] = gk15_panel(f, x0, x1);
        return Panel{x0, x1, e, v};
    };
    std::vector<Panel> panels{make(a, b)};
    for (;;) {
        R total{};
        double err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total += panels[i].val;
            err += panels[i].err;
            if (panels[i].err > panels[worst].err) worst = i;
        }
        double bound = std::max(abstol, reltol * std::abs(total));
        if (err <= bound || panels.size() >= max_panels) {
            if (err > bound * 1e3 && panels.size() >= max_panels)
                throw ContourError("adaptive quadrature failed to converge");
            return total;
        }
        Panel p = panels[worst];
        double m = 0.5 * (p.a + p.b);
        panels[worst] = make(p.a, m);
        panels.push_back(make(m, p.b));
    }
}

} // namespace lzsm
