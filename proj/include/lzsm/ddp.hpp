#pragma once

#include <complex>
#include <vector>

#include "lzsm/schrodinger.hpp"
#include "lzsm/sweep.hpp"

namespace lzsm {

// One upper-half-plane zero of E^2(t), with its action integral and Gamma.
struct DdpZero {
    cplx t_c{};
    cplx action{};          // D(t_c), NaN-filled until computed
    cplx gamma{};           // Gamma_k; NaN when multiplicity_flag is set
    bool multiplicity_flag = false;
    double newton_residual = 0.0; // |E(t_c)|
};

struct SearchBox {
    double re_min, re_max;
    double im_min, im_max;
    double width() const { return re_max - re_min; }
    double height() const { return im_max - im_min; }
    double diagonal() const;
};

// Default rectangle: Re in +-10 max(T, gap/v0), Im up to
// min(0.95 * analyticity distance, 10 gap/v0).
SearchBox default_search_box(const SweepProfile& p);

struct ZeroSearch {
    std::vector<DdpZero> zeros; // sorted by ascending Im(t_c)
    std::string diagnostic;     // set when empty
};

// Newton iteration on E^2 from a 40x20 seed grid; dedup, upper-half filter,
// sort by Im, near-coincidence flagging. Actions and Gamma factors filled in.
ZeroSearch find_upper_zeros(const SweepProfile& p, const SearchBox& box, int max_count);

// D(t_c) = int_0^{t_c} E(s) ds along the straight segment, sqrt branch tracked
// continuously from the positive-real value at s = 0.
cplx action_integral(const SweepProfile& p, cplx t_c);

// Gamma = 2i (eps_dot gap - eps gap_dot) / d(E^2)/dt at a simple zero.
cplx gamma_factor(const SweepProfile& p, cplx t_c);

// P = |sum_k Gamma_k exp(i D_k)|^2 over the n lowest zeros. Not clamped.
TransitionResult generalized_probability(const SweepProfile& p, int n_zeros);
TransitionResult generalized_probability(const SweepProfile& p, int n_zeros,
                                         const SearchBox& box);

// P = exp(-2 Im D(t_c^1)) using the lowest zero.
TransitionResult standard_probability(const SweepProfile& p);
TransitionResult standard_probability(const SweepProfile& p, const SearchBox& box);

struct DoublePassageResult {
    double probability = 0.0; // may exceed 1; reported, not clamped
    double phase = 0.0;       // inter-crossing phase phi
    bool reliable = false;    // false for delta < 1 (known-unreliable regime)
};

// Perturbative double-passage probability for eps = v0 t + v1 t^2.
DoublePassageResult double_passage_probability(double v0, double v1, double delta);

} // namespace lzsm
