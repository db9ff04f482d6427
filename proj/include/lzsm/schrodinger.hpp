#pragma once

#include <complex>
#include <string>
#include <vector>

#include "lzsm/sweep.hpp"

namespace lzsm {

struct TwoLevelState {
    cplx up{1.0, 0.0};
    cplx down{0.0, 0.0};
    double t = 0.0;

    double norm() const { return std::norm(up) + std::norm(down); }
};

struct TransitionResult {
    double probability = 0.0;
    std::string method;
    double window = 0.0;
    bool converged = false;
    double residual = 0.0;
    double norm_defect = 0.0;
};

struct EvolveResult {
    TwoLevelState state;
    double norm_defect = 0.0; // max |norm - 1| along the trajectory
    std::size_t steps = 0;
};

// Adaptive Dormand-Prince 5(4) on the two diabatic amplitudes. The step is
// additionally capped at 0.05/|E(t)| to resolve the phase oscillation.
// t1 < t0 integrates backwards.
EvolveResult evolve(const SweepProfile& p, double t0, double t1, TwoLevelState psi0,
                    double rtol, std::vector<TwoLevelState>* trajectory = nullptr);

struct WindowResult {
    double window = 0.0;
    bool converged = false;
    double residual = 0.0;
    int doublings = 0;
    double probability = 0.0;
    double norm_defect = 0.0;
};

// Doubles the symmetric window [-W, W] until the persistence probability
// changes by less than tol between doublings.
WindowResult converge_window(const SweepProfile& p, double tol, double rtol = 1e-10);

// Probability to remain in the initial diabatic state after a single passage,
// read in the instantaneous-eigenstate basis at the window edges.
TransitionResult diabatic_persistence_probability(const SweepProfile& p, double rtol = 1e-10,
                                                  double tol = 1e-6);

// Persistence probability on a fixed symmetric window [-W, W].
double persistence_probability_fixed_window(const SweepProfile& p, double window, double rtol,
                                            double* norm_defect = nullptr);

// Finite-window problem: start in the instantaneous ground state of H(t0)
// and return the population of the other instantaneous eigenstate at t1.
TransitionResult adiabatic_transition_probability(const SweepProfile& p, double t0, double t1,
                                                  double rtol = 1e-10);

// Instantaneous eigenvectors of H(t): (up-component, down-component) of the
// excited (+E/2) and ground (-E/2) state.
std::pair<cplx, cplx> adiabatic_excited(const SweepProfile& p, double t);
std::pair<cplx, cplx> adiabatic_ground(const SweepProfile& p, double t);

} // namespace lzsm
