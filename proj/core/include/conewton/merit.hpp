#pragma once

#include "conewton/kkt.hpp"

namespace conewton {

/// Merit quantities steering both phases: delta is the local norm of the
/// Newton direction, xi the dual local norm of the gradient.  delta <= xi
/// holds at every point.
struct MeritReport {
    double delta_x = 0.0, delta_s = 0.0, delta = 0.0;
    double xi_x = 0.0, xi_s = 0.0, xi = 0.0;
    double eta_value = 0.0;
};

/// Reduced barrier-augmented-Lagrangian value
///   <c,x> + mu phi(z) + <s, z - x> + (rho/2) ||z - x||^2.
/// Warns when ||Ax - b|| > 1e-9 scale (the value is still returned).
double barrier_lagrangian_value(const ProblemData& prob, const SmoothingState& state);

struct GradientPair {
    Element grad_x;  // c - y (ambient representative; project onto ker A for
                     // the reduced gradient)
    Element grad_s;  // z - x
};
GradientPair gradients(const ProblemData& prob, const SmoothingState& state);

/// delta_x = sqrt((rho/mu) <dx, H^{-1} W dx>), delta_s = sqrt(<ds, H^{-1} ds>/(rho mu)).
struct DeltaReport {
    double delta_x = 0.0, delta_s = 0.0, delta = 0.0;
};
DeltaReport merit_delta(const ProblemData& prob, const SmoothingState& state,
                        const Element& dx, const Element& ds);

/// xi_s = sqrt((rho/mu) <z-x, H (z-x)>); xi_x via the projected inverse-
/// Hessian quadratic form, reduced through the auxiliary Schur matrix
/// A W^{-1} H A* = A W^{-1} A* + A A* (one extra Cholesky per evaluation).
struct XiReport {
    double xi_x = 0.0, xi_s = 0.0, xi = 0.0;
};
XiReport merit_xi(const ProblemData& prob, const SmoothingState& state,
                  const SchurHandle& schur);

MeritReport evaluate_merits(const ProblemData& prob, const SmoothingState& state,
                            const SchurHandle& schur, const Element& newton_dx,
                            const Element& newton_ds);

/// Both sides of the mu-sensitivity inequalities
///   |<h, d/dmu grad eta>|  <= sqrt(2 nu / mu) sqrt(S[h,h])
///   |d/dmu S[h,h]|         <= rho (1 + 2 sqrt(nu)) / mu * S[h,h]
/// with the first left side from the closed form
///   (proj H^{-1} grad phi(z), -rho^{-1} H^{-1} grad phi(z))
/// cross-checked against finite differences in mu, and the second left side
/// by central differences.  h_x must lie in ker A.
struct SensitivityReport {
    double lhs_gradient = 0.0, rhs_gradient = 0.0, slack_gradient = 0.0;
    double lhs_gradient_fd = 0.0, fd_agreement = 0.0;
    double lhs_sform = 0.0, rhs_sform = 0.0, slack_sform = 0.0;
};
SensitivityReport mu_sensitivity_checks(const ProblemData& prob, const SmoothingState& state,
                                        const Element& hx, const Element& hs);

}  // namespace conewton
