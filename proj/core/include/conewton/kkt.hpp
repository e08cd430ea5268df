#pragma once

#include <Eigen/Dense>

#include "conewton/problem.hpp"
#include "conewton/smoothing.hpp"

namespace conewton {

/// Factorized Schur complement M = A W^{-1} A* of the reduced Newton system.
/// Immutable after construction; concurrent solves against one handle are
/// safe.
struct SchurHandle {
    Eigen::MatrixXd m;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double regularization_used = 0.0;
};

/// Assembles M blockwise from the per-cone closed forms
///   orthant:      (rho/mu) A Diag(z)^2 A^T
///   second-order: (rho/mu) [ (Az)(Az)^T + (det z / 2) A A^T - det z (Ae)(Ae)^T ]
///   psd:          (rho/mu) A (Z (.) Z) A^T via per-row Z V Z products
/// and Cholesky-factorizes with an escalating diagonal regularization of
/// 1e-14, 1e-12, 1e-10 times ||M|| on failure.  Throws NumericalError if all
/// rungs fail.
SchurHandle assemble_schur(const ProblemData& prob, const SmoothingState& state);

struct NewtonDirection {
    Element dx, ds;
    Eigen::VectorXd dlambda;
    /// Residual of the full three-block system, relative to 1 + ||r||.
    double system_residual = 0.0;
};

/// Solves the reduced Newton system for the residual r:
///   M dlambda = -rho A W^{-1} H r,  ds = -A* dlambda,
///   dx = W^{-1} (H r - rho^{-1} ds).
NewtonDirection newton_step(const ProblemData& prob, const SmoothingState& state,
                            const SchurHandle& schur, const Element& r);

struct SaddleDirection {
    Element dx, ds;
};

/// Solves the saddle-point system with the mixed Hessian blocks of the
/// reduced function and right-hand side (g_x restricted to ker A, g_s):
///   M nu = A W^{-1} g_x - rho A g_s,
///   dx = rho^{-1} W^{-1} (g_x - A* nu) - g_s,
///   ds = -rho W dx - rho H g_s.
/// With g_x = -(c - y), g_s = -(z - x) this reproduces newton_step's (dx, ds).
SaddleDirection saddle_solve(const ProblemData& prob, const SmoothingState& state,
                             const SchurHandle& schur, const Element& gx, const Element& gs);

/// Local norm of a direction pair:
///   sqrt( (1/mu) [ rho <dx, H^{-1} W dx> + rho^{-1} <ds, H^{-1} ds> ] ).
double s_norm(const SmoothingState& state, const Element& dx, const Element& ds);

}  // namespace conewton
