#pragma once

#include <Eigen/Dense>

#include "conewton/cone.hpp"

namespace conewton {

/// State of the smoothing proximal map at (x, s, mu, rho):
///   z = argmin_{interior} mu*phi(.) + <s,.> + (rho/2)||. - x||^2
///     = (rho x - s + ((rho x - s)^2 + 4 rho mu e)^{1/2}) / (2 rho),
///   y = s + rho (z - x)  (= mu z^{-1}),
/// together with caches sufficient to apply W = (mu/rho) D^2 phi(z),
/// H = I + W and their inverses in O(block dim) for orthant/second-order
/// blocks and O(n^3) for PSD blocks.
///
/// Immutable after construction; safe to share across threads.
struct SmoothingState {
    ConeSpec cone;
    Element x, s;
    double mu = 0.0, rho = 1.0;
    Element z;            // interior point
    Element y;            // s + rho (z - x), exact by construction
    Element grad_phi_z;   // -z^{-1} in the shared spectral frame
    Eigen::VectorXd det_z;

    struct BlockCache {
        // SecondOrder: det(z) plus the dense inverse of H restricted to the block.
        double soc_det = 0.0;
        Eigen::MatrixXd soc_hinv;
        // Psd: eigenpairs of the z block (shared frame with rho x - s).
        Eigen::MatrixXd q;
        Eigen::VectorXd lam;
    };
    std::vector<BlockCache> cache;
};

/// Builds the smoothing state.  Throws ParameterError unless mu > 0 and
/// rho >= 1.  Emits a diagnostic warning when min eig(z) < 1e-14 sqrt(rho mu)
/// (extreme dynamic range in the square-root map).
SmoothingState compute_smoothing(const ConeSpec& cone, const Element& x, const Element& s,
                                 double mu, double rho);

/// Smoothing residual Phi = 2 (x - z); vanishes exactly on the central path.
Element smoothing_residual(const SmoothingState& state);

/// || mu grad phi(z) + s + rho (z - x) || evaluated in the shared frame.
double stationarity_residual(const SmoothingState& state);

Element apply_W(const SmoothingState& state, const Element& h);
Element apply_H(const SmoothingState& state, const Element& h);
Element apply_Winv(const SmoothingState& state, const Element& h);
Element apply_Hinv(const SmoothingState& state, const Element& h);

/// Finite-difference validation of the closed-form Jacobians of (z, y) in
/// (x, s, mu):
///   D_x z = H^{-1},          D_s z = -rho^{-1} H^{-1},
///   D_x y = -rho H^{-1} W,   D_s y = H^{-1} W,
///   dz/dmu = -rho^{-1} H^{-1} grad phi(z),  dy/dmu = -H^{-1} grad phi(z).
/// Central differences with step 1e-6 (1 + ||point||); returns the worst
/// relative error over a fixed set of random directions.
struct DerivativeReport {
    double dz_dx = 0.0, dz_ds = 0.0, dy_dx = 0.0, dy_ds = 0.0;
    double dz_dmu = 0.0, dy_dmu = 0.0;
    double max_rel_err = 0.0;
};
DerivativeReport derivative_checks(const SmoothingState& state, unsigned seed = 0);

}  // namespace conewton
