#include "conewton/merit.hpp"

#include <cmath>
#include <sstream>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

// Clamp small negative radicands caused by roundoff; anything worse is a
// logic error upstream.
double sqrt_clamped(double val, double scale, const char* what)
{
    if (val < -1e-14 * (1.0 + std::abs(scale))) {
        std::ostringstream msg;
        msg << what << ": negative radicand " << val << " (scale " << scale << ")";
        throw NumericalError(msg.str());
    }
    return std::sqrt(std::max(val, 0.0));
}

}  // namespace

double barrier_lagrangian_value(const ProblemData& prob, const SmoothingState& state)
{
    const ConeSpec& cone = prob.cone();
    const double pres = prob.primal_residual(state.x);
    if (pres > 1e-9 * (1.0 + prob.b.norm())) {
        std::ostringstream msg;
        msg << "barrier_lagrangian_value: ||Ax - b|| = " << pres
            << " exceeds 1e-9 scale; value refers to the infeasible point";
        warn(msg.str());
    }
    double phi = 0.0;
    for (int b = 0; b < cone.num_blocks(); ++b) phi -= std::log(state.det_z(b));
    const Element zx = sub(state.z, state.x);
    return inner(cone, prob.c, state.x) + state.mu * phi + inner(cone, state.s, zx) +
           0.5 * state.rho * inner(cone, zx, zx);
}

GradientPair gradients(const ProblemData& prob, const SmoothingState& state)
{
    GradientPair g;
    g.grad_x = sub(prob.c, state.y);
    g.grad_s = sub(state.z, state.x);
    return g;
}

DeltaReport merit_delta(const ProblemData& prob, const SmoothingState& state,
                        const Element& dx, const Element& ds)
{
    const ConeSpec& cone = prob.cone();
    const double adx = prob.map.apply(dx).norm();
    if (adx > 1e-9 * (1.0 + prob.map.op_norm_estimate() * norm(cone, dx)))
        warn("merit_delta: direction is not in ker A");
    DeltaReport rep;
    const double qx = inner(cone, dx, apply_Hinv(state, apply_W(state, dx)));
    const double qs = inner(cone, ds, apply_Hinv(state, ds));
    rep.delta_x = sqrt_clamped(state.rho / state.mu * qx, std::abs(qx), "merit_delta x");
    rep.delta_s =
        sqrt_clamped(qs / (state.rho * state.mu), std::abs(qs), "merit_delta s");
    rep.delta = std::hypot(rep.delta_x, rep.delta_s);
    return rep;
}

XiReport merit_xi(const ProblemData& prob, const SmoothingState& state,
                  const SchurHandle& schur)
{
    const ConeSpec& cone = prob.cone();
    XiReport rep;

    const Element zx = sub(state.z, state.x);
    const double qs = inner(cone, zx, apply_H(state, zx));
    rep.xi_s = sqrt_clamped(state.rho / state.mu * qs, std::abs(qs), "merit_xi s");

    // Projected system  rho H^{-1} W u + A* nu = g,  A u = 0, with
    // g = c - y, reduced through A W^{-1} H A* = A W^{-1} A* + A A*.
    const Element g = sub(prob.c, state.y);
    Eigen::MatrixXd aux = schur.m + prob.gram;
    Eigen::LLT<Eigen::MatrixXd> llt(aux);
    if (llt.info() != Eigen::Success) {
        aux.diagonal().array() += 1e-12 * aux.cwiseAbs().maxCoeff();
        llt.compute(aux);
        if (llt.info() != Eigen::Success)
            throw NumericalError("merit_xi: auxiliary Schur factorization failed");
    }
    const Element wg = apply_Winv(state, apply_H(state, g));
    const Eigen::VectorXd nu = llt.solve(prob.map.apply(wg));
    const Element u = scale(
        1.0 / state.rho,
        apply_Winv(state, apply_H(state, sub(g, prob.map.adjoint_apply(nu)))));
    const double qx = inner(cone, g, u);
    rep.xi_x = sqrt_clamped(qx / state.mu, norm(cone, g) * norm(cone, u), "merit_xi x");
    rep.xi = std::hypot(rep.xi_x, rep.xi_s);
    return rep;
}

MeritReport evaluate_merits(const ProblemData& prob, const SmoothingState& state,
                            const SchurHandle& schur, const Element& newton_dx,
                            const Element& newton_ds)
{
    MeritReport rep;
    const DeltaReport d = merit_delta(prob, state, newton_dx, newton_ds);
    const XiReport x = merit_xi(prob, state, schur);
    rep.delta_x = d.delta_x;
    rep.delta_s = d.delta_s;
    rep.delta = d.delta;
    rep.xi_x = x.xi_x;
    rep.xi_s = x.xi_s;
    rep.xi = x.xi;
    rep.eta_value = barrier_lagrangian_value(prob, state);
    return rep;
}

SensitivityReport mu_sensitivity_checks(const ProblemData& prob, const SmoothingState& state,
                                        const Element& hx, const Element& hs)
{
    const ConeSpec& cone = prob.cone();
    const double nu = static_cast<double>(cone.rank());
    SensitivityReport rep;

    const Element hg = apply_Hinv(state, state.grad_phi_z);
    rep.lhs_gradient = std::abs(inner(cone, hx, hg) - inner(cone, hs, hg) / state.rho);

    const double qx = inner(cone, hx, apply_Hinv(state, apply_W(state, hx)));
    const double qs = inner(cone, hs, apply_Hinv(state, hs));
    const double sform = state.rho * qx + qs / state.rho;
    rep.rhs_gradient = std::sqrt(2.0 * nu / state.mu) * std::sqrt(std::max(sform, 0.0));
    rep.slack_gradient = rep.rhs_gradient - rep.lhs_gradient;

    // Finite differences in mu for both left sides.
    const double step = 1e-6 * state.mu;
    const SmoothingState sp =
        compute_smoothing(cone, state.x, state.s, state.mu + step, state.rho);
    const SmoothingState sm =
        compute_smoothing(cone, state.x, state.s, state.mu - step, state.rho);
    auto grad_pair_dot = [&](const SmoothingState& st) {
        // <h, grad eta> = <hx, c - y> + <hs, z - x>  (hx in ker A).
        return inner(cone, hx, sub(prob.c, st.y)) + inner(cone, hs, sub(st.z, st.x));
    };
    rep.lhs_gradient_fd =
        std::abs((grad_pair_dot(sp) - grad_pair_dot(sm)) / (2.0 * step));
    rep.fd_agreement = std::abs(rep.lhs_gradient_fd - rep.lhs_gradient) /
                       (1.0 + rep.lhs_gradient);

    auto sform_at = [&](const SmoothingState& st) {
        return state.rho * inner(cone, hx, apply_Hinv(st, apply_W(st, hx))) +
               inner(cone, hs, apply_Hinv(st, hs)) / state.rho;
    };
    rep.lhs_sform = std::abs((sform_at(sp) - sform_at(sm)) / (2.0 * step));
    rep.rhs_sform = state.rho * (1.0 + 2.0 * std::sqrt(nu)) / state.mu * sform;
    rep.slack_sform = rep.rhs_sform - rep.lhs_sform;
    return rep;
}

}  // namespace conewton
