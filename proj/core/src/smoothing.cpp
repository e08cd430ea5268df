#include "conewton/smoothing.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <sstream>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

// Root of rho t^2 - lam_u t - mu = 0; evaluated without cancellation for
// either sign of lam_u.
double smoothing_eigenvalue(double lam_u, double mu, double rho)
{
    const double disc = std::sqrt(lam_u * lam_u + 4.0 * rho * mu);
    if (lam_u >= 0.0) return (lam_u + disc) / (2.0 * rho);
    return (2.0 * mu) / (disc - lam_u);
}

}  // namespace

SmoothingState compute_smoothing(const ConeSpec& cone, const Element& x, const Element& s,
                                 double mu, double rho)
{
    if (!(mu > 0.0)) throw ParameterError("compute_smoothing: mu must be positive");
    if (!(rho >= 1.0)) throw ParameterError("compute_smoothing: rho must be >= 1");
    check_conformance(cone, x, "compute_smoothing x");
    check_conformance(cone, s, "compute_smoothing s");

    SmoothingState st;
    st.cone = cone;
    st.x = x;
    st.s = s;
    st.mu = mu;
    st.rho = rho;
    st.z = zero_element(cone);
    st.grad_phi_z = zero_element(cone);
    st.det_z.resize(cone.num_blocks());
    st.cache.resize(cone.blocks.size());

    const double w = mu / rho;
    double min_lam_z = std::numeric_limits<double>::infinity();

    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd u = rho * x.blocks[b].v - s.blocks[b].v;
                Eigen::VectorXd& zv = st.z.blocks[b].v;
                Eigen::VectorXd& gv = st.grad_phi_z.blocks[b].v;
                for (int i = 0; i < blk.dim; ++i) {
                    zv(i) = smoothing_eigenvalue(u(i), mu, rho);
                    gv(i) = -1.0 / zv(i);
                }
                st.det_z(b) = zv.prod();
                min_lam_z = std::min(min_lam_z, zv.minCoeff());
                break;
            }
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd u = rho * x.blocks[b].v - s.blocks[b].v;
                const int d = blk.dim;
                const double nb = u.tail(d - 1).norm();
                Eigen::VectorXd dir = Eigen::VectorXd::Zero(d - 1);
                if (nb > 0.0)
                    dir = u.tail(d - 1) / nb;
                else
                    dir(0) = 1.0;
                const double lz1 = smoothing_eigenvalue(u(0) + nb, mu, rho);
                const double lz2 = smoothing_eigenvalue(u(0) - nb, mu, rho);
                Eigen::VectorXd& zv = st.z.blocks[b].v;
                zv(0) = 0.5 * (lz1 + lz2);
                zv.tail(d - 1) = 0.5 * (lz1 - lz2) * dir;
                Eigen::VectorXd& gv = st.grad_phi_z.blocks[b].v;
                gv(0) = -0.5 * (1.0 / lz1 + 1.0 / lz2);
                gv.tail(d - 1) = -0.5 * (1.0 / lz1 - 1.0 / lz2) * dir;
                const double detz = lz1 * lz2;
                st.det_z(b) = detz;
                min_lam_z = std::min(min_lam_z, lz2);

                SmoothingState::BlockCache& c = st.cache[b];
                c.soc_det = detz;
                // Dense inverse of H = I + w D^2 phi(z) on the block.
                Eigen::VectorXd jz(d);
                jz(0) = zv(0);
                jz.tail(d - 1) = -zv.tail(d - 1);
                Eigen::MatrixXd Hb = Eigen::MatrixXd::Identity(d, d);
                Hb += (2.0 * w / (detz * detz)) * jz * jz.transpose();
                Hb.diagonal()(0) -= w / detz;
                Hb.diagonal().tail(d - 1).array() += w / detz;
                c.soc_hinv = Hb.ldlt().solve(Eigen::MatrixXd::Identity(d, d));
                break;
            }
            case BlockKind::Psd: {
                Eigen::MatrixXd U = rho * x.blocks[b].m - s.blocks[b].m;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(U);
                if (es.info() != Eigen::Success)
                    throw NumericalError("compute_smoothing: psd eigensolver failed");
                SmoothingState::BlockCache& c = st.cache[b];
                c.q = es.eigenvectors();
                c.lam.resize(blk.dim);
                Eigen::VectorXd ginv(blk.dim);
                for (int i = 0; i < blk.dim; ++i) {
                    c.lam(i) = smoothing_eigenvalue(es.eigenvalues()(i), mu, rho);
                    ginv(i) = -1.0 / c.lam(i);
                }
                st.z.blocks[b].m = c.q * c.lam.asDiagonal() * c.q.transpose();
                st.z.blocks[b].m = 0.5 * (st.z.blocks[b].m + st.z.blocks[b].m.transpose().eval());
                st.grad_phi_z.blocks[b].m = c.q * ginv.asDiagonal() * c.q.transpose();
                st.grad_phi_z.blocks[b].m =
                    0.5 * (st.grad_phi_z.blocks[b].m + st.grad_phi_z.blocks[b].m.transpose().eval());
                st.det_z(b) = c.lam.prod();
                min_lam_z = std::min(min_lam_z, c.lam.minCoeff());
                break;
            }
        }
    }

    st.y = axpy(s, rho, sub(st.z, x));

    if (min_lam_z < 1e-14 * std::sqrt(rho * mu)) {
        std::ostringstream msg;
        msg << "compute_smoothing: min eig(z) = " << min_lam_z
            << " below 1e-14 sqrt(rho mu); result may underflow";
        warn(msg.str());
    }
    return st;
}

Element smoothing_residual(const SmoothingState& state)
{
    return scale(2.0, sub(state.x, state.z));
}

double stationarity_residual(const SmoothingState& state)
{
    return norm(state.cone, axpy(state.y, state.mu, state.grad_phi_z));
}

Element apply_W(const SmoothingState& state, const Element& h)
{
    const double w = state.mu / state.rho;
    const ConeSpec& cone = state.cone;
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                out.blocks[b].v =
                    w * h.blocks[b].v.cwiseQuotient(zv.cwiseProduct(zv));
                break;
            }
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                const Eigen::VectorXd& hv = h.blocks[b].v;
                const int d = blk.dim;
                const double detz = state.cache[b].soc_det;
                Eigen::VectorXd jz(d), jh(d);
                jz(0) = zv(0);
                jz.tail(d - 1) = -zv.tail(d - 1);
                jh(0) = hv(0);
                jh.tail(d - 1) = -hv.tail(d - 1);
                out.blocks[b].v =
                    w * ((2.0 / (detz * detz)) * jz.dot(hv) * jz - jh / detz);
                break;
            }
            case BlockKind::Psd: {
                const auto& c = state.cache[b];
                Eigen::MatrixXd S = c.q.transpose() * h.blocks[b].m * c.q;
                for (int i = 0; i < blk.dim; ++i)
                    for (int j = 0; j < blk.dim; ++j) S(i, j) *= w / (c.lam(i) * c.lam(j));
                Eigen::MatrixXd T = c.q * S * c.q.transpose();
                out.blocks[b].m = 0.5 * (T + T.transpose());
                break;
            }
        }
    }
    return out;
}

Element apply_H(const SmoothingState& state, const Element& h)
{
    return add(h, apply_W(state, h));
}

Element apply_Winv(const SmoothingState& state, const Element& h)
{
    const double winv = state.rho / state.mu;
    const ConeSpec& cone = state.cone;
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                out.blocks[b].v =
                    winv * h.blocks[b].v.cwiseProduct(zv.cwiseProduct(zv));
                break;
            }
            case BlockKind::SecondOrder: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                const Eigen::VectorXd& hv = h.blocks[b].v;
                const int d = blk.dim;
                const double detz = state.cache[b].soc_det;
                Eigen::VectorXd jh(d);
                jh(0) = hv(0);
                jh.tail(d - 1) = -hv.tail(d - 1);
                out.blocks[b].v = winv * (2.0 * zv.dot(hv) * zv - detz * jh);
                break;
            }
            case BlockKind::Psd: {
                const auto& c = state.cache[b];
                Eigen::MatrixXd S = c.q.transpose() * h.blocks[b].m * c.q;
                for (int i = 0; i < blk.dim; ++i)
                    for (int j = 0; j < blk.dim; ++j) S(i, j) *= winv * c.lam(i) * c.lam(j);
                Eigen::MatrixXd T = c.q * S * c.q.transpose();
                out.blocks[b].m = 0.5 * (T + T.transpose());
                break;
            }
        }
    }
    return out;
}

Element apply_Hinv(const SmoothingState& state, const Element& h)
{
    const double w = state.mu / state.rho;
    const ConeSpec& cone = state.cone;
    Element out = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                const Eigen::ArrayXd z2 = zv.array().square();
                out.blocks[b].v =
                    (h.blocks[b].v.array() * z2 / (z2 + w)).matrix();
                break;
            }
            case BlockKind::SecondOrder:
                out.blocks[b].v = state.cache[b].soc_hinv * h.blocks[b].v;
                break;
            case BlockKind::Psd: {
                const auto& c = state.cache[b];
                Eigen::MatrixXd S = c.q.transpose() * h.blocks[b].m * c.q;
                for (int i = 0; i < blk.dim; ++i)
                    for (int j = 0; j < blk.dim; ++j)
                        S(i, j) /= 1.0 + w / (c.lam(i) * c.lam(j));
                Eigen::MatrixXd T = c.q * S * c.q.transpose();
                out.blocks[b].m = 0.5 * (T + T.transpose());
                break;
            }
        }
    }
    return out;
}

namespace {

Element random_direction(const ConeSpec& cone, std::mt19937_64& gen)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd coords(cone.ambient_dim());
    for (int i = 0; i < coords.size(); ++i) coords(i) = dist(gen);
    return from_coords(cone, coords);
}

double rel_err(const ConeSpec& cone, const Element& got, const Element& want)
{
    return norm(cone, sub(got, want)) / (1.0 + norm(cone, want));
}

}  // namespace

DerivativeReport derivative_checks(const SmoothingState& state, unsigned seed)
{
    const ConeSpec& cone = state.cone;
    std::mt19937_64 gen(seed);
    DerivativeReport rep;

    const int trials = 4;
    for (int t = 0; t < trials; ++t) {
        const Element h = random_direction(cone, gen);
        const double step_x = 1e-6 * (1.0 + norm(cone, state.x));
        const double step_s = 1e-6 * (1.0 + norm(cone, state.s));

        auto at = [&](const Element& xx, const Element& ss) {
            return compute_smoothing(cone, xx, ss, state.mu, state.rho);
        };

        // x-direction
        {
            SmoothingState p = at(axpy(state.x, step_x, h), state.s);
            SmoothingState m = at(axpy(state.x, -step_x, h), state.s);
            Element fd_z = scale(1.0 / (2.0 * step_x), sub(p.z, m.z));
            Element fd_y = scale(1.0 / (2.0 * step_x), sub(p.y, m.y));
            rep.dz_dx = std::max(rep.dz_dx, rel_err(cone, fd_z, apply_Hinv(state, h)));
            rep.dy_dx = std::max(
                rep.dy_dx,
                rel_err(cone, fd_y,
                        scale(-state.rho, apply_Hinv(state, apply_W(state, h)))));
        }
        // s-direction
        {
            SmoothingState p = at(state.x, axpy(state.s, step_s, h));
            SmoothingState m = at(state.x, axpy(state.s, -step_s, h));
            Element fd_z = scale(1.0 / (2.0 * step_s), sub(p.z, m.z));
            Element fd_y = scale(1.0 / (2.0 * step_s), sub(p.y, m.y));
            rep.dz_ds = std::max(
                rep.dz_ds,
                rel_err(cone, fd_z, scale(-1.0 / state.rho, apply_Hinv(state, h))));
            rep.dy_ds =
                std::max(rep.dy_ds,
                         rel_err(cone, fd_y, apply_Hinv(state, apply_W(state, h))));
        }
    }
    // mu-direction
    {
        const double step_mu = 1e-6 * state.mu;
        SmoothingState p =
            compute_smoothing(cone, state.x, state.s, state.mu + step_mu, state.rho);
        SmoothingState m =
            compute_smoothing(cone, state.x, state.s, state.mu - step_mu, state.rho);
        Element fd_z = scale(1.0 / (2.0 * step_mu), sub(p.z, m.z));
        Element fd_y = scale(1.0 / (2.0 * step_mu), sub(p.y, m.y));
        Element hg = apply_Hinv(state, state.grad_phi_z);
        rep.dz_dmu = rel_err(cone, fd_z, scale(-1.0 / state.rho, hg));
        rep.dy_dmu = rel_err(cone, fd_y, scale(-1.0, hg));
    }

    rep.max_rel_err = std::max({rep.dz_dx, rep.dz_ds, rep.dy_dx, rep.dy_ds, rep.dz_dmu,
                                rep.dy_dmu});
    return rep;
}

}  // namespace conewton
