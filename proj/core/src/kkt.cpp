#include "conewton/kkt.hpp"

#include <cmath>
#include <sstream>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

// Accumulate scale * a_col a_col^T over the sparse columns [off, off+n) with
// per-column scale factors.
void add_scaled_column_outer(Eigen::MatrixXd& m, const Eigen::SparseMatrix<double>& a,
                             int off, int n, const Eigen::VectorXd& col_scale)
{
    for (int c = 0; c < n; ++c) {
        const double sc = col_scale(c);
        if (sc == 0.0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it1(a, off + c); it1; ++it1)
            for (Eigen::SparseMatrix<double>::InnerIterator it2(a, off + c); it2; ++it2)
                m(it1.row(), it2.row()) += sc * it1.value() * it2.value();
    }
}

// svec of a symmetric matrix (column-major lower triangle, off-diag * sqrt2).
Eigen::VectorXd svec(const Eigen::MatrixXd& M)
{
    static const double s2 = std::sqrt(2.0);
    const int n = static_cast<int>(M.rows());
    Eigen::VectorXd out(n * (n + 1) / 2);
    int pos = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) out(pos++) = (i == j) ? M(i, j) : s2 * M(i, j);
    return out;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int n)
{
    static const double s2 = std::sqrt(2.0);
    Eigen::MatrixXd M(n, n);
    int pos = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) {
            const double val = (i == j) ? v(pos) : v(pos) / s2;
            M(i, j) = val;
            M(j, i) = val;
            ++pos;
        }
    return M;
}

}  // namespace

SchurHandle assemble_schur(const ProblemData& prob, const SmoothingState& state)
{
    const ConeSpec& cone = prob.cone();
    const Eigen::SparseMatrix<double>& a = prob.map.matrix();
    const int m = prob.m();
    const double winv = state.rho / state.mu;
    const std::vector<int> off = cone.offsets();

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);

    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant: {
                const Eigen::VectorXd& zv = state.z.blocks[b].v;
                add_scaled_column_outer(M, a, off[b], blk.dim, winv * zv.array().square());
                break;
            }
            case BlockKind::SecondOrder: {
                const int d = blk.dim;
                const double detz = state.cache[b].soc_det;
                const Eigen::VectorXd az = a.middleCols(off[b], d) * state.z.blocks[b].v;
                const Eigen::VectorXd ae = Eigen::VectorXd(a.col(off[b]));
                M += winv * (az * az.transpose() - detz * (ae * ae.transpose()));
                add_scaled_column_outer(M, a, off[b], d,
                                        Eigen::VectorXd::Constant(d, winv * detz / 2.0));
                break;
            }
            case BlockKind::Psd: {
                const int n = blk.dim;
                const int q = n * (n + 1) / 2;
                Eigen::MatrixXd ab = Eigen::MatrixXd(a.middleCols(off[b], q));
                const Eigen::MatrixXd& Z = state.z.blocks[b].m;
                // K columns: svec(Z unsvec(row_i) Z); then M += winv * ab K^T... K
                // is symmetric in the row index, assemble as ab * T^T with
                // T rows = svec(Z V_i Z).
                Eigen::MatrixXd T(m, q);
                for (int i = 0; i < m; ++i) {
                    Eigen::VectorXd row = ab.row(i);
                    if (row.isZero(0.0)) {
                        T.row(i).setZero();
                        continue;
                    }
                    Eigen::MatrixXd V = unsvec(row, n);
                    Eigen::MatrixXd ZVZ = Z * V * Z;
                    T.row(i) = svec(0.5 * (ZVZ + ZVZ.transpose()));
                }
                M += winv * (ab * T.transpose());
                break;
            }
        }
    }
    M = 0.5 * (M + M.transpose().eval());

    SchurHandle handle;
    handle.m = M;
    const double mnorm = std::max(M.cwiseAbs().maxCoeff(), 1e-300);
    const double rungs[] = {0.0, 1e-14, 1e-12, 1e-10};
    for (double rung : rungs) {
        Eigen::MatrixXd Mreg = M;
        if (rung > 0.0) Mreg.diagonal().array() += rung * mnorm;
        handle.llt.compute(Mreg);
        if (handle.llt.info() == Eigen::Success) {
            handle.regularization_used = rung * mnorm;
            return handle;
        }
    }
    double min_pivot = std::numeric_limits<double>::quiet_NaN();
    if (handle.llt.matrixLLT().rows() > 0)
        min_pivot = handle.llt.matrixLLT().diagonal().minCoeff();
    std::ostringstream msg;
    msg << "assemble_schur: Cholesky failed at all regularization levels (min pivot "
        << min_pivot << ")";
    throw NumericalError(msg.str());
}

NewtonDirection newton_step(const ProblemData& prob, const SmoothingState& state,
                            const SchurHandle& schur, const Element& r)
{
    const ConeSpec& cone = prob.cone();
    NewtonDirection dir;

    const Element hr = apply_H(state, r);
    const Eigen::VectorXd rhs = -state.rho * prob.map.apply(apply_Winv(state, hr));
    dir.dlambda = schur.llt.solve(rhs);
    const Element adj = prob.map.adjoint_apply(dir.dlambda);
    dir.ds = scale(-1.0, adj);
    dir.dx = apply_Winv(state, axpy(hr, -1.0 / state.rho, dir.ds));

    // Residual of the three block equations of the unreduced system.
    const double r1 = prob.map.apply(dir.dx).norm();
    const double r2 = norm(cone, add(dir.ds, adj));
    const Element lhs3 =
        add(apply_Hinv(state, apply_W(state, dir.dx)),
            scale(1.0 / state.rho, apply_Hinv(state, dir.ds)));
    const double r3 = norm(cone, sub(lhs3, r));
    dir.system_residual =
        std::max({r1, r2, r3}) / (1.0 + norm(cone, r));
    return dir;
}

SaddleDirection saddle_solve(const ProblemData& prob, const SmoothingState& state,
                             const SchurHandle& schur, const Element& gx, const Element& gs)
{
    SaddleDirection dir;
    const Eigen::VectorXd rhs =
        prob.map.apply(apply_Winv(state, gx)) - state.rho * prob.map.apply(gs);
    const Eigen::VectorXd nu = schur.llt.solve(rhs);
    dir.dx = sub(scale(1.0 / state.rho,
                       apply_Winv(state, sub(gx, prob.map.adjoint_apply(nu)))),
                 gs);
    dir.ds = scale(-state.rho, add(apply_W(state, dir.dx), apply_H(state, gs)));
    return dir;
}

double s_norm(const SmoothingState& state, const Element& dx, const Element& ds)
{
    const ConeSpec& cone = state.cone;
    const double qx = inner(cone, dx, apply_Hinv(state, apply_W(state, dx)));
    const double qs = inner(cone, ds, apply_Hinv(state, ds));
    const double val = (state.rho * qx + qs / state.rho) / state.mu;
    return std::sqrt(std::max(val, 0.0));
}

}  // namespace conewton
