#include "conewton/problem.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <sstream>

#include "conewton/errors.hpp"

namespace conewton {

LinearMap::LinearMap(ConeSpec cone, Eigen::SparseMatrix<double> a)
    : cone_(std::move(cone)), a_(std::move(a))
{
    cone_.validate();
    if (a_.cols() != cone_.ambient_dim())
        throw StructuralError("linear map: column count does not match cone dimension");
    if (a_.rows() < 1) throw StructuralError("linear map: at least one row required");
    a_.makeCompressed();
    inv_weights_ = metric_weights(cone_).cwiseInverse();
    a_norm_ = 0.0;
    for (int k = 0; k < a_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a_, k); it; ++it)
            a_norm_ += it.value() * it.value();
    a_norm_ = std::sqrt(a_norm_);
}

Eigen::VectorXd LinearMap::apply(const Element& x) const
{
    return a_ * to_coords(cone_, x);
}

Element LinearMap::adjoint_apply(const Eigen::VectorXd& v) const
{
    if (v.size() != a_.rows()) throw StructuralError("adjoint_apply: length mismatch");
    Eigen::VectorXd w = a_.transpose() * v;
    return from_coords(cone_, w.cwiseProduct(inv_weights_));
}

Eigen::MatrixXd LinearMap::gram() const
{
    Eigen::SparseMatrix<double> awt = inv_weights_.asDiagonal() * a_.transpose();
    return Eigen::MatrixXd(a_ * awt);
}

double ProblemData::objective(const Element& x) const
{
    return inner(cone(), c, x) + objective_offset;
}

double ProblemData::primal_residual(const Element& x) const
{
    return (map.apply(x) - b).norm();
}

double ProblemData::dual_residual(const Element& s, const Eigen::VectorXd& lambda) const
{
    return norm(cone(), sub(add(map.adjoint_apply(lambda), s), c));
}

Element ProblemData::project_kernel(const Element& v) const
{
    Eigen::VectorXd av = map.apply(v);
    Eigen::VectorXd lam = gram_llt.solve(av);
    return sub(v, map.adjoint_apply(lam));
}

std::vector<int> dependent_rows(const Eigen::SparseMatrix<double>& a)
{
    // Column-pivoted QR of A^T selects a maximal independent set of rows.
    Eigen::MatrixXd at = Eigen::MatrixXd(a).transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(at);
    qr.setThreshold(1e-10);
    const int r = static_cast<int>(qr.rank());
    const int m = static_cast<int>(a.rows());
    std::vector<char> keep(m, 0);
    for (int i = 0; i < r; ++i) keep[qr.colsPermutation().indices()(i)] = 1;
    std::vector<int> dep;
    for (int i = 0; i < m; ++i)
        if (!keep[i]) dep.push_back(i);
    return dep;
}

ProblemData make_problem(ConeSpec cone, Eigen::SparseMatrix<double> a, Eigen::VectorXd b,
                         Element c, std::string name, double objective_offset)
{
    ProblemData prob;
    prob.map = LinearMap(std::move(cone), std::move(a));
    if (b.size() != prob.map.rows())
        throw StructuralError("problem: right-hand side length does not match row count");
    check_conformance(prob.cone(), c, "problem objective");
    prob.b = std::move(b);
    prob.c = std::move(c);
    prob.name = std::move(name);
    prob.objective_offset = objective_offset;

    prob.gram = prob.map.gram();
    prob.gram_llt.compute(prob.gram);
    bool ok = prob.gram_llt.info() == Eigen::Success;
    if (ok) {
        // LLT can succeed on numerically singular matrices; inspect the pivots.
        const double dmax = prob.gram.diagonal().maxCoeff();
        const auto& L = prob.gram_llt.matrixLLT();
        for (int i = 0; i < L.rows(); ++i)
            if (!(L(i, i) * L(i, i) > 1e-24 * std::max(dmax, 1.0))) ok = false;
    }
    if (!ok) {
        std::vector<int> dep = dependent_rows(prob.map.matrix());
        std::ostringstream msg;
        msg << "problem '" << prob.name << "': A is not surjective";
        if (!dep.empty()) {
            msg << "; redundant rows:";
            for (size_t i = 0; i < dep.size() && i < 16; ++i) msg << " " << dep[i];
            if (dep.size() > 16) msg << " ...";
        }
        throw StructuralError(msg.str());
    }
    return prob;
}

}  // namespace conewton
