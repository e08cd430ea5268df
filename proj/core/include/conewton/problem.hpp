#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>

#include "conewton/cone.hpp"

namespace conewton {

/// Surjective linear operator A from the ambient cone space onto R^m, stored
/// as an m x ambient_dim sparse matrix of plain coefficients.  Rows act on
/// plain coordinates (svec for PSD blocks); the adjoint returns the Riesz
/// element of the row functional in the ambient inner product.
class LinearMap {
public:
    LinearMap() = default;
    LinearMap(ConeSpec cone, Eigen::SparseMatrix<double> a);

    int rows() const { return static_cast<int>(a_.rows()); }
    int cols() const { return static_cast<int>(a_.cols()); }
    const ConeSpec& cone() const { return cone_; }
    const Eigen::SparseMatrix<double>& matrix() const { return a_; }

    Eigen::VectorXd apply(const Element& x) const;
    Element adjoint_apply(const Eigen::VectorXd& v) const;

    /// Dense Gram matrix A A* (with the metric-weighted adjoint).
    Eigen::MatrixXd gram() const;

    double op_norm_estimate() const { return a_norm_; }

private:
    ConeSpec cone_;
    Eigen::SparseMatrix<double> a_;
    Eigen::VectorXd inv_weights_;
    double a_norm_ = 0.0;
};

/// Conic program in standard primal form
///     min <c, x>  s.t.  A x = b,  x in K,
/// with the reported objective <c, x> + objective_offset.
struct ProblemData {
    LinearMap map;
    Eigen::VectorXd b;
    Element c;  // Riesz element of the objective functional
    std::string name;
    double objective_offset = 0.0;

    // Cached surjectivity certificate: Cholesky of A A*.
    Eigen::MatrixXd gram;
    Eigen::LLT<Eigen::MatrixXd> gram_llt;

    const ConeSpec& cone() const { return map.cone(); }
    int m() const { return map.rows(); }

    double objective(const Element& x) const;
    double primal_residual(const Element& x) const;
    double dual_residual(const Element& s, const Eigen::VectorXd& lambda) const;
    /// Orthogonal projection onto ker A in the ambient metric.
    Element project_kernel(const Element& v) const;
};

/// Validates shapes and certifies surjectivity (Cholesky of A A* must
/// succeed).  Throws StructuralError when A has dependent rows; the message
/// names the redundant row indices found by a rank-revealing factorization.
ProblemData make_problem(ConeSpec cone, Eigen::SparseMatrix<double> a, Eigen::VectorXd b,
                         Element c, std::string name = "", double objective_offset = 0.0);

/// Indices of rows that are linearly dependent on earlier ones (empty when A
/// has full row rank).
std::vector<int> dependent_rows(const Eigen::SparseMatrix<double>& a);

}  // namespace conewton
