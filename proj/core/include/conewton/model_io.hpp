#pragma once

#include <string>

#include "conewton/problem.hpp"

namespace conewton {

/// Reads a fixed- or free-format MPS linear program (sections NAME, ROWS,
/// COLUMNS, RHS, optional RANGES, BOUNDS, ENDATA) and compiles it to
/// equality standard form over a single orthant block:
///   - inequality rows receive nonnegative slacks,
///   - RANGES expand to a bounded slack,
///   - finite lower bounds are shifted into b and the objective offset,
///   - upper bounds become extra rows with slacks,
///   - free variables split into a difference of two nonnegatives.
/// With prune_rows, linearly dependent equality rows are dropped (the
/// default is to reject them, since the solver requires surjective A).
ProblemData read_mps(const std::string& path, bool prune_rows = false);

/// Native conic interchange format; lossless round trip.  Schema:
///   {"name": str, "m": int,
///    "cone": [{"type": "orthant"|"soc"|"psd", "dim": int}, ...],
///    "A": {"rows": [], "cols": [], "vals": []},
///    "b": [], "c": [], "offset": real}
/// with A in coordinate triplets over plain coordinates (PSD blocks in
/// scaled-vectorized order: column-major lower triangle, off-diagonals
/// times sqrt(2)).
ProblemData read_conic_json(const std::string& path, bool prune_rows = false);
void write_conic_json(const ProblemData& prob, const std::string& path);

/// Square-root Lasso data: min ||D y - b||_2 + varrho ||y||_1.
struct LassoSpec {
    Eigen::SparseMatrix<double> d;
    Eigen::VectorXd b;
    double varrho = 0.0;
};

/// varrho defaults to ||D^T b||_inf; b defaults to the all-ones vector.
LassoSpec make_lasso_spec(Eigen::SparseMatrix<double> d);
LassoSpec make_lasso_spec(Eigen::SparseMatrix<double> d, Eigen::VectorXd b);

/// Cone-program form with variable order (t, d, y+, y-):
///   min t + varrho sum(y+ + y-)
///   s.t. D y+ - D y- - d = b,  (t, d) in Q^{rows+1},  y+, y- >= 0.
ProblemData build_sqrt_lasso(const LassoSpec& spec);

/// Extracts y = y+ - y- from a solution of build_sqrt_lasso's program.
Eigen::VectorXd sqrt_lasso_recover(const LassoSpec& spec, const Element& x);

/// Direct objective ||D y - b|| + varrho ||y||_1.
double sqrt_lasso_objective(const LassoSpec& spec, const Eigen::VectorXd& y);

/// Maximum violation of the subgradient optimality conditions of the
/// unconstrained objective at y (entries within zero_tol count as zero).
double sqrt_lasso_subgradient_violation(const LassoSpec& spec, const Eigen::VectorXd& y,
                                        double zero_tol);

/// MatrixMarket coordinate real reader (general or symmetric, 1-indexed).
Eigen::SparseMatrix<double> read_matrix_market(const std::string& path);

}  // namespace conewton
