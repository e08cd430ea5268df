#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <vector>

namespace conewton::testing {

struct LpOracleResult {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Infeasible;
    double objective = 0.0;
    Eigen::VectorXd x;
};

/// Dense two-phase tableau simplex with Bland's rule for
///   min c^T x  s.t.  A x = b, x >= 0.
/// Independent reference for LP fixtures; slow but cycle-free.
inline LpOracleResult simplex_solve(Eigen::MatrixXd a, Eigen::VectorXd b,
                                    Eigen::VectorXd c, double tol = 1e-9)
{
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    for (int i = 0; i < m; ++i) {
        if (b(i) < 0.0) {
            a.row(i) = -a.row(i);
            b(i) = -b(i);
        }
    }

    // Tableau over [x | artificials | rhs] with artificial basis.
    Eigen::MatrixXd t(m + 1, n + m + 1);
    t.setZero();
    t.block(0, 0, m, n) = a;
    t.block(0, n, m, m).setIdentity();
    t.col(n + m).head(m) = b;
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    auto price_out = [&](const Eigen::VectorXd& cost) {
        t.row(m).head(n + m).setZero();
        t(m, n + m) = 0.0;
        for (int j = 0; j < n + m; ++j) t(m, j) = j < static_cast<int>(cost.size()) ? cost(j) : 0.0;
        for (int i = 0; i < m; ++i)
            if (t(m, basis[i]) != 0.0) t.row(m) -= t(m, basis[i]) * t.row(i);
    };

    auto pivot = [&](int row, int col) {
        t.row(row) /= t(row, col);
        for (int i = 0; i <= m; ++i)
            if (i != row && t(i, col) != 0.0) t.row(i) -= t(i, col) * t.row(row);
        basis[row] = col;
    };

    auto iterate = [&](int ncols) -> bool {
        // Bland: entering = first negative reduced cost, leaving = smallest
        // ratio with smallest basis index.  Returns false on unboundedness.
        for (long guard = 0; guard < 200000; ++guard) {
            int enter = -1;
            for (int j = 0; j < ncols; ++j)
                if (t(m, j) < -tol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < m; ++i) {
                if (t(i, enter) > tol) {
                    const double ratio = t(i, n + m) / t(i, enter);
                    if (ratio < best - tol ||
                        (ratio < best + tol && (leave < 0 || basis[i] < basis[leave]))) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw std::runtime_error("simplex oracle: iteration guard tripped");
    };

    // Phase 1: minimize the artificial sum.
    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(n + m);
    phase1_cost.tail(m).setOnes();
    price_out(phase1_cost);
    if (!iterate(n + m)) throw std::runtime_error("simplex oracle: phase 1 unbounded");
    LpOracleResult res;
    if (t(m, n + m) < -tol) {
        res.status = LpOracleResult::Status::Infeasible;
        return res;
    }
    // Drive artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (basis[i] >= n) {
            int col = -1;
            for (int j = 0; j < n; ++j)
                if (std::abs(t(i, j)) > tol) {
                    col = j;
                    break;
                }
            if (col >= 0) pivot(i, col);
        }
    }

    // Phase 2 on original columns only (artificial columns frozen out).
    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(n + m);
    phase2_cost.head(n) = c;
    price_out(phase2_cost);
    // Forbid re-entering artificials by clearing their reduced costs.
    for (int j = n; j < n + m; ++j) t(m, j) = 0.0;
    if (!iterate(n)) {
        res.status = LpOracleResult::Status::Unbounded;
        return res;
    }

    res.status = LpOracleResult::Status::Optimal;
    res.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) res.x(basis[i]) = t(i, n + m);
    res.objective = c.dot(res.x);
    return res;
}

/// Exhaustive basic-solution enumeration for tiny LPs (n choose m bases).
inline LpOracleResult vertex_enumerate(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& c, double tol = 1e-9)
{
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    LpOracleResult res;
    res.status = LpOracleResult::Status::Infeasible;
    res.objective = std::numeric_limits<double>::infinity();

    std::vector<int> idx(m);
    // Iterate over all m-subsets of columns.
    std::vector<int> comb(m);
    for (int i = 0; i < m; ++i) comb[i] = i;
    auto advance = [&]() -> bool {
        int i = m - 1;
        while (i >= 0 && comb[i] == n - m + i) --i;
        if (i < 0) return false;
        ++comb[i];
        for (int j = i + 1; j < m; ++j) comb[j] = comb[j - 1] + 1;
        return true;
    };
    if (n < m) return res;
    do {
        Eigen::MatrixXd basis(m, m);
        for (int j = 0; j < m; ++j) basis.col(j) = a.col(comb[j]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd xb = lu.solve(b);
        if ((xb.array() < -tol).any()) continue;
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < m; ++j) x(comb[j]) = std::max(xb(j), 0.0);
        const double obj = c.dot(x);
        if (obj < res.objective) {
            res.objective = obj;
            res.x = x;
            res.status = LpOracleResult::Status::Optimal;
        }
    } while (advance());
    return res;
}

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
template <typename F>
double golden_section(F&& f, double lo, double hi, double tol = 1e-10)
{
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c1 = b - phi * (b - a), c2 = a + phi * (b - a);
    double f1 = f(c1), f2 = f(c2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - phi * (b - a);
            f1 = f(c1);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + phi * (b - a);
            f2 = f(c2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace conewton::testing
