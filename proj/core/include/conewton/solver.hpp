#pragma once

#include <limits>
#include <string>
#include <vector>

#include "conewton/merit.hpp"

namespace conewton {

/// Shrink factor sigma = 1 - ln(gamma) / (2 rho sqrt(nu) + ln(gamma)) with
/// gamma = (2 kappa + sqrt(2)/rho) / (kappa + sqrt(2)/rho), kappa = 0.1.
/// Guarantees one-step recentering after each mu update.
double certified_shrink_factor(int nu, double rho);

struct SolverConfig {
    double rho = 1.0;   // >= 1
    double mu0 = 1.0;   // > 0
    double eps = 1e-8;  // > 0 target on mu

    /// Neighborhood radius; fixed by the method.
    static constexpr double kappa = 0.1;

    /// certified: sigma from certified_shrink_factor; otherwise the fixed
    /// value in sigma (must lie in (0,1)).
    bool certified = true;
    double sigma = 0.2;

    long max_outer = 100000;
    int max_inner = 50;
    int max_phase1 = 1000;

    /// Off by default: mu0 = max(1, <x00, (s00)_+> / nu).
    bool mu0_heuristic = false;

    double time_limit_s = std::numeric_limits<double>::infinity();
    bool collect_trace = true;

    void validate() const;
};

enum class SolveStatus { Optimal, IterationLimit, NumericalError, InfeasibleSuspect };

const char* to_string(SolveStatus status);

struct TraceRecord {
    int phase = 0;   // 1 or 2
    long k = 0;      // outer index (phase 2), 0 in phase 1
    int j = 0;       // inner index
    double mu = 0.0;
    double t = 0.0;  // homotopy weight (phase 1 only)
    double delta = 0.0;
    double xi = 0.0;
    double primal_res = 0.0;
    double dual_res = 0.0;
    double phi_norm = 0.0;
    double gap = 0.0;
    double time_s = 0.0;
};

struct SolveResult {
    Element x, s;
    Eigen::VectorXd lambda;
    SolveStatus status = SolveStatus::NumericalError;
    bool divergence_flag = false;
    std::string message;

    long outer_iters = 0;         // number of mu updates
    long total_newton_steps = 0;  // both phases
    long phase1_steps = 0;
    std::vector<int> inner_counts;  // Newton steps per outer round (phase 2)

    double mu_final = 0.0;
    double sigma_used = 0.0;
    double objective = 0.0;
    double primal_res = 0.0, dual_res = 0.0, phi_norm = 0.0, gap = 0.0;
    double xi_final = 0.0;
    double wall_time_s = 0.0;

    std::vector<TraceRecord> trace;
};

/// Minimum-norm primal/dual least-squares triple:
///   x00 = A*(AA*)^{-1} b,  lambda00 = (AA*)^{-1} A c,  s00 = c - A* lambda00.
/// Both linear residual blocks vanish, so every subsequent Newton system has
/// the unified zero right-hand-side form.
struct Initialization {
    Element x, s;
    Eigen::VectorXd lambda;
};
Initialization initialize(const ProblemData& prob);

/// Homotopy phase: drives the initialized triple into the central-path
/// neighborhood at mu0 (xi <= kappa).  Exposed for testing; solve() runs it
/// internally.
struct PhaseOneOutcome {
    Element x, s;
    Eigen::VectorXd lambda;
    long steps = 0;
    bool converged = false;
    double xi = 0.0;
    std::vector<TraceRecord> trace;
};
PhaseOneOutcome phase1(const ProblemData& prob, const SolverConfig& config);

/// Path-following phase from a neighborhood point.
SolveResult phase2(const ProblemData& prob, const SolverConfig& config, const Element& x0,
                   const Element& s0, const Eigen::VectorXd& lambda0);

/// initialize -> phase1 -> phase2 with the full trace attached.
SolveResult solve(const ProblemData& prob, const SolverConfig& config = {});

}  // namespace conewton
