#pragma once

#include <functional>
#include <vector>

#include "conewton/solver.hpp"

namespace conewton {

struct BenchRecord {
    std::string name;
    SolveStatus status = SolveStatus::NumericalError;
    double time_s = 0.0;
    long outer_iters = 0;
    long total_newton_steps = 0;
    double primal_res = 0.0, dual_res = 0.0, phi_norm = 0.0, gap = 0.0;
    double objective = 0.0;
    bool solved() const { return status == SolveStatus::Optimal; }
};

/// Solves every instance under the config with a per-instance wall-clock
/// limit; failures are recorded, never thrown.  jobs > 1 solves instances on
/// that many threads (solver state is fully isolated); record order follows
/// the instance order regardless.
std::vector<BenchRecord> run_suite(const std::vector<ProblemData>& instances,
                                   const SolverConfig& config, double time_limit_s = 1000.0,
                                   int jobs = 1);

/// exp( mean over instances of ln(max{1, t + offset}) ) - offset.
/// Unsolved entries must already carry the time-limit value.
double shifted_geometric_mean(const std::vector<double>& times,
                              const std::vector<bool>& solved, double offset = 1.0);

struct ProfileSample {
    double tau = 0.0;
    int config = 0;
    double fraction = 0.0;
};

/// Performance profile over times[instance][config]; failures are infinity.
/// Ratios are relative to the best config per instance; sampled on a
/// geometric grid of `samples` points over [1, tau_max].
std::vector<ProfileSample> performance_profile(
    const std::vector<std::vector<double>>& times, double tau_max = 100.0,
    int samples = 200);

/// Random strictly feasible instances: interior x*, s* are drawn first and
/// (b, c) constructed from them, so the central path exists.
ProblemData random_feasible_lp(int nu, int m, unsigned seed);
/// Product of small second-order blocks (plus an orthant remainder when the
/// target rank is odd); nu = total rank.
ProblemData random_feasible_socp(int nu, int m, unsigned seed);

struct ScalingRow {
    int nu = 0;
    long total_newton_steps = 0;
    long outer_iters = 0;
    double predictor = 0.0;  // sqrt(nu) * ln(mu0 / eps)
    bool recentered_in_one = true;
};

struct ScalingReport {
    std::vector<ScalingRow> rows;
    double slope = 0.0;  // least-squares fit through the origin
    double r_squared = 0.0;
};

/// Fits total Newton steps against sqrt(nu) ln(mu0/eps) over random feasible
/// LP instances per nu (certified mode).
ScalingReport scaling_study(const std::vector<int>& nu_list, double eps,
                            const SolverConfig& config, unsigned seed = 1,
                            int instances_per_nu = 3);

}  // namespace conewton
