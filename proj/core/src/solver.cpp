#include "conewton/solver.hpp"

#include <chrono>
#include <cmath>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Everything the driver needs about one iterate: smoothing state, Schur
// factorization, plain Newton direction and both merits.
struct IterateEval {
    SmoothingState state;
    SchurHandle schur;
    NewtonDirection newton;
    MeritReport merits;
};

IterateEval evaluate(const ProblemData& prob, const Element& x, const Element& s, double mu,
                     double rho)
{
    IterateEval ev;
    ev.state = compute_smoothing(prob.cone(), x, s, mu, rho);
    ev.schur = assemble_schur(prob, ev.state);
    ev.newton = newton_step(prob, ev.state, ev.schur, sub(ev.state.z, ev.state.x));
    ev.merits =
        evaluate_merits(prob, ev.state, ev.schur, ev.newton.dx, ev.newton.ds);
    return ev;
}

struct Driver {
    const ProblemData& prob;
    const SolverConfig& config;
    Clock::time_point t0 = Clock::now();
    SolveResult result;
    double divergence_threshold = 0.0;

    Driver(const ProblemData& p, const SolverConfig& c) : prob(p), config(c) {}

    void record(const IterateEval& ev, int phase, long k, int j, double t_weight)
    {
        if (!config.collect_trace) return;
        TraceRecord rec;
        rec.phase = phase;
        rec.k = k;
        rec.j = j;
        rec.mu = ev.state.mu;
        rec.t = t_weight;
        rec.delta = ev.merits.delta;
        rec.xi = ev.merits.xi;
        rec.primal_res = prob.primal_residual(ev.state.x);
        rec.dual_res = prob.dual_residual(ev.state.s, result.lambda);
        rec.phi_norm = norm(prob.cone(), smoothing_residual(ev.state));
        rec.gap = inner(prob.cone(), ev.state.x, ev.state.s);
        rec.time_s = seconds_since(t0);
        result.trace.push_back(rec);
    }

    bool diverged(const Element& x, const Element& s) const
    {
        return norm(prob.cone(), x) + norm(prob.cone(), s) > divergence_threshold;
    }

    bool out_of_time() const
    {
        return seconds_since(t0) > config.time_limit_s;
    }

    void finalize(const IterateEval& ev, SolveStatus status, const std::string& message)
    {
        result.x = ev.state.x;
        result.s = ev.state.s;
        result.status = status;
        result.message = message;
        result.mu_final = ev.state.mu;
        result.objective = prob.objective(ev.state.x);
        result.primal_res = prob.primal_residual(ev.state.x);
        result.dual_res = prob.dual_residual(ev.state.s, result.lambda);
        result.phi_norm = norm(prob.cone(), smoothing_residual(ev.state));
        result.gap = inner(prob.cone(), ev.state.x, ev.state.s);
        result.xi_final = ev.merits.xi;
        result.wall_time_s = seconds_since(t0);
    }

    // Algorithm: repeatedly shift the gradient target by the homotopy weight
    // t until the plain Newton decrement enters the neighborhood, then take
    // one plain Newton step.  Returns false when a cap was hit.
    bool run_phase1(Element& x, Element& s, double mu, IterateEval& ev)
    {
        const double kappa = SolverConfig::kappa;
        ev = evaluate(prob, x, s, mu, config.rho);

        // Frozen initial gradient and residual shift.
        const Element g0_x = sub(prob.c, ev.state.y);
        const Element g0_s = sub(ev.state.z, ev.state.x);

        double t = 0.0;
        if (ev.merits.delta > 0.0) t = std::max(0.0, 1.0 - kappa / (2.0 * ev.merits.delta));

        for (int j = 0; j < config.max_phase1; ++j) {
            record(ev, 1, 0, j, t);
            if (out_of_time()) return false;
            if (ev.merits.delta <= kappa) {
                x = add(x, ev.newton.dx);
                s = add(s, ev.newton.ds);
                result.lambda += ev.newton.dlambda;
                ++result.phase1_steps;
                ++result.total_newton_steps;
                ev = evaluate(prob, x, s, mu, config.rho);
                return true;
            }
            const SaddleDirection u =
                saddle_solve(prob, ev.state, ev.schur, g0_x, g0_s);
            const double unorm = s_norm(ev.state, u.dx, u.ds);
            double alpha = 1.0;
            if (t > 0.0 && unorm > 0.0)
                alpha = std::min(kappa / (4.0 * t * unorm), 1.0);
            t *= 1.0 - alpha;

            const Element r_t =
                axpy(sub(ev.state.z, ev.state.x), -t, g0_s);
            const NewtonDirection dir = newton_step(prob, ev.state, ev.schur, r_t);
            x = add(x, dir.dx);
            s = add(s, dir.ds);
            result.lambda += dir.dlambda;
            ++result.phase1_steps;
            ++result.total_newton_steps;
            if (diverged(x, s)) {
                result.divergence_flag = true;
                ev = evaluate(prob, x, s, mu, config.rho);
                return false;
            }
            ev = evaluate(prob, x, s, mu, config.rho);
        }
        return false;
    }

    // Short-step loop: Newton steps until xi <= kappa, then shrink mu.
    void run_phase2(Element& x, Element& s, double mu, double sigma, IterateEval& ev)
    {
        const double kappa = SolverConfig::kappa;
        long k = 0;
        int inner = 0;
        while (true) {
            if (result.outer_iters >= config.max_outer) {
                finalize(ev, SolveStatus::IterationLimit, "outer iteration limit");
                return;
            }
            if (out_of_time()) {
                finalize(ev, SolveStatus::IterationLimit, "time limit");
                return;
            }
            record(ev, 2, k, inner, 0.0);

            x = add(x, ev.newton.dx);
            s = add(s, ev.newton.ds);
            result.lambda += ev.newton.dlambda;
            ++result.total_newton_steps;
            ++inner;
            if (diverged(x, s)) {
                result.divergence_flag = true;
                ev = evaluate(prob, x, s, mu, config.rho);
                finalize(ev, SolveStatus::IterationLimit, "iterate diverged");
                return;
            }
            ev = evaluate(prob, x, s, mu, config.rho);

            if (ev.merits.xi > kappa) {
                if (inner >= config.max_inner) {
                    record(ev, 2, k, inner, 0.0);
                    finalize(ev, SolveStatus::NumericalError,
                             "inner loop failed to recenter within max_inner");
                    return;
                }
                continue;
            }

            record(ev, 2, k, inner, 0.0);
            result.inner_counts.push_back(inner);
            inner = 0;
            if (mu <= config.eps) {
                finalize(ev, SolveStatus::Optimal, "");
                return;
            }
            mu *= sigma;
            ++result.outer_iters;
            ++k;
            ev = evaluate(prob, x, s, mu, config.rho);
        }
    }
};

double initial_mu(const ProblemData& prob, const SolverConfig& config,
                  const Initialization& init)
{
    if (!config.mu0_heuristic) return config.mu0;
    const double nu = static_cast<double>(prob.cone().rank());
    const double gap =
        inner(prob.cone(), init.x, positive_part(prob.cone(), init.s));
    return std::max(1.0, gap / nu);
}

}  // namespace

double certified_shrink_factor(int nu, double rho)
{
    if (nu < 1) throw ParameterError("certified_shrink_factor: nu must be >= 1");
    if (rho < 1.0) throw ParameterError("certified_shrink_factor: rho must be >= 1");
    const double kappa = SolverConfig::kappa;
    const double gamma = (2.0 * kappa + std::sqrt(2.0) / rho) / (kappa + std::sqrt(2.0) / rho);
    const double lg = std::log(gamma);
    return 1.0 - lg / (2.0 * rho * std::sqrt(static_cast<double>(nu)) + lg);
}

void SolverConfig::validate() const
{
    if (!(rho >= 1.0)) throw ParameterError("config: rho must be >= 1");
    if (!(mu0 > 0.0)) throw ParameterError("config: mu0 must be positive");
    if (!(eps > 0.0)) throw ParameterError("config: eps must be positive");
    if (!certified && !(sigma > 0.0 && sigma < 1.0))
        throw ParameterError("config: fixed sigma must lie in (0, 1)");
    if (max_outer < 1 || max_inner < 1 || max_phase1 < 1)
        throw ParameterError("config: iteration limits must be positive");
}

const char* to_string(SolveStatus status)
{
    switch (status) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::IterationLimit: return "iteration_limit";
        case SolveStatus::NumericalError: return "numerical_error";
        case SolveStatus::InfeasibleSuspect: return "infeasible_suspect";
    }
    return "unknown";
}

Initialization initialize(const ProblemData& prob)
{
    Initialization init;
    init.x = prob.map.adjoint_apply(prob.gram_llt.solve(prob.b));
    init.lambda = prob.gram_llt.solve(prob.map.apply(prob.c));
    init.s = sub(prob.c, prob.map.adjoint_apply(init.lambda));
    return init;
}

PhaseOneOutcome phase1(const ProblemData& prob, const SolverConfig& config)
{
    config.validate();
    Driver driver(prob, config);
    Initialization init = initialize(prob);
    driver.result.lambda = init.lambda;
    driver.divergence_threshold =
        1e10 * (1.0 + norm(prob.cone(), init.x) + norm(prob.cone(), init.s));
    const double mu = initial_mu(prob, config, init);

    Element x = init.x, s = init.s;
    IterateEval ev;
    PhaseOneOutcome out;
    out.converged = driver.run_phase1(x, s, mu, ev);
    out.x = x;
    out.s = s;
    out.lambda = driver.result.lambda;
    out.steps = driver.result.phase1_steps;
    out.xi = ev.merits.xi;
    out.trace = std::move(driver.result.trace);
    return out;
}

SolveResult phase2(const ProblemData& prob, const SolverConfig& config, const Element& x0,
                   const Element& s0, const Eigen::VectorXd& lambda0)
{
    config.validate();
    Driver driver(prob, config);
    driver.result.lambda = lambda0;
    driver.divergence_threshold =
        1e10 * (1.0 + norm(prob.cone(), x0) + norm(prob.cone(), s0));
    const double sigma =
        config.certified ? certified_shrink_factor(prob.cone().rank(), config.rho)
                         : config.sigma;
    driver.result.sigma_used = sigma;
    Element x = x0, s = s0;
    try {
        IterateEval ev = evaluate(prob, x, s, config.mu0, config.rho);
        driver.run_phase2(x, s, config.mu0, sigma, ev);
    } catch (const Error& err) {
        driver.result.status = SolveStatus::NumericalError;
        driver.result.message = err.what();
        driver.result.x = x;
        driver.result.s = s;
        driver.result.objective = prob.objective(x);
        driver.result.wall_time_s = seconds_since(driver.t0);
    }
    return driver.result;
}

SolveResult solve(const ProblemData& prob, const SolverConfig& config)
{
    config.validate();
    Driver driver(prob, config);
    Initialization init = initialize(prob);
    driver.result.lambda = init.lambda;
    driver.divergence_threshold =
        1e10 * (1.0 + norm(prob.cone(), init.x) + norm(prob.cone(), init.s));
    const double mu = initial_mu(prob, config, init);
    const double sigma =
        config.certified ? certified_shrink_factor(prob.cone().rank(), config.rho)
                         : config.sigma;
    driver.result.sigma_used = sigma;

    Element x = init.x, s = init.s;
    try {
        IterateEval ev;
        if (!driver.run_phase1(x, s, mu, ev)) {
            driver.finalize(ev, SolveStatus::IterationLimit,
                            driver.result.divergence_flag
                                ? "phase 1 diverged"
                                : "phase 1 iteration or time limit");
            return driver.result;
        }
        if (ev.merits.xi > SolverConfig::kappa)
            warn("phase 1 exit point has xi above the neighborhood radius");
        driver.run_phase2(x, s, mu, sigma, ev);
    } catch (const Error& err) {
        driver.result.status = SolveStatus::NumericalError;
        driver.result.message = err.what();
        driver.result.x = x;
        driver.result.s = s;
        driver.result.objective = prob.objective(x);
        driver.result.wall_time_s = seconds_since(driver.t0);
    }
    return driver.result;
}

}  // namespace conewton
