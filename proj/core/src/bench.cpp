#include "conewton/bench.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "conewton/errors.hpp"

namespace conewton {

namespace {

BenchRecord run_one(const ProblemData& prob, SolverConfig config, double time_limit_s)
{
    config.time_limit_s = std::min(config.time_limit_s, time_limit_s);
    config.collect_trace = true;
    BenchRecord rec;
    rec.name = prob.name;
    try {
        const SolveResult res = solve(prob, config);
        rec.status = res.status;
        rec.time_s = res.wall_time_s;
        rec.outer_iters = res.outer_iters;
        rec.total_newton_steps = res.total_newton_steps;
        rec.primal_res = res.primal_res;
        rec.dual_res = res.dual_res;
        rec.phi_norm = res.phi_norm;
        rec.gap = res.gap;
        rec.objective = res.objective;
    } catch (const Error&) {
        rec.status = SolveStatus::NumericalError;
        rec.time_s = time_limit_s;
    }
    return rec;
}

}  // namespace

std::vector<BenchRecord> run_suite(const std::vector<ProblemData>& instances,
                                   const SolverConfig& config, double time_limit_s, int jobs)
{
    std::vector<BenchRecord> records(instances.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < instances.size(); ++i)
            records[i] = run_one(instances[i], config, time_limit_s);
        return records;
    }
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            records[i] = run_one(instances[i], config, time_limit_s);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(instances.size()));
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return records;
}

double shifted_geometric_mean(const std::vector<double>& times,
                              const std::vector<bool>& solved, double offset)
{
    if (times.empty()) throw ParameterError("shifted_geometric_mean: empty time list");
    if (!solved.empty() && solved.size() != times.size())
        throw ParameterError("shifted_geometric_mean: flag list length mismatch");
    double acc = 0.0;
    for (double t : times) {
        if (!(t >= 0.0)) throw ParameterError("shifted_geometric_mean: negative time");
        acc += std::log(std::max(1.0, t + offset));
    }
    return std::exp(acc / static_cast<double>(times.size())) - offset;
}

std::vector<ProfileSample> performance_profile(
    const std::vector<std::vector<double>>& times, double tau_max, int samples)
{
    std::vector<ProfileSample> out;
    if (times.empty()) return out;
    const size_t ninst = times.size();
    const size_t nconf = times[0].size();
    for (const auto& row : times)
        if (row.size() != nconf)
            throw ParameterError("performance_profile: ragged time matrix");

    // r[p][s] = t / best over configs; infinity marks failures.
    std::vector<std::vector<double>> ratio(ninst, std::vector<double>(nconf));
    for (size_t p = 0; p < ninst; ++p) {
        double best = std::numeric_limits<double>::infinity();
        for (double t : times[p]) best = std::min(best, t);
        for (size_t s = 0; s < nconf; ++s) {
            if (std::isinf(times[p][s]) || std::isinf(best))
                ratio[p][s] = std::numeric_limits<double>::infinity();
            else
                ratio[p][s] = times[p][s] / std::max(best, 1e-300);
        }
    }

    for (int i = 0; i < samples; ++i) {
        const double tau =
            std::exp(std::log(tau_max) * static_cast<double>(i) /
                     static_cast<double>(samples - 1));
        for (size_t s = 0; s < nconf; ++s) {
            int count = 0;
            for (size_t p = 0; p < ninst; ++p)
                if (ratio[p][s] <= tau) ++count;
            out.push_back({tau, static_cast<int>(s),
                           static_cast<double>(count) / static_cast<double>(ninst)});
        }
    }
    return out;
}

namespace {

Eigen::SparseMatrix<double> random_dense_rows(int m, int n, std::mt19937_64& gen)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(m) * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) trips.emplace_back(i, j, dist(gen));
    Eigen::SparseMatrix<double> a(m, n);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

ProblemData assemble_feasible(const ConeSpec& cone, Eigen::SparseMatrix<double> a,
                              const Element& xstar, const Element& sstar,
                              std::mt19937_64& gen, const std::string& name)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    LinearMap map(cone, a);
    Eigen::VectorXd lam(map.rows());
    for (int i = 0; i < lam.size(); ++i) lam(i) = dist(gen);
    const Eigen::VectorXd b = map.apply(xstar);
    const Element c = add(map.adjoint_apply(lam), sstar);
    return make_problem(cone, std::move(a), b, c, name);
}

Element random_interior(const ConeSpec& cone, std::mt19937_64& gen)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Element x = zero_element(cone);
    for (int b = 0; b < cone.num_blocks(); ++b) {
        const ConeBlock& blk = cone.blocks[b];
        switch (blk.kind) {
            case BlockKind::Orthant:
                for (int i = 0; i < blk.dim; ++i)
                    x.blocks[b].v(i) = 0.2 + std::abs(dist(gen));
                break;
            case BlockKind::SecondOrder: {
                Eigen::VectorXd bar(blk.dim - 1);
                for (int i = 0; i < bar.size(); ++i) bar(i) = dist(gen);
                x.blocks[b].v(0) = bar.norm() + 0.2 + std::abs(dist(gen));
                x.blocks[b].v.tail(blk.dim - 1) = bar;
                break;
            }
            case BlockKind::Psd: {
                Eigen::MatrixXd g(blk.dim, blk.dim);
                for (int i = 0; i < blk.dim; ++i)
                    for (int j = 0; j < blk.dim; ++j) g(i, j) = dist(gen);
                x.blocks[b].m = g * g.transpose() / blk.dim +
                                0.2 * Eigen::MatrixXd::Identity(blk.dim, blk.dim);
                break;
            }
        }
    }
    return x;
}

}  // namespace

ProblemData random_feasible_lp(int nu, int m, unsigned seed)
{
    if (nu < 2 || m < 1 || m >= nu)
        throw ParameterError("random_feasible_lp: need 1 <= m < nu");
    std::mt19937_64 gen(seed);
    const ConeSpec cone = ConeSpec::orthant(nu);
    auto a = random_dense_rows(m, nu, gen);
    const Element xstar = random_interior(cone, gen);
    const Element sstar = random_interior(cone, gen);
    return assemble_feasible(cone, std::move(a), xstar, sstar, gen,
                             "rand-lp-nu" + std::to_string(nu) + "-s" + std::to_string(seed));
}

ProblemData random_feasible_socp(int nu, int m, unsigned seed)
{
    if (nu < 2 || m < 1) throw ParameterError("random_feasible_socp: need nu >= 2, m >= 1");
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> dim_dist(3, 6);
    ConeSpec cone;
    int r = nu;
    while (r >= 2) {
        const int d = dim_dist(gen);
        cone.blocks.push_back({BlockKind::SecondOrder, d});
        r -= 2;
    }
    if (r > 0) cone.blocks.push_back({BlockKind::Orthant, r});
    if (m >= cone.ambient_dim())
        throw ParameterError("random_feasible_socp: m too large for the generated cone");
    auto a = random_dense_rows(m, cone.ambient_dim(), gen);
    const Element xstar = random_interior(cone, gen);
    const Element sstar = random_interior(cone, gen);
    return assemble_feasible(cone, std::move(a), xstar, sstar, gen,
                             "rand-socp-nu" + std::to_string(nu) + "-s" +
                                 std::to_string(seed));
}

ScalingReport scaling_study(const std::vector<int>& nu_list, double eps,
                            const SolverConfig& base_config, unsigned seed,
                            int instances_per_nu)
{
    SolverConfig config = base_config;
    config.eps = eps;
    config.certified = true;

    ScalingReport report;
    for (int nu : nu_list) {
        for (int rep = 0; rep < instances_per_nu; ++rep) {
            const int m = std::max(2, std::min(nu / 2, 64));
            const ProblemData prob =
                random_feasible_lp(nu, m, seed + 977u * static_cast<unsigned>(nu) + rep);
            const SolveResult res = solve(prob, config);
            ScalingRow row;
            row.nu = nu;
            row.total_newton_steps = res.total_newton_steps;
            row.outer_iters = res.outer_iters;
            row.predictor = std::sqrt(static_cast<double>(nu)) *
                            std::log(config.mu0 / config.eps);
            row.recentered_in_one = true;
            for (size_t k = 1; k < res.inner_counts.size(); ++k)
                if (res.inner_counts[k] != 1) row.recentered_in_one = false;
            report.rows.push_back(row);
        }
    }

    double sxy = 0.0, sxx = 0.0, sy = 0.0;
    for (const ScalingRow& row : report.rows) {
        sxy += row.predictor * static_cast<double>(row.total_newton_steps);
        sxx += row.predictor * row.predictor;
        sy += static_cast<double>(row.total_newton_steps);
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double ybar = sy / std::max<size_t>(report.rows.size(), 1);
    double ss_res = 0.0, ss_tot = 0.0;
    for (const ScalingRow& row : report.rows) {
        const double fit = report.slope * row.predictor;
        ss_res += (row.total_newton_steps - fit) * (row.total_newton_steps - fit);
        ss_tot += (row.total_newton_steps - ybar) * (row.total_newton_steps - ybar);
    }
    report.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return report;
}

}  // namespace conewton
