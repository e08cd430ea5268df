#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "conewton/bench.hpp"
#include "conewton/model_io.hpp"
#include "conewton/solver.hpp"

using namespace conewton;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIterationLimit = 4;

struct CommonOpts {
    double rho = 1.0;
    double mu0 = 1.0;
    double eps = 1e-8;
    std::string sigma = "certified";
    std::string format = "auto";
    double time_limit = 1e9;
    bool prune_rows = false;
    bool mu0_heuristic = false;
    std::string out;
    std::string trace;
    unsigned seed = 1;
    int jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts)
{
    cmd->add_option("--rho", opts.rho, "Smoothing weight (>= 1)")
        ->check(CLI::Range(1.0, 1e12));
    cmd->add_option("--mu0", opts.mu0, "Initial barrier parameter (> 0)");
    cmd->add_option("--eps", opts.eps, "Target accuracy on mu");
    cmd->add_option("--sigma", opts.sigma,
                    "Shrink factor: 'certified' or a value in (0, 1)");
    cmd->add_option("--time-limit", opts.time_limit, "Wall clock limit in seconds");
    cmd->add_flag("--prune-rows", opts.prune_rows, "Drop linearly dependent rows");
    cmd->add_flag("--mu0-heuristic", opts.mu0_heuristic,
                  "Scale mu0 from the initialization gap");
    cmd->add_option("--out", opts.out, "Output file path");
    cmd->add_option("--trace", opts.trace, "Per-iteration trace CSV path");
}

SolverConfig make_config(const CommonOpts& opts)
{
    SolverConfig cfg;
    cfg.rho = opts.rho;
    cfg.mu0 = opts.mu0;
    cfg.eps = opts.eps;
    cfg.time_limit_s = opts.time_limit;
    cfg.mu0_heuristic = opts.mu0_heuristic;
    if (opts.sigma == "certified") {
        cfg.certified = true;
    } else {
        cfg.certified = false;
        try {
            cfg.sigma = std::stod(opts.sigma);
        } catch (const std::exception&) {
            throw ParameterError("--sigma must be 'certified' or a number in (0, 1)");
        }
        if (!(cfg.sigma > 0.0 && cfg.sigma < 1.0))
            throw ParameterError("--sigma must lie in (0, 1)");
    }
    cfg.validate();
    return cfg;
}

std::string detect_format(const std::string& path, const std::string& requested)
{
    if (requested != "auto") return requested;
    auto ends_with = [&](const std::string& suffix) {
        return path.size() >= suffix.size() &&
               path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".mps") || ends_with(".MPS") || ends_with(".qps")) return "mps";
    if (ends_with(".json")) return "conic";
    if (ends_with(".mtx")) return "lasso";
    throw ParameterError("cannot infer --format for '" + path + "'");
}

ProblemData load_problem(const std::string& path, const CommonOpts& opts)
{
    const std::string fmt = detect_format(path, opts.format);
    if (fmt == "mps") return read_mps(path, opts.prune_rows);
    if (fmt == "conic") return read_conic_json(path, opts.prune_rows);
    if (fmt == "lasso") return build_sqrt_lasso(make_lasso_spec(read_matrix_market(path)));
    throw ParameterError("unknown --format '" + fmt + "'");
}

json config_json(const SolverConfig& cfg, unsigned seed)
{
    json j;
    j["rho"] = cfg.rho;
    j["mu0"] = cfg.mu0;
    j["eps"] = cfg.eps;
    j["sigma"] = cfg.certified ? json("certified") : json(cfg.sigma);
    j["kappa"] = SolverConfig::kappa;
    j["max_outer"] = cfg.max_outer;
    j["max_inner"] = cfg.max_inner;
    j["max_phase1"] = cfg.max_phase1;
    j["mu0_heuristic"] = cfg.mu0_heuristic;
    j["seed"] = seed;
    return j;
}

void write_trace_csv(const SolveResult& res, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << "k,j,mu,delta,xi,primal_res,dual_res,phi_norm,time_s\n";
    out << std::setprecision(17);
    for (const TraceRecord& rec : res.trace) {
        const long k = rec.phase == 1 ? -1 : rec.k;
        out << k << ',' << rec.j << ',' << rec.mu << ',' << rec.delta << ',' << rec.xi
            << ',' << rec.primal_res << ',' << rec.dual_res << ',' << rec.phi_norm << ','
            << rec.time_s << '\n';
    }
}

int status_exit_code(SolveStatus status)
{
    switch (status) {
        case SolveStatus::Optimal: return kExitOk;
        case SolveStatus::NumericalError: return kExitNumerical;
        case SolveStatus::IterationLimit:
        case SolveStatus::InfeasibleSuspect: return kExitIterationLimit;
    }
    return kExitNumerical;
}

int cmd_solve(const std::string& input, const CommonOpts& opts)
{
    const SolverConfig cfg = make_config(opts);
    const ProblemData prob = load_problem(input, opts);
    const SolveResult res = solve(prob, cfg);

    json j;
    j["instance"] = prob.name;
    j["status"] = to_string(res.status);
    j["objective"] = res.objective;
    j["residuals"] = {{"primal", res.primal_res},
                      {"dual", res.dual_res},
                      {"phi", res.phi_norm},
                      {"gap", res.gap}};
    j["mu_final"] = res.mu_final;
    j["sigma_used"] = res.sigma_used;
    j["iterations"] = {{"outer", res.outer_iters},
                       {"newton_total", res.total_newton_steps},
                       {"phase1", res.phase1_steps}};
    j["divergence_flag"] = res.divergence_flag;
    if (!res.message.empty()) j["message"] = res.message;
    j["config"] = config_json(cfg, opts.seed);
    const Eigen::VectorXd xc = to_coords(prob.cone(), res.x);
    const Eigen::VectorXd sc = functional_coords(prob.cone(), res.s);
    j["solution"] = {
        {"x", std::vector<double>(xc.data(), xc.data() + xc.size())},
        {"s", std::vector<double>(sc.data(), sc.data() + sc.size())},
        {"lambda", std::vector<double>(res.lambda.data(),
                                       res.lambda.data() + res.lambda.size())}};

    if (!opts.out.empty()) {
        std::ofstream out(opts.out);
        out << j.dump(2) << "\n";
    } else {
        std::cout << j.dump(2) << "\n";
    }
    if (!opts.trace.empty()) write_trace_csv(res, opts.trace);

    std::cout << "status=" << to_string(res.status) << " objective=" << std::setprecision(12)
              << res.objective << " outer=" << res.outer_iters
              << " newton=" << res.total_newton_steps << " mu=" << res.mu_final << "\n";
    return status_exit_code(res.status);
}

int cmd_convert(const std::string& input, const CommonOpts& opts)
{
    if (opts.out.empty()) throw ParameterError("convert requires --out");
    const ProblemData prob = load_problem(input, opts);
    write_conic_json(prob, opts.out);
    std::cout << "status=converted instance=" << prob.name << " m=" << prob.m()
              << " n=" << prob.cone().ambient_dim() << "\n";
    return kExitOk;
}

int cmd_check(const std::string& input, const std::string& candidate_path,
              const CommonOpts& opts)
{
    const ProblemData prob = load_problem(input, opts);
    std::ifstream in(candidate_path);
    if (!in) throw ParseError(candidate_path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(candidate_path + ": " + std::string(e.what()));
    }
    auto get_vec = [&](const char* field) {
        if (!j.contains(field))
            throw ParseError(candidate_path + ": missing field '" + std::string(field) +
                             "'");
        const auto v = j[field].get<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()).eval();
    };
    const Eigen::VectorXd xv = get_vec("x");
    const Eigen::VectorXd sv = get_vec("s");
    const Eigen::VectorXd lv = get_vec("lambda");
    if (xv.size() != prob.cone().ambient_dim() || sv.size() != prob.cone().ambient_dim() ||
        lv.size() != prob.m())
        throw ParseError(candidate_path + ": candidate dimensions do not match problem");
    const Element x = from_coords(prob.cone(), xv);
    const Element s = riesz_element(prob.cone(), sv);

    const double gap = inner(prob.cone(), x, s);
    const double mu = gap / static_cast<double>(prob.cone().rank());
    const double comp =
        mu > 0.0 ? norm(prob.cone(), sub(jordan_product(prob.cone(), x, s),
                                         scale(mu, identity(prob.cone()))))
                 : norm(prob.cone(), jordan_product(prob.cone(), x, s));

    json rep;
    rep["instance"] = prob.name;
    rep["objective"] = prob.objective(x);
    rep["primal_res"] = prob.primal_residual(x);
    rep["dual_res"] = prob.dual_residual(s, lv);
    rep["gap"] = gap;
    rep["mu_estimate"] = mu;
    rep["complementarity_res"] = comp;
    rep["x_min_eig"] = min_eigenvalue(prob.cone(), x);
    rep["s_min_eig"] = min_eigenvalue(prob.cone(), s);
    if (!opts.out.empty()) {
        std::ofstream out(opts.out);
        out << rep.dump(2) << "\n";
    } else {
        std::cout << rep.dump(2) << "\n";
    }
    std::cout << "status=checked primal_res=" << rep["primal_res"].get<double>()
              << " dual_res=" << rep["dual_res"].get<double>() << " gap=" << gap << "\n";
    return kExitOk;
}

int cmd_bench(const std::vector<std::string>& inputs, const CommonOpts& opts)
{
    const SolverConfig cfg = make_config(opts);
    std::vector<ProblemData> instances;
    for (const std::string& path : inputs) instances.push_back(load_problem(path, opts));
    const auto records = run_suite(instances, cfg, opts.time_limit, opts.jobs);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        out = &file;
    }
    *out << "instance,status,time_s,outer_iters,newton_steps,primal_res,dual_res,"
            "phi_norm,gap,objective\n";
    *out << std::setprecision(17);
    int solved = 0;
    std::vector<double> times;
    std::vector<bool> flags;
    for (const BenchRecord& rec : records) {
        *out << rec.name << ',' << to_string(rec.status) << ',' << rec.time_s << ','
             << rec.outer_iters << ',' << rec.total_newton_steps << ',' << rec.primal_res
             << ',' << rec.dual_res << ',' << rec.phi_norm << ',' << rec.gap << ','
             << rec.objective << '\n';
        solved += rec.solved() ? 1 : 0;
        times.push_back(rec.solved() ? rec.time_s : opts.time_limit);
        flags.push_back(rec.solved());
    }
    const double sgm = records.empty() ? 0.0 : shifted_geometric_mean(times, flags);
    std::cout << "status=bench solved=" << solved << "/" << records.size()
              << " sgm=" << sgm << "\n";
    return kExitOk;
}

int cmd_profile(const std::vector<std::string>& inputs, const std::string& sigmas_arg,
                const CommonOpts& opts)
{
    std::vector<std::string> sigma_specs;
    std::stringstream ss(sigmas_arg);
    std::string item;
    while (std::getline(ss, item, ',')) sigma_specs.push_back(item);
    if (sigma_specs.empty()) throw ParameterError("--sigmas must list at least one value");

    std::vector<ProblemData> instances;
    for (const std::string& path : inputs) instances.push_back(load_problem(path, opts));

    std::vector<std::vector<double>> times(instances.size(),
                                           std::vector<double>(sigma_specs.size()));
    for (size_t s = 0; s < sigma_specs.size(); ++s) {
        CommonOpts conf = opts;
        conf.sigma = sigma_specs[s];
        const SolverConfig cfg = make_config(conf);
        const auto records = run_suite(instances, cfg, opts.time_limit, opts.jobs);
        for (size_t p = 0; p < records.size(); ++p)
            times[p][s] = records[p].solved()
                              ? records[p].time_s
                              : std::numeric_limits<double>::infinity();
    }
    const auto samples = performance_profile(times);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        out = &file;
    }
    for (size_t s = 0; s < sigma_specs.size(); ++s)
        *out << "# config " << s << ": sigma=" << sigma_specs[s] << "\n";
    *out << "tau,config,fraction\n";
    *out << std::setprecision(17);
    for (const ProfileSample& sample : samples)
        *out << sample.tau << ',' << sample.config << ',' << sample.fraction << '\n';
    std::cout << "status=profile instances=" << instances.size()
              << " configs=" << sigma_specs.size() << "\n";
    return kExitOk;
}

int cmd_scaling(const std::string& nus_arg, int reps, const CommonOpts& opts)
{
    std::vector<int> nus;
    std::stringstream ss(nus_arg);
    std::string item;
    while (std::getline(ss, item, ',')) nus.push_back(std::stoi(item));
    if (nus.empty()) throw ParameterError("--nus must list at least one rank");

    CommonOpts conf = opts;
    conf.sigma = "certified";
    const SolverConfig cfg = make_config(conf);
    const ScalingReport rep = scaling_study(nus, opts.eps, cfg, opts.seed, reps);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!opts.out.empty()) {
        file.open(opts.out);
        out = &file;
    }
    *out << "nu,newton_steps,outer_iters,predictor,recentered_in_one\n";
    *out << std::setprecision(17);
    for (const ScalingRow& row : rep.rows)
        *out << row.nu << ',' << row.total_newton_steps << ',' << row.outer_iters << ','
             << row.predictor << ',' << (row.recentered_in_one ? 1 : 0) << '\n';
    *out << "# slope," << rep.slope << "\n# r_squared," << rep.r_squared << "\n";
    std::cout << "status=scaling slope=" << rep.slope << " r2=" << rep.r_squared << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Path-following smoothing Newton solver for symmetric cone programs"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input, candidate, sigmas = "certified";
    std::vector<std::string> inputs;
    std::string nus = "8,32,128,512";
    int reps = 3;

    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve one instance");
    solve_cmd->add_option("input", input, "Problem file")->required();
    solve_cmd->add_option("--format", opts.format, "mps | conic | lasso")
        ->check(CLI::IsMember({"auto", "mps", "conic", "lasso"}));
    add_common(solve_cmd, opts);

    CLI::App* convert_cmd = app.add_subcommand("convert", "Convert to conic JSON");
    convert_cmd->add_option("input", input, "Problem file")->required();
    convert_cmd->add_option("--format", opts.format, "mps | conic | lasso")
        ->check(CLI::IsMember({"auto", "mps", "conic", "lasso"}));
    add_common(convert_cmd, opts);

    CLI::App* check_cmd = app.add_subcommand("check", "Report KKT residuals of a candidate");
    check_cmd->add_option("input", input, "Problem file")->required();
    check_cmd->add_option("candidate", candidate, "Candidate JSON with x, s, lambda")
        ->required();
    check_cmd->add_option("--format", opts.format, "mps | conic | lasso")
        ->check(CLI::IsMember({"auto", "mps", "conic", "lasso"}));
    add_common(check_cmd, opts);

    CLI::App* bench_cmd = app.add_subcommand("bench", "Batch-solve a suite");
    bench_cmd->add_option("inputs", inputs, "Problem files")->required();
    bench_cmd->add_option("--format", opts.format, "mps | conic | lasso")
        ->check(CLI::IsMember({"auto", "mps", "conic", "lasso"}));
    bench_cmd->add_option("--jobs", opts.jobs, "Parallel instance solves");
    add_common(bench_cmd, opts);

    CLI::App* profile_cmd = app.add_subcommand("profile", "Performance profiles");
    profile_cmd->add_option("inputs", inputs, "Problem files")->required();
    profile_cmd->add_option("--sigmas", sigmas, "Comma list of sigma configs");
    profile_cmd->add_option("--format", opts.format, "mps | conic | lasso")
        ->check(CLI::IsMember({"auto", "mps", "conic", "lasso"}));
    profile_cmd->add_option("--jobs", opts.jobs, "Parallel instance solves");
    add_common(profile_cmd, opts);

    CLI::App* scaling_cmd = app.add_subcommand("scaling", "Iteration scaling study");
    scaling_cmd->add_option("--nus", nus, "Comma list of ranks");
    scaling_cmd->add_option("--reps", reps, "Instances per rank");
    scaling_cmd->add_option("--seed", opts.seed, "Random seed");
    add_common(scaling_cmd, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(input, opts);
        if (convert_cmd->parsed()) return cmd_convert(input, opts);
        if (check_cmd->parsed()) return cmd_check(input, candidate, opts);
        if (bench_cmd->parsed()) return cmd_bench(inputs, opts);
        if (profile_cmd->parsed()) return cmd_profile(inputs, sigmas, opts);
        if (scaling_cmd->parsed()) return cmd_scaling(nus, reps, opts);
    } catch (const ParameterError& e) {
        std::cout << "status=usage_error message=\"" << e.what() << "\"\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cout << "status=parse_error message=\"" << e.what() << "\"\n";
        return kExitParse;
    } catch (const StructuralError& e) {
        std::cout << "status=parse_error message=\"" << e.what() << "\"\n";
        return kExitParse;
    } catch (const Error& e) {
        std::cout << "status=numerical_error message=\"" << e.what() << "\"\n";
        return kExitNumerical;
    }
    return kExitUsage;
}
