// Command-line front end: parses flags into a RunConfig and hands off to cli::run.

#include "pctladp/cli/run.hpp"

#include <CLI11.hpp>

namespace {

template <class T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v)
{
    if (v)
        j[key] = *v;
}

}  // namespace

int main(int argc, char** argv)
{
    using pctladp::cli::RunConfig;
    RunConfig cfg;
    CLI::App app{"PCTL-constrained approximate dynamic programming"};
    app.set_version_flag("--version", pctladp::version);

    std::string mode = "solve-exact";
    std::string config_path;
    std::optional<double> gamma, penalty;
    app.add_option("--mode", mode, "solve-exact | solve-adp | check-pctl | experiment-1 | experiment-2")
        ->check(CLI::IsMember({"solve-exact", "solve-adp", "check-pctl", "experiment-1", "experiment-2"}));
    app.add_option("--config", config_path, "JSON run config; its keys override the flags");
    app.add_option("--mdp", cfg.mdp_path, "MDP JSON file");
    app.add_option("--grid", cfg.grid_path, "gridworld JSON file (defaults to the built-in layout)");
    app.add_option("--pctl", cfg.pctl, "PCTL formula, or a file holding one");
    app.add_option("--theta", cfg.theta_path, "theta JSON for check-pctl (default: the exact softmax policy)");
    app.add_option("--centers", cfg.centers, "kernel centers by state name (MDP input)");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--tau", cfg.tau, "softmax temperature (0 = hard max in solve-exact)");
    app.add_option("--sigma", cfg.sigma, "kernel width");
    app.add_option("--gamma", gamma, "discount override");
    app.add_option("--epsilon", cfg.epsilon, "truncation tolerance for unbounded formulas");
    app.add_option("--penalty", penalty, "blocked-state penalty for until constraints");
    app.add_option("--check-samples", cfg.check_samples, "trajectories per empirical check");
    app.add_option("--repeats", cfg.repeats, "learning-curve repeats in experiment-1");
    app.add_option("--deltas", cfg.deltas, "probability bounds swept in experiment-2");
    app.add_option("--vi-tol", cfg.vi_tol, "value-iteration tolerance");
    app.add_option("--vi-max-iters", cfg.vi_max_iters, "value-iteration sweep cap");

    std::optional<double> eta1, eta2, nu1, nu2, lambda0, xi0, b, rho, eps0, eps_decay, feas_tol, theta_bound;
    std::optional<int> max_inner, stop_window, max_outer;
    std::optional<std::string> stop, step_rule;
    std::optional<bool> exact_feasibility, baseline;
    auto* solver = app.add_option_group("solver");
    solver->add_option("--eta1", eta1, "theta step size");
    solver->add_option("--eta2", eta2, "multiplier step size");
    solver->add_option("--nu1", nu1, "Bellman hinge weight");
    solver->add_option("--nu2", nu2, "chance hinge weight");
    solver->add_option("--lambda0", lambda0, "initial Bellman multiplier");
    solver->add_option("--xi0", xi0, "initial chance multiplier");
    solver->add_option("--b", b, "multiplier growth factor");
    solver->add_option("--rho", rho, "hinge decrease ratio");
    solver->add_option("--eps0", eps0, "initial inner tolerance");
    solver->add_option("--eps-decay", eps_decay, "inner tolerance divisor per outer step");
    solver->add_option("--stop", stop, "gradient_norm | step_norm");
    solver->add_option("--step-rule", step_rule, "recursive | harmonic | constant");
    solver->add_option("--max-inner", max_inner, "inner iteration cap");
    solver->add_option("--stop-window", stop_window, "estimates averaged by the stop test");
    solver->add_option("--max-outer", max_outer, "outer iteration cap");
    solver->add_option("--feas-tol", feas_tol, "feasibility tolerance");
    solver->add_option("--exact-feasibility", exact_feasibility, "also require max B(g) <= feas-tol");
    solver->add_option("--theta-bound", theta_bound, "theta norm bound");
    solver->add_option("--baseline", baseline, "subtract a return baseline in F estimates");

    std::optional<int> n_onpolicy, len_onpolicy, n_chance, len_chance;
    std::optional<std::string> onpolicy_start;
    auto* sampler = app.add_option_group("sampler");
    sampler->add_option("--n-onpolicy", n_onpolicy, "on-policy trajectories per estimate");
    sampler->add_option("--len-onpolicy", len_onpolicy, "on-policy trajectory length");
    sampler->add_option("--onpolicy-start", onpolicy_start, "initial | uniform");
    sampler->add_option("--n-chance", n_chance, "constraint trajectories per estimate");
    sampler->add_option("--len-chance", len_chance, "constraint trajectory length cap");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pctladp::cli::exit_input;
    }

    try {
        cfg.mode = pctladp::cli::parse_mode(mode);
        cfg.gamma = gamma;
        cfg.penalty = penalty;
        put(cfg.solver, "eta1", eta1);
        put(cfg.solver, "eta2", eta2);
        put(cfg.solver, "nu1", nu1);
        put(cfg.solver, "nu2", nu2);
        put(cfg.solver, "lambda0", lambda0);
        put(cfg.solver, "xi0", xi0);
        put(cfg.solver, "b", b);
        put(cfg.solver, "rho", rho);
        put(cfg.solver, "eps0", eps0);
        put(cfg.solver, "eps_decay", eps_decay);
        put(cfg.solver, "stop", stop);
        put(cfg.solver, "step_rule", step_rule);
        put(cfg.solver, "max_inner", max_inner);
        put(cfg.solver, "stop_window", stop_window);
        put(cfg.solver, "max_outer", max_outer);
        put(cfg.solver, "feas_tol", feas_tol);
        put(cfg.solver, "exact_feasibility", exact_feasibility);
        put(cfg.solver, "theta_bound", theta_bound);
        put(cfg.solver, "baseline", baseline);
        put(cfg.sampler, "n_onpolicy", n_onpolicy);
        put(cfg.sampler, "len_onpolicy", len_onpolicy);
        put(cfg.sampler, "onpolicy_start", onpolicy_start);
        put(cfg.sampler, "n_chance", n_chance);
        put(cfg.sampler, "len_chance", len_chance);
        if (!config_path.empty())
            pctladp::cli::apply_json(cfg, pctladp::io::read_json_file(config_path));
    } catch (const pctladp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pctladp::cli::exit_input;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pctladp::cli::exit_input;
    }
    return pctladp::cli::run(cfg);
}
