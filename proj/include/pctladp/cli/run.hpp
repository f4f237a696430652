#pragma once

#include "pctladp/experiments.hpp"
#include "pctladp/io/config_json.hpp"

#include <filesystem>
#include <iostream>

namespace pctladp::cli {

enum class Mode { solve_exact, solve_adp, check_pctl, experiment_1, experiment_2 };

inline constexpr int exit_ok = 0;
inline constexpr int exit_input = 2;
inline constexpr int exit_solver = 3;
inline constexpr int exit_check = 4;

inline Mode parse_mode(const std::string& s)
{
    if (s == "solve-exact")
        return Mode::solve_exact;
    if (s == "solve-adp")
        return Mode::solve_adp;
    if (s == "check-pctl")
        return Mode::check_pctl;
    if (s == "experiment-1")
        return Mode::experiment_1;
    if (s == "experiment-2")
        return Mode::experiment_2;
    throw InputError("unknown mode '" + s + "' (solve-exact, solve-adp, check-pctl, experiment-1, experiment-2)");
}

inline const char* to_string(Mode m)
{
    switch (m) {
    case Mode::solve_exact: return "solve-exact";
    case Mode::solve_adp: return "solve-adp";
    case Mode::check_pctl: return "check-pctl";
    case Mode::experiment_1: return "experiment-1";
    case Mode::experiment_2: return "experiment-2";
    }
    return "?";
}

struct RunConfig {
    Mode mode = Mode::solve_exact;
    std::string mdp_path;
    std::string grid_path;
    /// Formula text, or a path to a file holding it.
    std::string pctl;
    std::uint64_t seed = 1;
    std::string out = "out";
    double tau = 5.0;
    double sigma = 5.0;
    std::optional<double> gamma;
    double epsilon = 0.01;
    std::optional<double> penalty;
    int check_samples = 20000;
    int repeats = 20;
    std::vector<double> deltas{0.0, 0.1, 0.2, 0.3};
    std::string theta_path;
    /// Kernel centers for a JSON MDP, by state name; every state when empty.
    std::vector<std::string> centers;
    double vi_tol = 1e-8;
    int vi_max_iters = 100000;
    /// Overrides applied on top of the mode's solver and sampler defaults.
    nlohmann::json solver = nlohmann::json::object();
    nlohmann::json sampler = nlohmann::json::object();
};

inline nlohmann::json to_json(const RunConfig& c)
{
    nlohmann::json j;
    j["mode"] = to_string(c.mode);
    j["mdp"] = c.mdp_path;
    j["grid"] = c.grid_path;
    j["pctl"] = c.pctl;
    j["seed"] = c.seed;
    j["out"] = c.out;
    j["tau"] = c.tau;
    j["sigma"] = c.sigma;
    j["gamma"] = c.gamma ? nlohmann::json(*c.gamma) : nlohmann::json(nullptr);
    j["epsilon"] = c.epsilon;
    j["penalty"] = c.penalty ? nlohmann::json(*c.penalty) : nlohmann::json(nullptr);
    j["check_samples"] = c.check_samples;
    j["repeats"] = c.repeats;
    j["deltas"] = c.deltas;
    j["theta"] = c.theta_path;
    j["centers"] = c.centers;
    j["vi_tol"] = c.vi_tol;
    j["vi_max_iters"] = c.vi_max_iters;
    j["solver"] = c.solver;
    j["sampler"] = c.sampler;
    return j;
}

/// Applies the keys present in `j` to `c`; unknown keys are input errors.
inline void apply_json(RunConfig& c, const nlohmann::json& j)
{
    io::detail::reject_unknown(j,
                               {"mode", "mdp", "grid", "pctl", "seed", "out", "tau", "sigma", "gamma", "epsilon", "penalty",
                                "check_samples", "repeats", "deltas", "theta", "centers", "vi_tol", "vi_max_iters", "solver",
                                "sampler"},
                               "run config");
    if (j.contains("mode"))
        c.mode = parse_mode(j.at("mode").get<std::string>());
    io::detail::read(j, "mdp", c.mdp_path);
    io::detail::read(j, "grid", c.grid_path);
    io::detail::read(j, "pctl", c.pctl);
    io::detail::read(j, "seed", c.seed);
    io::detail::read(j, "out", c.out);
    io::detail::read(j, "tau", c.tau);
    io::detail::read(j, "sigma", c.sigma);
    io::detail::read(j, "gamma", c.gamma);
    io::detail::read(j, "epsilon", c.epsilon);
    io::detail::read(j, "penalty", c.penalty);
    io::detail::read(j, "check_samples", c.check_samples);
    io::detail::read(j, "repeats", c.repeats);
    io::detail::read(j, "deltas", c.deltas);
    io::detail::read(j, "theta", c.theta_path);
    io::detail::read(j, "centers", c.centers);
    io::detail::read(j, "vi_tol", c.vi_tol);
    io::detail::read(j, "vi_max_iters", c.vi_max_iters);
    if (j.contains("solver"))
        c.solver.update(j.at("solver"));
    if (j.contains("sampler"))
        c.sampler.update(j.at("sampler"));
}

inline void validate(const RunConfig& c)
{
    if (!c.mdp_path.empty() && !c.grid_path.empty())
        throw InputError("give either --mdp or --grid, not both");
    for (const auto* p : {&c.mdp_path, &c.grid_path, &c.theta_path})
        if (!p->empty() && !std::filesystem::exists(*p))
            throw InputError("file '" + *p + "' does not exist");
    if (!(c.tau >= 0.0))
        throw InputError("tau must be nonnegative");
    if (c.mode != Mode::solve_exact && !(c.tau > 0.0))
        throw InputError("tau must be positive outside solve-exact");
    if (!(c.sigma > 0.0))
        throw InputError("sigma must be positive");
    if (c.gamma && !(*c.gamma > 0.0 && *c.gamma <= 1.0))
        throw InputError("gamma must lie in (0, 1]");
    if (!(c.epsilon > 0.0))
        throw InputError("epsilon must be positive");
    if (c.check_samples < 1 || c.repeats < 1)
        throw InputError("check_samples and repeats must be at least 1");
    for (double d : c.deltas)
        if (!(d >= 0.0 && d <= 1.0))
            throw InputError("every delta must lie in [0, 1]");
    if (c.mode == Mode::check_pctl && c.pctl.empty())
        throw InputError("check-pctl needs --pctl");
}

namespace detail {

inline std::string read_formula(const std::string& arg)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(arg, ec))
        return arg;
    std::ifstream in(arg);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

/// The model, plus the grid it came from when there is one.
struct Model {
    Mdp mdp;
    std::optional<grid::GridConfig> grid;
};

inline Model load_model(const RunConfig& c, const grid::GridConfig& fallback)
{
    Model m;
    if (!c.mdp_path.empty()) {
        m.mdp = load_mdp(c.mdp_path);
        if (c.gamma)
            m.mdp.discount = *c.gamma;
    } else {
        m.grid = c.grid_path.empty() ? fallback : io::load_grid(c.grid_path);
        if (c.gamma)
            m.grid->discount = *c.gamma;
        m.mdp = grid::build(*m.grid);
    }
    return m;
}

inline std::vector<pctl::ChanceConstraint> constraints(const RunConfig& c, const Mdp& mdp)
{
    if (c.pctl.empty())
        return {};
    pctl::CompileOptions opts;
    opts.epsilon = c.epsilon;
    opts.penalty = c.penalty;
    return pctl::compile_all(pctl::parse(read_formula(c.pctl)), mdp, opts);
}

inline approx::Basis basis_for(const RunConfig& c, const Model& m)
{
    if (m.grid && c.centers.empty())
        return approx::ggk_basis(m.mdp, grid::kernel_centers(*m.grid), c.sigma);
    std::vector<StateId> centers;
    if (c.centers.empty())
        for (StateId s = 0; s < m.mdp.num_states(); ++s)
            centers.push_back(s);
    for (const auto& name : c.centers)
        centers.push_back(m.mdp.state_index(name));
    return approx::ggk_basis(m.mdp, centers, c.sigma);
}

inline experiments::GridSetup base_setup(Mode mode)
{
    return mode == Mode::experiment_2 ? experiments::experiment2_setup() : experiments::experiment1_setup();
}

/// Flag and config-file overrides on top of a mode's defaults. On-policy starts default
/// to uniform on grids and to the MDP's initial distribution otherwise.
inline void apply_overrides(const RunConfig& c, experiments::GridSetup& s, int num_states, bool uniform_starts)
{
    s.tau = c.tau;
    s.sigma = c.sigma;
    s.solver = io::solver_from_json(c.solver, s.solver);
    s.solver.seed = c.seed;
    s.sampler.onpolicy_init.reset();
    if (uniform_starts)
        s.sampler.onpolicy_init = Vector::Constant(num_states, 1.0 / num_states);
    s.sampler = io::sampler_from_json(c.sampler, num_states, s.sampler);
}

struct Writer {
    std::filesystem::path dir;
    nlohmann::json config;
    std::uint64_t seed;

    void csv(const std::string& name, const io::CsvTable& t) const { io::write_csv((dir / name).string(), t, config, seed); }
    void json(const std::string& name, const nlohmann::json& j) const { io::write_text((dir / name).string(), j.dump(2) + "\n"); }
};

inline io::CsvTable value_table(const Mdp& mdp, const Vector& V)
{
    io::CsvTable t({"state", "name", "value"});
    for (int s = 0; s < mdp.num_states(); ++s)
        t.row().add(s).add(mdp.state_names[s]).add(V(s));
    return t;
}

inline io::CsvTable per_action_table(const Mdp& mdp, const Matrix& M)
{
    std::vector<std::string> head{"state", "name"};
    for (const auto& a : mdp.action_names)
        head.push_back(a);
    io::CsvTable t(head);
    for (int s = 0; s < mdp.num_states(); ++s) {
        t.row().add(s).add(mdp.state_names[s]);
        for (int a = 0; a < mdp.num_actions(); ++a)
            t.add(M(s, a));
    }
    return t;
}

inline io::CsvTable check_table(const Mdp& mdp, const std::vector<pctl::ChanceConstraint>& cs,
                                const std::vector<pctl::CheckReport>& emp, const std::vector<pctl::CheckReport>& exact)
{
    io::CsvTable t({"constraint", "formula", "state", "name", "samples", "satisfaction", "measure", "std_error", "beta", "verdict",
                    "exact_satisfaction", "exact_measure", "exact_verdict"});
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t k = 0; k < emp[i].states.size(); ++k) {
            const auto& e = emp[i].states[k];
            const auto& x = exact[i].states[k];
            t.row()
                .add(static_cast<int>(i))
                .add(cs[i].formula)
                .add(e.state)
                .add(mdp.state_names[e.state])
                .add(e.samples)
                .add(e.satisfaction)
                .add(e.measure)
                .add(e.std_error)
                .add(cs[i].beta)
                .add(pctl::to_string(e.verdict))
                .add(x.satisfaction)
                .add(x.measure)
                .add(pctl::to_string(x.verdict));
        }
    return t;
}

inline int run_solve_exact(const RunConfig& c, const Writer& w, std::ostream& log)
{
    const Model m = load_model(c, grid::experiment1_config());
    const ValueTable vt = value_iteration(m.mdp, c.tau, {c.vi_tol, c.vi_max_iters});
    w.csv("values.csv", value_table(m.mdp, vt.values));
    w.csv("q.csv", per_action_table(m.mdp, q_from_value(vt.values, m.mdp)));
    w.csv("policy.csv", per_action_table(m.mdp, policy_from_value(vt.values, m.mdp, c.tau).probs));
    log << "value iteration: " << vt.iterations << " sweeps, residual " << io::format_double(vt.residual) << "\n";
    return exit_ok;
}

inline std::vector<pctl::CheckReport> check_all(const RunConfig& c, const std::vector<pctl::ChanceConstraint>& cs, const Mdp& mdp,
                                                const TabularPolicy& pi, std::vector<pctl::CheckReport>& exact)
{
    std::vector<pctl::CheckReport> emp;
    pctl::CheckOptions opts;
    opts.samples = c.check_samples;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        emp.push_back(pctl::empirical_check(cs[i], mdp, pi, c.seed + i, opts));
        exact.push_back(pctl::exact_check(cs[i], mdp, pi, emp.back().horizon));
    }
    return emp;
}

inline bool any_violated(const std::vector<pctl::CheckReport>& reps)
{
    for (const auto& r : reps)
        if (r.verdict == pctl::Verdict::violated)
            return true;
    return false;
}

inline int run_solve_adp(const RunConfig& c, const Writer& w, std::ostream& log)
{
    const Model m = load_model(c, grid::experiment1_config());
    const auto cs = constraints(c, m.mdp);
    const approx::Basis basis = basis_for(c, m);
    experiments::GridSetup s = base_setup(Mode::solve_adp);
    apply_overrides(c, s, m.mdp.num_states(), m.grid.has_value());
    approx::ValueApprox va(m.mdp, basis, c.tau);
    const approx::OuterResult r = approx::outer_solve(va, cs, s.sampler, s.solver);
    va.theta = r.theta;
    const approx::Evaluation ev = approx::evaluate(va);
    const ValueTable vstar = value_iteration(m.mdp, c.tau, {c.vi_tol, c.vi_max_iters});

    io::CsvTable values({"state", "name", "v_approx", "v_star", "bellman_gap"});
    for (int st = 0; st < m.mdp.num_states(); ++st)
        values.row().add(st).add(m.mdp.state_names[st]).add(ev.V(st)).add(vstar.values(st)).add(ev.gap(st));
    w.csv("values.csv", values);
    w.csv("trace.csv", experiments::trace_table(r.trace));
    w.json("theta.json", io::theta_to_json(r.theta));
    log << "outer iterations: " << r.trace.size() << (r.converged ? " (converged)" : " (not converged)") << "\n";

    if (!cs.empty()) {
        std::vector<pctl::CheckReport> exact;
        const auto emp = check_all(c, cs, m.mdp, ev.pi, exact);
        w.csv("check.csv", check_table(m.mdp, cs, emp, exact));
        for (std::size_t i = 0; i < cs.size(); ++i)
            log << cs[i].formula << ": " << pctl::to_string(emp[i].verdict) << "\n";
        if (any_violated(emp))
            return exit_check;
    }
    return r.converged ? exit_ok : exit_solver;
}

inline int run_check(const RunConfig& c, const Writer& w, std::ostream& log)
{
    const Model m = load_model(c, grid::experiment2_config());
    const auto cs = constraints(c, m.mdp);
    TabularPolicy pi;
    if (!c.theta_path.empty()) {
        approx::ValueApprox va(m.mdp, basis_for(c, m), c.tau);
        va.theta = io::theta_from_json(io::read_json_file(c.theta_path));
        if (va.theta.size() != va.dim())
            throw InputError("theta has " + std::to_string(va.theta.size()) + " entries, the basis has " + std::to_string(va.dim()));
        pi = approx::evaluate(va).pi;
    } else {
        pi = policy_from_value(value_iteration(m.mdp, c.tau, {c.vi_tol, c.vi_max_iters}).values, m.mdp, c.tau);
    }
    std::vector<pctl::CheckReport> exact;
    const auto emp = check_all(c, cs, m.mdp, pi, exact);
    w.csv("check.csv", check_table(m.mdp, cs, emp, exact));
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t i = 0; i < cs.size(); ++i) {
        log << cs[i].formula << ": " << pctl::to_string(emp[i].verdict) << " (satisfaction "
            << io::format_double(emp[i].satisfaction) << ")\n";
        summary.push_back({{"formula", cs[i].formula},
                           {"verdict", pctl::to_string(emp[i].verdict)},
                           {"satisfaction", emp[i].satisfaction},
                           {"exact_satisfaction", exact[i].satisfaction},
                           {"compiled", io::constraint_to_json(cs[i], m.mdp)}});
    }
    if (cs.empty())
        log << "formula has no probabilistic constraints: satisfied\n";
    w.json("check.json", summary);
    return any_violated(emp) ? exit_check : exit_ok;
}

inline grid::GridConfig experiment_grid(const RunConfig& c, grid::GridConfig fallback)
{
    if (!c.mdp_path.empty())
        throw InputError("experiments run on a grid; use --grid");
    grid::GridConfig g = c.grid_path.empty() ? std::move(fallback) : io::load_grid(c.grid_path);
    if (c.gamma)
        g.discount = *c.gamma;
    return g;
}

inline int run_experiment1(const RunConfig& c, const Writer& w, std::ostream& log)
{
    experiments::GridSetup s = base_setup(Mode::experiment_1);
    s.grid = experiment_grid(c, s.grid);
    apply_overrides(c, s, s.grid.num_states(), true);
    const experiments::Problem p = experiments::make_problem(s);
    const experiments::RunResult r = experiments::solve(p, s);
    const auto& a = r.final;

    w.csv("fig2_values.csv", experiments::value_surface_table(s.grid, a.V, p.vstar.values));
    w.csv("fig4_heatmap.csv", experiments::heatmap_table(s.grid, a.V, p.vstar.values, a.visit));
    w.csv("fig5_trace.csv", experiments::trace_table(r.outer.trace));
    w.csv("fig3_learning_curve.csv", experiments::curve_table(experiments::learning_curve(p, s, c.repeats)));
    w.json("theta.json", io::theta_to_json(r.outer.theta));
    w.json("summary.json", {{"converged", r.outer.converged},
                            {"outer_iterations", r.outer.trace.size()},
                            {"max_hinge_g", a.max_hinge},
                            {"weighted_value", a.weighted_value},
                            {"weighted_value_star", a.weighted_value_star},
                            {"error_visitation_weighted", a.error_visit},
                            {"error_uniform", a.error_uniform}});
    log << "outer iterations: " << r.outer.trace.size() << (r.outer.converged ? " (converged)" : " (not converged)")
        << ", max B(g) " << io::format_double(a.max_hinge) << "\n";
    return r.outer.converged ? exit_ok : exit_solver;
}

inline int run_experiment2(const RunConfig& c, const Writer& w, std::ostream& log)
{
    experiments::GridSetup s = base_setup(Mode::experiment_2);
    s.grid = experiment_grid(c, s.grid);
    apply_overrides(c, s, s.grid.num_states(), true);
    if (!s.grid.regions.count("A") || !s.grid.regions.count("B"))
        throw InputError("experiment 2 needs regions A and B in the grid config");
    const experiments::Problem p = experiments::make_problem(s);
    std::vector<experiments::DeltaResult> rows;
    bool violated = false;
    for (double d : c.deltas) {
        rows.push_back(experiments::run_delta(p, s, d, c.check_samples));
        const auto& r = rows.back();
        w.csv("fig5_trace_delta_" + pctl::format_number(d) + ".csv", experiments::trace_table(r.run.outer.trace));
        log << "delta " << pctl::format_number(d) << ": satisfaction " << io::format_double(r.check.satisfaction) << " ("
            << pctl::to_string(r.check.verdict) << ")\n";
        violated = violated || r.check.verdict == pctl::Verdict::violated;
    }
    w.csv("table1.csv", experiments::delta_table(rows));
    return violated ? exit_check : exit_ok;
}

}  // namespace detail

/// Runs one mode, writing artifacts under c.out. Returns the process exit code.
inline int run(const RunConfig& c, std::ostream& log = std::cout, std::ostream& err = std::cerr)
{
    try {
        validate(c);
        std::filesystem::create_directories(c.out);
        const detail::Writer w{c.out, to_json(c), c.seed};
        switch (c.mode) {
        case Mode::solve_exact: return detail::run_solve_exact(c, w, log);
        case Mode::solve_adp: return detail::run_solve_adp(c, w, log);
        case Mode::check_pctl: return detail::run_check(c, w, log);
        case Mode::experiment_1: return detail::run_experiment1(c, w, log);
        case Mode::experiment_2: return detail::run_experiment2(c, w, log);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.category()) {
        case Error::Category::input:
        case Error::Category::structural: return exit_input;
        case Error::Category::numeric:
        case Error::Category::non_convergence: return exit_solver;
        case Error::Category::constraint: return exit_check;
        }
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}

}  // namespace pctladp::cli
