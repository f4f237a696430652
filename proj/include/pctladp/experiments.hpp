#pragma once

#include "pctladp/approx/solver.hpp"
#include "pctladp/gridworld.hpp"
#include "pctladp/io/csv.hpp"
#include "pctladp/pctl/check.hpp"
#include "pctladp/pctl/parser.hpp"

namespace pctladp::experiments {

/// Everything one gridworld ADP run needs.
struct GridSetup {
    grid::GridConfig grid;
    double tau = 5.0;
    double sigma = 5.0;
    approx::SamplerConfig sampler;
    approx::SolverConfig solver;
    /// Trajectory length behind the state-relevance weights c-hat.
    int visit_horizon = 6;
};

/**
 * Reach-avoid run: tau = 5, b = 1.1, eta1 = 0.1, nu1 = 10, lambda0 = 0, 30 trajectories
 * of length 6, nine kernels of width 5 and theta = 0 at the start. The remaining knobs
 * (uniform Delta_1 starts, eps0 = 200 shrinking by 3 per outer step, a constant step,
 * a 50-step window on the gradient test, the return baseline and the exact feasibility
 * check) are what made the runs converge in 10 outer iterations.
 */
inline GridSetup experiment1_setup()
{
    GridSetup s;
    s.grid = grid::experiment1_config();
    const int n = s.grid.num_states();
    s.sampler.n_onpolicy = 30;
    s.sampler.len_onpolicy = 6;
    s.sampler.onpolicy_init = Vector::Constant(n, 1.0 / n);
    auto& c = s.solver;
    c.eta1 = 0.1;
    c.nu1 = 10.0;
    c.lambda0 = 0.0;
    c.b = 1.1;
    c.rho = 0.25;
    c.eps0 = 200.0;
    c.eps_decay = 3.0;
    c.step_rule = approx::StepRule::constant;
    c.stop_window = 50;
    c.max_inner = 2000;
    c.max_outer = 10;
    c.feas_tol = 1e-2;
    c.exact_feasibility = true;
    c.baseline = true;
    c.seed = 1;
    return s;
}

/// Experiment 1 plus regions A, B, nu2 = 500 and 100 Delta_2 trajectories of length 15.
inline GridSetup experiment2_setup()
{
    GridSetup s = experiment1_setup();
    s.grid = grid::experiment2_config();
    s.sampler.n_chance = 100;
    s.sampler.len_chance = 15;
    s.solver.nu2 = 500.0;
    return s;
}

struct Problem {
    Mdp mdp;
    approx::Basis basis;
    ValueTable vstar;
};

inline Problem make_problem(const GridSetup& s)
{
    Problem p{grid::build(s.grid), {}, {}};
    p.basis = approx::ggk_basis(p.mdp, grid::kernel_centers(s.grid), s.sigma);
    p.vstar = value_iteration(p.mdp, s.tau);
    return p;
}

/// Value-side summary of a theta against V*.
struct Assessment {
    Vector V;
    TabularPolicy pi;
    /// Occupancy of pi from the initial state over visit_horizon steps.
    Vector visit;
    double weighted_value = 0.0;
    double weighted_value_star = 0.0;
    double error_visit = 0.0;
    double error_uniform = 0.0;
    double max_hinge = 0.0;
};

inline Assessment assess(const Problem& p, const GridSetup& s, const Vector& theta)
{
    approx::ValueApprox va(p.mdp, p.basis, s.tau);
    va.theta = theta;
    const approx::Evaluation ev = approx::evaluate(va);
    Assessment a;
    a.V = ev.V;
    a.pi = ev.pi;
    a.visit = occupancy(p.mdp, ev.pi, p.mdp.initial, s.visit_horizon);
    a.weighted_value = a.visit.dot(a.V);
    a.weighted_value_star = a.visit.dot(p.vstar.values);
    const int n = p.mdp.num_states();
    a.error_visit = weighted_l1_error(a.V, p.vstar.values, a.visit);
    a.error_uniform = weighted_l1_error(a.V, p.vstar.values, Vector::Constant(n, 1.0 / n));
    a.max_hinge = std::max(0.0, ev.gap.maxCoeff());
    return a;
}

struct RunResult {
    approx::OuterResult outer;
    Assessment final;
};

inline RunResult solve(const Problem& p, const GridSetup& s, const std::vector<pctl::ChanceConstraint>& cs = {})
{
    approx::ValueApprox va(p.mdp, p.basis, s.tau);
    RunResult r;
    r.outer = approx::outer_solve(va, cs, s.sampler, s.solver);
    r.final = assess(p, s, r.outer.theta);
    return r;
}

// ---------------------------------------------------------------- learning curve

struct CurveRow {
    int k = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double truth_mean = 0.0;
};

/**
 * Weighted value sum_s c(s) V(s; theta^k) per outer iteration over `repeats` seeds, with
 * c the occupancy of pi(theta^k) from the initial state. Runs that stop early keep
 * their last value. `truth_mean` is the mean of sum_s c(s) V*(s) under the same weights.
 */
inline std::vector<CurveRow> learning_curve(const Problem& p, GridSetup s, int repeats)
{
    if (repeats < 1)
        throw InputError("learning curve needs at least one repeat");
    const int K = s.solver.max_outer;
    std::vector<std::vector<double>> vals(K), truth(K);
    const std::uint64_t base = s.solver.seed;
    for (int r = 0; r < repeats; ++r) {
        s.solver.seed = base + static_cast<std::uint64_t>(r);
        const RunResult run = solve(p, s);
        double last = 0.0, last_truth = 0.0;
        for (int k = 0; k < K; ++k) {
            if (k < static_cast<int>(run.outer.trace.size())) {
                const Assessment a = assess(p, s, run.outer.trace[k].theta);
                last = a.weighted_value;
                last_truth = a.weighted_value_star;
            }
            vals[k].push_back(last);
            truth[k].push_back(last_truth);
        }
    }
    std::vector<CurveRow> out;
    for (int k = 0; k < K; ++k) {
        CurveRow row;
        row.k = k;
        row.min = *std::min_element(vals[k].begin(), vals[k].end());
        row.max = *std::max_element(vals[k].begin(), vals[k].end());
        for (std::size_t i = 0; i < vals[k].size(); ++i) {
            row.mean += vals[k][i] / repeats;
            row.truth_mean += truth[k][i] / repeats;
        }
        out.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------- experiment 2

inline std::string experiment2_formula(double delta)
{
    return "A => P>=" + pctl::format_number(delta) + " [X C<=13 [F<=14 B]]";
}

struct DeltaResult {
    double delta = 0.0;
    RunResult run;
    pctl::ChanceConstraint constraint;
    pctl::CheckReport check;
};

/// One constrained solve at `delta` and a pooled check over `check_samples` trajectories from A.
inline DeltaResult run_delta(const Problem& p, const GridSetup& s, double delta, int check_samples)
{
    DeltaResult d;
    d.delta = delta;
    auto cs = pctl::compile_all(pctl::parse(experiment2_formula(delta)), p.mdp);
    if (cs.size() != 1)
        throw StructuralError("experiment 2 formula should compile to one constraint");
    d.constraint = cs.front();
    d.run = solve(p, s, cs);
    pctl::CheckOptions opts;
    opts.samples = check_samples;
    opts.pooled = true;
    d.check = pctl::empirical_check(d.constraint, p.mdp, d.run.final.pi, s.solver.seed + 0x5eed, opts);
    return d;
}

// ---------------------------------------------------------------- tables

/// Fig. 2: both value surfaces over the free cells.
inline io::CsvTable value_surface_table(const grid::GridConfig& g, const Vector& V, const Vector& Vstar)
{
    io::CsvTable t({"x", "y", "v_approx", "v_star"});
    const auto cells = g.cells();
    for (std::size_t s = 0; s < cells.size(); ++s)
        t.row().add(cells[s].x).add(cells[s].y).add(V(static_cast<Eigen::Index>(s))).add(Vstar(static_cast<Eigen::Index>(s)));
    return t;
}

/// Fig. 4: error V - V* and visitation frequency per free cell.
inline io::CsvTable heatmap_table(const grid::GridConfig& g, const Vector& V, const Vector& Vstar, const Vector& visit)
{
    io::CsvTable t({"x", "y", "error", "visitation"});
    const auto cells = g.cells();
    for (std::size_t s = 0; s < cells.size(); ++s) {
        const auto i = static_cast<Eigen::Index>(s);
        t.row().add(cells[s].x).add(cells[s].y).add(V(i) - Vstar(i)).add(visit(i));
    }
    return t;
}

inline io::CsvTable curve_table(const std::vector<CurveRow>& rows)
{
    io::CsvTable t({"k", "mean", "min", "max", "ground_truth"});
    for (const auto& r : rows)
        t.row().add(r.k).add(r.mean).add(r.min).add(r.max).add(r.truth_mean);
    return t;
}

/// Fig. 5: one row per outer iteration, theta components last.
inline io::CsvTable trace_table(const std::vector<approx::TraceRow>& trace)
{
    std::vector<std::string> head{"k", "inner_iters", "inner_converged", "objective", "max_hinge_g", "max_hinge_l", "lambda",
                                  "xi", "nu1", "nu2", "theta_norm"};
    const Eigen::Index dim = trace.empty() ? 0 : trace.front().theta.size();
    for (Eigen::Index j = 0; j < dim; ++j)
        head.push_back("theta_" + std::to_string(j));
    io::CsvTable t(head);
    for (const auto& r : trace) {
        auto first = [](const std::vector<double>& v) { return v.empty() ? 0.0 : v.front(); };
        t.row()
            .add(r.k)
            .add(r.inner_iters)
            .add(r.inner_converged ? 1 : 0)
            .add(r.objective)
            .add(r.max_hinge_g)
            .add(r.max_hinge_l)
            .add(r.lambda)
            .add(first(r.xi))
            .add(r.nu1)
            .add(first(r.nu2))
            .add(r.theta.norm());
        for (Eigen::Index j = 0; j < dim; ++j)
            t.add(r.theta(j));
    }
    return t;
}

/// Table I: satisfying paths per delta.
inline io::CsvTable delta_table(const std::vector<DeltaResult>& rows)
{
    io::CsvTable t({"delta", "satisfying_paths", "samples", "fraction", "verdict", "converged"});
    for (const auto& d : rows)
        t.row()
            .add(d.delta)
            .add(static_cast<long>(std::lround(d.check.satisfaction * d.check.samples)))
            .add(d.check.samples)
            .add(d.check.satisfaction)
            .add(pctl::to_string(d.check.verdict))
            .add(d.run.outer.converged ? 1 : 0);
    return t;
}

}  // namespace pctladp::experiments
