#pragma once

#include "pctladp/approx/estimators.hpp"

#include <limits>

namespace pctladp::approx {

struct SamplerConfig {
    int n_onpolicy = 30;
    int len_onpolicy = 6;
    /// Start distribution of the on-policy trajectories; mdp.initial when absent.
    std::optional<Vector> onpolicy_init;
    int n_chance = 100;
    int len_chance = 15;
    /// Weights over each constraint's Y; absent means a stratified uniform split.
    std::optional<Vector> delta2;
};

enum class StopRule { gradient_norm, step_norm };

/// recursive: eta^{k+1} = eta^k / k.  harmonic: eta^k = eta^0 / (k + 1).  constant: eta^k = eta^0.
enum class StepRule { recursive, harmonic, constant };

struct SolverConfig {
    double eta1 = 0.1;
    /// Step size for the chance-constraint gradient; eta1 when absent.
    std::optional<double> eta2;
    double nu1 = 10.0;
    /// Initial penalty of every chance constraint; nu1 when absent.
    std::optional<double> nu2;
    double lambda0 = 0.0;
    double xi0 = 0.0;
    double b = 1.1;
    double rho = 0.25;
    /// Inner tolerance eps^k = eps0 / eps_decay^k.
    double eps0 = 1.0;
    double eps_decay = 2.0;
    StopRule stop = StopRule::gradient_norm;
    StepRule step_rule = StepRule::harmonic;
    int max_inner = 500;
    /// The gradient-norm test uses the mean of the last `stop_window` gradient estimates.
    int stop_window = 1;
    int max_outer = 10;
    /// Outer loop stops once the sampled E B(g) and every E B(l) are at most this.
    double feas_tol = 1e-3;
    /// Also require max_s B(g(s)) <= feas_tol over every state, computed from the model.
    bool exact_feasibility = false;
    /// Divergence guard on ||theta||.
    double theta_bound = 1e8;
    bool baseline = false;
    std::uint64_t seed = 0;
};

/// Augmented-Lagrangian iterate; one multiplier and one penalty per constraint.
struct SolverState {
    Vector theta;
    double lambda = 0.0;
    std::vector<double> xi;
    double nu1 = 10.0;
    std::vector<double> nu2;
    double eta1 = 0.1;
    double eta2 = 0.1;
    int k = 0;
    int j = 0;
    double b = 1.1;
    double rho = 0.25;
};

/// Sample-based quantities at the last inner iterate.
struct Estimates {
    FEstimate F;
    std::vector<MEstimate> m;
    Vector grad;
    double lagrangian = 0.0;
};

/// L = sum c V + lambda E B(g) + nu1/2 (E B(g))^2 + sum_i [xi_i E B(l_i) + nu2_i/2 (E B(l_i))^2]
inline double lagrangian_value(const SolverState& st, const FEstimate& F, const std::vector<MEstimate>& m)
{
    double L = F.objective + st.lambda * F.mean_hinge + 0.5 * st.nu1 * F.mean_hinge * F.mean_hinge;
    for (std::size_t i = 0; i < m.size(); ++i)
        L += st.xi[i] * m[i].mean_hinge + 0.5 * st.nu2[i] * m[i].mean_hinge * m[i].mean_hinge;
    return L;
}

inline double lagrangian_value(const SolverState& st, const ValueApprox& va, const std::vector<Trajectory>& trajs,
                               const std::vector<pctl::ChanceConstraint>& cs, const std::vector<ChanceSamples>& Z)
{
    ValueApprox at = va;
    at.theta = st.theta;
    const Evaluation ev = evaluate(at);
    const FEstimate F = estimate_F(at, ev, trajs, st.lambda, st.nu1);
    std::vector<MEstimate> m;
    for (std::size_t i = 0; i < cs.size(); ++i)
        m.push_back(estimate_m(at, ev, cs[i], Z[i], st.xi[i], st.nu2[i]));
    return lagrangian_value(st, F, m);
}

inline std::vector<Trajectory> sample_onpolicy(const Mdp& mdp, const TabularPolicy& pi, const SamplerConfig& cfg, Rng rng)
{
    const Vector& init = cfg.onpolicy_init ? *cfg.onpolicy_init : mdp.initial;
    const ChainSampler sampler(mdp, pi);
    std::vector<Trajectory> out;
    out.reserve(cfg.n_onpolicy);
    for (int h = 0; h < cfg.n_onpolicy; ++h)
        out.push_back(sampler.sample(init, cfg.len_onpolicy, rng));
    return out;
}

/**
 * Delta_2 sample for a constraint. Each trajectory starts in Y, runs at most `horizon`
 * transitions and stops once the path is resolved. Uniform Delta_2 is stratified: the
 * states of Y take turns, so every Z(s) is nonempty when n_chance >= |Y|.
 */
inline ChanceSamples sample_chance(const Mdp& mdp, const TabularPolicy& pi, const pctl::ChanceConstraint& c, int horizon,
                                   const SamplerConfig& cfg, Rng rng)
{
    ChanceSamples Z;
    Z.horizon = horizon;
    Z.states = mask_members(c.constrained);
    if (Z.states.empty())
        throw InputError("constraint " + c.formula + " has an empty constrained set");
    Z.by_state.assign(Z.states.size(), {});
    const StateMask stop = mask_or(c.rule.target, c.rule.blocked);
    const ChainSampler sampler(mdp, pi);
    const int len = std::max(horizon, 1);
    if (cfg.delta2) {
        if (cfg.delta2->size() != static_cast<Eigen::Index>(Z.states.size()))
            throw InputError("delta2 needs one weight per constrained state");
        for (int i = 0; i < cfg.n_chance; ++i) {
            const auto yi = static_cast<std::size_t>(ChainSampler::draw_state(*cfg.delta2, rng));
            Z.by_state[yi].push_back(sampler.sample_from(Z.states[yi], len, rng, &stop));
        }
    } else {
        if (cfg.n_chance < static_cast<int>(Z.states.size()))
            throw InputError("n_chance (" + std::to_string(cfg.n_chance) + ") is smaller than |Y| (" +
                             std::to_string(Z.states.size()) + ")");
        for (int i = 0; i < cfg.n_chance; ++i) {
            const std::size_t yi = static_cast<std::size_t>(i) % Z.states.size();
            Z.by_state[yi].push_back(sampler.sample_from(Z.states[yi], len, rng, &stop));
        }
    }
    return Z;
}

/// Horizon used for a constraint's Delta_2 sample; enforces len_chance >= a fixed step bound.
inline int chance_horizon(const pctl::ChanceConstraint& c, const TabularPolicy& pi, const SamplerConfig& cfg)
{
    if (c.horizon && *c.horizon > cfg.len_chance)
        throw InputError("len_chance (" + std::to_string(cfg.len_chance) + ") is shorter than the step bound " +
                         std::to_string(*c.horizon) + " of " + c.formula);
    return pctl::resolve_horizon(c, pi);
}

inline SolverState initial_state(const ValueApprox& va, std::size_t num_constraints, const SolverConfig& cfg)
{
    SolverState st;
    st.theta = Vector::Zero(va.dim());
    st.lambda = cfg.lambda0;
    st.xi.assign(num_constraints, cfg.xi0);
    st.nu1 = cfg.nu1;
    st.nu2.assign(num_constraints, cfg.nu2.value_or(cfg.nu1));
    st.eta1 = cfg.eta1;
    st.eta2 = cfg.eta2.value_or(cfg.eta1);
    st.b = cfg.b;
    st.rho = cfg.rho;
    return st;
}

/// Fresh samples at the current theta, and every estimate built from them.
inline Estimates estimate_at(ValueApprox& va, const SolverState& st, const std::vector<pctl::ChanceConstraint>& cs,
                             const SamplerConfig& scfg, const SolverConfig& cfg, const Rng& rng, Evaluation* ev_out = nullptr)
{
    va.theta = st.theta;
    const Evaluation ev = evaluate(va);
    Estimates e;
    const auto trajs = sample_onpolicy(va.mdp(), ev.pi, scfg, rng.split(0));
    e.F = estimate_F(va, ev, trajs, st.lambda, st.nu1, cfg.baseline);
    e.grad = e.F.grad;
    for (std::size_t i = 0; i < cs.size(); ++i) {
        const int T = chance_horizon(cs[i], ev.pi, scfg);
        const ChanceSamples Z = sample_chance(va.mdp(), ev.pi, cs[i], T, scfg, rng.split(1 + i));
        e.m.push_back(estimate_m(va, ev, cs[i], Z, st.xi[i], st.nu2[i], cfg.baseline));
    }
    e.lagrangian = lagrangian_value(st, e.F, e.m);
    if (ev_out)
        *ev_out = ev;
    return e;
}

struct InnerResult {
    int iterations = 0;
    /// True when the stopping test fired before max_inner.
    bool converged = false;
    double tolerance = 0.0;
    Estimates last;
};

/**
 * Gradient descent on L_{nu^k}(., lambda^k, xi^k) with fresh samples at every step:
 * theta <- theta - eta1 grad F - eta2 grad m.
 *
 * Throws NonConvergenceError when ||theta|| exceeds the divergence guard.
 */
inline InnerResult inner_solve(ValueApprox& va, SolverState& st, const std::vector<pctl::ChanceConstraint>& cs,
                               const SamplerConfig& scfg, const SolverConfig& cfg, double tol)
{
    if (!(tol > 0.0))
        throw InputError("inner tolerance must be positive");
    const Rng root = Rng(cfg.seed).split(static_cast<std::uint64_t>(st.k));
    InnerResult res;
    res.tolerance = tol;
    const int window = std::max(1, cfg.stop_window);
    std::vector<Vector> recent;
    Vector recent_sum = Vector::Zero(va.dim());
    for (st.j = 0; st.j < cfg.max_inner; ++st.j) {
        res.last = estimate_at(va, st, cs, scfg, cfg, root.split(static_cast<std::uint64_t>(st.j)));
        Vector gm = Vector::Zero(va.dim());
        for (const auto& m : res.last.m)
            gm += m.grad;
        res.last.grad = res.last.F.grad + gm;
        recent_sum += res.last.grad;
        recent.push_back(res.last.grad);
        if (static_cast<int>(recent.size()) > window) {
            recent_sum -= recent.front();
            recent.erase(recent.begin());
        }
        if (cfg.stop == StopRule::gradient_norm && recent_sum.norm() / static_cast<double>(recent.size()) <= tol) {
            res.converged = true;
            break;
        }
        const Vector step = st.eta1 * res.last.F.grad + st.eta2 * gm;
        st.theta -= step;
        ++res.iterations;
        if (!st.theta.allFinite() || st.theta.norm() > cfg.theta_bound) {
            std::ostringstream os;
            os << "inner iteration diverged at outer " << st.k << ", inner " << st.j << ": ||theta|| = " << st.theta.norm()
               << ", ||grad F|| = " << res.last.F.grad.norm() << ", ||grad m|| = " << gm.norm();
            throw NonConvergenceError(os.str());
        }
        if (cfg.stop == StopRule::step_norm && step.norm() <= tol) {
            res.converged = true;
            break;
        }
    }
    va.theta = st.theta;
    return res;
}

struct TraceRow {
    int k = 0;
    int inner_iters = 0;
    bool inner_converged = false;
    double objective = 0.0;
    double lagrangian = 0.0;
    /// Sampled E_{Delta_1} B(g).
    double mean_hinge_g = 0.0;
    /// max_s B(g(s)) over every state, computed exactly.
    double max_hinge_g = 0.0;
    /// max over constraints of the sampled max_s B(l(s)).
    double max_hinge_l = 0.0;
    double lambda = 0.0;
    std::vector<double> xi;
    double nu1 = 0.0;
    std::vector<double> nu2;
    double eta1 = 0.0;
    Vector theta;
};

struct OuterResult {
    Vector theta;
    std::vector<TraceRow> trace;
    bool converged = false;
    SolverState state;
};

/**
 * Outer augmented-Lagrangian loop. After each inner solve, reusing its last samples:
 *   lambda += nu1 E B(g),  xi_i += nu2_i E B(l_i),
 *   nu grows by b for each constraint whose E B rose above rho times its previous value,
 *   eta follows cfg.step_rule.
 * Stops when the inner test fired and every sampled E B is within feas_tol (and, with
 * exact_feasibility, max_s B(g(s)) too).
 */
inline OuterResult outer_solve(ValueApprox& va, const std::vector<pctl::ChanceConstraint>& cs, const SamplerConfig& scfg,
                               const SolverConfig& cfg, std::optional<Vector> theta0 = std::nullopt)
{
    if (scfg.n_onpolicy < 1 || scfg.len_onpolicy < 1 || scfg.n_chance < 1 || scfg.len_chance < 1)
        throw InputError("sampler counts and lengths must be at least 1");
    if (!(cfg.b > 1.0) || !(cfg.rho > 0.0) || !(cfg.eta1 > 0.0) || !(cfg.eps0 > 0.0) || !(cfg.eps_decay > 1.0) || !(cfg.nu1 > 0.0))
        throw InputError("solver hyperparameters out of range");

    OuterResult out;
    SolverState st = initial_state(va, cs.size(), cfg);
    if (theta0)
        st.theta = *theta0;
    double prev_g = std::numeric_limits<double>::infinity();
    std::vector<double> prev_l(cs.size(), std::numeric_limits<double>::infinity());

    for (st.k = 0; st.k < cfg.max_outer; ++st.k) {
        const double tol = cfg.eps0 / std::pow(cfg.eps_decay, st.k);
        const InnerResult in = inner_solve(va, st, cs, scfg, cfg, tol);

        TraceRow row;
        row.k = st.k;
        row.inner_iters = in.iterations;
        row.inner_converged = in.converged;
        row.objective = in.last.F.objective;
        row.lagrangian = in.last.lagrangian;
        row.mean_hinge_g = in.last.F.mean_hinge;
        va.theta = st.theta;
        row.max_hinge_g = std::max(0.0, evaluate(va).gap.maxCoeff());
        for (const auto& m : in.last.m)
            row.max_hinge_l = std::max(row.max_hinge_l, m.max_hinge);
        row.lambda = st.lambda;
        row.xi = st.xi;
        row.nu1 = st.nu1;
        row.nu2 = st.nu2;
        row.eta1 = st.eta1;
        row.theta = st.theta;
        out.trace.push_back(row);

        bool feasible = in.last.F.mean_hinge <= cfg.feas_tol;
        if (cfg.exact_feasibility)
            feasible = feasible && row.max_hinge_g <= cfg.feas_tol;
        for (const auto& m : in.last.m)
            feasible = feasible && m.mean_hinge <= cfg.feas_tol;
        if (in.converged && feasible) {
            out.converged = true;
            break;
        }

        const double hg = in.last.F.mean_hinge;
        st.lambda += st.nu1 * hg;
        if (st.k > 0 && hg > st.rho * prev_g)
            st.nu1 *= st.b;
        prev_g = hg;
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const double hl = in.last.m[i].mean_hinge;
            st.xi[i] += st.nu2[i] * hl;
            if (st.k > 0 && hl > st.rho * prev_l[i])
                st.nu2[i] *= st.b;
            prev_l[i] = hl;
        }
        if (cfg.step_rule == StepRule::recursive) {
            const double div = std::max(1, st.k);
            st.eta1 /= div;
            st.eta2 /= div;
        } else if (cfg.step_rule == StepRule::harmonic) {
            st.eta1 = cfg.eta1 / (st.k + 2);
            st.eta2 = cfg.eta2.value_or(cfg.eta1) / (st.k + 2);
        }
    }
    out.theta = st.theta;
    out.state = st;
    va.theta = st.theta;
    return out;
}

}  // namespace pctladp::approx
