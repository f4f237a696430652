#pragma once

#include "pctladp/analysis.hpp"
#include "pctladp/pctl/classify.hpp"
#include "pctladp/trajectory.hpp"

#include <map>

namespace pctladp::pctl {

/**
 * How a path is scored. Positions j = first_index, first_index + 1, ... are examined
 * up to `horizon` transitions; the path resolves at the first position whose state is
 * in `target` (success) or `blocked` (failure), and is a miss if neither happens by the
 * horizon. Indicator rules score 1 on success and 0 otherwise. Cost rules score the
 * accrued sum of d(s_t, a_t) for first_index <= t < T, plus `penalty` unless the path
 * resolved at a target state.
 */
struct PathRule {
    int first_index = 0;
    StateMask target;
    StateMask blocked;
    bool indicator = true;
    double penalty = 0.0;
};

/**
 * A compiled constraint in canonical form: for every s in `constrained`,
 *
 *   chance:       Pr(sign * D(s) >= alpha) <= beta
 *   expectation:  E[sign * D(s)] <= beta
 *
 * where D is the path score defined by `rule` and `cost`.
 */
struct ChanceConstraint {
    enum class Kind { chance, expectation };

    FormulaClass cls = FormulaClass::unsupported;
    std::string formula;
    Kind kind = Kind::chance;
    CostFunction cost;
    PathRule rule;
    double sign = 1.0;
    double alpha = 1.0;
    double beta = 1.0;
    /// Fixed step bound; empty means the mixing-time horizon T_eps, resolved per policy.
    std::optional<int> horizon;
    double epsilon = 0.0;
    StateMask constrained;
    /// Kernel with target and blocked states made sinks (identical to the input for ProbNext).
    Mdp surgered;
    /// Indicator classes: score already earned at t = 0 (start inside the target).
    Vector initial_credit;

    // Direction metadata from the source formula.
    Cmp prob_cmp = Cmp::le;
    double prob_bound = 1.0;
    std::optional<Cmp> cost_cmp;
    std::optional<double> cost_bound;

    /// True when the ~-bound makes the constraint hold for every policy.
    bool vacuous() const { return kind == Kind::chance && beta >= 1.0; }
};

struct CompileOptions {
    double epsilon = 0.01;
    /// D-bar; defaults to 10 * horizon * max|d| (at least 10 * horizon).
    std::optional<double> penalty;
    /// Tightening applied to strict inequalities.
    double strict_margin = 1e-9;
    /// Cost for C-operators; unit cost when absent.
    std::optional<CostFunction> cost;
};

namespace detail {

struct PathParts {
    StateFormula lhs;  // `true` for eventually / next
    StateFormula rhs;
    std::optional<int> steps;
};

inline PathParts path_parts(const PathFormula& p)
{
    if (auto x = p.as<Next>())
        return {truth(), x->arg, 1};
    if (auto e = p.as<Eventually>())
        return {truth(), e->arg, std::nullopt};
    if (auto e = p.as<BoundedEventually>())
        return {truth(), e->arg, e->steps};
    if (auto u = p.as<Until>())
        return {u->lhs, u->rhs, std::nullopt};
    const auto* u = p.as<BoundedUntil>();
    return {u->lhs, u->rhs, u->steps};
}

/// Canonical (sign, alpha) for the event {D cmp m}, or for its complement.
inline std::pair<double, double> event_as_tail(Cmp cmp, double m, bool complement, double margin)
{
    if (complement) {
        switch (cmp) {
        case Cmp::ge: cmp = Cmp::lt; break;
        case Cmp::gt: cmp = Cmp::le; break;
        case Cmp::le: cmp = Cmp::gt; break;
        case Cmp::lt: cmp = Cmp::ge; break;
        }
    }
    switch (cmp) {
    case Cmp::ge: return {1.0, m};
    case Cmp::gt: return {1.0, m + margin};
    case Cmp::le: return {-1.0, -m};
    case Cmp::lt: return {-1.0, -m + margin};
    }
    return {1.0, m};
}

inline double default_penalty(const CostFunction& d, int horizon)
{
    const double dmax = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    return 10.0 * horizon * std::max(dmax, 1.0);
}

}  // namespace detail

/**
 * Translates a supported formula into a canonical chance (or expectation) constraint.
 *
 * Throws InputError when the formula is unsupported, an atom is missing from the
 * labels, or the epsilon-adjusted threshold leaves [0, 1].
 */
inline ChanceConstraint compile(const StateFormula& f, const Mdp& mdp, const CompileOptions& opts = {})
{
    const Classification cl = classify(f);
    if (cl.cls == FormulaClass::unsupported)
        throw InputError("unsupported PCTL formula " + to_string(f) + ": " + cl.reason);
    if (!(opts.epsilon > 0.0 && opts.epsilon < 1.0))
        throw InputError("epsilon must lie in (0, 1)");
    if (opts.penalty && !(*opts.penalty > 0.0))
        throw InputError("penalty must be positive");

    const int n = mdp.num_states();
    const double margin = opts.strict_margin;
    ChanceConstraint c;
    c.cls = cl.cls;
    c.formula = to_string(f);
    c.epsilon = opts.epsilon;
    c.initial_credit = Vector::Zero(n);
    c.rule.blocked = StateMask(n, false);

    switch (cl.cls) {
    case FormulaClass::prob_next:
    case FormulaClass::prob_until:
    case FormulaClass::prob_not_until: {
        const auto* p = f.as<Prob>();
        const auto parts = detail::path_parts(p->path);
        const StateMask target = evaluate(parts.rhs, mdp);
        c.prob_cmp = p->cmp;
        c.prob_bound = p->bound;
        c.rule.target = target;
        c.constrained = support_mask(mdp.initial);

        if (cl.cls == FormulaClass::prob_next) {
            c.rule.first_index = 1;
            c.horizon = 1;
            c.surgered = mdp;
        } else {
            c.rule.first_index = 0;
            if (cl.cls == FormulaClass::prob_not_until) {
                const StateMask allowed = evaluate(parts.lhs, mdp);
                for (int s = 0; s < n; ++s)
                    c.rule.blocked[s] = !allowed[s] && !target[s];
            }
            c.horizon = parts.steps;
            c.surgered = with_sinks(mdp, mask_or(target, c.rule.blocked));
            for (int s = 0; s < n; ++s)
                c.initial_credit(s) = target[s] ? 1.0 : 0.0;
        }
        // d(s, a) = E_{s'} 1(s' in target), zero once resolved.
        c.cost = CostFunction::Zero(n, mdp.num_actions());
        for (int s = 0; s < n; ++s) {
            if (cl.cls != FormulaClass::prob_next && (target[s] || c.rule.blocked[s]))
                continue;
            for (ActionId a : mdp.admissible[s])
                for (int t = 0; t < n; ++t)
                    if (target[t])
                        c.cost(s, a) += c.surgered.transition[a](s, t);
        }

        const bool truncation_slack = !c.horizon.has_value();
        if (is_upper(p->cmp)) {
            // Pr(hit) <= p  (minus eps for the mixing-time truncation).
            std::tie(c.sign, c.alpha) = std::pair{1.0, 1.0};
            if (p->cmp == Cmp::le && p->bound >= 1.0)
                c.beta = 1.0;
            else
                c.beta = p->bound - (truncation_slack ? opts.epsilon : 0.0) - (is_strict(p->cmp) ? margin : 0.0);
        } else {
            // Pr(hit) >= p  <=>  Pr(miss) <= 1 - p; miss is {-D >= 0}.
            std::tie(c.sign, c.alpha) = std::pair{-1.0, 0.0};
            c.beta = (p->cmp == Cmp::ge && p->bound <= 0.0) ? 1.0 : 1.0 - p->bound - (is_strict(p->cmp) ? margin : 0.0);
        }
        if (c.beta < 0.0 || c.beta > 1.0)
            throw InputError("translation of " + c.formula + " is infeasible: adjusted probability bound " + format_number(c.beta) +
                             " leaves [0, 1]");
        break;
    }
    case FormulaClass::risk_neutral_cost: {
        const auto* cb = f.as<CostBound>();
        c.kind = ChanceConstraint::Kind::expectation;
        c.cost = opts.cost.value_or(CostFunction::Ones(n, mdp.num_actions()));
        c.rule.first_index = 0;
        c.rule.target = evaluate(cb->target, mdp);
        c.rule.indicator = false;
        c.horizon = cb->steps;
        c.rule.penalty = opts.penalty.value_or(detail::default_penalty(c.cost, std::max(cb->steps, 1)));
        c.surgered = with_sinks(mdp, c.rule.target);
        c.constrained = support_mask(mdp.initial);
        c.cost_cmp = cb->cmp;
        c.cost_bound = cb->bound;
        if (is_upper(cb->cmp)) {
            c.sign = 1.0;
            c.beta = cb->bound - (is_strict(cb->cmp) ? margin : 0.0);
        } else {
            c.sign = -1.0;
            c.beta = -cb->bound - (is_strict(cb->cmp) ? margin : 0.0);
        }
        c.alpha = 0.0;
        break;
    }
    case FormulaClass::risk_sensitive: {
        const auto* imp = f.as<Implies>();
        const auto* p = imp->rhs.as<Prob>();
        const auto* cb = p->path.as<Next>()->arg.as<CostBound>();
        c.cost = opts.cost.value_or(CostFunction::Ones(n, mdp.num_actions()));
        c.rule.first_index = 1;
        c.rule.target = evaluate(cb->target, mdp);
        c.rule.indicator = false;
        c.horizon = cb->steps + 1;
        c.rule.penalty = opts.penalty.value_or(detail::default_penalty(c.cost, *c.horizon));
        c.surgered = with_sinks(mdp, c.rule.target);
        c.constrained = evaluate(imp->lhs, mdp);
        c.prob_cmp = p->cmp;
        c.prob_bound = p->bound;
        c.cost_cmp = cb->cmp;
        c.cost_bound = cb->bound;
        // Pr(S) >= p  <=>  Pr(not S) <= 1 - p;  Pr(S) <= p is already canonical.
        const bool complement = !is_upper(p->cmp);
        std::tie(c.sign, c.alpha) = detail::event_as_tail(cb->cmp, cb->bound, complement, margin);
        if (complement)
            c.beta = (p->cmp == Cmp::ge && p->bound <= 0.0) ? 1.0 : 1.0 - p->bound - (is_strict(p->cmp) ? margin : 0.0);
        else
            c.beta = (p->cmp == Cmp::le && p->bound >= 1.0) ? 1.0 : p->bound - (is_strict(p->cmp) ? margin : 0.0);
        if (c.beta < 0.0)
            throw InputError("translation of " + c.formula + " is infeasible: probability bound " + format_number(c.beta) + " < 0");
        break;
    }
    case FormulaClass::unsupported:
        break;
    }
    return c;
}

/// Splits top-level conjunctions and compiles each conjunct.
inline std::vector<ChanceConstraint> compile_all(const StateFormula& f, const Mdp& mdp, const CompileOptions& opts = {})
{
    std::vector<ChanceConstraint> out;
    if (auto a = f.as<And>(); a && !is_propositional(f)) {
        for (auto& c : compile_all(a->lhs, mdp, opts))
            out.push_back(std::move(c));
        for (auto& c : compile_all(a->rhs, mdp, opts))
            out.push_back(std::move(c));
        return out;
    }
    if (f.is<True>())
        return out;
    out.push_back(compile(f, mdp, opts));
    return out;
}

/// Horizon in transitions: the fixed step bound, or the doubling mixing time under `pi`.
inline int resolve_horizon(const ChanceConstraint& c, const TabularPolicy& pi, const MixingOptions& mix = {})
{
    if (c.horizon)
        return *c.horizon;
    return std::max(1, mixing_time(c.surgered, pi, c.cost, c.epsilon, 1.0, mix).horizon);
}

/// Path score D of a sampled trajectory, examined up to `horizon` transitions.
inline double path_score(const ChanceConstraint& c, const Trajectory& traj, int horizon)
{
    const PathRule& r = c.rule;
    double acc = 0.0;
    for (int j = 0;; ++j) {
        const StateId s = traj.state_at(j);
        if (j >= r.first_index) {
            if (r.target[s])
                return r.indicator ? 1.0 : acc;
            if (r.blocked[s])
                return r.indicator ? 0.0 : acc + r.penalty;
        }
        if (j >= horizon || j >= traj.length())
            return r.indicator ? 0.0 : acc + r.penalty;
        if (!r.indicator && j >= r.first_index)
            acc += c.cost(s, traj.steps[j].action);
    }
}

/// Per-trajectory quantity whose mean is bounded by beta: the tail indicator or sign * D.
inline double violation_measure(const ChanceConstraint& c, double score)
{
    if (c.kind == ChanceConstraint::Kind::expectation)
        return c.sign * score;
    return c.sign * score >= c.alpha ? 1.0 : 0.0;
}

/// Whether a path score satisfies the formula's own event (hit for P-classes, D ~ m for C-classes).
inline bool formula_event(const ChanceConstraint& c, double score)
{
    if (c.rule.indicator)
        return score >= 1.0;
    return compare(score, *c.cost_cmp, *c.cost_bound);
}

/**
 * Exact distribution of the path score from `start`, by forward propagation of
 * (state, accrued cost) mass through the original kernel. Returns (score, probability) pairs.
 */
inline std::vector<std::pair<double, double>> exact_score_distribution(const ChanceConstraint& c, const Mdp& mdp,
                                                                      const TabularPolicy& pi, StateId start, int horizon)
{
    const PathRule& r = c.rule;
    std::map<double, double> resolved;
    std::map<std::pair<StateId, double>, double> frontier{{{start, 0.0}, 1.0}};
    for (int j = 0; !frontier.empty(); ++j) {
        std::map<std::pair<StateId, double>, double> next;
        for (const auto& [key, mass] : frontier) {
            const auto [s, acc] = key;
            if (j >= r.first_index) {
                if (r.target[s]) {
                    resolved[r.indicator ? 1.0 : acc] += mass;
                    continue;
                }
                if (r.blocked[s]) {
                    resolved[r.indicator ? 0.0 : acc + r.penalty] += mass;
                    continue;
                }
            }
            if (j >= horizon) {
                resolved[r.indicator ? 0.0 : acc + r.penalty] += mass;
                continue;
            }
            for (ActionId a : mdp.admissible[s]) {
                const double pa = pi.probs(s, a);
                if (pa == 0.0)
                    continue;
                const double acc2 = (!r.indicator && j >= r.first_index) ? acc + c.cost(s, a) : acc;
                for (int t = 0; t < mdp.num_states(); ++t) {
                    const double pt = mdp.transition[a](s, t);
                    if (pt > 0.0)
                        next[{t, acc2}] += mass * pa * pt;
                }
            }
        }
        frontier = std::move(next);
    }
    return {resolved.begin(), resolved.end()};
}

/// Exact constrained quantity per state (tail probability or E[sign * D]); zero outside Y.
inline Vector exact_constraint_values(const ChanceConstraint& c, const Mdp& mdp, const TabularPolicy& pi, int horizon)
{
    Vector out = Vector::Zero(mdp.num_states());
    for (StateId s : mask_members(c.constrained))
        for (const auto& [score, p] : exact_score_distribution(c, mdp, pi, s, horizon))
            out(s) += p * violation_measure(c, score);
    return out;
}

/**
 * DP route for indicator classes: Pr(hit within T) = credit(s) + D(s, T; pi) on the
 * surgered kernel with the compiled one-step cost.
 */
inline Vector hit_probability_dp(const ChanceConstraint& c, const TabularPolicy& pi, int horizon)
{
    if (!c.rule.indicator)
        throw InputError("hit_probability_dp applies to P-operator constraints only");
    return c.initial_credit + expected_cost_dp(c.surgered, pi, c.cost, horizon, 1.0);
}

}  // namespace pctladp::pctl
