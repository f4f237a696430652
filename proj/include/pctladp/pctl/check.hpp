#pragma once

#include "pctladp/pctl/compile.hpp"

#include <cmath>
#include <deque>

namespace pctladp::pctl {

/**
 * Probability of reaching `target` under a Markov chain, from every state.
 *
 * With a horizon: backward recursion over at most `horizon` transitions. Without:
 * states that cannot reach the target get 0 and the rest solve x = P x + b on the
 * remaining non-target states.
 */
inline Vector exact_reachability(const Matrix& chain, const StateMask& target, std::optional<int> horizon)
{
    const int n = static_cast<int>(chain.rows());
    if (static_cast<int>(target.size()) != n)
        throw StructuralError("target mask does not match chain size");
    if (std::none_of(target.begin(), target.end(), [](bool b) { return b; }))
        throw InputError("reachability target is empty");

    Vector hit = Vector::Zero(n);
    for (int s = 0; s < n; ++s)
        hit(s) = target[s] ? 1.0 : 0.0;

    if (horizon) {
        if (*horizon < 0)
            throw InputError("horizon must be nonnegative");
        Vector x = hit;
        for (int t = 0; t < *horizon; ++t) {
            Vector next = chain * x;
            for (int s = 0; s < n; ++s)
                x(s) = target[s] ? 1.0 : next(s);
        }
        return x;
    }

    // Backward search for the states with a positive-probability path into the target.
    std::vector<bool> alive(target.begin(), target.end());
    std::deque<int> queue;
    for (int s = 0; s < n; ++s)
        if (target[s])
            queue.push_back(s);
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        for (int s = 0; s < n; ++s)
            if (!alive[s] && chain(s, t) > 0.0) {
                alive[s] = true;
                queue.push_back(s);
            }
    }
    std::vector<int> idx;
    for (int s = 0; s < n; ++s)
        if (alive[s] && !target[s])
            idx.push_back(s);

    Vector x = hit;
    if (idx.empty())
        return x;
    const int m = static_cast<int>(idx.size());
    Matrix A = Matrix::Identity(m, m);
    Vector b = Vector::Zero(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j)
            A(i, j) -= chain(idx[i], idx[j]);
        for (int t = 0; t < n; ++t)
            if (target[t])
                b(i) += chain(idx[i], t);
    }
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible())
        throw NumericError("reachability system is singular");
    const Vector sol = lu.solve(b);
    for (int i = 0; i < m; ++i)
        x(idx[i]) = sol(i);
    return x;
}

enum class Verdict { satisfied, violated, inconclusive };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::satisfied: return "satisfied";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

struct StateCheck {
    StateId state = -1;
    int samples = 0;
    /// Fraction of paths meeting the formula's own event (hit, or cost bound met on a hit).
    double satisfaction = 0.0;
    /// Mean of the canonical measure: tail frequency, or E[sign * D] for expectation constraints.
    double measure = 0.0;
    double std_error = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

struct CheckReport {
    std::vector<StateCheck> states;
    int horizon = 0;
    int samples = 0;
    double satisfaction = 0.0;
    double measure = 0.0;
    double beta = 0.0;
    /// Worst per-state verdict: violated beats inconclusive beats satisfied.
    Verdict verdict = Verdict::satisfied;
};

struct CheckOptions {
    /// Trajectories per constrained state; when `pooled`, the total drawn from uniform starts over Y.
    int samples = 1000;
    bool pooled = false;
    /// Width of the statistical band in standard errors.
    double z = 3.0;
    std::optional<int> horizon;
};

namespace detail {

inline Verdict judge(double measure, double se, double beta, double slack, double z)
{
    if (measure + z * se <= beta)
        return Verdict::satisfied;
    if (measure - z * se > beta + slack)
        return Verdict::violated;
    return Verdict::inconclusive;
}

inline Verdict worse(Verdict a, Verdict b)
{
    if (a == Verdict::violated || b == Verdict::violated)
        return Verdict::violated;
    if (a == Verdict::inconclusive || b == Verdict::inconclusive)
        return Verdict::inconclusive;
    return Verdict::satisfied;
}

/// Slack allowed for the horizon truncation before a violation is declared.
inline double truncation_slack(const ChanceConstraint& c) { return c.horizon ? 0.0 : c.epsilon; }

struct Accumulator {
    int n = 0;
    double hits = 0.0, sum = 0.0, sumsq = 0.0;

    void add(const ChanceConstraint& c, double score)
    {
        const double v = violation_measure(c, score);
        ++n;
        hits += formula_event(c, score) ? 1.0 : 0.0;
        sum += v;
        sumsq += v * v;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double std_error() const
    {
        if (n < 2)
            return 0.0;
        const double var = std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
        return std::sqrt(var / n);
    }
};

}  // namespace detail

/**
 * Statistical model check of a compiled constraint under a fixed policy.
 *
 * Trajectories run on the original kernel and stop at the first target or blocked
 * state; each is scored with path_score. The verdict for a state is satisfied when
 * the measure plus z standard errors stays within beta, violated when the measure
 * minus z standard errors exceeds beta plus the truncation slack, and inconclusive
 * otherwise.
 */
inline CheckReport empirical_check(const ChanceConstraint& c, const Mdp& mdp, const TabularPolicy& pi, std::uint64_t seed,
                                   const CheckOptions& opts = {})
{
    if (opts.samples < 1)
        throw InputError("empirical check needs at least one sample");
    const auto ys = mask_members(c.constrained);
    if (ys.empty())
        throw InputError("constraint " + c.formula + " has an empty constrained set");

    CheckReport rep;
    rep.horizon = opts.horizon.value_or(resolve_horizon(c, pi));
    rep.beta = c.beta;
    const StateMask stop = mask_or(c.rule.target, c.rule.blocked);
    const ChainSampler sampler(mdp, pi);
    const Rng root(seed);
    const double slack = detail::truncation_slack(c);

    std::vector<detail::Accumulator> acc(ys.size());
    detail::Accumulator total;
    auto run = [&](std::size_t yi, Rng& rng) {
        const Trajectory traj = sampler.sample_from(ys[yi], std::max(rep.horizon, 1), rng, &stop);
        const double score = path_score(c, traj, rep.horizon);
        acc[yi].add(c, score);
        total.add(c, score);
    };
    if (opts.pooled) {
        Rng pick = root.split(0);
        for (int i = 0; i < opts.samples; ++i) {
            Rng rng = root.split(1 + static_cast<std::uint64_t>(i));
            const auto yi = static_cast<std::size_t>(pick.uniform() * static_cast<double>(ys.size()));
            run(std::min(yi, ys.size() - 1), rng);
        }
    } else {
        for (std::size_t yi = 0; yi < ys.size(); ++yi) {
            Rng stream = root.split(1 + static_cast<std::uint64_t>(ys[yi]));
            for (int i = 0; i < opts.samples; ++i)
                run(yi, stream);
        }
    }

    rep.verdict = Verdict::satisfied;
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
        StateCheck sc;
        sc.state = ys[yi];
        sc.samples = acc[yi].n;
        if (sc.samples > 0) {
            sc.satisfaction = acc[yi].hits / sc.samples;
            sc.measure = acc[yi].mean();
            sc.std_error = acc[yi].std_error();
            sc.verdict = detail::judge(sc.measure, sc.std_error, c.beta, slack, opts.z);
            rep.verdict = detail::worse(rep.verdict, sc.verdict);
        }
        rep.states.push_back(sc);
    }
    rep.samples = total.n;
    rep.satisfaction = total.hits / total.n;
    rep.measure = total.mean();
    if (opts.pooled)
        rep.verdict = detail::judge(rep.measure, total.std_error(), c.beta, slack, opts.z);
    if (c.vacuous())
        rep.verdict = Verdict::satisfied;
    return rep;
}

/// Exact counterpart of empirical_check by forward propagation of the score distribution.
inline CheckReport exact_check(const ChanceConstraint& c, const Mdp& mdp, const TabularPolicy& pi, std::optional<int> horizon = {})
{
    CheckReport rep;
    rep.horizon = horizon.value_or(resolve_horizon(c, pi));
    rep.beta = c.beta;
    const double slack = detail::truncation_slack(c);
    const auto ys = mask_members(c.constrained);
    if (ys.empty())
        throw InputError("constraint " + c.formula + " has an empty constrained set");
    double sat = 0.0, meas = 0.0;
    for (StateId s : ys) {
        StateCheck sc;
        sc.state = s;
        for (const auto& [score, p] : exact_score_distribution(c, mdp, pi, s, rep.horizon)) {
            sc.measure += p * violation_measure(c, score);
            sc.satisfaction += formula_event(c, score) ? p : 0.0;
        }
        sc.verdict = detail::judge(sc.measure, 0.0, c.beta + 1e-12, slack, 0.0);
        rep.verdict = detail::worse(rep.verdict, sc.verdict);
        sat += sc.satisfaction;
        meas += sc.measure;
        rep.states.push_back(sc);
    }
    rep.satisfaction = sat / ys.size();
    rep.measure = meas / ys.size();
    if (c.vacuous())
        rep.verdict = Verdict::satisfied;
    return rep;
}

}  // namespace pctladp::pctl
