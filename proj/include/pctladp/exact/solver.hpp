#pragma once

#include "pctladp/mdp.hpp"

#include <cmath>
#include <limits>

namespace pctladp {

/// Value table V(s) together with the temperature that produced it (0 = hardmax).
struct ValueTable {
    Vector values;
    double tau = 0.0;
    int iterations = 0;
    /// Sup-norm change of the last sweep.
    double residual = 0.0;
};

/// Q(s, a) = r(s, a) + gamma * sum_s' P(s'|s, a) V(s'); inadmissible entries are -inf.
inline Matrix q_from_value(const Vector& V, const Mdp& mdp)
{
    const int n = mdp.num_states();
    Matrix Q = Matrix::Constant(n, mdp.num_actions(), -std::numeric_limits<double>::infinity());
    for (int a = 0; a < mdp.num_actions(); ++a) {
        const Vector next = mdp.transition[a] * V;
        for (int s = 0; s < n; ++s)
            if (mdp.is_admissible(s, a))
                Q(s, a) = mdp.reward(s, a) + mdp.discount * next(s);
    }
    return Q;
}

/// tau * log sum_a exp(q_a / tau) over the admissible entries of one Q row, max-shifted.
inline double log_sum_exp(const Mdp& mdp, const Matrix& Q, StateId s, double tau)
{
    double qmax = -std::numeric_limits<double>::infinity();
    for (ActionId a : mdp.admissible[s])
        qmax = std::max(qmax, Q(s, a));
    double sum = 0.0;
    for (ActionId a : mdp.admissible[s])
        sum += std::exp((Q(s, a) - qmax) / tau);
    return qmax + tau * std::log(sum);
}

/// Softmax Bellman backup; tau = 0 gives the hardmax backup.
inline Vector softmax_backup(const Vector& V, const Mdp& mdp, double tau)
{
    if (tau < 0.0)
        throw InputError("temperature must be nonnegative");
    const Matrix Q = q_from_value(V, mdp);
    Vector out(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (tau == 0.0) {
            double best = -std::numeric_limits<double>::infinity();
            for (ActionId a : mdp.admissible[s])
                best = std::max(best, Q(s, a));
            out(s) = best;
        } else {
            out(s) = log_sum_exp(mdp, Q, s, tau);
        }
    }
    return out;
}

struct ViOptions {
    double tol = 1e-8;
    int max_iters = 100000;
};

/**
 * Iterates the (softmax) Bellman operator to its fixed point in sup norm.
 *
 * Throws NonConvergenceError when max_iters is exhausted or the iterates blow up,
 * which is what happens at gamma = 1 without absorbing structure.
 */
inline ValueTable value_iteration(const Mdp& mdp, double tau, const ViOptions& opts = {})
{
    ValueTable vt;
    vt.tau = tau;
    vt.values = Vector::Zero(mdp.num_states());
    for (int it = 1; it <= opts.max_iters; ++it) {
        Vector next = softmax_backup(vt.values, mdp, tau);
        vt.residual = (next - vt.values).cwiseAbs().maxCoeff();
        vt.values = std::move(next);
        vt.iterations = it;
        if (!std::isfinite(vt.residual) || vt.values.cwiseAbs().maxCoeff() > 1e15)
            throw NonConvergenceError("value iteration diverged after " + std::to_string(it) + " sweeps");
        if (vt.residual <= opts.tol)
            return vt;
    }
    throw NonConvergenceError("value iteration did not reach tolerance " + std::to_string(opts.tol) + " in " +
                              std::to_string(opts.max_iters) + " sweeps (residual " + std::to_string(vt.residual) + ")");
}

/**
 * pi(a|s) proportional to exp((Q(s,a) - V(s)) / tau), rows renormalized.
 * tau = 0 returns the greedy policy, ties going to the lowest action index.
 */
inline TabularPolicy policy_from_value(const Vector& V, const Mdp& mdp, double tau)
{
    const Matrix Q = q_from_value(V, mdp);
    TabularPolicy pi{Matrix::Zero(mdp.num_states(), mdp.num_actions())};
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (tau == 0.0) {
            ActionId best = mdp.admissible[s].front();
            for (ActionId a : mdp.admissible[s])
                if (Q(s, a) > Q(s, best))
                    best = a;
            pi.probs(s, best) = 1.0;
            continue;
        }
        // Shift by the row max instead of V(s); after renormalization the two agree.
        double qmax = -std::numeric_limits<double>::infinity();
        for (ActionId a : mdp.admissible[s])
            qmax = std::max(qmax, Q(s, a));
        double sum = 0.0;
        for (ActionId a : mdp.admissible[s])
            sum += pi.probs(s, a) = std::exp((Q(s, a) - qmax) / tau);
        pi.probs.row(s) /= sum;
    }
    return pi;
}

/// Row sums of the unnormalized exp((Q - V) / tau); equal to 1 exactly at the softmax fixed point.
inline Vector policy_row_mass(const Vector& V, const Mdp& mdp, double tau)
{
    const Matrix Q = q_from_value(V, mdp);
    Vector mass = Vector::Zero(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (ActionId a : mdp.admissible[s])
            mass(s) += std::exp((Q(s, a) - V(s)) / tau);
    return mass;
}

/// max_s (BV(s) - V(s)); nonpositive means V is feasible and therefore bounds V* from above.
inline double bellman_feasibility(const Vector& V, const Mdp& mdp, double tau)
{
    return (softmax_backup(V, mdp, tau) - V).maxCoeff();
}

/// sum_s c(s) |V_approx(s) - V_star(s)|
inline double weighted_l1_error(const Vector& approx, const Vector& star, const Vector& c)
{
    if (approx.size() != star.size() || c.size() != star.size())
        throw StructuralError("weighted_l1_error: length mismatch");
    if (c.minCoeff() < 0.0 || std::abs(c.sum() - 1.0) > 1e-9)
        throw InputError("weights must form a distribution");
    return c.dot((approx - star).cwiseAbs());
}

}  // namespace pctladp
