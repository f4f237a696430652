#pragma once

// Reference implementations used as test oracles. They are written from the definitions
// with no shared code paths: plain loops, brute-force path enumeration and dense solves.

#include "pctladp/mdp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracle {

using pctladp::Matrix;
using pctladp::Mdp;
using pctladp::StateMask;
using pctladp::TabularPolicy;
using pctladp::Vector;

struct Gen {
    std::mt19937_64 eng;
    explicit Gen(std::uint64_t seed) : eng(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    bool coin(double p = 0.5) { return uniform() < p; }
};

/**
 * Random MDP with dense-ish kernels. With `partial`, each state keeps a random nonempty
 * subset of admissible actions.
 */
inline Mdp random_mdp(Gen& g, int n, int na, double gamma, bool partial = false, double density = 0.7)
{
    Mdp m = pctladp::make_mdp(n, na, gamma);
    for (int s = 0; s < n; ++s) {
        if (partial) {
            m.admissible[s].clear();
            for (int a = 0; a < na; ++a)
                if (g.coin(0.7))
                    m.admissible[s].push_back(a);
            if (m.admissible[s].empty())
                m.admissible[s].push_back(g.integer(0, na - 1));
        }
        for (int a : m.admissible[s]) {
            double sum = 0.0;
            for (int t = 0; t < n; ++t) {
                const double w = g.coin(density) ? g.uniform(0.05, 1.0) : 0.0;
                m.transition[a](s, t) = w;
                sum += w;
            }
            if (sum == 0.0) {
                m.transition[a](s, g.integer(0, n - 1)) = 1.0;
                sum = 1.0;
            }
            m.transition[a].row(s) /= sum;
            m.reward(s, a) = g.uniform(-1.0, 1.0);
        }
    }
    Vector init(n);
    for (int s = 0; s < n; ++s)
        init(s) = g.uniform(0.1, 1.0);
    m.initial = init / init.sum();
    return m;
}

inline TabularPolicy random_policy(Gen& g, const Mdp& m)
{
    TabularPolicy pi{Matrix::Zero(m.num_states(), m.num_actions())};
    for (int s = 0; s < m.num_states(); ++s) {
        double sum = 0.0;
        for (int a : m.admissible[s]) {
            pi.probs(s, a) = g.uniform(0.05, 1.0);
            sum += pi.probs(s, a);
        }
        pi.probs.row(s) /= sum;
    }
    return pi;
}

inline StateMask random_mask(Gen& g, int n, double p)
{
    StateMask m(n);
    for (int s = 0; s < n; ++s)
        m[s] = g.coin(p);
    return m;
}

inline Matrix q_values(const Mdp& m, const Vector& V)
{
    Matrix Q = Matrix::Constant(m.num_states(), m.num_actions(), -INFINITY);
    for (int s = 0; s < m.num_states(); ++s)
        for (int a : m.admissible[s]) {
            double e = 0.0;
            for (int t = 0; t < m.num_states(); ++t)
                e += m.transition[a](s, t) * V(t);
            Q(s, a) = m.reward(s, a) + m.discount * e;
        }
    return Q;
}

/// tau log sum_a exp(Q / tau), or the max when tau == 0.
inline Vector soft_backup(const Mdp& m, const Vector& V, double tau)
{
    const Matrix Q = q_values(m, V);
    Vector out(m.num_states());
    for (int s = 0; s < m.num_states(); ++s) {
        double mx = -INFINITY;
        for (int a : m.admissible[s])
            mx = std::max(mx, Q(s, a));
        if (tau == 0.0) {
            out(s) = mx;
            continue;
        }
        double z = 0.0;
        for (int a : m.admissible[s])
            z += std::exp((Q(s, a) - mx) / tau);
        out(s) = mx + tau * std::log(z);
    }
    return out;
}

/// Fixed point of soft_backup by plain iteration to machine precision.
inline Vector soft_vi(const Mdp& m, double tau)
{
    Vector V = Vector::Zero(m.num_states());
    for (int it = 0; it < 200000; ++it) {
        const Vector next = soft_backup(m, V, tau);
        const double d = (next - V).cwiseAbs().maxCoeff();
        V = next;
        if (d < 1e-13)
            break;
    }
    return V;
}

/// Softmax policy of temperature tau over admissible actions.
inline TabularPolicy soft_policy(const Mdp& m, const Vector& V, double tau)
{
    const Matrix Q = q_values(m, V);
    TabularPolicy pi{Matrix::Zero(m.num_states(), m.num_actions())};
    for (int s = 0; s < m.num_states(); ++s) {
        double mx = -INFINITY;
        for (int a : m.admissible[s])
            mx = std::max(mx, Q(s, a));
        double z = 0.0;
        for (int a : m.admissible[s])
            z += std::exp((Q(s, a) - mx) / tau);
        for (int a : m.admissible[s])
            pi.probs(s, a) = std::exp((Q(s, a) - mx) / tau) / z;
    }
    return pi;
}

/**
 * Visits every path of the chain induced by `pi` from `start`. `visit(path_states,
 * path_actions, prob)` is called at each node; it returns false to stop expanding.
 */
inline void enumerate_paths(const Mdp& m, const TabularPolicy& pi, int start, int max_transitions,
                            const std::function<bool(const std::vector<int>&, const std::vector<int>&, double)>& visit)
{
    std::vector<int> states{start}, actions;
    std::function<void(double)> rec = [&](double p) {
        if (!visit(states, actions, p) || static_cast<int>(actions.size()) == max_transitions)
            return;
        const int s = states.back();
        for (int a : m.admissible[s]) {
            if (pi.probs(s, a) == 0.0)
                continue;
            for (int t = 0; t < m.num_states(); ++t) {
                const double pt = m.transition[a](s, t);
                if (pt == 0.0)
                    continue;
                states.push_back(t);
                actions.push_back(a);
                rec(p * pi.probs(s, a) * pt);
                states.pop_back();
                actions.pop_back();
            }
        }
    };
    rec(1.0);
}

/// Pr(X_1 in target | X_0 = s).
inline double next_prob(const Mdp& m, const TabularPolicy& pi, int s, const StateMask& target)
{
    double p = 0.0;
    enumerate_paths(m, pi, s, 1, [&](const std::vector<int>& st, const std::vector<int>&, double pr) {
        if (st.size() == 2 && target[st[1]])
            p += pr;
        return true;
    });
    return p;
}

/// Pr(allowed U<=k target | X_0 = s) by path enumeration.
inline double bounded_until(const Mdp& m, const TabularPolicy& pi, int s, const StateMask& allowed, const StateMask& target, int k)
{
    double p = 0.0;
    enumerate_paths(m, pi, s, k, [&](const std::vector<int>& st, const std::vector<int>&, double pr) {
        const int x = st.back();
        if (target[x]) {
            p += pr;
            return false;
        }
        return static_cast<bool>(allowed[x]);
    });
    return p;
}

/// Pr(allowed U target) from every state: graph pre-pass for the zero set, then a dense solve.
inline Vector unbounded_until(const Mdp& m, const TabularPolicy& pi, const StateMask& allowed, const StateMask& target)
{
    const int n = m.num_states();
    Matrix P = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int a : m.admissible[s])
            P.row(s) += pi.probs(s, a) * m.transition[a].row(s);
    std::vector<bool> can(n, false);
    for (int s = 0; s < n; ++s)
        can[s] = target[s];
    for (bool changed = true; changed;) {
        changed = false;
        for (int s = 0; s < n; ++s)
            if (!can[s] && allowed[s])
                for (int t = 0; t < n; ++t)
                    if (P(s, t) > 0.0 && can[t]) {
                        can[s] = true;
                        changed = true;
                        break;
                    }
    }
    std::vector<int> idx;
    for (int s = 0; s < n; ++s)
        if (can[s] && !target[s])
            idx.push_back(s);
    Vector x = Vector::Zero(n);
    for (int s = 0; s < n; ++s)
        if (target[s])
            x(s) = 1.0;
    const int k = static_cast<int>(idx.size());
    if (k == 0)
        return x;
    Matrix A = Matrix::Identity(k, k);
    Vector b = Vector::Zero(k);
    for (int i = 0; i < k; ++i)
        for (int t = 0; t < n; ++t) {
            if (target[t])
                b(i) += P(idx[i], t);
            for (int j = 0; j < k; ++j)
                if (idx[j] == t)
                    A(i, j) -= P(idx[i], t);
        }
    const Vector y = A.fullPivLu().solve(b);
    for (int i = 0; i < k; ++i)
        x(idx[i]) = y(i);
    return x;
}

}  // namespace oracle
