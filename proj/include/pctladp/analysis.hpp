#pragma once

#include "pctladp/mdp.hpp"

#include <Eigen/Eigenvalues>

#include <deque>
#include <optional>

namespace pctladp {

/**
 * Exact finite-horizon expected cost D(s, T; pi) by backward recursion on the known kernel:
 * D_0 = 0, D_{t+1} = d_pi + gamma * P^pi D_t.
 */
inline Vector expected_cost_dp(const Mdp& mdp, const TabularPolicy& pi, const CostFunction& d, int horizon, double gamma)
{
    if (horizon < 0)
        throw InputError("horizon must be nonnegative");
    const Matrix chain = induced_chain(mdp, pi);
    const Vector step_cost = policy_cost(mdp, pi, d);
    Vector D = Vector::Zero(mdp.num_states());
    for (int t = 0; t < horizon; ++t)
        D = step_cost + gamma * (chain * D);
    return D;
}

/// Exact occupancy (1/H) sum_{t<H} Pr(X_t = s) of the induced chain started from `init`.
inline Vector occupancy(const Mdp& mdp, const TabularPolicy& pi, const Vector& init, int horizon)
{
    if (horizon < 1)
        throw InputError("occupancy horizon must be at least 1");
    if (init.size() != mdp.num_states())
        throw StructuralError("initial distribution has the wrong length");
    const Matrix chain = induced_chain(mdp, pi);
    Vector row = init;
    Vector c = Vector::Zero(mdp.num_states());
    for (int t = 0; t < horizon; ++t) {
        c += row;
        row = chain.transpose() * row;
    }
    return c / static_cast<double>(horizon);
}

/// Graph distances where an edge s -> s' exists iff some action moves s to s' with positive probability.
using DistanceTable = Eigen::MatrixXi;

/// BFS distances; unreachable pairs get the sentinel |S|.
inline DistanceTable shortest_path_metric(const Mdp& mdp)
{
    const int n = mdp.num_states();
    std::vector<std::vector<int>> adj(n);
    for (int s = 0; s < n; ++s) {
        std::vector<bool> seen(n, false);
        for (ActionId a : mdp.admissible[s])
            for (int t = 0; t < n; ++t)
                if (mdp.transition[a](s, t) > 0.0 && !seen[t]) {
                    seen[t] = true;
                    adj[s].push_back(t);
                }
    }
    DistanceTable sp = DistanceTable::Constant(n, n, n);
    std::deque<int> queue;
    for (int src = 0; src < n; ++src) {
        sp(src, src) = 0;
        queue.assign(1, src);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : adj[u])
                if (sp(src, v) == n && v != src) {
                    sp(src, v) = sp(src, u) + 1;
                    queue.push_back(v);
                }
        }
    }
    return sp;
}

struct MixingTimeEstimate {
    enum class Method { exact_doubling, eigenvalue_bound };

    int horizon = 0;
    double epsilon = 0.0;
    Method method = Method::exact_doubling;
    /// max_s |D(s, 2T) - D(s, T)| at the returned horizon.
    double residual = 0.0;
    /// Spectral diagnostic ceil(log(1/eps) / (1 - |lambda_2|)), absent when |lambda_2| is numerically 1.
    std::optional<double> eigenvalue_bound;
};

/// Second largest eigenvalue modulus of a row-stochastic matrix.
inline double second_eigenvalue_modulus(const Matrix& chain)
{
    Eigen::EigenSolver<Matrix> es(chain, false);
    std::vector<double> mods;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        mods.push_back(std::abs(es.eigenvalues()(i)));
    std::sort(mods.rbegin(), mods.rend());
    return mods.size() > 1 ? mods[1] : 0.0;
}

struct MixingOptions {
    int cap = 1 << 16;
    bool eigenvalue_diagnostic = false;
};

/**
 * epsilon-return mixing time by horizon doubling: the smallest power of two T with
 * max_s |D(s, 2T; pi) - D(s, T; pi)| <= epsilon.
 *
 * Throws NonConvergenceError (naming the worst state) if no such T <= cap exists.
 */
inline MixingTimeEstimate mixing_time(const Mdp& mdp, const TabularPolicy& pi, const CostFunction& d, double epsilon,
                                      double gamma, const MixingOptions& opts = {})
{
    if (!(epsilon > 0.0))
        throw InputError("mixing time needs epsilon > 0");
    const Matrix chain = induced_chain(mdp, pi);
    const Vector step_cost = policy_cost(mdp, pi, d);

    MixingTimeEstimate est;
    est.epsilon = epsilon;
    if (opts.eigenvalue_diagnostic) {
        const double lambda2 = second_eigenvalue_modulus(chain);
        if (lambda2 < 1.0 - 1e-12)
            est.eigenvalue_bound = std::ceil(std::log(1.0 / epsilon) / (1.0 - lambda2));
    }

    Vector D = Vector::Zero(mdp.num_states());
    int t = 0;
    auto advance_to = [&](int target) {
        for (; t < target; ++t)
            D = step_cost + gamma * (chain * D);
    };
    advance_to(1);
    Vector at_T = D;
    Eigen::Index worst = 0;
    for (int T = 1; T <= opts.cap; T *= 2) {
        advance_to(2 * T);
        const double residual = (D - at_T).cwiseAbs().maxCoeff(&worst);
        if (residual <= epsilon) {
            est.horizon = T;
            est.residual = residual;
            return est;
        }
        at_T = D;
    }
    throw NonConvergenceError("cost does not mix within " + std::to_string(opts.cap) + " steps; worst state " +
                              mdp.state_names[worst]);
}

}  // namespace pctladp
