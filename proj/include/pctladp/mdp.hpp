#pragma once

#include "pctladp/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace pctladp {

using StateId = int;
using ActionId = int;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Membership mask over the states of an Mdp.
using StateMask = std::vector<bool>;

inline constexpr double stochastic_tol = 1e-9;

/**
 * Finite MDP with a dense transition kernel.
 *
 * transition[a](s, s') = P(s' | s, a). Rows of inadmissible (s, a) pairs are ignored
 * and conventionally zero. reward(s, a) = r(s, a).
 */
struct Mdp {
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::vector<ActionId>> admissible;
    std::vector<Matrix> transition;
    Matrix reward;
    Vector initial;
    double discount = 1.0;
    std::map<std::string, StateMask> labels;

    int num_states() const { return static_cast<int>(state_names.size()); }
    int num_actions() const { return static_cast<int>(action_names.size()); }

    double prob(StateId s, ActionId a, StateId next) const { return transition[a](s, next); }

    bool is_admissible(StateId s, ActionId a) const
    {
        const auto& acts = admissible[s];
        return std::find(acts.begin(), acts.end(), a) != acts.end();
    }

    bool is_sink(StateId s) const
    {
        for (ActionId a : admissible[s])
            if (std::abs(transition[a](s, s) - 1.0) > stochastic_tol)
                return false;
        return true;
    }

    /// Mask for an atomic proposition; throws InputError if the label is unknown.
    const StateMask& label(const std::string& name) const
    {
        auto it = labels.find(name);
        if (it == labels.end())
            throw InputError("unknown atomic proposition '" + name + "'");
        return it->second;
    }

    StateId state_index(const std::string& name) const
    {
        auto it = std::find(state_names.begin(), state_names.end(), name);
        if (it == state_names.end())
            throw InputError("unknown state '" + name + "'");
        return static_cast<StateId>(it - state_names.begin());
    }
};

/// Zero-initialized MDP with every action admissible everywhere and a uniform initial distribution.
inline Mdp make_mdp(int num_states, int num_actions, double discount = 1.0)
{
    Mdp m;
    for (int s = 0; s < num_states; ++s)
        m.state_names.push_back("s" + std::to_string(s));
    for (int a = 0; a < num_actions; ++a)
        m.action_names.push_back("a" + std::to_string(a));
    m.admissible.assign(num_states, {});
    for (auto& acts : m.admissible)
        for (int a = 0; a < num_actions; ++a)
            acts.push_back(a);
    m.transition.assign(num_actions, Matrix::Zero(num_states, num_states));
    m.reward = Matrix::Zero(num_states, num_actions);
    m.initial = Vector::Constant(num_states, 1.0 / num_states);
    m.discount = discount;
    return m;
}

/// Randomized Markov policy, probs(s, a) = pi(a | s).
struct TabularPolicy {
    Matrix probs;

    double operator()(StateId s, ActionId a) const { return probs(s, a); }
};

inline TabularPolicy uniform_policy(const Mdp& mdp)
{
    TabularPolicy pi{Matrix::Zero(mdp.num_states(), mdp.num_actions())};
    for (int s = 0; s < mdp.num_states(); ++s)
        for (ActionId a : mdp.admissible[s])
            pi.probs(s, a) = 1.0 / static_cast<double>(mdp.admissible[s].size());
    return pi;
}

/// Cost d(s, a) per state-action pair, same layout as Mdp::reward.
using CostFunction = Matrix;

struct Violation {
    StateId state = -1;
    ActionId action = -1;
    std::string message;
};

/// All invariant violations of an MDP; empty means well-formed.
inline std::vector<Violation> validate(const Mdp& mdp)
{
    std::vector<Violation> out;
    const int n = mdp.num_states();
    const int na = mdp.num_actions();
    auto fail = [&](StateId s, ActionId a, std::string msg) { out.push_back({s, a, std::move(msg)}); };

    if (static_cast<int>(mdp.admissible.size()) != n) {
        fail(-1, -1, "admissible table has " + std::to_string(mdp.admissible.size()) + " rows, expected " + std::to_string(n));
        return out;
    }
    if (static_cast<int>(mdp.transition.size()) != na) {
        fail(-1, -1, "transition kernel has " + std::to_string(mdp.transition.size()) + " action slices, expected " + std::to_string(na));
        return out;
    }
    for (int a = 0; a < na; ++a)
        if (mdp.transition[a].rows() != n || mdp.transition[a].cols() != n)
            fail(-1, a, "transition slice for action " + std::to_string(a) + " is not " + std::to_string(n) + "x" + std::to_string(n));
    if (mdp.reward.rows() != n || mdp.reward.cols() != na)
        fail(-1, -1, "reward table shape mismatch");
    if (!out.empty())
        return out;

    for (int s = 0; s < n; ++s) {
        if (mdp.admissible[s].empty())
            fail(s, -1, "state " + mdp.state_names[s] + " has no admissible action");
        for (ActionId a : mdp.admissible[s]) {
            if (a < 0 || a >= na) {
                fail(s, a, "admissible action index out of range");
                continue;
            }
            const auto row = mdp.transition[a].row(s);
            if (row.minCoeff() < 0.0)
                fail(s, a, "negative transition probability at (" + mdp.state_names[s] + ", " + mdp.action_names[a] + ")");
            const double sum = row.sum();
            if (std::abs(sum - 1.0) > stochastic_tol) {
                std::ostringstream os;
                os << "transition row (" << mdp.state_names[s] << ", " << mdp.action_names[a] << ") sums to " << sum;
                fail(s, a, os.str());
            }
            if (!std::isfinite(mdp.reward(s, a)))
                fail(s, a, "non-finite reward");
        }
    }
    if (mdp.initial.size() != n)
        fail(-1, -1, "initial distribution has wrong length");
    else if (mdp.initial.minCoeff() < 0.0 || std::abs(mdp.initial.sum() - 1.0) > stochastic_tol)
        fail(-1, -1, "initial distribution is not a probability vector");
    if (!(mdp.discount > 0.0 && mdp.discount <= 1.0))
        fail(-1, -1, "discount must lie in (0, 1]");
    for (const auto& [name, mask] : mdp.labels)
        if (static_cast<int>(mask.size()) != n)
            fail(-1, -1, "label '" + name + "' has wrong length");
    return out;
}

inline void require_valid(const Mdp& mdp)
{
    auto v = validate(mdp);
    if (!v.empty())
        throw InputError("invalid MDP: " + v.front().message + (v.size() > 1 ? " (+" + std::to_string(v.size() - 1) + " more)" : ""));
}

inline std::vector<std::string> validate(const Mdp& mdp, const TabularPolicy& pi)
{
    std::vector<std::string> out;
    if (pi.probs.rows() != mdp.num_states() || pi.probs.cols() != mdp.num_actions()) {
        out.push_back("policy shape does not match MDP");
        return out;
    }
    for (int s = 0; s < mdp.num_states(); ++s) {
        double sum = 0.0;
        for (int a = 0; a < mdp.num_actions(); ++a) {
            const double p = pi.probs(s, a);
            if (p < 0.0)
                out.push_back("negative probability at state " + mdp.state_names[s]);
            if (p > 0.0 && !mdp.is_admissible(s, a))
                out.push_back("mass on inadmissible action at state " + mdp.state_names[s]);
            sum += p;
        }
        if (std::abs(sum - 1.0) > stochastic_tol)
            out.push_back("policy row " + mdp.state_names[s] + " does not sum to 1");
    }
    return out;
}

/// P^pi(s' | s) = sum_a P(s' | s, a) pi(a | s).
inline Matrix induced_chain(const Mdp& mdp, const TabularPolicy& pi)
{
    const int n = mdp.num_states();
    if (pi.probs.rows() != n || pi.probs.cols() != mdp.num_actions())
        throw StructuralError("policy is " + std::to_string(pi.probs.rows()) + "x" + std::to_string(pi.probs.cols()) +
                              ", MDP needs " + std::to_string(n) + "x" + std::to_string(mdp.num_actions()));
    Matrix chain = Matrix::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (ActionId a : mdp.admissible[s])
            if (pi.probs(s, a) != 0.0)
                chain.row(s) += pi.probs(s, a) * mdp.transition[a].row(s);
    return chain;
}

/// Expected one-step cost under pi: d_pi(s) = sum_a pi(a|s) d(s, a).
inline Vector policy_cost(const Mdp& mdp, const TabularPolicy& pi, const CostFunction& d)
{
    Vector out = Vector::Zero(mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (ActionId a : mdp.admissible[s])
            out(s) += pi.probs(s, a) * d(s, a);
    return out;
}

/// Copy of `mdp` in which every state of `sinks` self-loops with probability 1 under every admissible action.
inline Mdp with_sinks(const Mdp& mdp, const StateMask& sinks)
{
    Mdp out = mdp;
    for (int s = 0; s < mdp.num_states(); ++s) {
        if (!sinks[s])
            continue;
        for (ActionId a : mdp.admissible[s]) {
            out.transition[a].row(s).setZero();
            out.transition[a](s, s) = 1.0;
        }
    }
    return out;
}

inline StateMask mask_or(const StateMask& a, const StateMask& b)
{
    StateMask out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] || b[i];
    return out;
}

inline std::vector<StateId> mask_members(const StateMask& m)
{
    std::vector<StateId> out;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i])
            out.push_back(static_cast<StateId>(i));
    return out;
}

inline StateMask support_mask(const Vector& dist)
{
    StateMask out(dist.size());
    for (Eigen::Index i = 0; i < dist.size(); ++i)
        out[i] = dist(i) > 0.0;
    return out;
}

}  // namespace pctladp
