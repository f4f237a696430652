#pragma once

#include "pctladp/mdp.hpp"
#include "pctladp/rng.hpp"

#include <optional>
#include <utility>

namespace pctladp {

struct Step {
    StateId state;
    ActionId action;
    StateId next;
};

/// Sampled path; steps[t] = (s_t, a_t, s_{t+1}).
struct Trajectory {
    StateId origin = -1;
    std::vector<Step> steps;

    int length() const { return static_cast<int>(steps.size()); }

    /// s_t for t in [0, length()]; s_0 is the origin.
    StateId state_at(int t) const { return t == 0 ? origin : steps[t - 1].next; }
};

namespace detail {

/// Inverse-CDF table over the nonzero entries of a probability row.
struct CumulativeRow {
    std::vector<int> index;
    std::vector<double> cdf;

    template <typename Row>
    static CumulativeRow from(const Row& row)
    {
        CumulativeRow out;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < row.size(); ++i) {
            if (row(i) > 0.0) {
                acc += row(i);
                out.index.push_back(static_cast<int>(i));
                out.cdf.push_back(acc);
            }
        }
        return out;
    }

    bool empty() const { return index.empty(); }

    int draw(double u) const
    {
        const double target = u * cdf.back();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        if (it == cdf.end())
            --it;
        return index[it - cdf.begin()];
    }
};

}  // namespace detail

/**
 * Samples trajectories of the chain induced by a fixed policy.
 *
 * Precomputes inverse-CDF tables for every policy row and every admissible
 * transition row, so repeated sampling on a fixed (mdp, policy) pair is cheap.
 */
class ChainSampler {
public:
    ChainSampler(const Mdp& mdp, const TabularPolicy& pi) : n_(mdp.num_states())
    {
        if (pi.probs.rows() != n_ || pi.probs.cols() != mdp.num_actions())
            throw StructuralError("policy shape does not match MDP");
        action_rows_.reserve(n_);
        next_rows_.assign(static_cast<std::size_t>(n_) * mdp.num_actions(), {});
        na_ = mdp.num_actions();
        for (int s = 0; s < n_; ++s) {
            action_rows_.push_back(detail::CumulativeRow::from(pi.probs.row(s)));
            if (action_rows_.back().empty())
                throw InputError("policy row for state " + mdp.state_names[s] + " has no mass");
            for (ActionId a : mdp.admissible[s])
                next_rows_[static_cast<std::size_t>(s) * na_ + a] = detail::CumulativeRow::from(mdp.transition[a].row(s));
        }
    }

    int num_states() const { return n_; }

    /// Draws up to `max_len` transitions from `start`; stops early after entering `stop`.
    Trajectory sample_from(StateId start, int max_len, Rng& rng, const StateMask* stop = nullptr) const
    {
        Trajectory traj;
        traj.origin = start;
        traj.steps.reserve(max_len);
        StateId s = start;
        for (int t = 0; t < max_len; ++t) {
            const ActionId a = action_rows_[s].draw(rng.uniform());
            const auto& row = next_rows_[static_cast<std::size_t>(s) * na_ + a];
            const StateId next = row.draw(rng.uniform());
            traj.steps.push_back({s, a, next});
            s = next;
            if (stop && (*stop)[s])
                break;
        }
        return traj;
    }

    Trajectory sample(const Vector& init, int max_len, Rng& rng, const StateMask* stop = nullptr) const
    {
        return sample_from(draw_state(init, rng), max_len, rng, stop);
    }

    static StateId draw_state(const Vector& init, Rng& rng)
    {
        const double u = rng.uniform() * init.sum();
        double acc = 0.0;
        StateId last = -1;
        for (Eigen::Index i = 0; i < init.size(); ++i) {
            if (init(i) <= 0.0)
                continue;
            acc += init(i);
            last = static_cast<StateId>(i);
            if (u < acc)
                return last;
        }
        if (last < 0)
            throw InputError("initial distribution has empty support");
        return last;
    }

private:
    int n_ = 0;
    int na_ = 0;
    std::vector<detail::CumulativeRow> action_rows_;
    std::vector<detail::CumulativeRow> next_rows_;
};

/// One trajectory from the chain induced by `pi`, reproducible from `seed`.
inline Trajectory sample_trajectory(const Mdp& mdp, const TabularPolicy& pi, const Vector& init, int max_len,
                                    const std::optional<StateMask>& stop_states, std::uint64_t seed)
{
    if (max_len < 1)
        throw InputError("max_len must be at least 1");
    if (init.size() != mdp.num_states() || (init.array() > 0.0).count() == 0)
        throw InputError("initial distribution has empty support");
    Rng rng(seed);
    ChainSampler sampler(mdp, pi);
    return sampler.sample(init, max_len, rng, stop_states ? &*stop_states : nullptr);
}

/**
 * Discounted cost sum_t gamma^t d(s_t, a_t) along `traj`.
 *
 * With `stop_set`, accumulation ends after the first transition that enters the set.
 */
inline double trajectory_cost(const Trajectory& traj, const CostFunction& d, double gamma,
                              const StateMask* stop_set = nullptr)
{
    double total = 0.0;
    double w = 1.0;
    for (const Step& st : traj.steps) {
        total += w * d(st.state, st.action);
        w *= gamma;
        if (stop_set && (*stop_set)[st.next])
            break;
    }
    return total;
}

/// Empirical visitation distribution over the decision states s_0 .. s_{L-1} of each trajectory.
inline Vector visitation_weights(const Mdp& mdp, const TabularPolicy& /*pi*/, const std::vector<Trajectory>& trajectories)
{
    Vector c = Vector::Zero(mdp.num_states());
    double total = 0.0;
    for (const auto& traj : trajectories)
        for (const Step& st : traj.steps) {
            c(st.state) += 1.0;
            total += 1.0;
        }
    if (total == 0.0)
        throw InputError("visitation weights need at least one non-empty trajectory");
    return c / total;
}

}  // namespace pctladp
