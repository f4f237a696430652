#pragma once

#include "pctladp/approx/model.hpp"
#include "pctladp/pctl/compile.hpp"

namespace pctladp::approx {

/// Delta_2 sample for one chance constraint: trajectories grouped by start state in Y.
struct ChanceSamples {
    int horizon = 0;
    std::vector<StateId> states;
    std::vector<std::vector<Trajectory>> by_state;
};

/// Monte-Carlo estimates of the value part F of the inner objective.
struct FEstimate {
    /// Visitation weights c-hat over the decision states of the batch.
    Vector weights;
    /// sum_s c-hat(s) V(s; theta)
    double objective = 0.0;
    /// F-hat = sum_s c-hat(s) f(s; theta)
    double value = 0.0;
    /// E_{Delta_1} B(g)
    double mean_hinge = 0.0;
    Vector grad;
};

/**
 * F-hat and its gradient from on-policy trajectories, with
 * f(s) = V(s) + lambda B(g(s)) + nu/2 B(g(s))^2.
 *
 * Both terms are normalized by the total number of decision states N, matching the
 * visitation weights:
 *   pathwise  (1/N) sum_h sum_t grad f(s_t)
 *   score     (1/N) sum_h [sum_t grad log pi(a_t|s_t)] (f(h) - b)
 * where b is the batch mean of f(h) when `baseline` is set and 0 otherwise.
 */
inline FEstimate estimate_F(const ValueApprox& va, const Evaluation& ev, const std::vector<Trajectory>& trajs, double lambda,
                            double nu, bool baseline = false)
{
    const int n = va.mdp().num_states();
    FEstimate est;
    est.weights = Vector::Zero(n);
    est.grad = Vector::Zero(va.dim());

    Vector f(n);
    Matrix fgrad(n, va.dim());
    for (int s = 0; s < n; ++s) {
        const double B = hinge(ev.gap(s));
        f(s) = ev.V(s) + lambda * B + 0.5 * nu * B * B;
        fgrad.row(s) = va.basis().phi.row(s) + (lambda * hinge_slope(ev.gap(s)) + nu * B) * ev.gap_grad.row(s);
    }

    double total = 0.0;
    std::vector<double> fh(trajs.size(), 0.0);
    for (std::size_t h = 0; h < trajs.size(); ++h)
        for (const Step& st : trajs[h].steps) {
            est.weights(st.state) += 1.0;
            fh[h] += f(st.state);
            total += 1.0;
        }
    if (total == 0.0)
        throw InputError("on-policy batch has no decision states");

    double b = 0.0;
    if (baseline)
        for (double x : fh)
            b += x / static_cast<double>(fh.size());
    for (std::size_t h = 0; h < trajs.size(); ++h)
        if (fh[h] != b)
            est.grad += (fh[h] - b) * trajectory_score(va, ev, trajs[h]).transpose();

    est.weights /= total;
    est.grad /= total;
    est.grad += fgrad.transpose() * est.weights;
    est.objective = est.weights.dot(ev.V);
    est.value = est.weights.dot(f);
    for (int s = 0; s < n; ++s)
        est.mean_hinge += est.weights(s) * hinge(ev.gap(s));
    return est;
}

inline Vector grad_F(const ValueApprox& va, const std::vector<Trajectory>& trajs, double lambda, double nu, bool baseline = false)
{
    return estimate_F(va, evaluate(va), trajs, lambda, nu, baseline).grad;
}

namespace detail {

/// Per-trajectory quantity whose mean estimates l(s) + beta.
inline double chance_indicator(const pctl::ChanceConstraint& c, const Trajectory& z, int horizon)
{
    return pctl::violation_measure(c, pctl::path_score(c, z, horizon));
}

inline const std::vector<Trajectory>& group(const ChanceSamples& Z, std::size_t i)
{
    if (Z.by_state[i].empty())
        throw InputError("no Delta_2 trajectories start at state index " + std::to_string(Z.states[i]));
    return Z.by_state[i];
}

}  // namespace detail

/// l-hat(s) = (1/|Z(s)|) sum_z 1{sign D(z) >= alpha} - beta; the mean of sign D for expectation constraints.
inline double chance_gap(const pctl::ChanceConstraint& c, const ChanceSamples& Z, StateId s)
{
    auto it = std::find(Z.states.begin(), Z.states.end(), s);
    if (it == Z.states.end() || Z.by_state[it - Z.states.begin()].empty())
        throw InputError("no Delta_2 trajectories start at state " + std::to_string(s));
    const auto& zs = Z.by_state[it - Z.states.begin()];
    double sum = 0.0;
    for (const Trajectory& z : zs)
        sum += detail::chance_indicator(c, z, Z.horizon);
    return sum / static_cast<double>(zs.size()) - c.beta;
}

struct MEstimate {
    /// l-hat per state of Z.states.
    Vector gaps;
    /// E_{Delta_2} B(l)
    double mean_hinge = 0.0;
    double max_hinge = 0.0;
    /// m = xi E B(l) + nu/2 (E B(l))^2
    double value = 0.0;
    Vector grad;
};

/**
 * m-hat and its gradient
 *   xi E[B'(l) grad l] + nu E[B(l) B'(l) grad l],
 * with grad l(s) = (1/|Z(s)|) sum_z grad log p(z) (1{D(z) >= alpha} - b_s) and Delta_2
 * uniform over the states of Z. The baseline b_s is the group mean when `baseline`
 * is set, else 0.
 */
inline MEstimate estimate_m(const ValueApprox& va, const Evaluation& ev, const pctl::ChanceConstraint& c, const ChanceSamples& Z,
                            double xi, double nu, bool baseline = false)
{
    const std::size_t ny = Z.states.size();
    if (ny == 0)
        throw InputError("Delta_2 sample is empty");
    MEstimate est;
    est.gaps.resize(static_cast<Eigen::Index>(ny));
    est.grad = Vector::Zero(va.dim());
    for (std::size_t i = 0; i < ny; ++i) {
        const auto& zs = detail::group(Z, i);
        std::vector<double> ind(zs.size());
        double mean = 0.0;
        for (std::size_t k = 0; k < zs.size(); ++k) {
            ind[k] = detail::chance_indicator(c, zs[k], Z.horizon);
            mean += ind[k] / static_cast<double>(zs.size());
        }
        const double l = mean - c.beta;
        est.gaps(static_cast<Eigen::Index>(i)) = l;
        const double B = hinge(l);
        est.mean_hinge += B / static_cast<double>(ny);
        est.max_hinge = std::max(est.max_hinge, B);
        const double w = (xi + nu * B) * hinge_slope(l);
        if (w == 0.0)
            continue;
        const double b = baseline ? mean : 0.0;
        RowVector gl = RowVector::Zero(va.dim());
        for (std::size_t k = 0; k < zs.size(); ++k)
            if (ind[k] != b)
                gl += (ind[k] - b) * trajectory_score(va, ev, zs[k]);
        est.grad += (w / static_cast<double>(zs.size() * ny)) * gl.transpose();
    }
    est.value = xi * est.mean_hinge + 0.5 * nu * est.mean_hinge * est.mean_hinge;
    return est;
}

inline Vector grad_m(const ValueApprox& va, const pctl::ChanceConstraint& c, const ChanceSamples& Z, double xi, double nu,
                     bool baseline = false)
{
    return estimate_m(va, evaluate(va), c, Z, xi, nu, baseline).grad;
}

}  // namespace pctladp::approx
