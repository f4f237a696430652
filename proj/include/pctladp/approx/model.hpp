#pragma once

#include "pctladp/analysis.hpp"
#include "pctladp/exact/solver.hpp"
#include "pctladp/trajectory.hpp"

namespace pctladp::approx {

using RowVector = Eigen::RowVectorXd;

/// Feature matrix Phi (|S| x K); row s is Phi(s).
struct Basis {
    Matrix phi;
    /// Kernel centers and width, when the basis came from ggk_basis.
    std::vector<StateId> centers;
    double sigma = 0.0;

    int size() const { return static_cast<int>(phi.cols()); }
};

/// phi_j(s) = exp(-SP(s, c_j)^2 / (2 sigma^2)) over a precomputed distance table.
inline Basis ggk_basis(const DistanceTable& sp, const std::vector<StateId>& centers, double sigma)
{
    if (centers.empty())
        throw InputError("a kernel basis needs at least one center");
    if (!(sigma > 0.0))
        throw InputError("kernel width sigma must be positive");
    const int n = static_cast<int>(sp.rows());
    Basis b;
    b.centers = centers;
    b.sigma = sigma;
    b.phi.resize(n, static_cast<Eigen::Index>(centers.size()));
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (centers[j] < 0 || centers[j] >= n)
            throw InputError("kernel center index out of range");
        for (int s = 0; s < n; ++s) {
            const double d = sp(s, centers[j]);
            b.phi(s, static_cast<Eigen::Index>(j)) = std::exp(-d * d / (2.0 * sigma * sigma));
        }
    }
    return b;
}

inline Basis ggk_basis(const Mdp& mdp, const std::vector<StateId>& centers, double sigma)
{
    return ggk_basis(shortest_path_metric(mdp), centers, sigma);
}

inline RowVector basis_eval(const Basis& b, StateId s) { return b.phi.row(s); }

/**
 * Linear value approximation V(s; theta) = Phi(s) theta with the softmax policy of
 * temperature tau. Holds its own copy of the MDP and the per-action products P_a Phi,
 * so Q and every gradient are cheap to re-evaluate as theta moves.
 */
class ValueApprox {
public:
    ValueApprox(Mdp mdp, Basis basis, double tau) : mdp_(std::move(mdp)), basis_(std::move(basis)), tau_(tau)
    {
        if (!(tau_ > 0.0))
            throw InputError("temperature must be positive");
        if (basis_.phi.rows() != mdp_.num_states())
            throw StructuralError("basis has " + std::to_string(basis_.phi.rows()) + " rows for " +
                                  std::to_string(mdp_.num_states()) + " states");
        theta = Vector::Zero(basis_.size());
        for (const Matrix& P : mdp_.transition)
            next_phi_.push_back(mdp_.discount * (P * basis_.phi));
    }

    Vector theta;

    const Mdp& mdp() const { return mdp_; }
    const Basis& basis() const { return basis_; }
    double tau() const { return tau_; }
    int dim() const { return basis_.size(); }

    Vector values() const { return basis_.phi * theta; }
    double value(StateId s) const { return basis_.phi.row(s).dot(theta); }

    /// gamma * sum_s' P(s'|s, a) Phi(s'), the gradient of Q(s, a; theta).
    RowVector q_gradient(StateId s, ActionId a) const { return next_phi_[a].row(s); }

private:
    Mdp mdp_;
    Basis basis_;
    double tau_;
    std::vector<Matrix> next_phi_;
};

/**
 * Everything the solver needs at one theta: V, Q, the renormalized policy, Bellman
 * gaps g(s) = BV(s) - V(s), their exact gradients, and the expected Q-gradient under pi.
 */
struct Evaluation {
    Vector theta;
    Vector V;
    Matrix Q;
    TabularPolicy pi;
    Vector gap;
    /// Row s is grad_theta g(s; theta).
    Matrix gap_grad;
    /// Row s is sum_b pi(b|s) grad Q(s, b).
    Matrix mean_q_grad;
};

inline Evaluation evaluate(const ValueApprox& va)
{
    const Mdp& mdp = va.mdp();
    const int n = mdp.num_states();
    Evaluation ev;
    ev.theta = va.theta;
    ev.V = va.values();
    ev.Q = q_from_value(ev.V, mdp);
    ev.pi = policy_from_value(ev.V, mdp, va.tau());
    ev.gap.resize(n);
    ev.mean_q_grad = Matrix::Zero(n, va.dim());
    for (int s = 0; s < n; ++s) {
        ev.gap(s) = log_sum_exp(mdp, ev.Q, s, va.tau()) - ev.V(s);
        for (ActionId a : mdp.admissible[s])
            ev.mean_q_grad.row(s) += ev.pi.probs(s, a) * va.q_gradient(s, a);
    }
    ev.gap_grad = ev.mean_q_grad - va.basis().phi;
    return ev;
}

/// grad_theta log pi(a|s; theta) = (grad Q(s, a) - sum_b pi(b|s) grad Q(s, b)) / tau.
inline RowVector grad_log_policy(const ValueApprox& va, const Evaluation& ev, StateId s, ActionId a)
{
    return (va.q_gradient(s, a) - ev.mean_q_grad.row(s)) / va.tau();
}

inline RowVector grad_log_policy(const ValueApprox& va, StateId s, ActionId a)
{
    return grad_log_policy(va, evaluate(va), s, a);
}

/// g(s; theta) = BV(s; theta) - V(s; theta)
inline double bellman_gap(const ValueApprox& va, StateId s) { return evaluate(va).gap(s); }

inline double hinge(double x) { return x > 0.0 ? x : 0.0; }
inline double hinge_slope(double x) { return x > 0.0 ? 1.0 : 0.0; }

/// Sum of grad log pi over the steps of a trajectory: grad log p(z; theta).
inline RowVector trajectory_score(const ValueApprox& va, const Evaluation& ev, const Trajectory& z)
{
    RowVector out = RowVector::Zero(va.dim());
    for (const Step& st : z.steps)
        out += grad_log_policy(va, ev, st.state, st.action);
    return out;
}

}  // namespace pctladp::approx
