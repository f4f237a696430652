// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include "oracles.hpp"

#include "pctladp/experiments.hpp"
#include "pctladp/pctl/parser.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace pctladp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Outcome softmax_contraction_and_limit()
{
    const auto t0 = std::chrono::steady_clock::now();
    oracle::Gen g(101);
    double worst_ratio = 0.0, worst_limit = -INFINITY;
    bool ok = true;
    for (int i = 0; i < 200; ++i) {
        const int n = g.integer(1, 10), na = g.integer(1, 4);
        const double gamma = g.uniform(0.5, 0.99);
        const Mdp m = oracle::random_mdp(g, n, na, gamma, i % 2 == 1);
        const double tau = std::exp(g.uniform(std::log(0.01), std::log(10.0)));
        for (int k = 0; k < 5; ++k) {
            Vector v1(n), v2(n);
            for (int s = 0; s < n; ++s) {
                v1(s) = g.uniform(-10, 10);
                v2(s) = g.uniform(-10, 10);
            }
            const double lhs = (softmax_backup(v1, m, tau) - softmax_backup(v2, m, tau)).cwiseAbs().maxCoeff();
            const double rhs = gamma * (v1 - v2).cwiseAbs().maxCoeff();
            ok = ok && lhs <= rhs + 1e-12;
            worst_ratio = std::max(worst_ratio, lhs / rhs);
        }
        const Vector soft = value_iteration(m, 1e-3, {1e-11, 1000000}).values;
        const Vector hard = oracle::soft_vi(m, 0.0);
        const double bound = 1e-3 * std::log(static_cast<double>(na)) / (1.0 - gamma) + 1e-6;
        const double err = (soft - hard).cwiseAbs().maxCoeff();
        ok = ok && err <= bound;
        worst_limit = std::max(worst_limit, err - bound);
    }
    const double secs = seconds_since(t0);
    ok = ok && secs < 10.0;
    return {ok, "max ||BV1-BV2||/(gamma||V1-V2||) = " + fmt(worst_ratio) + ", max (limit error - bound) = " + fmt(worst_limit) +
                    ", " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------- 2

Outcome upper_bound_property()
{
    oracle::Gen g(202);
    int feasible = 0;
    double worst = INFINITY;
    for (int i = 0; i < 100; ++i) {
        const int n = g.integer(2, 10), na = g.integer(1, 4);
        const double gamma = g.uniform(0.5, 0.95), tau = g.uniform(0.1, 5.0);
        const Mdp m = oracle::random_mdp(g, n, na, gamma, i % 3 == 0);
        const Vector vstar = oracle::soft_vi(m, tau);
        Vector V(n);
        if (i % 2 == 0) {
            // V* plus a nonnegative bump of random scale, lifted enough that B V <= V.
            const double scale = std::exp(g.uniform(std::log(1e-6), 0.0));
            Vector u(n);
            for (int s = 0; s < n; ++s)
                u(s) = g.uniform(0.0, scale);
            V = vstar + u + Vector::Constant(n, gamma * u.maxCoeff() / (1.0 - gamma) + g.uniform(0.0, scale));
        } else {
            // Arbitrary V shifted up by the smallest constant that makes it feasible.
            for (int s = 0; s < n; ++s)
                V(s) = g.uniform(-20, 20);
            const double gap = (softmax_backup(V, m, tau) - V).maxCoeff();
            V.array() += std::max(0.0, gap) / (1.0 - gamma) + 1e-9;
        }
        if (bellman_feasibility(V, m, tau) > 0.0)
            continue;
        ++feasible;
        worst = std::min(worst, (V - vstar).minCoeff());
    }
    const bool ok = feasible == 100 && worst >= -1e-8;
    return {ok, std::to_string(feasible) + "/100 verified feasible, min_s (V - V*) = " + fmt(worst)};
}

// ---------------------------------------------------------------- 3

Outcome pctl_oracle_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    oracle::Gen g(303);
    const std::vector<std::string> formulas{"P<=0.5 [X b]", "P>=0.3 [F b]", "P<=0.7 [F<=3 b]", "P<=0.6 [a U b]", "P>=0.2 [a U<=3 b]"};
    double err_next = 0.0, err_until = 0.0;
    int checked = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = g.integer(2, 6), na = g.integer(1, 3);
        Mdp m = oracle::random_mdp(g, n, na, 0.9, i % 2 == 1, 0.6);
        m.labels["a"] = oracle::random_mask(g, n, 0.6);
        m.labels["b"] = oracle::random_mask(g, n, 0.3);
        const TabularPolicy pi = oracle::random_policy(g, m);
        pctl::CompileOptions opts;
        opts.epsilon = 1e-3;
        for (const auto& text : formulas) {
            const auto c = pctl::compile(pctl::parse(text), m, opts);
            const int T = pctl::resolve_horizon(c, pi);
            const Vector dp = pctl::hit_probability_dp(c, pi, T);
            const StateMask& a = m.labels.at("a");
            const StateMask& b = m.labels.at("b");
            const StateMask all(n, true);
            const StateMask& allowed = c.cls == pctl::FormulaClass::prob_not_until ? a : all;
            Vector ref(n);
            if (c.cls == pctl::FormulaClass::prob_next) {
                for (int s = 0; s < n; ++s)
                    ref(s) = oracle::next_prob(m, pi, s, b);
                err_next = std::max(err_next, (dp - ref).cwiseAbs().maxCoeff());
            } else {
                if (c.horizon)
                    for (int s = 0; s < n; ++s)
                        ref(s) = oracle::bounded_until(m, pi, s, allowed, b, *c.horizon);
                else
                    ref = oracle::unbounded_until(m, pi, allowed, b);
                err_until = std::max(err_until, (dp - ref).cwiseAbs().maxCoeff());
            }
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    const bool ok = err_next <= 1e-9 && err_until <= 1e-3 && secs < 30.0;
    return {ok, std::to_string(checked) + " constraints, max error ProbNext " + fmt(err_next) + ", until classes " + fmt(err_until) +
                    ", " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------- 4

Vector phi_theta(const approx::Basis& b, const Vector& theta) { return b.phi * theta; }

double rel_err(const Vector& a, const Vector& ref) { return (a - ref).norm() / ref.norm(); }

/// Central differences of a scalar function of theta.
Vector fd_grad(const std::function<double(const Vector&)>& f, const Vector& theta, double h = 1e-6)
{
    Vector out(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        Vector tp = theta, tm = theta;
        tp(j) += h;
        tm(j) -= h;
        out(j) = (f(tp) - f(tm)) / (2 * h);
    }
    return out;
}

struct FixedInstance {
    Mdp mdp;
    approx::Basis basis;
    double tau = 1.0;
    Vector theta;
    double lambda = 1.0, nu = 2.0;
    int len = 4;
};

FixedInstance fixed_instance()
{
    FixedInstance f;
    f.mdp = make_mdp(4, 2, 0.9);
    auto& P = f.mdp.transition;
    P[0] << 0.1, 0.6, 0.3, 0.0,   0.0, 0.2, 0.5, 0.3,   0.4, 0.0, 0.3, 0.3,   0.2, 0.2, 0.2, 0.4;
    P[1] << 0.5, 0.1, 0.0, 0.4,   0.3, 0.3, 0.1, 0.3,   0.0, 0.6, 0.2, 0.2,   0.1, 0.0, 0.7, 0.2;
    f.mdp.reward << 0.2, 0.8, 0.5, 0.1, 0.9, 0.3, 0.0, 0.6;
    f.mdp.labels["b"] = {false, false, false, true};
    f.basis.phi.resize(4, 2);
    f.basis.phi << 1.0, 0.2, 0.8, 0.5, 0.4, 0.9, 0.1, 1.0;
    f.theta = Vector(2);
    f.theta << 0.3, -0.2;
    return f;
}

/// Exact F = E[(1/L) sum_{t<L} f(s_t)] from the uniform start, by path enumeration.
double exact_F(const FixedInstance& fi, const Vector& theta)
{
    const Vector V = phi_theta(fi.basis, theta);
    const Vector gap = oracle::soft_backup(fi.mdp, V, fi.tau) - V;
    const TabularPolicy pi = oracle::soft_policy(fi.mdp, V, fi.tau);
    Vector f(4);
    for (int s = 0; s < 4; ++s) {
        const double B = std::max(0.0, gap(s));
        f(s) = V(s) + fi.lambda * B + 0.5 * fi.nu * B * B;
    }
    double total = 0.0;
    for (int s0 = 0; s0 < 4; ++s0)
        oracle::enumerate_paths(fi.mdp, pi, s0, fi.len - 1, [&](const std::vector<int>& st, const std::vector<int>&, double p) {
            if (static_cast<int>(st.size()) == fi.len) {
                double sum = 0.0;
                for (int x : st)
                    sum += f(x);
                total += 0.25 * p * sum / fi.len;
            }
            return true;
        });
    return total;
}

Vector sampled_grad_F(const FixedInstance& fi, int N, std::uint64_t seed)
{
    approx::ValueApprox va(fi.mdp, fi.basis, fi.tau);
    va.theta = fi.theta;
    approx::SamplerConfig sc;
    sc.n_onpolicy = N;
    sc.len_onpolicy = fi.len;
    sc.onpolicy_init = Vector::Constant(4, 0.25);
    const auto ev = approx::evaluate(va);
    return approx::estimate_F(va, ev, approx::sample_onpolicy(fi.mdp, ev.pi, sc, Rng(seed)), fi.lambda, fi.nu).grad;
}

Outcome gradient_checks()
{
    oracle::Gen g(404);
    double worst_logpi = 0.0, worst_gap = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int n = g.integer(3, 8), na = g.integer(2, 4), K = g.integer(2, 4);
        const Mdp m = oracle::random_mdp(g, n, na, g.uniform(0.5, 0.95), i % 2 == 1);
        approx::Basis b;
        b.phi.resize(n, K);
        for (int s = 0; s < n; ++s)
            for (int j = 0; j < K; ++j)
                b.phi(s, j) = g.uniform(0.0, 1.0);
        const double tau = g.uniform(0.5, 5.0);
        approx::ValueApprox va(m, b, tau);
        for (int j = 0; j < K; ++j)
            va.theta(j) = g.uniform(-2.0, 2.0);
        const auto ev = approx::evaluate(va);

        Vector an_pi(n * na * K), fd_pi(n * na * K);
        an_pi.setZero();
        fd_pi.setZero();
        for (int s = 0; s < n; ++s) {
            for (int a : m.admissible[s]) {
                auto logpi = [&](const Vector& th) { return std::log(oracle::soft_policy(m, b.phi * th, tau).probs(s, a)); };
                an_pi.segment((s * na + a) * K, K) = approx::grad_log_policy(va, ev, s, a).transpose();
                fd_pi.segment((s * na + a) * K, K) = fd_grad(logpi, va.theta);
            }
            auto gap = [&](const Vector& th) { return (oracle::soft_backup(m, b.phi * th, tau) - b.phi * th)(s); };
            worst_gap = std::max(worst_gap, rel_err(ev.gap_grad.row(s).transpose(), fd_grad(gap, va.theta)));
        }
        if (fd_pi.norm() > 0.0)
            worst_logpi = std::max(worst_logpi, rel_err(an_pi, fd_pi));
    }

    // Monte-Carlo gradients on the fixed instance.
    const FixedInstance fi = fixed_instance();
    const Vector gF = fd_grad([&](const Vector& th) { return exact_F(fi, th); }, fi.theta);
    const double errF = rel_err(sampled_grad_F(fi, 100000, 1), gF);

    auto cs = pctl::compile_all(pctl::parse("P<=0.2 [F<=3 b]"), fi.mdp);
    const auto& c = cs.front();
    const double xi = 1.0, nu2 = 2.0;
    auto l_exact = [&](const Vector& th, int s) {
        const TabularPolicy pi = oracle::soft_policy(fi.mdp, fi.basis.phi * th, fi.tau);
        return oracle::bounded_until(fi.mdp, pi, s, StateMask(4, true), fi.mdp.labels.at("b"), 3) - c.beta;
    };
    Vector gm = Vector::Zero(2);
    for (int s = 0; s < 4; ++s) {
        const double l = l_exact(fi.theta, s);
        if (l > 0.0)
            gm += (xi + nu2 * l) * fd_grad([&](const Vector& th) { return l_exact(th, s); }, fi.theta) / 4.0;
    }
    approx::ValueApprox va(fi.mdp, fi.basis, fi.tau);
    va.theta = fi.theta;
    const auto ev = approx::evaluate(va);
    approx::SamplerConfig sc;
    sc.n_chance = 100000;
    const auto Z = approx::sample_chance(fi.mdp, ev.pi, c, 3, sc, Rng(2));
    const double errm = rel_err(approx::estimate_m(va, ev, c, Z, xi, nu2).grad, gm);

    // RMS error of grad_F over N; slope of the log-log fit.
    std::vector<double> xs, ys;
    for (int N : {250, 1000, 4000, 16000, 64000}) {
        double mse = 0.0;
        const int reps = 60;
        for (int r = 0; r < reps; ++r)
            mse += (sampled_grad_F(fi, N, 1000 + static_cast<std::uint64_t>(N) * 31 + r) - gF).squaredNorm() / reps;
        xs.push_back(std::log(static_cast<double>(N)));
        ys.push_back(0.5 * std::log(mse));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i] / xs.size();
        my += ys[i] / ys.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;

    const bool ok = worst_logpi <= 1e-5 && worst_gap <= 1e-5 && errF <= 0.05 && errm <= 0.05 && slope >= -0.6 && slope <= -0.4;
    return {ok, "grad log pi " + fmt(worst_logpi) + ", grad g " + fmt(worst_gap) + ", grad_F@1e5 " + fmt(errF) + ", grad_m@1e5 " +
                    fmt(errm) + ", log-log slope " + fmt(slope)};
}

// ---------------------------------------------------------------- 5

Outcome experiment1()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = experiments::experiment1_setup();
    const auto p = experiments::make_problem(s);
    const auto r = experiments::solve(p, s);
    const auto& a = r.final;
    const bool ok = r.outer.converged && r.outer.trace.size() <= 10 && a.max_hinge <= 1e-2 &&
                    a.weighted_value >= a.weighted_value_star && a.error_visit <= a.error_uniform;
    return {ok, std::string(r.outer.converged ? "converged" : "not converged") + " in " + std::to_string(r.outer.trace.size()) +
                    " outer iterations, max B(g) " + fmt(a.max_hinge) + ", c.V " + fmt(a.weighted_value) + " vs c.V* " +
                    fmt(a.weighted_value_star) + ", error c-weighted " + fmt(a.error_visit) + " vs uniform " + fmt(a.error_uniform) +
                    ", " + fmt(seconds_since(t0)) + " s"};
}

// ---------------------------------------------------------------- 6

Outcome experiment2()
{
    const auto t0 = std::chrono::steady_clock::now();
    auto s = experiments::experiment2_setup();
    const auto p = experiments::make_problem(s);
    double best = 0.0;
    std::string per_seed;
    for (std::uint64_t seed : {1, 2, 3}) {
        s.solver.seed = seed;
        const auto d = experiments::run_delta(p, s, 0.2, 20000);
        best = std::max(best, d.check.satisfaction);
        per_seed += (per_seed.empty() ? "" : ", ") + fmt(d.check.satisfaction);
    }
    const double secs = seconds_since(t0);
    const bool ok = best >= 0.2 && secs < 600.0;
    return {ok, "satisfaction over 20000 paths from A by seed: " + per_seed + "; best " + fmt(best) + ", " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------- 7

Outcome lp_l1_argmin_grid()
{
    oracle::Gen g(707);
    const Mdp m = oracle::random_mdp(g, 5, 2, 0.7);
    const double tau = 1.0;
    approx::Basis b;
    b.phi.resize(5, 2);
    for (int s = 0; s < 5; ++s) {
        b.phi(s, 0) = 1.0;
        b.phi(s, 1) = s / 4.0;
    }
    const Vector vstar = oracle::soft_vi(m, tau);
    const Vector& c = m.initial;
    const int steps = 800;
    int best_lp = -1, best_l1 = -1;
    double v_lp = INFINITY, v_l1 = INFINITY;
    int feasible = 0;
    Vector theta(2);
    for (int i = 0; i <= steps; ++i)
        for (int j = 0; j <= steps; ++j) {
            theta << -20.0 + 0.05 * i, -20.0 + 0.05 * j;
            const Vector V = b.phi * theta;
            if (bellman_feasibility(V, m, tau) > 0.0)
                continue;
            ++feasible;
            const double lp = c.dot(V), l1 = c.dot((vstar - V).cwiseAbs());
            if (lp < v_lp) {
                v_lp = lp;
                best_lp = i * (steps + 1) + j;
            }
            if (l1 < v_l1) {
                v_l1 = l1;
                best_l1 = i * (steps + 1) + j;
            }
        }
    auto cell = [&](int k) {
        return "(" + fmt(-20.0 + 0.05 * (k / (steps + 1))) + ", " + fmt(-20.0 + 0.05 * (k % (steps + 1))) + ")";
    };
    const bool ok = feasible > 0 && best_lp == best_l1;
    return {ok, std::to_string(feasible) + " feasible cells; argmin c'Phi theta " + cell(best_lp) + ", argmin ||V* - Phi theta||_1,c " +
                    cell(best_l1)};
}

// ---------------------------------------------------------------- 8

pctl::StateFormula random_state(oracle::Gen& g, int depth);

pctl::PathFormula random_path(oracle::Gen& g, int depth)
{
    using namespace pctl;
    const int k = g.integer(0, 30);
    switch (g.integer(0, 4)) {
    case 0: return next(random_state(g, depth - 1));
    case 1: return until(random_state(g, depth - 1), random_state(g, depth - 1));
    case 2: return bounded_until(random_state(g, depth - 1), random_state(g, depth - 1), k);
    case 3: return eventually(random_state(g, depth - 1));
    default: return bounded_eventually(random_state(g, depth - 1), k);
    }
}

double random_bound(oracle::Gen& g, double lo, double hi)
{
    switch (g.integer(0, 2)) {
    case 0: return std::round(g.uniform(lo, hi));
    case 1: return std::round(g.uniform(lo, hi) * 100.0) / 100.0;
    default: return g.uniform(lo, hi);
    }
}

pctl::StateFormula random_state(oracle::Gen& g, int depth)
{
    using namespace pctl;
    static const std::vector<std::string> names{"a", "b", "goal", "A", "B", "x_1", "Obstacle", "_t", "FF", "Up", "PX"};
    static const Cmp cmps[] = {Cmp::le, Cmp::lt, Cmp::ge, Cmp::gt};
    if (depth <= 0 || g.coin(0.25))
        return g.coin(0.15) ? truth() : atom(names[g.integer(0, static_cast<int>(names.size()) - 1)]);
    switch (g.integer(0, 5)) {
    case 0: return conj(random_state(g, depth - 1), random_state(g, depth - 1));
    case 1: return neg(random_state(g, depth - 1));
    case 2: return implies(random_state(g, depth - 1), random_state(g, depth - 1));
    case 3: return prob(cmps[g.integer(0, 3)], random_bound(g, 0.0, 1.0), random_path(g, depth));
    case 4: return cost_bound(cmps[g.integer(0, 3)], random_bound(g, -50.0, 200.0), g.integer(0, 40), random_state(g, depth - 1));
    default: return atom("s" + std::to_string(g.integer(0, 99)));
    }
}

Outcome parser_golden_and_roundtrip()
{
    using namespace pctl;
    const auto a = atom("a"), b = atom("b"), A = atom("A"), B = atom("B"), goal = atom("goal");
    const std::vector<std::pair<std::string, StateFormula>> golden{
        {"P>=0.95 (true U<=10 reach_goal)", prob(Cmp::ge, 0.95, bounded_until(truth(), atom("reach_goal"), 10))},
        {"P>0.9 (X C<=100 [F<=5 alpha])", prob(Cmp::gt, 0.9, next(cost_bound(Cmp::le, 100, 5, atom("alpha"))))},
        {"A => P>=0.2 [X C<=13 [F<=14 B]]", implies(A, prob(Cmp::ge, 0.2, next(cost_bound(Cmp::le, 13, 14, B))))},
        {"true", truth()},
        {"false", neg(truth())},
        {"goal", goal},
        {"!a", neg(a)},
        {"!!a", neg(neg(a))},
        {"a & b", conj(a, b)},
        {"a & b & goal", conj(conj(a, b), goal)},
        {"a | b", neg(conj(neg(a), neg(b)))},
        {"a => b => goal", implies(a, implies(b, goal))},
        {"(a => b) => goal", implies(implies(a, b), goal)},
        {"a | b & goal", neg(conj(neg(a), neg(conj(b, goal))))},
        {"!(a & b)", neg(conj(a, b))},
        {"P<=0.5 [X b]", prob(Cmp::le, 0.5, next(b))},
        {"P<0.1 (X !a)", prob(Cmp::lt, 0.1, next(neg(a)))},
        {"P>=1 [F goal]", prob(Cmp::ge, 1.0, eventually(goal))},
        {"P>0 [F<=7 goal]", prob(Cmp::gt, 0.0, bounded_eventually(goal, 7))},
        {"P>=0.3 [true U goal]", prob(Cmp::ge, 0.3, until(truth(), goal))},
        {"P<=0.6 [a U b]", prob(Cmp::le, 0.6, until(a, b))},
        {"P<=0.6 [!a U<=12 b]", prob(Cmp::le, 0.6, bounded_until(neg(a), b, 12))},
        {"P>=0.25 [a & b U goal]", prob(Cmp::ge, 0.25, until(conj(a, b), goal))},
        {"P>=.5 [F goal]", prob(Cmp::ge, 0.5, eventually(goal))},
        {"P<=1e-2 [F<=3 b]", prob(Cmp::le, 0.01, bounded_eventually(b, 3))},
        {"C<=13 [F<=14 B]", cost_bound(Cmp::le, 13, 14, B)},
        {"C>-2.5 (F<=3 (a & b))", cost_bound(Cmp::gt, -2.5, 3, conj(a, b))},
        {"P>=0.9 [F goal] & P<=0.1 [F b]", conj(prob(Cmp::ge, 0.9, eventually(goal)), prob(Cmp::le, 0.1, eventually(b)))},
        {"  a\t&\n!b ", conj(a, neg(b))},
        {"start => P>0.5 [X P>=0.2 [F goal]]", implies(atom("start"), prob(Cmp::gt, 0.5, next(prob(Cmp::ge, 0.2, eventually(goal)))))},
    };
    int golden_ok = 0;
    std::string first_bad;
    for (const auto& [text, expected] : golden) {
        try {
            if (parse(text) == expected) {
                ++golden_ok;
                continue;
            }
        } catch (const std::exception&) {
        }
        if (first_bad.empty())
            first_bad = text;
    }

    oracle::Gen g(808);
    int trips = 0;
    std::string bad_trip;
    for (int i = 0; i < 1000; ++i) {
        const StateFormula f = random_state(g, 4);
        const std::string text = to_string(f);
        try {
            if (parse(text) == f && to_string(parse(text)) == text) {
                ++trips;
                continue;
            }
        } catch (const std::exception&) {
        }
        if (bad_trip.empty())
            bad_trip = text;
    }
    const bool ok = golden.size() == 30 && golden_ok == 30 && trips == 1000;
    std::string detail = std::to_string(golden_ok) + "/" + std::to_string(golden.size()) + " golden, " + std::to_string(trips) +
                         "/1000 round-trips";
    if (!first_bad.empty())
        detail += "; first golden failure: " + first_bad;
    if (!bad_trip.empty())
        detail += "; first round-trip failure: " + bad_trip;
    return {ok, detail};
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"softmax contraction and tau->0 limit", softmax_contraction_and_limit},
        {"feasible V bounds V* from above", upper_bound_property},
        {"PCTL translation matches exact reachability", pctl_oracle_equivalence},
        {"gradient checks and Monte-Carlo rate", gradient_checks},
        {"experiment 1 reproduction", experiment1},
        {"experiment 2 reproduction", experiment2},
        {"LP and weighted-L1 minimizers coincide on a grid", lp_l1_argmin_grid},
        {"parser golden set and round-trip", parser_golden_and_roundtrip},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
