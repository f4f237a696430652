#pragma once

#include "pctladp/approx/solver.hpp"
#include "pctladp/gridworld.hpp"
#include "pctladp/io/mdp_json.hpp"
#include "pctladp/pctl/compile.hpp"

#include <json.hpp>

#include <set>

namespace pctladp::io {

using nlohmann::json;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what)
{
    if (!j.is_object())
        throw InputError(std::string(what) + " must be a JSON object");
    std::set<std::string> ok(known.begin(), known.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key()))
            throw InputError(std::string("unknown ") + what + " key '" + it.key() + "'");
}

template <class T>
void read(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad value for '") + key + "': " + e.what());
    }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out)
{
    if (!j.contains(key))
        return;
    if (j.at(key).is_null()) {
        out.reset();
        return;
    }
    T v{};
    read(j, key, v);
    out = v;
}

inline grid::Cell cell_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw InputError("a cell must be a two-element integer array [x, y], got " + j.dump());
    return {j[0].get<int>(), j[1].get<int>()};
}

inline json cell_to_json(grid::Cell c) { return json::array({c.x, c.y}); }

}  // namespace detail

// ---------------------------------------------------------------- grid

inline grid::GridConfig grid_from_json(const json& j, grid::GridConfig g = {})
{
    detail::reject_unknown(j, {"width", "height", "obstacles", "start", "goal", "regions", "slip_base", "goal_reward", "discount"},
                           "grid config");
    detail::read(j, "width", g.width);
    detail::read(j, "height", g.height);
    detail::read(j, "slip_base", g.slip_base);
    detail::read(j, "goal_reward", g.goal_reward);
    detail::read(j, "discount", g.discount);
    if (j.contains("start"))
        g.start = detail::cell_from_json(j.at("start"));
    if (j.contains("goal"))
        g.goal = detail::cell_from_json(j.at("goal"));
    if (j.contains("obstacles")) {
        g.obstacles.clear();
        for (const auto& c : j.at("obstacles"))
            g.obstacles.insert(detail::cell_from_json(c));
    }
    if (j.contains("regions")) {
        g.regions.clear();
        for (auto it = j.at("regions").begin(); it != j.at("regions").end(); ++it) {
            auto& cells = g.regions[it.key()];
            for (const auto& c : it.value())
                cells.push_back(detail::cell_from_json(c));
        }
    }
    grid::validate(g);
    return g;
}

inline json grid_to_json(const grid::GridConfig& g)
{
    json j;
    j["width"] = g.width;
    j["height"] = g.height;
    j["start"] = detail::cell_to_json(g.start);
    j["goal"] = detail::cell_to_json(g.goal);
    j["obstacles"] = json::array();
    for (const auto& c : g.obstacles)
        j["obstacles"].push_back(detail::cell_to_json(c));
    j["regions"] = json::object();
    for (const auto& [name, cells] : g.regions) {
        j["regions"][name] = json::array();
        for (const auto& c : cells)
            j["regions"][name].push_back(detail::cell_to_json(c));
    }
    j["slip_base"] = g.slip_base;
    j["goal_reward"] = g.goal_reward;
    j["discount"] = g.discount;
    return j;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline grid::GridConfig load_grid(const std::string& path)
{
    try {
        return grid_from_json(read_json_file(path));
    } catch (const InputError& e) {
        if (std::string(e.what()).rfind(path, 0) == 0)
            throw;
        throw InputError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------- solver

inline const char* to_string(approx::StopRule r) { return r == approx::StopRule::gradient_norm ? "gradient_norm" : "step_norm"; }

inline const char* to_string(approx::StepRule r)
{
    switch (r) {
    case approx::StepRule::recursive: return "recursive";
    case approx::StepRule::harmonic: return "harmonic";
    case approx::StepRule::constant: return "constant";
    }
    return "?";
}

inline approx::StopRule parse_stop_rule(const std::string& s)
{
    if (s == "gradient_norm")
        return approx::StopRule::gradient_norm;
    if (s == "step_norm")
        return approx::StopRule::step_norm;
    throw InputError("stop rule must be gradient_norm or step_norm, got '" + s + "'");
}

inline approx::StepRule parse_step_rule(const std::string& s)
{
    if (s == "recursive")
        return approx::StepRule::recursive;
    if (s == "harmonic")
        return approx::StepRule::harmonic;
    if (s == "constant")
        return approx::StepRule::constant;
    throw InputError("step rule must be recursive, harmonic or constant, got '" + s + "'");
}

inline approx::SolverConfig solver_from_json(const json& j, approx::SolverConfig c = {})
{
    detail::reject_unknown(j,
                           {"eta1", "eta2", "nu1", "nu2", "lambda0", "xi0", "b", "rho", "eps0", "eps_decay", "stop", "step_rule",
                            "max_inner", "stop_window", "max_outer", "feas_tol", "exact_feasibility", "theta_bound", "baseline",
                            "seed"},
                           "solver config");
    detail::read(j, "eta1", c.eta1);
    detail::read(j, "eta2", c.eta2);
    detail::read(j, "nu1", c.nu1);
    detail::read(j, "nu2", c.nu2);
    detail::read(j, "lambda0", c.lambda0);
    detail::read(j, "xi0", c.xi0);
    detail::read(j, "b", c.b);
    detail::read(j, "rho", c.rho);
    detail::read(j, "eps0", c.eps0);
    detail::read(j, "eps_decay", c.eps_decay);
    if (j.contains("stop"))
        c.stop = parse_stop_rule(j.at("stop").get<std::string>());
    if (j.contains("step_rule"))
        c.step_rule = parse_step_rule(j.at("step_rule").get<std::string>());
    detail::read(j, "max_inner", c.max_inner);
    detail::read(j, "stop_window", c.stop_window);
    detail::read(j, "max_outer", c.max_outer);
    detail::read(j, "feas_tol", c.feas_tol);
    detail::read(j, "exact_feasibility", c.exact_feasibility);
    detail::read(j, "theta_bound", c.theta_bound);
    detail::read(j, "baseline", c.baseline);
    detail::read(j, "seed", c.seed);
    return c;
}

inline json solver_to_json(const approx::SolverConfig& c)
{
    json j;
    j["eta1"] = c.eta1;
    j["eta2"] = c.eta2 ? json(*c.eta2) : json(nullptr);
    j["nu1"] = c.nu1;
    j["nu2"] = c.nu2 ? json(*c.nu2) : json(nullptr);
    j["lambda0"] = c.lambda0;
    j["xi0"] = c.xi0;
    j["b"] = c.b;
    j["rho"] = c.rho;
    j["eps0"] = c.eps0;
    j["eps_decay"] = c.eps_decay;
    j["stop"] = to_string(c.stop);
    j["step_rule"] = to_string(c.step_rule);
    j["max_inner"] = c.max_inner;
    j["stop_window"] = c.stop_window;
    j["max_outer"] = c.max_outer;
    j["feas_tol"] = c.feas_tol;
    j["exact_feasibility"] = c.exact_feasibility;
    j["theta_bound"] = c.theta_bound;
    j["baseline"] = c.baseline;
    j["seed"] = c.seed;
    return j;
}

/// "onpolicy_start" is "initial" (the MDP's initial distribution) or "uniform".
inline approx::SamplerConfig sampler_from_json(const json& j, int num_states, approx::SamplerConfig c = {})
{
    detail::reject_unknown(j, {"n_onpolicy", "len_onpolicy", "onpolicy_start", "n_chance", "len_chance"}, "sampler config");
    detail::read(j, "n_onpolicy", c.n_onpolicy);
    detail::read(j, "len_onpolicy", c.len_onpolicy);
    detail::read(j, "n_chance", c.n_chance);
    detail::read(j, "len_chance", c.len_chance);
    if (j.contains("onpolicy_start")) {
        const auto s = j.at("onpolicy_start").get<std::string>();
        if (s == "initial")
            c.onpolicy_init.reset();
        else if (s == "uniform")
            c.onpolicy_init = Vector::Constant(num_states, 1.0 / num_states);
        else
            throw InputError("onpolicy_start must be initial or uniform, got '" + s + "'");
    }
    return c;
}

inline json sampler_to_json(const approx::SamplerConfig& c)
{
    json j;
    j["n_onpolicy"] = c.n_onpolicy;
    j["len_onpolicy"] = c.len_onpolicy;
    j["onpolicy_start"] = c.onpolicy_init ? "uniform" : "initial";
    j["n_chance"] = c.n_chance;
    j["len_chance"] = c.len_chance;
    return j;
}

inline json theta_to_json(const Vector& theta)
{
    json j = json::array();
    for (Eigen::Index i = 0; i < theta.size(); ++i)
        j.push_back(theta(i));
    return j;
}

inline Vector theta_from_json(const json& j)
{
    if (!j.is_array())
        throw InputError("theta must be a JSON array of numbers");
    Vector t(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw InputError("theta entry " + std::to_string(i) + " is not a number");
        t(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return t;
}

// ---------------------------------------------------------------- constraints

/// Inspection dump of a compiled constraint: cost table, sinks, alpha, beta, horizon, Y.
inline json constraint_to_json(const pctl::ChanceConstraint& c, const Mdp& mdp)
{
    auto names = [&](const StateMask& m) {
        json a = json::array();
        for (StateId s : mask_members(m))
            a.push_back(mdp.state_names[s]);
        return a;
    };
    json j;
    j["formula"] = c.formula;
    j["class"] = pctl::to_string(c.cls);
    j["kind"] = c.kind == pctl::ChanceConstraint::Kind::chance ? "chance" : "expectation";
    j["sign"] = c.sign;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["horizon"] = c.horizon ? json(*c.horizon) : json("mixing");
    j["epsilon"] = c.epsilon;
    j["constrained"] = names(c.constrained);
    j["target"] = names(c.rule.target);
    j["blocked"] = names(c.rule.blocked);
    j["sinks"] = names(mask_or(c.rule.target, c.rule.blocked));
    j["first_index"] = c.rule.first_index;
    j["indicator"] = c.rule.indicator;
    j["penalty"] = c.rule.penalty;
    json cost = json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        json row = json::array();
        for (int a = 0; a < mdp.num_actions(); ++a)
            row.push_back(c.cost(s, a));
        cost.push_back(row);
    }
    j["cost"] = cost;
    j["vacuous"] = c.vacuous();
    return j;
}

}  // namespace pctladp::io
