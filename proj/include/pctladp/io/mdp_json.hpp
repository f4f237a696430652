#pragma once

#include "pctladp/mdp.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

namespace pctladp {

namespace detail {

inline int resolve_index(const nlohmann::json& ref, const std::vector<std::string>& names, const char* what)
{
    if (ref.is_number_integer()) {
        const int i = ref.get<int>();
        if (i < 0 || i >= static_cast<int>(names.size()))
            throw InputError(std::string(what) + " index " + std::to_string(i) + " out of range");
        return i;
    }
    if (!ref.is_string())
        throw InputError(std::string(what) + " reference must be a name or an index");
    const auto name = ref.get<std::string>();
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end())
        throw InputError(std::string("unknown ") + what + " '" + name + "'");
    return static_cast<int>(it - names.begin());
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key))
        throw InputError(std::string("MDP JSON is missing field '") + key + "'");
    return j.at(key);
}

}  // namespace detail

/**
 * Builds an Mdp from the JSON exchange format:
 *
 *   { "states": [...], "actions": [...], "admissible": {state: [actions]} | [[actions]...],
 *     "transitions": [{"s", "a", "s'", "p"}...], "rewards": [{"s", "a", "r"}...],
 *     "initial": {state: p}, "gamma": g, "labels": {prop: [states]} }
 *
 * States and actions may be referenced by name or by index. When "admissible" is
 * absent, A(s) is every action with an outgoing transition from s. Probabilities
 * are validated; any violation raises InputError.
 */
inline Mdp mdp_from_json(const nlohmann::json& j)
{
    try {
        Mdp m;
        for (const auto& s : detail::field(j, "states"))
            m.state_names.push_back(s.get<std::string>());
        for (const auto& a : detail::field(j, "actions"))
            m.action_names.push_back(a.get<std::string>());
        const int n = m.num_states();
        const int na = m.num_actions();
        if (n == 0 || na == 0)
            throw InputError("MDP needs at least one state and one action");
        m.transition.assign(na, Matrix::Zero(n, n));
        m.reward = Matrix::Zero(n, na);
        m.admissible.assign(n, {});

        std::vector<std::set<int>> seen(n);
        for (const auto& t : detail::field(j, "transitions")) {
            const int s = detail::resolve_index(t.at("s"), m.state_names, "state");
            const int a = detail::resolve_index(t.at("a"), m.action_names, "action");
            const auto& nref = t.contains("s'") ? t.at("s'") : t.at("next");
            const int s2 = detail::resolve_index(nref, m.state_names, "state");
            m.transition[a](s, s2) += t.at("p").get<double>();
            seen[s].insert(a);
        }
        if (j.contains("admissible")) {
            const auto& adm = j.at("admissible");
            if (adm.is_object()) {
                for (auto it = adm.begin(); it != adm.end(); ++it) {
                    const int s = detail::resolve_index(nlohmann::json(it.key()), m.state_names, "state");
                    for (const auto& a : it.value())
                        m.admissible[s].push_back(detail::resolve_index(a, m.action_names, "action"));
                }
            } else {
                if (static_cast<int>(adm.size()) != n)
                    throw InputError("admissible list must have one entry per state");
                for (int s = 0; s < n; ++s)
                    for (const auto& a : adm[s])
                        m.admissible[s].push_back(detail::resolve_index(a, m.action_names, "action"));
            }
        } else {
            for (int s = 0; s < n; ++s)
                m.admissible[s].assign(seen[s].begin(), seen[s].end());
        }
        for (auto& acts : m.admissible)
            std::sort(acts.begin(), acts.end());

        if (j.contains("rewards"))
            for (const auto& r : j.at("rewards")) {
                const int s = detail::resolve_index(r.at("s"), m.state_names, "state");
                const int a = detail::resolve_index(r.at("a"), m.action_names, "action");
                m.reward(s, a) = r.at("r").get<double>();
            }

        m.initial = Vector::Zero(n);
        if (j.contains("initial")) {
            for (auto it = j.at("initial").begin(); it != j.at("initial").end(); ++it)
                m.initial(detail::resolve_index(nlohmann::json(it.key()), m.state_names, "state")) = it.value().get<double>();
        } else {
            m.initial.setConstant(1.0 / n);
        }
        m.discount = j.value("gamma", 1.0);
        if (j.contains("labels"))
            for (auto it = j.at("labels").begin(); it != j.at("labels").end(); ++it) {
                StateMask mask(n, false);
                for (const auto& s : it.value())
                    mask[detail::resolve_index(s, m.state_names, "state")] = true;
                m.labels[it.key()] = std::move(mask);
            }
        require_valid(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed MDP JSON: ") + e.what());
    }
}

inline nlohmann::json mdp_to_json(const Mdp& m)
{
    nlohmann::json j;
    j["states"] = m.state_names;
    j["actions"] = m.action_names;
    nlohmann::json adm = nlohmann::json::array();
    for (int s = 0; s < m.num_states(); ++s) {
        nlohmann::json row = nlohmann::json::array();
        for (ActionId a : m.admissible[s])
            row.push_back(m.action_names[a]);
        adm.push_back(row);
    }
    j["admissible"] = adm;
    nlohmann::json trans = nlohmann::json::array();
    nlohmann::json rewards = nlohmann::json::array();
    for (int s = 0; s < m.num_states(); ++s)
        for (ActionId a : m.admissible[s]) {
            for (int t = 0; t < m.num_states(); ++t)
                if (m.transition[a](s, t) > 0.0)
                    trans.push_back({{"s", m.state_names[s]}, {"a", m.action_names[a]}, {"s'", m.state_names[t]}, {"p", m.transition[a](s, t)}});
            if (m.reward(s, a) != 0.0)
                rewards.push_back({{"s", m.state_names[s]}, {"a", m.action_names[a]}, {"r", m.reward(s, a)}});
        }
    j["transitions"] = trans;
    j["rewards"] = rewards;
    nlohmann::json init = nlohmann::json::object();
    for (int s = 0; s < m.num_states(); ++s)
        if (m.initial(s) > 0.0)
            init[m.state_names[s]] = m.initial(s);
    j["initial"] = init;
    j["gamma"] = m.discount;
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [name, mask] : m.labels) {
        nlohmann::json members = nlohmann::json::array();
        for (StateId s : mask_members(mask))
            members.push_back(m.state_names[s]);
        labels[name] = members;
    }
    j["labels"] = labels;
    return j;
}

inline Mdp load_mdp(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open MDP file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    try {
        return mdp_from_json(j);
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

}  // namespace pctladp
