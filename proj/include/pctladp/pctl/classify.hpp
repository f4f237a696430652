#pragma once

#include "pctladp/mdp.hpp"
#include "pctladp/pctl/ast.hpp"

#include <optional>

namespace pctladp::pctl {

enum class FormulaClass { prob_next, prob_until, prob_not_until, risk_neutral_cost, risk_sensitive, unsupported };

inline const char* to_string(FormulaClass c)
{
    switch (c) {
    case FormulaClass::prob_next: return "ProbNext";
    case FormulaClass::prob_until: return "ProbUntil";
    case FormulaClass::prob_not_until: return "ProbNotUntil";
    case FormulaClass::risk_neutral_cost: return "RiskNeutralCost";
    case FormulaClass::risk_sensitive: return "RiskSensitive";
    case FormulaClass::unsupported: return "Unsupported";
    }
    return "?";
}

struct Classification {
    FormulaClass cls = FormulaClass::unsupported;
    /// Why the formula is unsupported, and the subterm at fault.
    std::string reason;
    std::optional<StateFormula> offending;
};

/// True for formulas built from true, atoms, conjunction, negation and implication only.
inline bool is_propositional(const StateFormula& f)
{
    if (f.is<True>() || f.is<Atom>())
        return true;
    if (auto a = f.as<And>())
        return is_propositional(a->lhs) && is_propositional(a->rhs);
    if (auto n = f.as<Not>())
        return is_propositional(n->arg);
    if (auto i = f.as<Implies>())
        return is_propositional(i->lhs) && is_propositional(i->rhs);
    return false;
}

/// First non-propositional subterm of a formula expected to be propositional.
inline std::optional<StateFormula> first_temporal(const StateFormula& f)
{
    if (f.is<Prob>() || f.is<CostBound>())
        return f;
    if (auto a = f.as<And>()) {
        if (auto x = first_temporal(a->lhs))
            return x;
        return first_temporal(a->rhs);
    }
    if (auto n = f.as<Not>())
        return first_temporal(n->arg);
    if (auto i = f.as<Implies>()) {
        if (auto x = first_temporal(i->lhs))
            return x;
        return first_temporal(i->rhs);
    }
    return std::nullopt;
}

/// States satisfying a propositional formula; atoms resolve against mdp.labels.
inline StateMask evaluate(const StateFormula& f, const Mdp& mdp)
{
    const int n = mdp.num_states();
    if (f.is<True>())
        return StateMask(n, true);
    if (auto a = f.as<Atom>())
        return mdp.label(a->name);
    if (auto c = f.as<And>()) {
        StateMask l = evaluate(c->lhs, mdp), r = evaluate(c->rhs, mdp);
        for (int s = 0; s < n; ++s)
            l[s] = l[s] && r[s];
        return l;
    }
    if (auto x = f.as<Not>()) {
        StateMask m = evaluate(x->arg, mdp);
        m.flip();
        return m;
    }
    if (auto i = f.as<Implies>()) {
        StateMask l = evaluate(i->lhs, mdp), r = evaluate(i->rhs, mdp);
        for (int s = 0; s < n; ++s)
            l[s] = !l[s] || r[s];
        return l;
    }
    throw InputError("cannot evaluate non-propositional formula " + to_string(f) + " state-wise");
}

namespace detail {

inline Classification unsupported(std::string why, StateFormula at) { return {FormulaClass::unsupported, std::move(why), std::move(at)}; }

inline Classification check_operands(FormulaClass cls, std::initializer_list<StateFormula> operands)
{
    for (const auto& op : operands)
        if (auto bad = first_temporal(op))
            return unsupported("nested probabilistic or cost operator", *bad);
    return {cls, {}, std::nullopt};
}

}  // namespace detail

/**
 * Assigns a formula to exactly one translation class.
 *
 *   P~p [X phi]                          -> ProbNext
 *   P~p [true U phi], P~p [F phi]         -> ProbUntil      (also the step-bounded forms)
 *   P~p [phi1 U phi2], phi1 != true       -> ProbNotUntil   (phi1 U phi2 == !(!phi1) U phi2)
 *   C~m [F<=k phi]                       -> RiskNeutralCost
 *   phi1 => P~p [X C~m [F<=k phi2]]      -> RiskSensitive
 *
 * phi, phi1, phi2 must be propositional. Top-level conjunctions are split by
 * compile_all and are reported as Unsupported here.
 */
inline Classification classify(const StateFormula& f)
{
    if (auto p = f.as<Prob>()) {
        const PathFormula& path = p->path;
        if (auto x = path.as<Next>())
            return detail::check_operands(FormulaClass::prob_next, {x->arg});
        if (auto e = path.as<Eventually>())
            return detail::check_operands(FormulaClass::prob_until, {e->arg});
        if (auto e = path.as<BoundedEventually>())
            return detail::check_operands(FormulaClass::prob_until, {e->arg});
        if (auto u = path.as<Until>())
            return detail::check_operands(u->lhs.is<True>() ? FormulaClass::prob_until : FormulaClass::prob_not_until, {u->lhs, u->rhs});
        if (auto u = path.as<BoundedUntil>())
            return detail::check_operands(u->lhs.is<True>() ? FormulaClass::prob_until : FormulaClass::prob_not_until, {u->lhs, u->rhs});
    }
    if (auto c = f.as<CostBound>())
        return detail::check_operands(FormulaClass::risk_neutral_cost, {c->target});
    if (auto i = f.as<Implies>()) {
        auto p = i->rhs.as<Prob>();
        const Next* x = p ? p->path.as<Next>() : nullptr;
        const CostBound* c = x ? x->arg.as<CostBound>() : nullptr;
        if (!c)
            return detail::unsupported("implication must have the form phi1 => P~p [X C~m [F<=k phi2]]", f);
        return detail::check_operands(FormulaClass::risk_sensitive, {i->lhs, c->target});
    }
    if (f.is<And>())
        return detail::unsupported("conjunction of constraints; compile each conjunct", f);
    if (is_propositional(f))
        return detail::unsupported("propositional formula carries no probabilistic constraint", f);
    return detail::unsupported("formula outside the supported fragment", f);
}

}  // namespace pctladp::pctl
