#pragma once

#include <charconv>
#include <memory>
#include <string>
#include <variant>

namespace pctladp::pctl {

enum class Cmp { le, lt, ge, gt };

inline const char* to_string(Cmp c)
{
    switch (c) {
    case Cmp::le: return "<=";
    case Cmp::lt: return "<";
    case Cmp::ge: return ">=";
    case Cmp::gt: return ">";
    }
    return "?";
}

inline bool compare(double lhs, Cmp c, double rhs)
{
    switch (c) {
    case Cmp::le: return lhs <= rhs;
    case Cmp::lt: return lhs < rhs;
    case Cmp::ge: return lhs >= rhs;
    case Cmp::gt: return lhs > rhs;
    }
    return false;
}

inline bool is_upper(Cmp c) { return c == Cmp::le || c == Cmp::lt; }
inline bool is_strict(Cmp c) { return c == Cmp::lt || c == Cmp::gt; }

struct StateNode;
struct PathNode;

/// Immutable, cheaply copyable state formula.
class StateFormula {
public:
    StateFormula() = default;
    explicit StateFormula(std::shared_ptr<const StateNode> n) : node_(std::move(n)) {}

    const StateNode& node() const { return *node_; }
    template <typename T> const T* as() const;
    template <typename T> bool is() const { return as<T>() != nullptr; }

private:
    std::shared_ptr<const StateNode> node_;
};

/// Immutable, cheaply copyable path formula.
class PathFormula {
public:
    PathFormula() = default;
    explicit PathFormula(std::shared_ptr<const PathNode> n) : node_(std::move(n)) {}

    const PathNode& node() const { return *node_; }
    template <typename T> const T* as() const;
    template <typename T> bool is() const { return as<T>() != nullptr; }

private:
    std::shared_ptr<const PathNode> node_;
};

struct True {};
struct Atom { std::string name; };
struct And { StateFormula lhs, rhs; };
struct Not { StateFormula arg; };
/// lhs => rhs; supported for constraints only in the risk-sensitive pattern.
struct Implies { StateFormula lhs, rhs; };
struct Prob { Cmp cmp; double bound; PathFormula path; };
/// C_{cmp m}(F<=k target)
struct CostBound { Cmp cmp; double bound; int steps; StateFormula target; };

struct Next { StateFormula arg; };
struct Until { StateFormula lhs, rhs; };
struct BoundedUntil { StateFormula lhs, rhs; int steps; };
struct Eventually { StateFormula arg; };
struct BoundedEventually { StateFormula arg; int steps; };

struct StateNode {
    std::variant<True, Atom, And, Not, Implies, Prob, CostBound> v;
};

struct PathNode {
    std::variant<Next, Until, BoundedUntil, Eventually, BoundedEventually> v;
};

template <typename T> const T* StateFormula::as() const { return node_ ? std::get_if<T>(&node_->v) : nullptr; }
template <typename T> const T* PathFormula::as() const { return node_ ? std::get_if<T>(&node_->v) : nullptr; }

// Constructors.
inline StateFormula make_state(StateNode n) { return StateFormula(std::make_shared<const StateNode>(std::move(n))); }
inline PathFormula make_path(PathNode n) { return PathFormula(std::make_shared<const PathNode>(std::move(n))); }

inline StateFormula truth() { return make_state({True{}}); }
inline StateFormula atom(std::string name) { return make_state({Atom{std::move(name)}}); }
inline StateFormula conj(StateFormula a, StateFormula b) { return make_state({And{std::move(a), std::move(b)}}); }
inline StateFormula neg(StateFormula a) { return make_state({Not{std::move(a)}}); }
inline StateFormula implies(StateFormula a, StateFormula b) { return make_state({Implies{std::move(a), std::move(b)}}); }
inline StateFormula prob(Cmp c, double p, PathFormula path) { return make_state({Prob{c, p, std::move(path)}}); }
inline StateFormula cost_bound(Cmp c, double m, int k, StateFormula target) { return make_state({CostBound{c, m, k, std::move(target)}}); }

inline PathFormula next(StateFormula a) { return make_path({Next{std::move(a)}}); }
inline PathFormula until(StateFormula a, StateFormula b) { return make_path({Until{std::move(a), std::move(b)}}); }
inline PathFormula bounded_until(StateFormula a, StateFormula b, int k) { return make_path({BoundedUntil{std::move(a), std::move(b), k}}); }
inline PathFormula eventually(StateFormula a) { return make_path({Eventually{std::move(a)}}); }
inline PathFormula bounded_eventually(StateFormula a, int k) { return make_path({BoundedEventually{std::move(a), k}}); }

// Structural equality.
inline bool operator==(const StateFormula& a, const StateFormula& b);
inline bool operator==(const PathFormula& a, const PathFormula& b);

inline bool operator==(const True&, const True&) { return true; }
inline bool operator==(const Atom& a, const Atom& b) { return a.name == b.name; }
inline bool operator==(const And& a, const And& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
inline bool operator==(const Not& a, const Not& b) { return a.arg == b.arg; }
inline bool operator==(const Implies& a, const Implies& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
inline bool operator==(const Prob& a, const Prob& b) { return a.cmp == b.cmp && a.bound == b.bound && a.path == b.path; }
inline bool operator==(const CostBound& a, const CostBound& b)
{
    return a.cmp == b.cmp && a.bound == b.bound && a.steps == b.steps && a.target == b.target;
}
inline bool operator==(const Next& a, const Next& b) { return a.arg == b.arg; }
inline bool operator==(const Until& a, const Until& b) { return a.lhs == b.lhs && a.rhs == b.rhs; }
inline bool operator==(const BoundedUntil& a, const BoundedUntil& b) { return a.lhs == b.lhs && a.rhs == b.rhs && a.steps == b.steps; }
inline bool operator==(const Eventually& a, const Eventually& b) { return a.arg == b.arg; }
inline bool operator==(const BoundedEventually& a, const BoundedEventually& b) { return a.arg == b.arg && a.steps == b.steps; }

inline bool operator==(const StateFormula& a, const StateFormula& b) { return &a.node() == &b.node() || a.node().v == b.node().v; }
inline bool operator==(const PathFormula& a, const PathFormula& b) { return &a.node() == &b.node() || a.node().v == b.node().v; }

/// Shortest decimal text that parses back to exactly `x`.
inline std::string format_number(double x)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string to_string(const StateFormula& f);
inline std::string to_string(const PathFormula& f);

namespace detail {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

/// Canonical printer. The output parses back to a structurally equal formula.
inline std::string to_string(const StateFormula& f)
{
    return std::visit(
        detail::overloaded{
            [](const True&) { return std::string("true"); },
            [](const Atom& a) { return a.name; },
            [](const And& a) { return "(" + to_string(a.lhs) + " & " + to_string(a.rhs) + ")"; },
            [](const Not& n) { return "!" + to_string(n.arg); },
            [](const Implies& i) { return "(" + to_string(i.lhs) + " => " + to_string(i.rhs) + ")"; },
            [](const Prob& p) { return "P" + std::string(to_string(p.cmp)) + format_number(p.bound) + " [" + to_string(p.path) + "]"; },
            [](const CostBound& c) {
                return "C" + std::string(to_string(c.cmp)) + format_number(c.bound) + " [F<=" + std::to_string(c.steps) + " " +
                       to_string(c.target) + "]";
            },
        },
        f.node().v);
}

inline std::string to_string(const PathFormula& f)
{
    return std::visit(
        detail::overloaded{
            [](const Next& n) { return "X " + to_string(n.arg); },
            [](const Until& u) { return to_string(u.lhs) + " U " + to_string(u.rhs); },
            [](const BoundedUntil& u) { return to_string(u.lhs) + " U<=" + std::to_string(u.steps) + " " + to_string(u.rhs); },
            [](const Eventually& e) { return "F " + to_string(e.arg); },
            [](const BoundedEventually& e) { return "F<=" + std::to_string(e.steps) + " " + to_string(e.arg); },
        },
        f.node().v);
}

}  // namespace pctladp::pctl
