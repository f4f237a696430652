#pragma once

#include "pctladp/error.hpp"
#include "pctladp/pctl/ast.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <vector>

namespace pctladp::pctl {

/**
 * Surface syntax (whitespace-insensitive, ASCII):
 *
 *   formula     = implication ;
 *   implication = disjunction [ "=>" implication ] ;
 *   disjunction = conjunction { "|" conjunction } ;          (* a | b  is  !(!a & !b) *)
 *   conjunction = unary { "&" unary } ;
 *   unary       = "!" unary | primary ;
 *   primary     = "true" | "false" | ident | "(" formula ")"  (* false is !true *)
 *               | "P" cmp prob ( "(" path ")" | "[" path "]" )
 *               | "C" cmp real ( "(" reach ")" | "[" reach "]" ) ;
 *   reach       = "F" "<=" nat unary ;
 *   path        = "X" unary
 *               | "F" [ "<=" nat ] unary
 *               | disjunction "U" [ "<=" nat ] disjunction ;
 *   cmp         = "<=" | "<" | ">=" | ">" ;
 *
 * Identifiers are [A-Za-z_][A-Za-z0-9_]* other than the keywords
 * true, false, P, C, X, F, U.
 */
class ParseError : public InputError {
public:
    ParseError(std::size_t offset, std::set<std::string> expected, std::string found)
        : InputError(message(offset, expected, found)), offset_(offset), expected_(std::move(expected)), found_(std::move(found))
    {
    }

    std::size_t offset() const { return offset_; }
    const std::set<std::string>& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    static std::string message(std::size_t offset, const std::set<std::string>& expected, const std::string& found)
    {
        std::string msg = "PCTL syntax error at byte " + std::to_string(offset) + ": expected ";
        bool first = true;
        for (const auto& e : expected) {
            msg += (first ? "" : " or ") + e;
            first = false;
        }
        return msg + ", found " + found;
    }

    std::size_t offset_;
    std::set<std::string> expected_;
    std::string found_;
};

namespace detail {

enum class Tok { ident, number, kw_true, kw_false, kw_P, kw_C, kw_X, kw_F, kw_U,
                 amp, bar, bang, arrow, lparen, rparen, lbrack, rbrack, le, lt, ge, gt, end };

struct Token {
    Tok kind;
    std::string text;
    std::size_t offset;
};

inline std::string describe(const Token& t)
{
    return t.kind == Tok::end ? std::string("end of input") : "'" + t.text + "'";
}

inline std::vector<Token> lex(const std::string& src)
{
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        auto two = [&](char a, char b) { return c == a && i + 1 < n && src[i + 1] == b; };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                ++i;
            std::string word = src.substr(start, i - start);
            Tok k = Tok::ident;
            if (word == "true") k = Tok::kw_true;
            else if (word == "false") k = Tok::kw_false;
            else if (word == "P") k = Tok::kw_P;
            else if (word == "C") k = Tok::kw_C;
            else if (word == "X") k = Tok::kw_X;
            else if (word == "F") k = Tok::kw_F;
            else if (word == "U") k = Tok::kw_U;
            out.push_back({k, std::move(word), start});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
            (c == '-' && i + 1 < n && (std::isdigit(static_cast<unsigned char>(src[i + 1])) || src[i + 1] == '.'))) {
            ++i;
            while (i < n && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.'))
                ++i;
            if (i < n && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (src[j] == '+' || src[j] == '-'))
                    ++j;
                if (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    i = j;
                    while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
                        ++i;
                }
            }
            out.push_back({Tok::number, src.substr(start, i - start), start});
            continue;
        }
        if (two('=', '>')) { out.push_back({Tok::arrow, "=>", start}); i += 2; continue; }
        if (two('<', '=')) { out.push_back({Tok::le, "<=", start}); i += 2; continue; }
        if (two('>', '=')) { out.push_back({Tok::ge, ">=", start}); i += 2; continue; }
        Tok k;
        switch (c) {
        case '&': k = Tok::amp; break;
        case '|': k = Tok::bar; break;
        case '!': k = Tok::bang; break;
        case '(': k = Tok::lparen; break;
        case ')': k = Tok::rparen; break;
        case '[': k = Tok::lbrack; break;
        case ']': k = Tok::rbrack; break;
        case '<': k = Tok::lt; break;
        case '>': k = Tok::gt; break;
        default:
            throw ParseError(start, {"a formula token"}, "'" + std::string(1, c) + "'");
        }
        out.push_back({k, std::string(1, c), start});
        ++i;
    }
    out.push_back({Tok::end, "", n});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& src) : toks_(lex(src)) {}

    StateFormula parse_all()
    {
        StateFormula f = implication();
        if (peek().kind != Tok::end)
            fail({"'=>'", "'|'", "'&'", "end of input"});
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }
    bool accept(Tok k)
    {
        if (peek().kind != k)
            return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(std::set<std::string> expected) const { throw ParseError(peek().offset, std::move(expected), describe(peek())); }
    void expect(Tok k, const char* what)
    {
        if (!accept(k))
            fail({what});
    }

    StateFormula implication()
    {
        StateFormula lhs = disjunction();
        if (accept(Tok::arrow))
            return implies(lhs, implication());
        return lhs;
    }

    StateFormula disjunction()
    {
        StateFormula lhs = conjunction();
        while (accept(Tok::bar))
            lhs = neg(conj(neg(lhs), neg(conjunction())));
        return lhs;
    }

    StateFormula conjunction()
    {
        StateFormula lhs = unary();
        while (accept(Tok::amp))
            lhs = conj(lhs, unary());
        return lhs;
    }

    StateFormula unary()
    {
        if (accept(Tok::bang))
            return neg(unary());
        return primary();
    }

    StateFormula primary()
    {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::kw_true: take(); return truth();
        case Tok::kw_false: take(); return neg(truth());
        case Tok::ident: take(); return atom(t.text);
        case Tok::lparen: {
            take();
            StateFormula f = implication();
            expect(Tok::rparen, "')'");
            return f;
        }
        case Tok::kw_P: {
            take();
            const Cmp c = comparator();
            const std::size_t at = peek().offset;
            const double p = number();
            if (!(p >= 0.0 && p <= 1.0))
                throw ParseError(at, {"a probability in [0, 1]"}, format_number(p));
            const Tok close = open_group();
            PathFormula path = path_formula();
            expect(close, close == Tok::rparen ? "')'" : "']'");
            return prob(c, p, path);
        }
        case Tok::kw_C: {
            take();
            const Cmp c = comparator();
            const double m = number();
            const Tok close = open_group();
            expect(Tok::kw_F, "'F'");
            expect(Tok::le, "'<='");
            const int k = natural();
            StateFormula target = unary();
            expect(close, close == Tok::rparen ? "')'" : "']'");
            return cost_bound(c, m, k, target);
        }
        default:
            fail({"'true'", "'false'", "identifier", "'('", "'!'", "'P'", "'C'"});
        }
    }

    Tok open_group()
    {
        if (accept(Tok::lparen))
            return Tok::rparen;
        if (accept(Tok::lbrack))
            return Tok::rbrack;
        fail({"'('", "'['"});
    }

    PathFormula path_formula()
    {
        if (accept(Tok::kw_X))
            return next(unary());
        if (accept(Tok::kw_F)) {
            if (accept(Tok::le)) {
                const int k = natural();
                return bounded_eventually(unary(), k);
            }
            return eventually(unary());
        }
        StateFormula lhs = disjunction();
        if (!accept(Tok::kw_U))
            fail({"'U'"});
        if (accept(Tok::le)) {
            const int k = natural();
            return bounded_until(lhs, disjunction(), k);
        }
        return until(lhs, disjunction());
    }

    Cmp comparator()
    {
        switch (peek().kind) {
        case Tok::le: take(); return Cmp::le;
        case Tok::lt: take(); return Cmp::lt;
        case Tok::ge: take(); return Cmp::ge;
        case Tok::gt: take(); return Cmp::gt;
        default: fail({"'<='", "'<'", "'>='", "'>'"});
        }
    }

    double number()
    {
        const Token& t = peek();
        if (t.kind != Tok::number)
            fail({"number"});
        double v = 0.0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size())
            throw ParseError(t.offset, {"number"}, describe(t));
        take();
        return v;
    }

    int natural()
    {
        const Token& t = peek();
        if (t.kind != Tok::number)
            fail({"step bound"});
        int v = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || v < 0)
            throw ParseError(t.offset, {"a nonnegative integer step bound"}, describe(t));
        take();
        return v;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses PCTL text; throws ParseError with the byte offset and the expected-token set.
inline StateFormula parse(const std::string& text) { return detail::Parser(text).parse_all(); }

}  // namespace pctladp::pctl
