#include "pctladp/pctl/parser.hpp"

#include <gtest/gtest.h>

using namespace pctladp::pctl;

namespace {

ParseError parse_error(const std::string& text)
{
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "expected a parse error for: " << text;
    return ParseError(0, {}, "");
}

}  // namespace

TEST(Parser, Precedence)
{
    const auto a = atom("a"), b = atom("b"), c = atom("c");
    EXPECT_EQ(parse("!a & b"), conj(neg(a), b));
    EXPECT_EQ(parse("a & b => c"), implies(conj(a, b), c));
    EXPECT_EQ(parse("a => b & c"), implies(a, conj(b, c)));
    EXPECT_EQ(parse("a | b => c"), implies(neg(conj(neg(a), neg(b))), c));
    EXPECT_EQ(parse("((a))"), a);
}

TEST(Parser, BracketsAndParenthesesAreInterchangeable)
{
    EXPECT_EQ(parse("P>=0.5 [F goal]"), parse("P>=0.5 (F goal)"));
    EXPECT_EQ(parse("C<=3 [F<=2 b]"), parse("C<=3 (F<=2 b)"));
}

TEST(Parser, NumbersInAllSpellings)
{
    EXPECT_EQ(parse("P>=0.25 [X a]").as<Prob>()->bound, 0.25);
    EXPECT_EQ(parse("P>=.25 [X a]").as<Prob>()->bound, 0.25);
    EXPECT_EQ(parse("P>=2.5e-1 [X a]").as<Prob>()->bound, 0.25);
    EXPECT_EQ(parse("P>=1 [X a]").as<Prob>()->bound, 1.0);
    EXPECT_EQ(parse("C>=-3 [F<=2 a]").as<CostBound>()->bound, -3.0);
    EXPECT_EQ(parse("C<=1E2 [F<=2 a]").as<CostBound>()->bound, 100.0);
}

TEST(Parser, KeywordPrefixesAreIdentifiers)
{
    EXPECT_EQ(parse("Px"), atom("Px"));
    EXPECT_EQ(parse("Fgoal"), atom("Fgoal"));
    EXPECT_EQ(parse("trueish"), atom("trueish"));
    EXPECT_EQ(parse("_x9"), atom("_x9"));
}

TEST(Parser, ErrorsCarryOffsetAndExpectation)
{
    auto e = parse_error("P>=0.5 [F goal");
    EXPECT_EQ(e.offset(), 14u);
    EXPECT_EQ(e.found(), "end of input");

    e = parse_error("a & ");
    EXPECT_EQ(e.offset(), 4u);

    e = parse_error("P>=1.5 [F goal]");
    EXPECT_EQ(e.offset(), 3u);
    EXPECT_TRUE(e.expected().count("a probability in [0, 1]"));

    e = parse_error("P>=0.5 [F<=2.5 goal]");
    EXPECT_EQ(e.offset(), 11u);

    e = parse_error("a b");
    EXPECT_EQ(e.offset(), 2u);

    e = parse_error("a $ b");
    EXPECT_EQ(e.offset(), 2u);

    EXPECT_NE(std::string(parse_error("P=0.5 [F a]").what()).find("byte 1"), std::string::npos);
}

TEST(Parser, RejectsMalformedInput)
{
    for (const char* bad : {"", "P", "P>=", "P>=0.5", "P>=0.5 []", "C<=3 [F b]", "C<=3 [X b]", "X a", "a U b", "F a", "(a",
                            "a)", "P>=0.5 [F<= goal]", "!", "a => ", "P>=-0.1 [F a]", "C<=3 [F<=-1 b]"})
        EXPECT_THROW(parse(bad), ParseError) << bad;
}

TEST(Parser, ParseErrorIsAnInputError) { EXPECT_THROW(parse("&"), pctladp::InputError); }

TEST(Parser, PrinterOutputIsStable)
{
    for (const char* text : {"(A => P>=0.2 [X C<=13 [F<=14 B]])", "P<=0.6 [!a U<=12 b]", "!(a & !b)", "C>-2.5 [F<=3 (a & b)]"}) {
        EXPECT_EQ(to_string(parse(text)), text);
    }
}

TEST(Parser, FormatNumberRoundTrips)
{
    for (double x : {0.0, 0.1, 0.2, 1.0 / 3.0, 1e-300, 123456789.125, -2.5}) {
        const std::string s = format_number(x);
        EXPECT_EQ(std::stod(s), x);
    }
    EXPECT_EQ(format_number(0.2), "0.2");
    EXPECT_EQ(format_number(13.0), "13");
}
