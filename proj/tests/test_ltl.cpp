#include <gtest/gtest.h>

#include <random>

#include <tlt/ltl.hpp>
#include <tlt/verify.hpp>

#include "fixtures.hpp"

using namespace tlt;
using F = Formula;

TEST(Parse, AlwaysEventuallyDisjunction) {
    EXPECT_EQ(parse_ltl("G F (g | b)"), F::always(F::eventually(F::lor(F::atom("g"), F::atom("b")))));
}

TEST(Parse, TrueLiteral) { EXPECT_EQ(parse_ltl("true"), F::truth()); }

TEST(Parse, ObstacleFormulaNestsConjunctionRight) {
    auto a = [](const char* n) { return F::atom(n); };
    EXPECT_EQ(parse_ltl("(a1 & !a2 & !a3) U G a6"),
              F::until(F::land(a("a1"), F::land(F::lnot(a("a2")), F::lnot(a("a3")))), F::always(a("a6"))));
}

TEST(Parse, Precedence) {
    auto a = F::atom("a"), b = F::atom("b"), c = F::atom("c");
    EXPECT_EQ(parse_ltl("a | b & c"), F::lor(a, F::land(b, c)));
    EXPECT_EQ(parse_ltl("a U b U c"), F::until(a, F::until(b, c)));
    EXPECT_EQ(parse_ltl("a & b U c"), F::until(F::land(a, b), c));
    EXPECT_EQ(parse_ltl("!a U X b"), F::until(F::lnot(a), F::next(b)));
    EXPECT_EQ(parse_ltl("a W b"), F::weak_until(a, b));
    EXPECT_EQ(parse_ltl("G !__out"), F::always(F::lnot(F::atom("__out"))));
}

TEST(Parse, ErrorsCarryOffsetAndExpectedTokens) {
    try {
        parse_ltl("a & ");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_FALSE(e.expected().empty());
    }
    try {
        parse_ltl("(a | b");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 6u);
        EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), ")"), e.expected().end());
    }
    try {
        parse_ltl("a $ b");
        FAIL();
    } catch (const SyntaxError& e) {
        EXPECT_EQ(e.offset(), 2u);
    }
    EXPECT_THROW(parse_ltl(""), SyntaxError);
    EXPECT_THROW(parse_ltl("a b"), SyntaxError);
    EXPECT_THROW(parse_ltl("U a"), SyntaxError);
}

TEST(Negate, DoubleNegationAndWrapper) {
    EXPECT_EQ(negate(F::lnot(F::atom("a"))), F::atom("a"));
    auto phi = parse_ltl("G F (g | b)");
    EXPECT_EQ(negate(phi), F::lnot(phi));
}

TEST(Pnf, Rewrites) {
    EXPECT_EQ(to_wu_pnf(parse_ltl("F a")), F::until(F::truth(), F::atom("a")));
    EXPECT_EQ(to_wu_pnf(parse_ltl("G a")), F::weak_until(F::atom("a"), F::falsity()));
    EXPECT_EQ(to_wu_pnf(negate(parse_ltl("G F (g | b)"))),
              F::until(F::truth(), F::weak_until(F::land(F::lnot(F::atom("g")), F::lnot(F::atom("b"))), F::falsity())));
    EXPECT_EQ(to_wu_pnf(parse_ltl("!X a")), F::next(F::lnot(F::atom("a"))));
    EXPECT_EQ(to_wu_pnf(parse_ltl("!true")), F::falsity());
    EXPECT_EQ(to_wu_pnf(parse_ltl("!(a U b)")),
              F::weak_until(F::land(F::atom("a"), F::lnot(F::atom("b"))), F::land(F::lnot(F::atom("a")), F::lnot(F::atom("b")))));
    EXPECT_EQ(to_wu_pnf(parse_ltl("!(a W b)")),
              F::until(F::land(F::atom("a"), F::lnot(F::atom("b"))), F::land(F::lnot(F::atom("a")), F::lnot(F::atom("b")))));
}

TEST(Pnf, RandomFormulasNormalize) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 3000; ++i) {
        auto f = fixtures::random_formula(rng, 4, 3);
        auto g = to_wu_pnf(f);
        ASSERT_TRUE(is_wu_pnf(g)) << to_string(f) << " -> " << to_string(g);
    }
    EXPECT_FALSE(is_wu_pnf(parse_ltl("F a")));
    EXPECT_FALSE(is_wu_pnf(parse_ltl("!(a & b)")));
    EXPECT_TRUE(is_wu_pnf(parse_ltl("!a W (b & X !c)")));
}

// Every ultimately periodic word over three atoms with |prefix| + |cycle| <= 6, built from the
// label sets {}, {p}, {q}, {r}, {p,q}, {p,r}, {q,r}, {p,q,r}; sampled to keep the suite fast.
TEST(Pnf, EquivalentOnLassoWords) {
    std::mt19937_64 rng(5);
    std::vector<std::set<std::string>> alphabet;
    for (int m = 0; m < 8; ++m) {
        std::set<std::string> s;
        if (m & 1) s.insert("p");
        if (m & 2) s.insert("q");
        if (m & 4) s.insert("r");
        alphabet.push_back(s);
    }
    std::uniform_int_distribution<int> letter(0, 7);
    for (int i = 0; i < 400; ++i) {
        auto f = fixtures::random_formula(rng, 4, 3);
        auto g = to_wu_pnf(f);
        for (int w = 0; w < 40; ++w) {
            std::size_t len = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
            std::size_t pre = std::uniform_int_distribution<std::size_t>(0, len - 1)(rng);
            LassoWord word;
            for (std::size_t j = 0; j < len; ++j) (j < pre ? word.prefix : word.cycle).push_back(alphabet[letter(rng)]);
            ASSERT_EQ(eval_lasso(word, f), eval_lasso(word, g)) << to_string(f);
        }
    }
}

TEST(Print, RoundTrip) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        auto f = fixtures::random_formula(rng, 4, 3);
        ASSERT_EQ(parse_ltl(to_string(f)), f) << to_string(f);
    }
    EXPECT_EQ(to_string(parse_ltl("G F (g | b)")), "G F (g | b)");
}

TEST(Atoms, Collected) {
    auto s = atoms_of(parse_ltl("(a1 & !a2) U (G a6 | X a1)"));
    EXPECT_EQ(s, (std::set<std::string>{"a1", "a2", "a6"}));
}
