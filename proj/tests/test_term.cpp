#include <gtest/gtest.h>

#include <icrs/icrs.hpp>

#include "support/parse.hpp"

#include "support/oracle.hpp"

using namespace icrs;

namespace {

Term T(const std::string& s) { return testing_support::T(s); }

}  // namespace

TEST(Parse, AbstractionAndConstant) {
    Term t = T("f([x] h(x), a)");
    ASSERT_EQ(t->kind, NodeKind::fun);
    EXPECT_EQ(t->name, "f");
    ASSERT_EQ(t->kids.size(), 2u);
    EXPECT_EQ(t->kids[0]->kind, NodeKind::abs);
    EXPECT_EQ(t->kids[1]->kind, NodeKind::fun);
    EXPECT_EQ(t->kids[1]->name, "a");
    EXPECT_EQ(t->kids[0]->body()->kids[0]->kind, NodeKind::bound);
}

TEST(Parse, GuardedRecursion) {
    Term t = T("mu a. f(a)");
    EXPECT_EQ(t->kind, NodeKind::rec);
    EXPECT_TRUE(alpha_eq(t, T("f(mu b. f(b))")));
}

TEST(Parse, UnguardedRecursionRejected) { EXPECT_THROW(T("mu a. a"), ParseError); }

TEST(Parse, ErrorsCarryLocation) {
    try {
        T("f(a,\n  )");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(Parse, ArityMismatchAndUnknownSymbol) {
    Signature sig;
    sig.declare("f", 1);
    EXPECT_THROW(parse_term("f(a, b)", sig, testing_support::infer(false)), ParseError);
    const Signature& strict = sig;
    EXPECT_THROW(parse_term("g(a)", strict), ParseError);
}

TEST(Parse, ReservedSymbolsCannotBeDeclared) {
    Signature sig;
    EXPECT_THROW(sig.declare(kTop, 0), Error);
    EXPECT_THROW(sig.declare(kBottom, 0), Error);
}

TEST(Parse, CommentsAndWhitespace) { EXPECT_TRUE(alpha_eq(T("f( a , # note\n b )"), T("f(a,b)"))); }

TEST(Print, RoundTrips) {
    for (const char* s : {"f([x] h(x), a)", "mu a. f(a)", "[x] [y] g(x, y)", "mu a. cons(0, a)", "l([x] mu a. h(x, a))"}) {
        Term t = T(s);
        EXPECT_TRUE(alpha_eq(parse_term(to_string(t)), t)) << s << " printed as " << to_string(t);
    }
}

TEST(Print, BinderNamesAvoidFreeNames) {
    Term t = build::abs(build::fun("g", {build::bound(0), build::free("x")}), "x");
    Term back = T(to_string(t));
    EXPECT_TRUE(alpha_eq(back, t)) << to_string(t);
}

TEST(AlphaEq, Examples) {
    EXPECT_TRUE(alpha_eq(T("[x] Z(x, f(x))"), T("[y] Z(y, f(y))")));
    EXPECT_TRUE(alpha_eq(T("mu a. f(a)"), T("f(mu a. f(a))")));
    EXPECT_FALSE(alpha_eq(T("[x] Z(x, f(x))"), T("[y] Z(y, f(z))")));
}

TEST(AlphaEq, DifferentPeriodsOfTheSameTree) {
    EXPECT_TRUE(alpha_eq(T("mu a. f(f(a))"), T("mu a. f(a)")));
    EXPECT_FALSE(alpha_eq(T("mu a. f(g(a))"), T("mu a. g(f(a))")));
}

TEST(Distance, Examples) {
    EXPECT_TRUE(distance(T("[x] Z(x,f(x))"), T("[y] Z(y,f(y))")).is_zero());
    auto d = distance(T("[x] Z(x,f(x))"), T("[y] Z(y,f(z))"));
    ASSERT_FALSE(d.is_zero());
    EXPECT_EQ(d.exponent(), 3u);
    EXPECT_DOUBLE_EQ(d.value(), 0.125);
    Term t = T("h(mu a. g(a), b)");
    EXPECT_TRUE(distance(t, t).is_zero());
}

TEST(Distance, Ordering) {
    EXPECT_LT(Distance::zero(), Distance::exponent(5));
    EXPECT_LT(Distance::exponent(5), Distance::exponent(4));
}

TEST(Distance, MatchesUnfoldingOracle) {
    Term a = T("mu a. h(g(a), b)");
    Term b = T("h(g(h(g(h(g(a), b)), b)), b)");
    auto d = distance(a, b);
    auto want = oracle::difference_depth(a, b);
    ASSERT_TRUE(want.has_value());
    ASSERT_FALSE(d.is_zero());
    EXPECT_EQ(d.exponent(), *want);
}

TEST(SubtermAt, Examples) {
    Term s = T("f([x]h(x), a)");
    Term sub = subterm_at(s, {1, 0});
    EXPECT_EQ(sub->name, "h");
    ASSERT_EQ(sub->kids[0]->kind, NodeKind::free);
    EXPECT_EQ(sub->kids[0]->name, "x");
    EXPECT_TRUE(alpha_eq(subterm_at(T("mu a. f(a)"), {1}), T("mu a. f(a)")));
    EXPECT_TRUE(alpha_eq(subterm_at(T("g(c, d)"), {2}), T("d")));
    EXPECT_THROW(subterm_at(T("g(c, d)"), {3}), InvalidPosition);
}

TEST(SubtermAt, ClosesCyclesCrossed) {
    Term s = T("mu a. h(g(a), b)");
    Term sub = subterm_at(s, {1});
    EXPECT_TRUE(alpha_eq(sub, T("mu a. g(h(a, b))")));
    EXPECT_NO_THROW(check_well_formed(sub));
}

TEST(Positions, Examples) {
    EXPECT_EQ(positions_up_to(T("a"), 3), (std::set<Position>{{}}));
    EXPECT_EQ(positions_up_to(T("mu a. f(a)"), 2), (std::set<Position>{{}, {1}, {1, 1}}));
    EXPECT_EQ(positions_up_to(T("[x] x"), 1), (std::set<Position>{{}, {0}}));
}

TEST(Positions, AgreeWithOracle) {
    for (const char* s : {"mu a. h(g(a), l([x] x))", "l([x] mu a. h(x, g(a)))", "h(mu a. g(a), mu b. h(b, b))"}) {
        Term t = T(s);
        EXPECT_EQ(positions_up_to(t, 5), oracle::positions(t, 5)) << s;
    }
}

TEST(Truncate, Examples) {
    EXPECT_TRUE(alpha_eq(truncate(T("mu a. g(a)"), 2), T("g(g(⊤))")));
    Term finite = T("h(g(a), b)");
    EXPECT_TRUE(alpha_eq(truncate(finite, 3), finite));
    EXPECT_TRUE(alpha_eq(truncate(T("f([x]g(x))"), 1), T("f(⊤)")));
}

TEST(Truncate, DistanceBound) {
    Term s = T("mu a. h(g(a), l([x] x))");
    for (std::size_t d = 0; d < 6; ++d) {
        auto dist = distance(s, truncate(s, d));
        ASSERT_FALSE(dist.is_zero());
        EXPECT_GE(dist.exponent(), d);
    }
}

TEST(Chains, NestedAbstractionsAreFinite) {
    EXPECT_TRUE(satisfies_finite_chains(T("mu a. [x] Z(a)")));
    EXPECT_TRUE(satisfies_finite_chains(T("[x1] Z1([x2] Z2(a))")));
    auto chains = find_meta_chains(T("[x1] Z1([x2] Z2(a))"));
    for (const auto& c : chains) EXPECT_EQ(c.kind, ChainKind::finite);
}

TEST(Chains, MetaCyclesAreInfinite) {
    auto chains = find_meta_chains(T("mu a. Z(a)"));
    ASSERT_EQ(chains.size(), 1u);
    EXPECT_EQ(chains[0].kind, ChainKind::cyclic_infinite);
    EXPECT_FALSE(satisfies_finite_chains(T("mu a. Z(a)")));
    EXPECT_FALSE(satisfies_finite_chains(T("mu a. Z1(Z2(a))")));
    EXPECT_FALSE(satisfies_finite_chains(T("f(mu a. Z(g(b), a))")));
}

TEST(Chains, NoMetaVariables) {
    EXPECT_TRUE(find_meta_chains(T("f(a, mu b. g(b))")).empty());
    EXPECT_TRUE(satisfies_finite_chains(T("f(a, mu b. g(b))")));
}

TEST(Chains, FiniteNesting) {
    auto chains = find_meta_chains(T("Z(Z'(a), b)"));
    ASSERT_FALSE(chains.empty());
    std::size_t longest = 0;
    for (const auto& c : chains) longest = std::max(longest, c.links.size());
    EXPECT_EQ(longest, 2u);
}

TEST(RootSymbol, FourCases) {
    EXPECT_EQ(root_symbol(T("[x] x")).tag, RootSymbol::Tag::abstraction);
    EXPECT_EQ(root_symbol(T("f(a, b)")).tag, RootSymbol::Tag::function);
    EXPECT_EQ(root_symbol(T("f(a, b)")).name, "f");
    EXPECT_EQ(root_symbol(T("Z(a)")).tag, RootSymbol::Tag::meta_variable);
    EXPECT_EQ(root_symbol(T("Z(a)")).name, "Z");
    EXPECT_EQ(root_symbol(T("x")).tag, RootSymbol::Tag::variable);
    EXPECT_EQ(root_symbol(T("mu a. g(a)")).name, "g");
}

TEST(WellFormed, RejectsEscapingRecursionThroughAbstraction) {
    // the unfolding would need infinitely many distinct binders
    Term t = build::rec(build::fun("l", {build::abs(build::fun("h", {build::bound(0), build::rec_ref(0)}))}));
    EXPECT_NO_THROW(check_well_formed(t));
    Term escaping =
        build::abs(build::rec(build::fun("l", {build::abs(build::fun("h", {build::bound(1), build::rec_ref(0)}))})));
    EXPECT_THROW(check_well_formed(escaping), IllFormedTerm);
}

TEST(Unfold, OperationsInvariant) {
    Term s = T("mu a. h(g(a), b)");
    Term u = unfold(s);
    EXPECT_TRUE(alpha_eq(s, u));
    EXPECT_EQ(positions_up_to(s, 4), positions_up_to(u, 4));
    EXPECT_TRUE(alpha_eq(truncate(s, 4), truncate(u, 4)));
    EXPECT_TRUE(alpha_eq(subterm_at(s, {1, 1}), subterm_at(u, {1, 1})));
}
