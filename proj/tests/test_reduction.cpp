#include <gtest/gtest.h>

#include <icrs/icrs.hpp>

#include "support/parse.hpp"

#include "support/oracle.hpp"

using namespace icrs;

namespace {

Term in(const RuleSystem& sys, const std::string& s) {
    Signature sig = sys.signature();
    return parse_term(s, sig, testing_support::infer(false));
}

Redex redex_at(const Term& s, const RuleSystem& sys, const Position& p, std::size_t rule = 0) {
    auto v = match_at(sys.rule(rule), s, p);
    EXPECT_TRUE(v) << "no redex at " << to_string(p);
    return Redex{p, rule, v ? *v : Valuation{}};
}

std::set<Position> positions_of(const RedexSet& rs) {
    std::set<Position> out;
    for (const auto& r : rs) out.insert(r.position);
    return out;
}

RuleSystem nest_system() { return make_system({"nest: f([x]Z(x)) -> Z(f([x]Z(x)))"}); }

RuleSystem map_system() {
    return make_system({
        "sig map/2 cons/2 nil/0 hd/1 tl/1 s/1 0/0",
        "map1: map([z]F(z), cons(X, XS)) -> cons(F(X), map([z]F(z), XS))",
        "map2: map([z]F(z), nil) -> nil",
        "hd: hd(cons(X, XS)) -> X",
        "tl: tl(cons(X, XS)) -> XS",
    });
}

}  // namespace

TEST(ApplyStep, Examples) {
    auto beta = make_system({"f([x]Z(x), Z') -> Z(Z')"});
    EXPECT_TRUE(alpha_eq(apply_step(in(beta, "f([x]h(x), a)"), beta, {}, 0).target, in(beta, "h(a)")));
    auto nest = nest_system();
    Term s = in(nest, "f([x]f([y]x))");
    Step root = apply_step(s, nest, {}, 0);
    EXPECT_TRUE(alpha_eq(root.target, in(nest, "f([y] f([x] f([y] x)))")));
    EXPECT_TRUE(root.collapsing);
    EXPECT_TRUE(root.root_collapsing);
    Step inner = apply_step(s, nest, {1, 0}, 0);
    EXPECT_TRUE(alpha_eq(inner.target, in(nest, "f([x] x)")));
    EXPECT_TRUE(inner.collapsing);
    EXPECT_FALSE(inner.root_collapsing);
}

TEST(ApplyStep, Stale) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "f(a)");
    Redex r = redex_at(s, sys, {});
    Term other = in(sys, "f(b)");
    EXPECT_THROW(apply_step(other, sys, r), StaleRedex);
    EXPECT_THROW(apply_step(in(sys, "g(a)"), sys, {}, 0), StaleRedex);
}

TEST(ApplyStep, CapturingContext) {
    // the Remark's λ-example: (λx.□){(λy.x)z/□} → λx.x
    auto sys = make_system({"beta: app(lam([y]Z(y)), Z') -> Z(Z')"});
    Term s = in(sys, "lam([x] app(lam([y] x), z))");
    Step st = apply_step(s, sys, {1, 0}, 0);
    EXPECT_TRUE(alpha_eq(st.target, in(sys, "lam([x] x)")));
}

TEST(ApplyStep, CyclicRhs) {
    auto sys = make_system({"d(Z) -> mu a. c(Z, a)"});
    Step st = apply_step(in(sys, "g(d(b))"), sys, {1}, 0);
    EXPECT_TRUE(alpha_eq(st.target, in(sys, "g(mu a. c(b, a))")));
}

TEST(Descendants, Examples) {
    auto sys = make_system({"f(Z) -> Z", "hd(cons(X, XS)) -> X"});
    Step st = apply_step(in(sys, "f(a)"), sys, {}, 0);
    EXPECT_EQ(descendants({{1}}, st, sys).positions, (std::set<Position>{{}}));
    EXPECT_TRUE(descendants({{}}, st, sys).positions.empty());
    Step hd = apply_step(in(sys, "hd(cons(a, l))"), sys, {}, 1);
    EXPECT_TRUE(descendants({{1, 2}}, hd, sys).positions.empty());
    EXPECT_EQ(descendants({{1, 1}}, hd, sys).positions, (std::set<Position>{{}}));
    EXPECT_THROW(descendants({{3}}, st, sys), InvalidPosition);
}

TEST(Descendants, DuplicationAndParallel) {
    auto sys = make_system({"dup(Z) -> h(Z, Z)"});
    Step st = apply_step(in(sys, "k(dup(g(a)), b)"), sys, {1}, 0);
    EXPECT_EQ(descendants({{1, 1, 1}}, st, sys).positions, (std::set<Position>{{1, 1, 1}, {1, 2, 1}}));
    EXPECT_EQ(descendants({{2}}, st, sys).positions, (std::set<Position>{{2}}));
    EXPECT_EQ(descendants({{}}, st, sys).positions, (std::set<Position>{{}}));
}

TEST(Descendants, BoundVariablesOfThePattern) {
    auto sys = make_system({"f([x]Z(x), Z') -> Z(Z')"});
    Step st = apply_step(in(sys, "f([x]h(x, b), a)"), sys, {}, 0);
    // the x below h is the pattern's bound variable and has no descendant
    EXPECT_TRUE(descendants({{1, 0, 1}}, st, sys).positions.empty());
    EXPECT_EQ(descendants({{1, 0, 2}}, st, sys).positions, (std::set<Position>{{2}}));
    EXPECT_EQ(descendants({{2}}, st, sys).positions, (std::set<Position>{{1}}));
}

TEST(Residuals, Examples) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "mu a. f(a)");
    Step root = apply_step(s, sys, {}, 0);
    auto inner = redex_at(s, sys, {1});
    EXPECT_EQ(positions_of(residuals(RedexSet{inner}, root, sys).redexes), (std::set<Position>{{}}));
    EXPECT_TRUE(residuals(RedexSet{root.redex}, root, sys).redexes.empty());
    Term t = in(sys, "g(f(a), f(b))");
    Step left = apply_step(t, sys, {1}, 0);
    auto right = redex_at(t, sys, {2});
    EXPECT_EQ(positions_of(residuals(RedexSet{right}, left, sys).redexes), (std::set<Position>{{2}}));
}

TEST(Residuals, AcrossAReduction) {
    auto sys = make_system({"dup(Z) -> h(Z, Z)", "f(Z) -> Z"});
    Term s = in(sys, "dup(f(a))");
    Reduction d;
    d.source = s;
    d.append(apply_step(s, sys, {}, 0));
    d.append(apply_step(d.target(), sys, {1}, 1));
    auto u = redex_at(s, sys, {1}, 1);
    EXPECT_EQ(positions_of(residuals(RedexSet{u}, d, sys).redexes), (std::set<Position>{{2}}));
}

TEST(Develop, ParallelRedexes) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "g(f(a), f(b))");
    auto dev = develop(s, RedexSet{redex_at(s, sys, {1}), redex_at(s, sys, {2})}, sys);
    EXPECT_TRUE(dev.complete);
    EXPECT_EQ(dev.reduction.size(), 2u);
    EXPECT_TRUE(alpha_eq(dev.reduction.target(), in(sys, "g(a, b)")));
}

TEST(Develop, RootOfInfiniteTerm) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "mu a. f(a)");
    auto dev = develop(s, RedexSet{redex_at(s, sys, {})}, sys);
    EXPECT_TRUE(dev.complete);
    EXPECT_EQ(dev.reduction.size(), 1u);
    EXPECT_TRUE(alpha_eq(dev.reduction.target(), s));
}

TEST(Develop, NestedRedexesAgreeWithBruteForce) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "f(f(a))");
    RedexSet us{redex_at(s, sys, {}), redex_at(s, sys, {1})};
    auto dev = develop(s, us, sys);
    EXPECT_TRUE(alpha_eq(dev.reduction.target(), in(sys, "a")));
    for (const Term& t : oracle::all_developments(oracle::mark(s, us, sys)))
        EXPECT_TRUE(alpha_eq(t, dev.reduction.target()));
}

TEST(Develop, FinitelyManyRedexesOfAnInfiniteTerm) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "mu a. f(a)");
    auto some = to_set(find_redexes(s, sys, 40));
    auto dev = develop(s, some, sys);
    EXPECT_TRUE(dev.complete);
    EXPECT_EQ(dev.reduction.size(), some.size());
    EXPECT_TRUE(develop(s, some, sys, 10).diverged);
}

TEST(Project, DisjointRedexes) {
    auto sys = make_system({"f(Z) -> Z", "g(Z) -> k(Z)"});
    Term s = in(sys, "h(f(a), g(b))");
    auto p = project_over_step(s, RedexSet{redex_at(s, sys, {1})}, redex_at(s, sys, {2}, 1), sys);
    EXPECT_FALSE(p.diverged);
    EXPECT_TRUE(p.corners_equal);
    ASSERT_EQ(p.projected.reduction.size(), 1u);
    EXPECT_EQ(p.projected.reduction.steps[0].redex.position, (Position{1}));
}

TEST(Project, DuplicatedArgument) {
    auto sys = make_system({"dup(Z) -> h(Z, Z)", "f(Z) -> Z"});
    Term s = in(sys, "dup(f(a))");
    auto p = project_over_step(s, RedexSet{redex_at(s, sys, {1}, 1)}, redex_at(s, sys, {}, 0), sys);
    EXPECT_TRUE(p.corners_equal);
    EXPECT_EQ(p.projected.reduction.size(), 2u);
    EXPECT_TRUE(alpha_eq(p.projected.reduction.target(), in(sys, "h(a, a)")));
}

TEST(Project, MemberOfTheSet) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "g(f(a), f(b))");
    auto v = redex_at(s, sys, {1});
    auto p = project_over_step(s, RedexSet{v, redex_at(s, sys, {2})}, v, sys);
    EXPECT_TRUE(p.corners_equal);
    EXPECT_EQ(p.projected.reduction.size(), 1u);
    EXPECT_EQ(p.closing.reduction.size(), 0u);
}

TEST(Tile, ParallelSquare) {
    auto sys = make_system({"f(Z) -> Z"});
    Term s = in(sys, "g(f(a), f(b))");
    Reduction S{s, {apply_step(s, sys, {1}, 0)}}, T{s, {apply_step(s, sys, {2}, 0)}};
    auto d = tile(S, T, sys);
    EXPECT_EQ(d.status, TilingDiagram::Status::completed);
    EXPECT_TRUE(d.corners_agree);
    EXPECT_TRUE(alpha_eq(d.corner(), in(sys, "g(a, b)")));
}

TEST(Tile, MapFragment) {
    auto sys = map_system();
    Term s = in(sys, "map([z]s(z), cons(0, cons(0, nil)))");
    Reduction S;
    S.source = s;
    S.append(apply_step(s, sys, {}, 0));
    S.append(apply_step(S.target(), sys, {2}, 0));
    S.append(apply_step(S.target(), sys, {2, 2}, 1));
    Reduction T;
    T.source = s;
    T.append(apply_step(s, sys, {}, 0));
    auto d = tile(S, T, sys);
    EXPECT_EQ(d.status, TilingDiagram::Status::completed);
    EXPECT_TRUE(d.corners_agree);
    EXPECT_TRUE(alpha_eq(d.corner(), in(sys, "cons(s(0), cons(s(0), nil))")));
}

TEST(Tile, DivergesWhenResidualsAreInfinite) {
    // the cyclic contractum holds infinitely many copies of the inner redex
    auto sys = make_system({"d(Z) -> mu a. c(Z, a)", "f(Z) -> Z"});
    Term s = in(sys, "d(f(b))");
    Reduction S{s, {apply_step(s, sys, {}, 0)}}, T{s, {apply_step(s, sys, {1}, 1)}};
    auto d = tile(S, T, sys, 200);
    EXPECT_EQ(d.status, TilingDiagram::Status::diverged);
    ASSERT_TRUE(d.diverged_cell);
    EXPECT_EQ(*d.diverged_cell, (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(Reduce, StablePrefixApproximatesTheLimit) {
    auto sys = nest_system();
    auto r = reduce(in(sys, "f([x]g(x))"), sys, Strategy::leftmost_outermost, 5, 4);
    EXPECT_TRUE(alpha_eq(r.stable_prefix, in(sys, "g(g(g(g(⊤))))")));
    EXPECT_EQ(r.stable_depth, 4u);
    EXPECT_EQ(r.reduction.depth_profile(), (std::vector<std::size_t>{0, 1, 2, 3, 4}));
    EXPECT_TRUE(r.fuel_exhausted);
}

TEST(Reduce, RootStepsForever) {
    auto sys = nest_system();
    auto r = reduce(in(sys, "f([x]x)"), sys, Strategy::leftmost_outermost, 7, 5);
    EXPECT_EQ(r.stable_depth, 0u);
    EXPECT_EQ(r.reduction.depth_profile(), std::vector<std::size_t>(7, 0));
}

TEST(Reduce, NormalFormInput) {
    auto sys = map_system();
    Term s = in(sys, "cons(0, nil)");
    auto r = reduce(s, sys, Strategy::fair, 10, 3);
    EXPECT_EQ(r.reduction.size(), 0u);
    EXPECT_TRUE(r.normal_form);
    EXPECT_TRUE(alpha_eq(r.stable_prefix, truncate(s, 3)));
}

TEST(Reduce, HeadOfInfiniteMap) {
    auto sys = map_system();
    auto r = reduce(in(sys, "hd(map([z]s(z), mu a. cons(0, a)))"), sys, Strategy::leftmost_outermost, 10, 4);
    EXPECT_TRUE(r.normal_form);
    EXPECT_EQ(r.reduction.size(), 2u);
    EXPECT_TRUE(alpha_eq(r.reduction.target(), in(sys, "s(0)")));
}

TEST(Reduce, FairVisitsEveryRedex) {
    auto sys = make_system({"f(Z) -> Z", "g(Z) -> k(Z)"});
    // lo would keep contracting f^ω at the root forever
    auto r = reduce(in(sys, "h(mu a. f(a), g(b))"), sys, Strategy::fair, 6, 3);
    bool reached = false;
    for (const auto& st : r.reduction.steps) reached = reached || st.redex.position == Position{2};
    EXPECT_TRUE(reached);
    auto lo = reduce(in(sys, "h(mu a. f(a), g(b))"), sys, Strategy::leftmost_outermost, 6, 3);
    for (const auto& st : lo.reduction.steps) EXPECT_EQ(st.redex.position, (Position{1}));
}

TEST(PrefixSets, Mirrors) {
    Term s = parse_term("f(g(a), b)");
    EXPECT_TRUE(mirrors(s, s, PrefixSet{{1, 1}, {2}}));
    EXPECT_TRUE(mirrors(parse_term("f(h(c), d)"), s, PrefixSet{}));
    EXPECT_FALSE(mirrors(parse_term("f(h(c), d)"), s, PrefixSet{{1}}));
    EXPECT_FALSE(mirrors(parse_term("f(a, b)"), s, PrefixSet{{1, 1}}));
    PrefixSet p{{1, 2, 1}};
    EXPECT_TRUE(p.contains({1, 2}));
    EXPECT_TRUE(p.contains({1}));
    EXPECT_TRUE(p.contains({}));
}
