#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace valtree;

namespace {
GroundValuation v7() { return GroundValuation(7, 3); }
GroupElem q(long n, long d = 1) { return GroupElem::from_rational(Rational(n, d), 3); }

FamilyPtr sqrt2_family(std::size_t horizon = 20) {
    return Family::hensel(v7(), parse_poly("x^2 - 2"), 3, horizon);
}
} // namespace

TEST_CASE("the square-root lifting produces the pinned center sequence", "[family]") {
    auto fam = sqrt2_family();
    CHECK(fam->member(0)->center() == Rational(3));
    CHECK(fam->member(1)->center() == Rational(10));
    CHECK(fam->member(2)->center() == Rational(108));
    CHECK(fam->member(0)->sv() == q(1));
    CHECK(fam->member(1)->sv() == q(2));
    CHECK(fam->member(2)->sv() == q(3));
    // the defining values grow strictly and each center refines the last
    GroundValuation gv = v7();
    for (std::size_t i = 0; i + 1 < 10; ++i) {
        CHECK(fam->member(i)->sv() < fam->member(i + 1)->sv());
        CHECK(leq(fam->member(i), fam->member(i + 1)));
        CHECK(gv(fam->member(i + 1)->center() - fam->member(i)->center()) >=
              fam->member(i)->sv());
        // F gets p-adically closer to zero at every center
        Poly F = parse_poly("x^2 - 2");
        CHECK(gv(F.eval_at(fam->member(i)->center())) <
              gv(F.eval_at(fam->member(i + 1)->center())));
    }
}

TEST_CASE("degree-one polynomials stabilize quickly along the lifting", "[family]") {
    auto fam = sqrt2_family();
    auto r = fam->stable_value(parse_poly("x - 3"));
    auto* s = std::get_if<StableValue>(&r);
    REQUIRE(s != nullptr);
    CHECK(s->value == q(1));
    CHECK(s->certified_at <= 3);

    auto r2 = fam->stable_value(parse_poly("x - 10"));
    auto* s2 = std::get_if<StableValue>(&r2);
    REQUIRE(s2 != nullptr);
    CHECK(s2->value == q(2));

    // constants short-circuit below the family degree
    auto rc = fam->stable_value(Poly::constant(Rational(49)));
    auto* sc = std::get_if<StableValue>(&rc);
    REQUIRE(sc != nullptr);
    CHECK(sc->short_circuit);
    CHECK(sc->value == q(2));

    auto rz = fam->stable_value(Poly::zero());
    CHECK(std::get<StableValue>(rz).value.is_infinity());
}

TEST_CASE("the defining polynomial never stabilizes along its own lifting", "[family]") {
    auto fam = sqrt2_family(20);
    auto r = fam->stable_value(parse_poly("x^2 - 2"));
    auto* u = std::get_if<UnstableUpTo>(&r);
    REQUIRE(u != nullptr);
    CHECK(u->members_tried == 20);
    for (std::size_t i = 0; i + 1 < u->values.size(); ++i)
        CHECK(u->values[i] < u->values[i + 1]);
    CHECK_THROWS_AS(fam->value_or_throw(parse_poly("x^2 - 2")), stability_error);

    UnstableSearch us = fam->find_unstable();
    CHECK(us.cls == FamilyClass::essential);
    REQUIRE(us.witness.has_value());
    CHECK(us.witness->degree() == 2);
}

TEST_CASE("value suprema come from the generator when they are forced", "[family]") {
    CHECK(sqrt2_family()->value_sup() == GroupElem::infinity_minus(3));

    GroundValuation gv = v7();
    auto root = Node::make_root(gv);
    auto rule = Family::from_rule(root, Poly::x(),
                                  BetaSeq::of_geometric(q(1), Rational(1), Rational(1, 2)), 20);
    CHECK(rule->value_sup() == GroupElem::ball_minus(Rational(1), 3));

    auto arith = Family::from_rule(root, Poly::x(),
                                   BetaSeq::of_arithmetic(q(0), q(1, 2)), 16);
    CHECK(arith->value_sup() == GroupElem::infinity_minus(3));

    // an explicit member list with geometric values is recognized numerically
    std::vector<NodePtr> ms;
    for (int i = 0; i < 6; ++i)
        ms.push_back(Node::make_depth_zero(gv, 0, q((1 << (i + 1)) - 1, 1 << i)));
    auto listed = Family::from_nodes(ms, 6);
    CHECK(listed->value_sup() == GroupElem::ball_minus(Rational(2), 3));

    // declared suprema are validated against the members
    auto declared = Family::from_nodes(ms, 6, GroupElem::ball_minus(Rational(2), 3));
    CHECK(declared->value_sup() == GroupElem::ball_minus(Rational(2), 3));
    auto bad = Family::from_nodes(ms, 6, q(3, 2));
    CHECK_THROWS_AS(bad->value_sup(), input_error);
}

TEST_CASE("family construction validates its inputs", "[family]") {
    GroundValuation gv = v7();
    CHECK_THROWS_AS(Family::hensel(gv, parse_poly("x - 1"), 3, 20), input_error);
    // an exact root terminates the center sequence immediately
    CHECK_THROWS_AS(Family::hensel(gv, parse_poly("x^2 - 4"), 2, 20), stability_error);
    // F'(2) = 0: the approximate root is not simple
    CHECK_THROWS_AS(Family::hensel(gv, parse_poly("x^2 - 4x + 11"), 2, 20), config_error);
    CHECK_THROWS_AS(Family::from_centers(gv, {Rational(0), Rational(1), Rational(2)}, 20),
                    input_error); // not pseudo-convergent: gaps do not shrink
    auto ok = Family::from_centers(gv, {Rational(3), Rational(10), Rational(108)}, 20);
    CHECK(ok->member(1)->sv() == q(2));
    CHECK(ok->value_sup() == GroupElem::infinity_minus(3));

    std::vector<NodePtr> one = {Node::make_depth_zero(gv, 0, q(1))};
    CHECK_THROWS_AS(Family::from_nodes(one, 8), input_error);
    std::vector<NodePtr> bad = {Node::make_depth_zero(gv, 0, q(2)),
                                Node::make_depth_zero(gv, 0, q(1))};
    CHECK_THROWS_AS(Family::from_nodes(bad, 8), input_error);
}

TEST_CASE("limit augmentation needs an unstable key above all member values", "[family]") {
    auto fam = sqrt2_family();
    GroupElem im = GroupElem::infinity_minus(3);

    CHECK_THROWS_AS(make_limit_augmentation(fam, parse_poly("x - 3"), q(5)),
                    precondition_error); // stable: an ordinary augmentation suffices
    CHECK_THROWS_AS(make_limit_augmentation(fam, parse_poly("x^2 - 2"), q(3)),
                    precondition_error); // value already reached inside the family

    auto muA = make_limit_augmentation(fam, parse_poly("x^2 - 2"), im);
    CHECK(muA->kind() == NodeKind::limit);
    CHECK(muA->eval(parse_poly("x^2 - 2")) == im);
    CHECK(muA->eval(parse_poly("x - 3")) == q(1));
    CHECK(muA->eval(Poly::constant(Rational(7))) == q(1));
    CHECK(muA->degree() == 2);
    CHECK(muA->sv() == im);
    // coefficient values that never stabilize surface as horizon errors: a
    // linear factor pinned to a deep center keeps gaining value past a tight
    // horizon
    auto tight = sqrt2_family(4);
    auto muT = make_limit_augmentation(tight, parse_poly("x^2 - 2"), im);
    Rational deep_center = sqrt2_family(20)->member(6)->center();
    CHECK_THROWS_AS(muT->eval(Poly::linear_root(deep_center)), stability_error);
}

TEST_CASE("a translation-rule family converging to a cut collapses to one augmentation",
          "[family]") {
    GroundValuation gv = v7();
    auto root = Node::make_root(gv);
    auto fam = Family::from_rule(root, Poly::x(),
                                 BetaSeq::of_geometric(q(1), Rational(1), Rational(1, 2)), 20);
    // members are the centered-at-zero valuations with values 0, 1/2, 3/4, ...
    CHECK(fam->member(0)->sv() == q(0));
    CHECK(fam->member(1)->sv() == q(1, 2));
    CHECK(fam->member(2)->sv() == q(3, 4));

    UnstableSearch us = fam->find_unstable();
    CHECK(us.cls == FamilyClass::inessential);
    REQUIRE(us.witness.has_value());
    CHECK(us.witness->degree() == 1);

    GroupElem bm = GroupElem::ball_minus(Rational(1), 3);
    auto lim = make_limit_augmentation(fam, Poly::x(), bm);
    auto direct = Node::make_depth_zero(gv, 0, bm);
    oracles::RationalGen gen(7, 3, 41);
    for (int i = 0; i < 150; ++i) {
        Poly f = gen.poly(10);
        CHECK(lim->eval(f) == direct->eval(f));
    }
    CHECK(node_equiv(lim, direct));
}
