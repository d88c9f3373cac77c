#include "../support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace valtree;

static GroupElem ge(long t, const Rational& m, long s) {
    return GroupElem::from_slots({Rational(t), m, Rational(s)});
}

TEST_CASE("distinguished elements have their pinned slot forms", "[group]") {
    CHECK(GroupElem::neg_infinity(3).str() == "(-1|0|0)");
    CHECK(GroupElem::infinity_minus(3).str() == "(1|0|0)");
    CHECK(GroupElem::ball_minus(Rational(7, 2), 3).str() == "(0|7/2|-1)");
    CHECK(GroupElem::ball_plus(Rational(7, 2), 3).str() == "(0|7/2|1)");
    CHECK(GroupElem::from_rational(Rational(-4, 3), 3).str() == "(0|-4/3|0)");
    CHECK(GroupElem::infinity().str() == "inf");
    CHECK(GroupElem::zero(4).rank() == 4);
}

TEST_CASE("comparison is lexicographic with INFINITY on top", "[group]") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> d(-5, 5);
    for (int i = 0; i < 500; ++i) {
        GroupElem a = ge(d(rng), Rational(d(rng), 3), d(rng));
        GroupElem b = ge(d(rng), Rational(d(rng), 3), d(rng));
        // oracle: first differing slot decides
        int expect = 0;
        for (std::size_t k = 0; k < 3 && expect == 0; ++k) {
            if (a.slot(k) < b.slot(k)) expect = -1;
            if (a.slot(k) > b.slot(k)) expect = 1;
        }
        CHECK(GroupElem::compare(a, b) == expect);
        CHECK(a < GroupElem::infinity());
    }
    CHECK(GroupElem::infinity() == GroupElem::infinity());
    CHECK(GroupElem::neg_infinity(3) < GroupElem::from_rational(Rational(-1000000), 3));
    CHECK(GroupElem::infinity_minus(3) > GroupElem::from_rational(Rational(1000000), 3));
    CHECK(GroupElem::ball_minus(Rational(2), 3) < GroupElem::from_rational(Rational(2), 3));
    CHECK(GroupElem::ball_plus(Rational(2), 3) > GroupElem::from_rational(Rational(2), 3));
}

TEST_CASE("addition is slotwise and INFINITY absorbs", "[group]") {
    GroupElem a = ge(1, Rational(2, 3), -1), b = ge(0, Rational(1, 3), 2);
    CHECK((a + b).str() == "(1|1|1)");
    CHECK((a - b).str() == "(1|1/3|-3)");
    CHECK((a + GroupElem::infinity()).is_infinity());
    CHECK((GroupElem::infinity() + b).is_infinity());
    CHECK(scalar_mul(3, b).str() == "(0|1|6)");
    CHECK(scalar_mul(Rational(1, 2), ge(2, Rational(5), 4)).str() == "(1|5/2|2)");
    CHECK(scalar_mul(5, GroupElem::infinity()).is_infinity());
}

TEST_CASE("parsing accepts slot tuples, plain rationals, and cut sugar", "[group]") {
    CHECK(parse_group_elem("inf", 3).is_infinity());
    CHECK(parse_group_elem("(0|3/5|0)", 3) == GroupElem::from_rational(Rational(3, 5), 3));
    CHECK(parse_group_elem("3/5", 3) == GroupElem::from_rational(Rational(3, 5), 3));
    CHECK(parse_group_elem("-oo", 3) == GroupElem::neg_infinity(3));
    CHECK(parse_group_elem("oo-", 3) == GroupElem::infinity_minus(3));
    CHECK(parse_group_elem("2-", 3) == GroupElem::ball_minus(Rational(2), 3));
    CHECK(parse_group_elem("7/2+", 3) == GroupElem::ball_plus(Rational(7, 2), 3));
    CHECK_THROWS_AS(parse_group_elem("(1|2)", 3), input_error);
    CHECK_THROWS_AS(parse_group_elem("garbage", 3), input_error);

    std::mt19937_64 rng(12);
    std::uniform_int_distribution<long> d(-9, 9);
    for (int i = 0; i < 200; ++i) {
        GroupElem x = ge(d(rng), Rational(d(rng), 1 + std::abs(d(rng))), d(rng));
        CHECK(parse_group_elem(x.str(), 3) == x);
    }
}

TEST_CASE("subgroup extension index matches the smallest-multiple oracle", "[group]") {
    auto Z = SubgroupDescriptor::integers();

    auto [H1, e1] = extend_subgroup(Z, GroupElem::from_rational(Rational(3, 5), 3));
    CHECK(H1.generator() == Rational(1, 5));
    CHECK(e1 == ExtensionIndex::of(5));

    auto [H2, e2] = extend_subgroup(H1, GroupElem::from_rational(Rational(10, 3), 3));
    CHECK(H2.generator() == Rational(1, 15));
    CHECK(e2 == ExtensionIndex::of(3));

    auto [H3, e3] = extend_subgroup(H2, GroupElem::from_rational(Rational(301, 30), 3));
    CHECK(H3.generator() == Rational(1, 30));
    CHECK(e3 == ExtensionIndex::of(2));

    std::mt19937_64 rng(13);
    std::uniform_int_distribution<long> num(-40, 40), den(1, 24);
    Rational g(1);
    SubgroupDescriptor H = Z;
    for (int i = 0; i < 120; ++i) {
        Rational q(num(rng), den(rng));
        auto [H2x, idx] = extend_subgroup(H, GroupElem::from_rational(q, 3));
        auto oracle = oracles::index_by_trial(H.generator(), q);
        REQUIRE(oracle.has_value());
        REQUIRE(idx.finite);
        CHECK(idx.value == Int(*oracle));
        CHECK(H2x.contains_rational(q));
        CHECK(H2x.contains_rational(H.generator()));
        H = H2x;
    }
}

TEST_CASE("one incommensurable generator is representable, a second is not", "[group]") {
    auto Z = SubgroupDescriptor::integers();
    GroupElem xi = GroupElem::ball_minus(Rational(2), 3);
    auto [H, e] = extend_subgroup(Z, xi);
    CHECK(!e.finite);
    CHECK(H.is_mixed());
    CHECK(H.contains(xi));
    CHECK(H.contains(xi + GroupElem::from_rational(Rational(5), 3)));
    CHECK(H.contains(scalar_mul(3, xi)));
    CHECK(!H.contains(scalar_mul(Rational(1, 2), xi)));

    auto [H2, e2] = extend_subgroup(H, xi);
    CHECK(e2 == ExtensionIndex::of(1));
    GroupElem other = GroupElem::from_slots({Rational(1), Rational(0), Rational(0)});
    CHECK_THROWS_AS(extend_subgroup(H, other), config_error);
}

TEST_CASE("cut classification agrees with bounded rational comparisons", "[group]") {
    auto G = SubgroupDescriptor::cyclic(Rational(1, 6));
    std::mt19937_64 rng(14);
    std::uniform_int_distribution<long> num(-300, 300), den(1, 100), sub(-2, 2), top(-1, 1);
    for (int i = 0; i < 400; ++i) {
        GroupElem x = GroupElem::from_slots(
            {Rational(top(rng)), Rational(num(rng), den(rng)), Rational(sub(rng))});
        QuasiCut c = quasi_cut(x, G);
        auto o = oracles::cut_by_comparisons(x);
        switch (c.kind) {
            case QuasiCut::Kind::principal:
                CHECK(o.kind == oracles::CutClass::at_rational);
                CHECK(o.witness == c.at);
                break;
            case QuasiCut::Kind::ball_minus:
                CHECK(o.kind == oracles::CutClass::just_below);
                CHECK(o.witness == c.at);
                break;
            case QuasiCut::Kind::ball_plus:
                CHECK(o.kind == oracles::CutClass::just_above);
                CHECK(o.witness == c.at);
                break;
            case QuasiCut::Kind::improper_low:
                CHECK(o.kind == oracles::CutClass::below_all);
                break;
            case QuasiCut::Kind::improper_high:
                CHECK(o.kind == oracles::CutClass::above_all);
                break;
        }
    }
}

TEST_CASE("small-extension equivalence is cut equality and canonical forms are fixed points",
          "[group]") {
    auto G = SubgroupDescriptor::cyclic(Rational(1, 6));
    GroupElem a = GroupElem::from_slots({Rational(0), Rational(4), Rational(-1)});
    GroupElem b = GroupElem::from_slots({Rational(0), Rational(4), Rational(-2)});
    GroupElem c = GroupElem::from_slots({Rational(0), Rational(4), Rational(1)});
    CHECK(sme_equiv(a, b, G));
    CHECK(!sme_equiv(a, c, G));
    CHECK(!sme_equiv(a, GroupElem::from_rational(Rational(4), 3), G));

    std::mt19937_64 rng(15);
    std::uniform_int_distribution<long> num(-60, 60), den(1, 40), sub(-3, 3), top(-1, 1);
    for (int i = 0; i < 300; ++i) {
        GroupElem x = GroupElem::from_slots(
            {Rational(top(rng)), Rational(num(rng), den(rng)), Rational(sub(rng))});
        GroupElem cx = sme_canonical(x, G);
        CHECK(sme_equiv(x, cx, G));
        CHECK(sme_canonical(cx, G) == cx); // idempotent
    }
}
