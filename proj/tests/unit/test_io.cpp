#include "../support/oracles.hpp"

#include <valtree/io.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace valtree;

namespace {
GroundValuation v7() { return GroundValuation(7, 3); }
GroupElem q(long n, long d = 1) { return GroupElem::from_rational(Rational(n, d), 3); }
} // namespace

TEST_CASE("polynomials and group elements survive the string round trip", "[io]") {
    oracles::RationalGen gen(7, 4, 81);
    for (int i = 0; i < 50; ++i) {
        Poly f = gen.poly(10);
        CHECK(poly_from_json(poly_to_json(f)) == f);
    }
    std::vector<GroupElem> xs = {q(0), q(-3, 7), GroupElem::infinity(),
                                 GroupElem::neg_infinity(3), GroupElem::infinity_minus(3),
                                 GroupElem::ball_minus(Rational(5, 2), 3),
                                 GroupElem::from_slots({Rational(1), Rational(-2),
                                                       Rational(1, 3)})};
    for (const GroupElem& x : xs)
        CHECK(group_elem_from_json(group_elem_to_json(x), 3) == x);
    CHECK_THROWS_AS(poly_from_json(Json(42)), input_error);
    CHECK_THROWS_AS(group_elem_from_json(Json(1.5), 3), input_error);
}

TEST_CASE("nodes of every construction kind round-trip through JSON", "[io]") {
    GroundValuation gv = v7();
    WorkedExample ex = worked_example(gv);
    auto fam = Family::hensel(gv, parse_poly("x^2 - 2"), 3, 20);
    auto muA = make_limit_augmentation(fam, parse_poly("x^2 - 2"),
                                       GroupElem::infinity_minus(3));
    std::vector<NodePtr> nodes = {Node::make_root(gv),
                                  Node::make_depth_zero(gv, Rational(3, 2),
                                                        GroupElem::ball_plus(Rational(1), 3)),
                                  ex.mus[0], ex.mus[1], ex.mus[2], ex.mus[3], muA};
    oracles::RationalGen gen(7, 3, 82);
    for (const NodePtr& n : nodes) {
        Json j = node_to_json(n);
        NodePtr back = node_from_json(j, gv);
        CHECK(node_to_json(back) == j); // canonical form is stable
        CHECK(node_equiv(n, back));
        for (int i = 0; i < 20; ++i) {
            Poly f = gen.poly(8);
            CHECK(n->eval(f) == back->eval(f));
        }
    }
    CHECK_THROWS_AS(node_from_json(Json{{"kind", "mystery"}}, gv), input_error);
    CHECK_THROWS_AS(node_from_json(Json::array(), gv), input_error);
}

TEST_CASE("families of every generator kind round-trip through JSON", "[io]") {
    GroundValuation gv = v7();
    auto hens = Family::hensel(gv, parse_poly("x^2 - 2"), 3, 20);
    auto cent = Family::from_centers(
        gv, {Rational(3), Rational(10), Rational(108), hens->member(3)->center()}, 12);
    auto root = Node::make_root(gv);
    auto rule = Family::from_rule(root, Poly::x(),
                                  BetaSeq::of_geometric(q(1), Rational(1), Rational(1, 2)), 20);
    std::vector<NodePtr> ms;
    for (int i = 0; i < 4; ++i)
        ms.push_back(Node::make_depth_zero(gv, 0, q(i, 1)));
    auto listed = Family::from_nodes(ms, 8, GroupElem::infinity_minus(3));

    for (const FamilyPtr& f : {hens, cent, rule, listed}) {
        Json j = family_to_json(f);
        FamilyPtr back = family_from_json(j, gv);
        CHECK(family_to_json(back) == j);
        CHECK(back->kind() == f->kind());
        CHECK(back->horizon() == f->horizon());
        std::size_t probe = std::min<std::size_t>(3, back->search_limit());
        for (std::size_t i = 0; i < probe; ++i)
            CHECK(node_equiv(back->member(i), f->member(i)));
    }
    CHECK(family_from_json(family_to_json(listed), gv)->declared_sup().has_value());
    CHECK_THROWS_AS(family_from_json(Json{{"kind", "pseudo_convergent"}}, gv), input_error);
}

TEST_CASE("chains round-trip and accept both prime encodings", "[io]") {
    GroundValuation gv = v7();
    WorkedExample ex = worked_example(gv);
    Json j = chain_to_json(ex.chain);
    Chain back = chain_from_json(j);
    CHECK(chain_to_json(back) == j);
    CHECK(validate_mlv(back).verdict == "valid");

    Json alt = j;
    alt["prime"] = "7";
    Chain back2 = chain_from_json(alt);
    CHECK(back2.gv.p() == 7);

    auto fam = Family::hensel(gv, parse_poly("x^2 - 2"), 3, 20);
    Chain lc{gv, fam->first(), {ChainStep{StepKind::limit, parse_poly("x^2 - 2"),
                                          GroupElem::infinity_minus(3), fam}}};
    Json lj = chain_to_json(lc);
    Chain lback = chain_from_json(lj);
    CHECK(chain_to_json(lback) == lj);
    CHECK(lim_depth(lback) == 1);

    Json bad = j;
    bad.erase("prime");
    CHECK_THROWS_AS(chain_from_json(bad), input_error);
    Json badstep = j;
    badstep["steps"][0]["kind"] = "sideways";
    CHECK_THROWS_AS(chain_from_json(badstep), input_error);
}
