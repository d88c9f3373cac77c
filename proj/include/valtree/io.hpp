#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chain.hpp"
#include "errors.hpp"
#include "family.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace valtree {

using Json = nlohmann::ordered_json;

inline Json poly_to_json(const Poly& f) { return f.coeff_list_str(); }
inline Poly poly_from_json(const Json& j) {
    if (!j.is_string()) throw input_error("polynomial must be a string");
    return parse_poly(j.get<std::string>());
}

inline Json group_elem_to_json(const GroupElem& x) { return x.str(); }
inline GroupElem group_elem_from_json(const Json& j, std::size_t rank) {
    if (!j.is_string()) throw input_error("group element must be a string");
    return parse_group_elem(j.get<std::string>(), rank);
}

Json family_to_json(const FamilyPtr& f);
FamilyPtr family_from_json(const Json& j, const GroundValuation& gv);

inline Json node_to_json(const NodePtr& n) {
    if (!n) throw precondition_error("cannot serialize a null node");
    Json j;
    switch (n->kind()) {
        case NodeKind::root:
            j["kind"] = "root";
            break;
        case NodeKind::depth_zero:
            j["kind"] = "depth0";
            j["a"] = rational_str(n->center());
            j["gamma"] = group_elem_to_json(n->sv());
            break;
        case NodeKind::ordinary:
            j["kind"] = "ordinary";
            j["phi"] = poly_to_json(n->phi());
            j["gamma"] = group_elem_to_json(n->sv());
            j["parent"] = node_to_json(n->parent());
            break;
        case NodeKind::limit:
            j["kind"] = "limit";
            j["phi"] = poly_to_json(n->phi());
            j["gamma"] = group_elem_to_json(n->sv());
            j["family"] = family_to_json(n->family());
            break;
    }
    return j;
}

inline NodePtr node_from_json(const Json& j, const GroundValuation& gv) {
    if (!j.is_object() || !j.contains("kind"))
        throw input_error("node object needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "root") return Node::make_root(gv);
    if (kind == "depth0")
        return Node::make_depth_zero(gv, parse_rational(j.at("a").get<std::string>()),
                                     group_elem_from_json(j.at("gamma"), gv.rank()));
    if (kind == "ordinary")
        return Node::make_augmentation(node_from_json(j.at("parent"), gv),
                                       poly_from_json(j.at("phi")),
                                       group_elem_from_json(j.at("gamma"), gv.rank()));
    if (kind == "limit")
        return make_limit_augmentation(family_from_json(j.at("family"), gv),
                                       poly_from_json(j.at("phi")),
                                       group_elem_from_json(j.at("gamma"), gv.rank()));
    throw input_error("unknown node kind \"" + kind + "\"");
}

inline Json betas_to_json(const BetaSeq& b) {
    Json j;
    switch (b.kind) {
        case BetaSeq::Kind::list: {
            j["kind"] = "list";
            Json vs = Json::array();
            for (const GroupElem& v : b.entries) vs.push_back(group_elem_to_json(v));
            j["values"] = std::move(vs);
            break;
        }
        case BetaSeq::Kind::arithmetic:
            j["kind"] = "arithmetic";
            j["first"] = group_elem_to_json(b.first);
            j["step"] = group_elem_to_json(b.step);
            break;
        case BetaSeq::Kind::geometric:
            j["kind"] = "geometric";
            j["target"] = group_elem_to_json(b.target);
            j["coeff"] = rational_str(b.coeff);
            j["ratio"] = rational_str(b.ratio);
            break;
    }
    return j;
}

inline BetaSeq betas_from_json(const Json& j, std::size_t rank) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "list") {
        std::vector<GroupElem> vs;
        for (const Json& v : j.at("values")) vs.push_back(group_elem_from_json(v, rank));
        return BetaSeq::of_list(std::move(vs));
    }
    if (kind == "arithmetic")
        return BetaSeq::of_arithmetic(group_elem_from_json(j.at("first"), rank),
                                      group_elem_from_json(j.at("step"), rank));
    if (kind == "geometric")
        return BetaSeq::of_geometric(group_elem_from_json(j.at("target"), rank),
                                     parse_rational(j.at("coeff").get<std::string>()),
                                     parse_rational(j.at("ratio").get<std::string>()));
    throw input_error("unknown beta sequence kind \"" + kind + "\"");
}

inline Json family_to_json(const FamilyPtr& f) {
    if (!f) throw precondition_error("cannot serialize a null family");
    Json j;
    switch (f->kind()) {
        case FamilyKind::nodes: {
            j["kind"] = "explicit";
            Json ms = Json::array();
            for (const NodePtr& n : f->given_nodes()) ms.push_back(node_to_json(n));
            j["members"] = std::move(ms);
            break;
        }
        case FamilyKind::centers: {
            j["kind"] = "pseudo_convergent";
            Json cs = Json::array();
            for (const Rational& c : f->center_list()) cs.push_back(rational_str(c));
            j["sequence"] = std::move(cs);
            break;
        }
        case FamilyKind::hensel:
            j["kind"] = "pseudo_convergent";
            j["rule"] = Json{{"hensel", Json{{"poly", poly_to_json(f->hensel_poly())},
                                             {"start", f->hensel_start().str()}}}};
            break;
        case FamilyKind::rule:
            j["kind"] = "augmentation_rule";
            j["rule"] = Json{{"base", node_to_json(f->rule_base())},
                             {"phi", poly_to_json(f->rule_poly())},
                             {"betas", betas_to_json(f->betas())}};
            break;
    }
    j["horizon"] = f->horizon();
    if (f->declared_sup()) j["declared_sup"] = group_elem_to_json(*f->declared_sup());
    return j;
}

inline FamilyPtr family_from_json(const Json& j, const GroundValuation& gv) {
    if (!j.is_object() || !j.contains("kind"))
        throw input_error("family object needs a \"kind\" field");
    const std::string kind = j.at("kind").get<std::string>();
    std::size_t horizon = j.value("horizon", std::size_t{24});
    std::optional<GroupElem> sup;
    if (j.contains("declared_sup")) sup = group_elem_from_json(j.at("declared_sup"), gv.rank());
    if (kind == "explicit") {
        std::vector<NodePtr> ms;
        for (const Json& m : j.at("members")) ms.push_back(node_from_json(m, gv));
        return Family::from_nodes(std::move(ms), horizon, std::move(sup));
    }
    if (kind == "pseudo_convergent") {
        if (j.contains("sequence")) {
            std::vector<Rational> cs;
            for (const Json& c : j.at("sequence"))
                cs.push_back(parse_rational(c.get<std::string>()));
            return Family::from_centers(gv, std::move(cs), horizon, std::move(sup));
        }
        if (j.contains("rule") && j.at("rule").contains("hensel")) {
            const Json& h = j.at("rule").at("hensel");
            return Family::hensel(gv, poly_from_json(h.at("poly")),
                                  Int(h.at("start").get<std::string>()), horizon,
                                  std::move(sup));
        }
        throw input_error("pseudo_convergent family needs \"sequence\" or a hensel rule");
    }
    if (kind == "augmentation_rule") {
        const Json& r = j.at("rule");
        return Family::from_rule(node_from_json(r.at("base"), gv), poly_from_json(r.at("phi")),
                                 betas_from_json(r.at("betas"), gv.rank()), horizon,
                                 std::move(sup));
    }
    throw input_error("unknown family kind \"" + kind + "\"");
}

inline Json chain_to_json(const Chain& c) {
    Json j;
    j["prime"] = c.gv.p().convert_to<long long>();
    j["rank"] = c.gv.rank();
    j["initial"] = node_to_json(c.initial);
    Json steps = Json::array();
    for (const ChainStep& s : c.steps) {
        Json js;
        js["kind"] = (s.kind == StepKind::ordinary) ? "ordinary" : "limit";
        js["phi"] = poly_to_json(s.phi);
        js["gamma"] = group_elem_to_json(s.gamma);
        if (s.family) js["family"] = family_to_json(s.family);
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    return j;
}

inline Chain chain_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("prime") || !j.contains("initial"))
        throw input_error("chain object needs \"prime\" and \"initial\" fields");
    Int p = j.at("prime").is_string() ? Int(j.at("prime").get<std::string>())
                                      : Int(j.at("prime").get<long long>());
    std::size_t rank = j.value("rank", std::size_t{3});
    GroundValuation gv(p, rank);
    Chain c{gv, node_from_json(j.at("initial"), gv), {}};
    for (const Json& js : j.value("steps", Json::array())) {
        const std::string kind = js.at("kind").get<std::string>();
        if (kind != "ordinary" && kind != "limit")
            throw input_error("unknown step kind \"" + kind + "\"");
        ChainStep s{kind == "ordinary" ? StepKind::ordinary : StepKind::limit,
                    poly_from_json(js.at("phi")),
                    group_elem_from_json(js.at("gamma"), gv.rank()), nullptr};
        if (js.contains("family")) s.family = family_from_json(js.at("family"), gv);
        if (s.kind == StepKind::limit && !s.family)
            throw input_error("limit step needs a family");
        c.steps.push_back(std::move(s));
    }
    return c;
}

} // namespace valtree
