#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "family.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "tree.hpp"
#include "value_group.hpp"

namespace valtree {

enum class StepKind { ordinary, limit };

struct ChainStep {
    StepKind kind;
    Poly phi;
    GroupElem gamma;
    FamilyPtr family; // limit steps only
};

struct Chain {
    GroundValuation gv;
    NodePtr initial;
    std::vector<ChainStep> steps;
};

inline int depth(const Chain& c) { return static_cast<int>(c.steps.size()); }
inline int lim_depth(const Chain& c) {
    int n = 0;
    for (const auto& s : c.steps)
        if (s.kind == StepKind::limit) ++n;
    return n;
}

inline std::vector<NodePtr> materialize(const Chain& c) {
    if (!c.initial) throw input_error("chain needs an initial node");
    std::vector<NodePtr> nodes{c.initial};
    for (const ChainStep& s : c.steps) {
        if (s.kind == StepKind::ordinary) {
            nodes.push_back(Node::make_augmentation(nodes.back(), s.phi, s.gamma));
        } else {
            if (!s.family) throw input_error("limit step needs a family");
            nodes.push_back(make_limit_augmentation(s.family, s.phi, s.gamma));
        }
    }
    return nodes;
}

// Product of the relative ramification indices along the chain's nodes.
inline ExtensionIndex ramification_product(const std::vector<NodePtr>& nodes) {
    Int prod = 1;
    for (const NodePtr& n : nodes) {
        if (n->kind() == NodeKind::root) continue;
        const ExtensionIndex& e = n->ramification_index();
        if (!e.finite) return ExtensionIndex::infinite();
        prod *= e.value;
    }
    return ExtensionIndex::of(prod);
}

struct CheckItem {
    std::string code;
    Cert status; // yes = satisfied, no = violated, unknown = not decidable here
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckItem> items;
    std::string verdict; // "valid" | "invalid" | "unverified"
    int depth = 0;
    int lim_depth = 0;
    std::vector<NodePtr> nodes; // materialized prefix (stops at the first violation)
};

// Check the chain conditions: start at degree one, strict degree growth and
// strictly increasing values at ordinary steps, direction change between
// consecutive keys, and for limit steps an essential family that the key
// escapes.  Violated checks carry stable codes for machine use.
inline ValidationReport validate_mlv(const Chain& c) {
    if (!c.initial) throw input_error("chain needs an initial node");
    ValidationReport rep;
    rep.depth = depth(c);
    rep.lim_depth = lim_depth(c);
    auto add = [&rep](const std::string& code, Cert st, std::string detail) {
        rep.items.push_back({code, st, std::move(detail)});
    };
    auto as_cert = [](bool ok) { return ok ? Cert::yes : Cert::no; };

    NodePtr cur = c.initial;
    rep.nodes.push_back(cur);
    add("initial_not_degree_one", as_cert(cur->degree() == 1),
        "initial degree " + std::to_string(cur->degree()));

    for (std::size_t i = 0; i < c.steps.size(); ++i) {
        const ChainStep& s = c.steps[i];
        const std::string at = "step " + std::to_string(i + 1);
        const NodePtr prev = cur;
        bool step_ok = true;
        auto record = [&](const std::string& code, Cert st, std::string detail) {
            add(code, st, at + ": " + std::move(detail));
            if (st == Cert::no) step_ok = false;
        };

        record("interior_infinite_gamma",
               as_cert(!(s.gamma.is_infinity() && i + 1 != c.steps.size())),
               "gamma " + s.gamma.str());
        record("degree_not_increasing", as_cert(s.phi.degree() > prev->degree()),
               "deg " + std::to_string(prev->degree()) + " -> " + std::to_string(s.phi.degree()));

        if (s.kind == StepKind::ordinary) {
            const GroupElem& psv = prev->sv();
            record("augment_from_incommensurable",
                   as_cert(!(psv.is_finite() && psv.top() == 0 && !psv.is_rational())),
                   "previous value " + psv.str());
            try {
                GroupElem below = prev->eval(s.phi);
                record("gamma_not_exceeding", as_cert(below.is_finite() && s.gamma > below),
                       "gamma " + s.gamma.str() + " vs previous value " + below.str());
            } catch (const stability_error& e) {
                record("gamma_not_exceeding", Cert::unknown, e.what());
            }
        } else {
            if (!s.family) throw input_error("limit step needs a family");
            record("family_degree_mismatch", as_cert(s.family->degree() == prev->degree()),
                   "family degree " + std::to_string(s.family->degree()) + ", previous degree " +
                       std::to_string(prev->degree()));
            try {
                record("family_base_mismatch", as_cert(leq(prev, s.family->first())),
                       "previous node vs first member");
            } catch (const stability_error& e) {
                record("family_base_mismatch", Cert::unknown, e.what());
            }
            StabilityResult st = s.family->stable_value(s.phi);
            if (auto* sta = std::get_if<StableValue>(&st)) {
                record("phi_stable", Cert::no, "stable value " + sta->value.str());
            } else {
                record("phi_stable", Cert::yes, "unstable through " +
                                                    std::to_string(std::get<UnstableUpTo>(st)
                                                                       .members_tried) +
                                                    " members");
                bool below_sup = false;
                for (const GroupElem& v : std::get<UnstableUpTo>(st).values)
                    if (!(s.gamma > v)) below_sup = true;
                record("gamma_below_family_sup", as_cert(!below_sup),
                       "gamma " + s.gamma.str() + " vs member values of phi");
            }
            UnstableSearch us = s.family->find_unstable({s.phi});
            Cert ess = us.cls == FamilyClass::essential
                           ? Cert::yes
                           : (us.cls == FamilyClass::inessential ? Cert::no : Cert::unknown);
            record("family_not_essential", ess,
                   us.witness ? ("unstable degree " + std::to_string(us.unstable_degree))
                              : "no unstable witness found");
        }

        if (!step_ok) {
            add("later_steps", Cert::unknown,
                "steps beyond " + std::to_string(i + 1) + " not reached");
            break;
        }

        try {
            cur = (s.kind == StepKind::ordinary)
                      ? Node::make_augmentation(prev, s.phi, s.gamma)
                      : make_limit_augmentation(s.family, s.phi, s.gamma);
            rep.nodes.push_back(cur);
        } catch (const stability_error& e) {
            add("construction", Cert::unknown, at + ": " + e.what());
            break;
        }

        if (prev->kind() != NodeKind::root) {
            try {
                const Poly& pphi = prev->phi();
                record("tangent_contains_previous_phi",
                       as_cert(!(cur->eval(pphi) > prev->eval(pphi))),
                       "value of the previous key under the new node");
            } catch (const stability_error& e) {
                record("tangent_contains_previous_phi", Cert::unknown, e.what());
            }
        }
        if (!step_ok) break; // the tangent check can still fail the step
    }

    bool any_no = false, any_unknown = false;
    for (const CheckItem& it : rep.items) {
        if (it.status == Cert::no) any_no = true;
        if (it.status == Cert::unknown) any_unknown = true;
    }
    rep.verdict = any_no ? "invalid" : (any_unknown ? "unverified" : "valid");
    return rep;
}

enum class PrimitiveClass { primitive_ordinary, primitive_limit, non_primitive };

inline const char* primitive_class_str(PrimitiveClass c) {
    switch (c) {
        case PrimitiveClass::primitive_ordinary: return "primitive_ordinary";
        case PrimitiveClass::primitive_limit: return "primitive_limit";
        case PrimitiveClass::non_primitive: return "non_primitive";
    }
    return "?";
}

// Primitive nodes head the constant-depth path bundles: the root and minimal
// limit nodes (primitive-limit), and nodes of finite relative ramification
// (primitive-ordinary).  Finite leaves and cut-valued nodes head nothing.
inline PrimitiveClass classify_primitive(const NodePtr& n) {
    if (!n) throw precondition_error("classification needs a node");
    if (n->kind() == NodeKind::root) return PrimitiveClass::primitive_limit;
    if (n->sv().is_infinity()) return PrimitiveClass::non_primitive;
    if (n->sv().top() < 0) return PrimitiveClass::primitive_limit; // root-equal
    if (n->kind() == NodeKind::limit && n->sv() == n->family()->value_sup())
        return PrimitiveClass::primitive_limit;
    return n->ramification_index().finite ? PrimitiveClass::primitive_ordinary
                                          : PrimitiveClass::non_primitive;
}

// The primitive node whose path bundle contains n.
inline NodePtr partition_assign(const NodePtr& n) {
    if (!n) throw precondition_error("assignment needs a node");
    switch (n->kind()) {
        case NodeKind::root:
            return n;
        case NodeKind::depth_zero:
            return Node::make_root(n->ground());
        case NodeKind::ordinary:
            if (n->degree() == 1) return Node::make_root(n->ground());
            if (n->degree() > n->parent()->degree()) return n->parent();
            return partition_assign(n->parent()); // equal-degree step continues the path
        case NodeKind::limit: {
            GroupElem sup = n->family()->value_sup();
            if (n->sv() == sup) return n;
            return make_limit_augmentation(n->family(), n->phi(), std::move(sup));
        }
    }
    throw error("unreachable");
}

// Does n lie on a single-augmentation path out of pi?  The probe reconstructs
// the one augmentation [pi; t, n(t)] along the tangent and compares.
inline bool bundle_member(const NodePtr& pi, const NodePtr& n) {
    detail::same_ground(pi, n);
    if (node_equiv(pi, n)) return false; // bundles emanate from, but exclude, their head
    if (!leq(pi, n) || leq(n, pi)) return false;
    // An equal-degree point continues a path that started strictly below pi;
    // only a root head (whose paths are the degree-one nodes) or a limit head
    // (where the degree jump happened at the head itself) keeps it.
    if (pi->kind() != NodeKind::root && pi->kind() != NodeKind::limit &&
        n->degree() <= pi->degree())
        return false;
    Poly t = tangent_direction(pi, n);
    try {
        NodePtr cand = Node::make_augmentation(pi, std::move(t), n->eval(t));
        return node_equiv(cand, n);
    } catch (const precondition_error&) {
        return false;
    }
}

struct PartitionEntry {
    NodePtr node;
    NodePtr assigned;
    bool consistent; // n is its assigned primitive's bundle member (or equals it)
    bool unique;     // no other sampled primitive also claims it
};

// Assign every sample node and verify, against the sampled primitives, that
// the claimed bundle contains it and no other does.
inline std::vector<PartitionEntry> partition_check(const std::vector<NodePtr>& sample) {
    std::vector<PartitionEntry> out;
    std::vector<NodePtr> primitives;
    for (const NodePtr& n : sample) {
        NodePtr a = partition_assign(n);
        bool seen = false;
        for (const NodePtr& p : primitives)
            if (node_equiv(p, a)) seen = true;
        if (!seen) primitives.push_back(a);
        out.push_back({n, a, false, true});
    }
    for (PartitionEntry& e : out) {
        e.consistent = node_equiv(e.assigned, e.node) || bundle_member(e.assigned, e.node);
        for (const NodePtr& p : primitives) {
            if (node_equiv(p, e.assigned)) continue;
            if (bundle_member(p, e.node)) e.unique = false;
        }
    }
    return out;
}

struct WorkedExample {
    GroundValuation gv;
    std::vector<Poly> phis; // phi_0 .. phi_3
    std::vector<NodePtr> mus;
    Chain chain;
};

// The builtin depth-3 chain over Q with v = v_p: keys x, x^5 + p^3,
// phi_1^3 + p^10, phi_2^2 + p^11 x^4 phi_1^2, with values 3/5, 10/3, 301/30
// and a support leaf on top.  Needs 2, 3, 5 to be v-units.
inline WorkedExample worked_example(const GroundValuation& gv) {
    const Int& p = gv.p();
    if (p == 2 || p == 3 || p == 5)
        throw input_error("the worked example needs p outside {2, 3, 5} so its "
                          "small constants stay units");
    const std::size_t r = gv.rank();
    auto q = [&](long num, long den) {
        return GroupElem::from_rational(Rational(num) / den, r);
    };
    Poly x = Poly::x();
    Poly phi1 = x.pow(5) + Poly::constant(Rational(int_pow(p, 3)));
    Poly phi2 = phi1.pow(3) + Poly::constant(Rational(int_pow(p, 10)));
    Poly phi3 = phi2.pow(2) +
                Poly::constant(Rational(int_pow(p, 11))) * x.pow(4) * phi1.pow(2);

    WorkedExample ex{gv, {x, phi1, phi2, phi3}, {}, Chain{gv, nullptr, {}}};
    NodePtr mu0 = Node::make_depth_zero(gv, 0, q(3, 5));
    NodePtr mu1 = Node::make_augmentation(mu0, phi1, q(10, 3));
    NodePtr mu2 = Node::make_augmentation(mu1, phi2, q(301, 30));
    NodePtr mu3 = Node::make_augmentation(mu2, phi3, GroupElem::infinity());
    ex.mus = {mu0, mu1, mu2, mu3};
    ex.chain = Chain{gv, mu0,
                     {{StepKind::ordinary, phi1, q(10, 3), nullptr},
                      {StepKind::ordinary, phi2, q(301, 30), nullptr},
                      {StepKind::ordinary, phi3, GroupElem::infinity(), nullptr}}};
    return ex;
}

} // namespace valtree
