#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "family.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "value_group.hpp"

namespace valtree {

namespace detail {
inline void same_ground(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) throw precondition_error("operation needs two nodes");
    if (!(a->ground() == b->ground()))
        throw precondition_error("nodes live over different ground valuations");
}

// Is b(phi) >= g?  Under a limit node the evaluation may not settle within the
// family horizon, but member values increase toward the limit, so the last
// member's estimate is a sound lower bound and can still certify the answer.
inline bool eval_at_least(const NodePtr& b, const Poly& phi, const GroupElem& g) {
    try {
        return g <= b->eval(phi);
    } catch (const stability_error&) {
        if (b->kind() != NodeKind::limit) throw;
        const FamilyPtr fam = b->family();
        const std::size_t lim = fam->search_limit();
        if (lim > 0 && g <= fam->member(lim - 1)->eval(phi)) return true;
        throw;
    }
}
} // namespace detail

// Pointwise order mu(f) <= nu(f) for all f, decided structurally: each piece of
// mu's construction imposes one inequality on nu.  For limit nodes the family
// is consulted up to its horizon, matching the reach of eval itself.
inline bool leq(const NodePtr& a, const NodePtr& b) {
    detail::same_ground(a, b);
    switch (a->kind()) {
        case NodeKind::root:
            return true;
        case NodeKind::depth_zero:
            return detail::eval_at_least(b, a->phi(), a->sv());
        case NodeKind::ordinary:
            return leq(a->parent(), b) && detail::eval_at_least(b, a->phi(), a->sv());
        case NodeKind::limit: {
            const FamilyPtr fam = a->family();
            const std::size_t lim = fam->search_limit();
            for (std::size_t i = 0; i < lim; ++i)
                if (!leq(fam->member(i), b)) return false;
            return detail::eval_at_least(b, a->phi(), a->sv());
        }
    }
    throw error("unreachable");
}

inline bool node_equiv(const NodePtr& a, const NodePtr& b) { return leq(a, b) && leq(b, a); }

// Greatest common lower node: walk a's chain to the first piece that b fails,
// then truncate that piece at the value b actually assigns its polynomial.
inline NodePtr meet(const NodePtr& a, const NodePtr& b) {
    detail::same_ground(a, b);
    if (leq(a, b)) return a;
    if (leq(b, a)) return b;
    std::vector<NodePtr> ch = a->chain();
    std::size_t j = 0;
    while (j < ch.size() && leq(ch[j], b)) ++j;
    const NodePtr& fail = ch[j]; // exists: leq(a, b) is false
    switch (fail->kind()) {
        case NodeKind::root:
            throw error("root cannot fail a lower-bound check");
        case NodeKind::depth_zero:
            return Node::make_depth_zero(a->ground(), fail->center(), b->eval(fail->phi()));
        case NodeKind::ordinary: {
            NodePtr par = fail->parent();
            GroupElem g0 = b->eval(fail->phi());
            if (g0 == par->eval(fail->phi())) return par; // b adds nothing along phi
            return Node::make_augmentation(par, fail->phi(), std::move(g0));
        }
        case NodeKind::limit: {
            // Lower sets of a node are totally ordered, so the meet sits at the
            // first member b fails; if none fails, truncate the limit value.
            const FamilyPtr fam = fail->family();
            const std::size_t lim = fam->search_limit();
            for (std::size_t i = 0; i < lim; ++i)
                if (!leq(fam->member(i), b)) return meet(fam->member(i), b);
            GroupElem g0 = b->eval(fail->phi());
            if (g0 == fam->member(lim - 1)->eval(fail->phi()))
                throw stability_error("meet lies at the family horizon; raise the horizon", lim);
            return make_limit_augmentation(fam, fail->phi(), std::move(g0));
        }
    }
    throw error("unreachable");
}

// Minimal-degree direction of increase from mu toward nu (mu strictly below):
// the first of nu's structural polynomials whose value actually grows.
inline Poly tangent_direction(const NodePtr& mu, const NodePtr& nu) {
    detail::same_ground(mu, nu);
    if (!leq(mu, nu) || leq(nu, mu))
        throw precondition_error("tangent direction needs mu strictly below nu");
    auto grows = [&](const Poly& phi) { return mu->eval(phi) < nu->eval(phi); };
    for (const NodePtr& c : nu->chain()) {
        if (c->kind() == NodeKind::root) continue;
        if (c->kind() == NodeKind::limit) {
            const FamilyPtr fam = c->family();
            const std::size_t lim = fam->search_limit();
            for (std::size_t i = 0; i < lim; ++i)
                if (grows(fam->member(i)->phi())) return fam->member(i)->phi();
        }
        if (grows(c->phi())) return c->phi();
    }
    throw error("no structural polynomial separates the ordered nodes");
}

// Lambda-tree distance sv(a) + sv(b) - 2 sv(a ^ b); zero for equivalent nodes.
inline GroupElem tree_distance(const NodePtr& a, const NodePtr& b) {
    detail::same_ground(a, b);
    if (node_equiv(a, b)) return GroupElem::zero(a->ground().rank());
    NodePtr m = meet(a, b);
    if (m->sv().is_infinity()) return GroupElem::zero(a->ground().rank());
    return a->sv() + b->sv() - scalar_mul(2L, m->sv());
}

// Equality of [parent; phi1, g1] and [parent; phi2, g2] as valuations: equal
// degree, equal value, and keys congruent above it.
inline bool augmentations_equal(const NodePtr& parent, const Poly& phi1, const GroupElem& g1,
                                const Poly& phi2, const GroupElem& g2) {
    if (!parent) throw precondition_error("augmentations_equal needs a parent node");
    if (phi1.degree() != phi2.degree()) return false;
    if (!(g1 == g2)) return false;
    return parent->eval(phi1 - phi2) >= g1;
}

enum class Cert { yes, no, unknown };

inline const char* cert_str(Cert c) {
    switch (c) {
        case Cert::yes: return "yes";
        case Cert::no: return "no";
        case Cert::unknown: return "unknown";
    }
    return "?";
}

// Do two families generate the same limit?  Yes when their prefixes interleave
// both ways; no when the meets with the escaping member have stabilized
// strictly below it (the other family's direction has permanently turned away).
inline Cert family_equiv(const FamilyPtr& A, const FamilyPtr& B) {
    if (!A || !B) throw precondition_error("family_equiv needs two families");
    const std::size_t la = A->search_limit(), lb = B->search_limit();
    auto covered = [](const NodePtr& r, const FamilyPtr& F, std::size_t lim) {
        for (std::size_t j = 0; j < lim; ++j)
            if (leq(r, F->member(j))) return true;
        return false;
    };
    NodePtr wa, wb; // first members not dominated by the other family
    for (std::size_t i = 0; i < la && !wa; ++i)
        if (!covered(A->member(i), B, lb)) wa = A->member(i);
    for (std::size_t i = 0; i < lb && !wb; ++i)
        if (!covered(B->member(i), A, la)) wb = B->member(i);
    if (!wa && !wb) return Cert::yes;
    auto diverged = [&](const NodePtr& r, const FamilyPtr& F, std::size_t lim) {
        if (lim < 2) return false;
        NodePtr m1 = meet(r, F->member(lim - 2));
        NodePtr m2 = meet(r, F->member(lim - 1));
        return node_equiv(m1, m2) && !leq(r, m2);
    };
    try {
        if (wa && diverged(wa, B, lb)) return Cert::no;
        if (wb && diverged(wb, A, la)) return Cert::no;
    } catch (const stability_error&) {
        return Cert::unknown;
    }
    return Cert::unknown;
}

struct EquivResult {
    Cert cert;
    std::string reason;
};

// Equivalence of nodes as cut classes: pointwise equality counts, and beyond it
// two constructions are identified when they share the construction below, the
// same key direction, and sme-equivalent defining values.
inline EquivResult equiv_nodes(const NodePtr& a, const NodePtr& b) {
    detail::same_ground(a, b);
    if (node_equiv(a, b)) return {Cert::yes, "equal as valuations (mutual structural leq)"};
    auto da = a->as_depth_zero();
    auto db = b->as_depth_zero();
    if (da && db) {
        const GroupElem& ga = da->second;
        const GroupElem& gb = db->second;
        if (ga.is_infinity() || gb.is_infinity())
            return {Cert::no, "finite leaves are equivalent only to themselves"};
        if (!sme_equiv(ga, gb, SubgroupDescriptor::integers()))
            return {Cert::no, "defining cuts differ: " + quasi_cut(ga, SubgroupDescriptor::integers()).str() +
                                  " vs " + quasi_cut(gb, SubgroupDescriptor::integers()).str()};
        GroupElem w = a->ground()(da->first - db->first);
        if (w >= ga && w >= gb)
            return {Cert::yes, "same ball cut after re-centering, v(b-a) = " + w.str()};
        return {Cert::no, "centers separate below the cut: v(b-a) = " + w.str()};
    }
    if (a->degree() != b->degree())
        return {Cert::unknown, "different degrees; no structural criterion applies"};
    if (a->kind() == NodeKind::ordinary && b->kind() == NodeKind::ordinary) {
        EquivResult pr = equiv_nodes(a->parent(), b->parent());
        if (pr.cert != Cert::yes)
            return {Cert::unknown, "parents not certified equivalent (" + pr.reason + ")"};
        if (a->sv().is_infinity() || b->sv().is_infinity())
            return {Cert::no, "finite leaves are equivalent only to themselves"};
        if (!sme_equiv(a->sv(), b->sv(), a->parent()->value_group()))
            return {Cert::no, "defining cuts differ over the parent value group"};
        GroupElem w = a->parent()->eval(a->phi() - b->phi());
        GroupElem bound = std::min(a->sv(), b->sv());
        if (w >= bound)
            return {Cert::yes, "same parent class, sme-equivalent values, congruent keys"};
        return {Cert::no, "keys diverge below the cut: parent(phi_a - phi_b) = " + w.str()};
    }
    if (a->kind() == NodeKind::limit && b->kind() == NodeKind::limit) {
        Cert fc = family_equiv(a->family(), b->family());
        if (fc != Cert::yes)
            return {Cert::unknown, "families not certified equivalent on prefixes"};
        if (a->sv().is_infinity() || b->sv().is_infinity())
            return {Cert::no, "finite leaves are equivalent only to themselves"};
        if (!sme_equiv(a->sv(), b->sv(), a->value_group_zero()))
            return {Cert::no, "defining cuts differ over the stable value group"};
        try {
            GroupElem w = a->family()->value_or_throw(a->phi() - b->phi());
            GroupElem bound = std::min(a->sv(), b->sv());
            if (w >= bound)
                return {Cert::yes, "equivalent families, sme-equivalent values, congruent keys"};
            return {Cert::no, "keys diverge below the cut: stable(phi_a - phi_b) = " + w.str()};
        } catch (const stability_error&) {
            return {Cert::unknown, "key difference is unstable within the family horizon"};
        }
    }
    return {Cert::unknown, "mixed construction kinds; only pointwise equality is decided"};
}

// One infinitesimal step from base toward a strictly larger node, along the
// tangent direction, using a fresh slot.  The result is above base but no
// longer below anything base was merely tangent to.
inline NodePtr probe_beyond(const NodePtr& base, const NodePtr& toward) {
    detail::same_ground(base, toward);
    if (!leq(base, toward) || leq(toward, base))
        throw precondition_error("probe needs base strictly below toward");
    Poly t = tangent_direction(base, toward);
    GroupElem bt = base->eval(t);
    std::size_t slot = std::max(base->max_used_slot(), toward->max_used_slot());
    for (std::size_t i = 2; i < bt.rank(); ++i)
        if (bt.slot(i) != 0) slot = std::max(slot, i);
    const std::size_t rank = base->ground().rank();
    if (slot + 1 >= rank)
        throw config_error("slot rank exhausted for the infinitesimal probe; "
                           "re-run with a higher rank");
    std::vector<Rational> s(rank, Rational(0));
    s[slot + 1] = 1;
    return Node::make_augmentation(base, std::move(t), bt + GroupElem::from_slots(std::move(s)));
}

} // namespace valtree
