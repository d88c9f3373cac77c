#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace valtree {

class Node;
using NodePtr = std::shared_ptr<const Node>;

class Family;
using FamilyPtr = std::shared_ptr<const Family>;

enum class NodeKind { root, depth_zero, ordinary, limit };

// A valuation on K[x], represented by its construction:
//   root            f |-> (-deg f | v(lc f) | 0...)   the minimal point of the tree
//   depth_zero(a,d) f |-> min_s { v(b_s) + s*d }      over the (x-a)-expansion
//   ordinary        f |-> min_s { parent(a_s) + s*g } over the phi-expansion
//   limit           f |-> min_s { stable(a_s) + s*g } coefficients valued by a
//                                                     continuous family's stable value
// Nodes are immutable and shared; gamma == INFINITY marks a finite leaf.
class Node : public std::enable_shared_from_this<Node> {
public:
    static NodePtr make_root(const GroundValuation& gv) {
        auto n = std::make_shared<Node>(Private{}, NodeKind::root, gv,
                                        GroupElem::neg_infinity(gv.rank()));
        n->phi_ = Poly::x();
        n->degree_ = 1;
        n->finish_groups(SubgroupDescriptor::integers());
        return n;
    }

    static NodePtr make_depth_zero(const GroundValuation& gv, Rational a, GroupElem delta) {
        if (delta.is_finite() && delta.rank() != gv.rank())
            throw config_error("value rank does not match the configured rank");
        auto n = std::make_shared<Node>(Private{}, NodeKind::depth_zero, gv, std::move(delta));
        n->center_ = std::move(a);
        n->phi_ = Poly::linear_root(n->center_);
        n->degree_ = 1;
        n->finish_groups(SubgroupDescriptor::integers());
        return n;
    }

    // phi is trusted to be a key polynomial for the parent (minimal and with
    // irreducible initial form); only the cheap shape checks run here, and
    // check_minimality offers bounded falsification for doubtful keys.
    static NodePtr make_augmentation(NodePtr parent, Poly phi, GroupElem gamma) {
        if (!parent) throw precondition_error("augmentation needs a parent node");
        if (!phi.is_monic() || phi.degree() < 1)
            throw precondition_error("augmentation polynomial must be monic of degree >= 1");
        if (phi.degree() < parent->degree())
            throw precondition_error("augmentation polynomial degree below the parent's degree");
        if (gamma.is_finite() && gamma.rank() != parent->ground().rank())
            throw config_error("value rank does not match the configured rank");
        GroupElem below = parent->eval(phi);
        if (below.is_infinity())
            throw precondition_error("cannot augment along an element of the parent's support");
        if (!(gamma > below))
            throw precondition_error("augmentation value must strictly exceed the parent value " +
                                     below.str());
        auto n = std::make_shared<Node>(Private{}, NodeKind::ordinary, parent->ground(),
                                        std::move(gamma));
        n->degree_ = phi.degree();
        n->phi_ = std::move(phi);
        n->parent_ = parent;
        n->finish_groups(n->degree_ > parent->degree() ? parent->value_group()
                                                       : parent->value_group_zero());
        return n;
    }

    NodeKind kind() const { return kind_; }
    const GroundValuation& ground() const { return gv_; }
    int degree() const { return degree_; }
    bool is_leaf() const { return gamma_.is_infinity(); }

    // The value assigned to the defining polynomial; -infinity slot vector for
    // the root, INFINITY for finite leaves.
    const GroupElem& sv() const { return gamma_; }

    const Rational& center() const {
        if (kind_ != NodeKind::depth_zero)
            throw precondition_error("center is defined for depth-zero nodes only");
        return center_;
    }

    const Poly& phi() const {
        if (kind_ == NodeKind::root)
            throw precondition_error("the root has no defining polynomial");
        return phi_;
    }

    NodePtr parent() const { return parent_; }
    FamilyPtr family() const { return family_; }

    GroupElem eval(const Poly& f) const {
        if (f.is_zero()) return GroupElem::infinity();
        switch (kind_) {
            case NodeKind::root: {
                auto e = GroupElem::zero(gv_.rank());
                std::vector<Rational> s = e.slots();
                s[0] = Rational(-f.degree());
                s[1] = Rational(*gv_.ord(f.lc()));
                return GroupElem::from_slots(std::move(s));
            }
            case NodeKind::depth_zero: {
                // Taylor coefficients at the center by iterated synthetic division.
                std::vector<Rational> c = f.coeffs();
                GroupElem best = GroupElem::infinity();
                const std::size_t n = c.size();
                for (std::size_t s = 0; s < n; ++s) {
                    // One pass divides the tail by (x - a); the remainder, left
                    // in c[s], is the coefficient of (x - a)^s.
                    for (std::size_t i = n - 1; i > s; --i) c[i - 1] += c[i] * center_;
                    const Rational& b = c[s];
                    if (b != 0) {
                        GroupElem term = (s == 0) ? gv_(b)
                                                  : gv_(b) + scalar_mul(static_cast<long>(s), gamma_);
                        if (term < best) best = term;
                    }
                }
                return best;
            }
            case NodeKind::ordinary:
            case NodeKind::limit: {
                std::vector<Poly> as = phi_expand(f, phi_);
                GroupElem best = GroupElem::infinity();
                for (std::size_t s = 0; s < as.size(); ++s) {
                    if (as[s].is_zero()) continue;
                    GroupElem cv = (kind_ == NodeKind::ordinary) ? parent_->eval(as[s])
                                                                 : coeff_value_(as[s]);
                    GroupElem term = (s == 0) ? std::move(cv)
                                              : cv + scalar_mul(static_cast<long>(s), gamma_);
                    if (term < best) best = term;
                }
                return best;
            }
        }
        throw error("unreachable");
    }

    // Construction ancestry, root-most first, ending with this node.  For a
    // limit node the predecessor is the family's first member.
    std::vector<NodePtr> chain() const {
        std::vector<NodePtr> out;
        for (NodePtr n = shared_from_this(); n; n = n->walk_parent_) out.push_back(n);
        std::reverse(out.begin(), out.end());
        return out;
    }

    // Values taken on polynomials of degree < degree(); the full group adds sv.
    const SubgroupDescriptor& value_group_zero() const { return zero_group_; }
    const SubgroupDescriptor& value_group() const { return full_group_; }
    // Index of value_group() over value_group_zero().
    const ExtensionIndex& ramification_index() const { return erel_; }

    // This node viewed as omega_{a, delta}, when it has degree one.
    std::optional<std::pair<Rational, GroupElem>> as_depth_zero() const {
        if (kind_ == NodeKind::root)
            return std::make_pair(Rational(0), GroupElem::neg_infinity(gv_.rank()));
        if (kind_ == NodeKind::depth_zero) return std::make_pair(center_, gamma_);
        if (degree_ == 1) return std::make_pair(-phi_.coeff(0), gamma_);
        return std::nullopt;
    }

    // Largest slot index >= 1 occurring (nonzero) in the chain's defining
    // values; the next slot up is free for infinitesimal probes.
    std::size_t max_used_slot() const {
        std::size_t used = 1;
        for (const NodePtr& n : chain()) {
            const GroupElem& g = n->sv();
            if (g.is_infinity()) continue;
            for (std::size_t i = 2; i < g.rank(); ++i)
                if (g.slot(i) != 0) used = std::max(used, i);
        }
        return used;
    }

    // --- internal ---
    struct Private {};
    Node(Private, NodeKind k, GroundValuation gv, GroupElem gamma)
        : kind_(k), gv_(std::move(gv)), center_(0), gamma_(std::move(gamma)) {}

    friend NodePtr make_limit_augmentation(const FamilyPtr& family, Poly phi, GroupElem gamma);

private:
    void finish_groups(SubgroupDescriptor zero_group) {
        zero_group_ = std::move(zero_group);
        if (gamma_.is_infinity()) {
            full_group_ = zero_group_;
            erel_ = ExtensionIndex::of(1);
        } else {
            auto [ext, idx] = extend_subgroup(zero_group_, gamma_);
            full_group_ = std::move(ext);
            erel_ = idx;
        }
        walk_parent_ = parent_;
    }

    NodeKind kind_;
    GroundValuation gv_;
    Rational center_;   // depth_zero
    Poly phi_;          // defining polynomial (x - a for depth_zero, x for root)
    GroupElem gamma_;
    NodePtr parent_;    // ordinary
    NodePtr walk_parent_; // ancestry link: parent, or the family's first member
    FamilyPtr family_;  // limit
    std::function<GroupElem(const Poly&)> coeff_value_; // limit coefficient values
    int degree_ = 1;
    SubgroupDescriptor zero_group_ = SubgroupDescriptor::integers();
    SubgroupDescriptor full_group_ = SubgroupDescriptor::integers();
    ExtensionIndex erel_ = ExtensionIndex::of(1);
};

// Defined in family.hpp (needs the complete Family type).
NodePtr make_limit_augmentation(const FamilyPtr& family, Poly phi, GroupElem gamma);

// Defined in tree.hpp; declared here so family validation can use the order.
bool leq(const NodePtr& a, const NodePtr& b);
bool node_equiv(const NodePtr& a, const NodePtr& b);
NodePtr meet(const NodePtr& a, const NodePtr& b);

// Whether phi divides f up to mu-equivalence, decided by one augmentation step
// with a fresh infinitesimal: push mu an epsilon along phi and see whether the
// value of f moves.  phi must be a key polynomial of mu (caller-certified).
inline bool divides_probe(const NodePtr& mu, const Poly& phi, const Poly& f) {
    if (!mu) throw precondition_error("divides_probe needs a node");
    if (f.is_zero()) return true;
    GroupElem base = mu->eval(phi);
    if (base.is_infinity())
        throw precondition_error("divides_probe along a support element");
    const std::size_t rank = mu->ground().rank();
    std::size_t slot = mu->max_used_slot();
    for (std::size_t i = 2; i < base.rank(); ++i)
        if (base.slot(i) != 0) slot = std::max(slot, i);
    if (slot + 1 >= rank)
        throw config_error("slot rank exhausted for the infinitesimal probe; "
                           "re-run with a higher rank");
    auto eps = GroupElem::zero(rank);
    std::vector<Rational> s = eps.slots();
    s[slot + 1] = 1;
    NodePtr probe = Node::make_augmentation(mu, phi, base + GroupElem::from_slots(std::move(s)));
    return probe->eval(f) > mu->eval(f);
}

struct MinimalityReport {
    bool refuted = false;
    std::optional<Poly> witness;   // f with mu(f) strictly above its expansion minimum
    std::size_t checked = 0;
    int degree_bound = 0;
    long height_bound = 0;
};

// Bounded falsification of mu-minimality of g: search for f whose value
// exceeds the minimum over its g-expansion.  Confirmation is only "no
// counterexample up to the bounds".
inline MinimalityReport minimality_check(const NodePtr& mu, const Poly& g, int degree_bound,
                                         long height_bound,
                                         const std::vector<Poly>& extra = {},
                                         std::size_t random_samples = 64,
                                         std::uint64_t seed = 0x5eedULL) {
    if (!mu) throw precondition_error("minimality_check needs a node");
    if (!g.is_monic() || g.degree() < 1)
        throw precondition_error("minimality_check expects a monic g of degree >= 1");

    MinimalityReport rep;
    rep.degree_bound = degree_bound;
    rep.height_bound = height_bound;

    const Rational p(mu->ground().p());
    std::vector<Rational> scalars;
    for (long j = -height_bound; j <= height_bound; ++j) {
        Rational c = rational_pow(p, j);
        scalars.push_back(c);
        scalars.push_back(-c);
    }

    GroupElem gval = mu->eval(g);
    auto expansion_min = [&](const Poly& f) {
        GroupElem best = GroupElem::infinity();
        auto as = phi_expand(f, g);
        for (std::size_t s = 0; s < as.size(); ++s) {
            if (as[s].is_zero()) continue;
            GroupElem term = mu->eval(as[s]);
            if (s > 0) term = term + scalar_mul(static_cast<long>(s), gval);
            if (term < best) best = term;
        }
        return best;
    };

    auto check = [&](const Poly& f) -> bool { // true when refuted
        if (f.is_zero() || f.degree() > degree_bound) return false;
        ++rep.checked;
        if (mu->eval(f) > expansion_min(f)) {
            rep.refuted = true;
            rep.witness = f;
            return true;
        }
        return false;
    };

    for (const Poly& f : extra)
        if (check(f)) return rep;

    for (int k = 0; k <= degree_bound; ++k)
        for (const Rational& c : scalars)
            if (check(Poly::monomial(c, static_cast<std::size_t>(k)))) return rep;

    for (unsigned s = 1; s <= 2; ++s) {
        Poly gs = g.pow(s);
        if (gs.degree() > degree_bound) break;
        for (int k = 0; k <= degree_bound; ++k)
            for (const Rational& c : scalars)
                if (check(gs + Poly::monomial(c, static_cast<std::size_t>(k)))) return rep;
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> deg_d(1, degree_bound);
    std::uniform_int_distribution<long> pow_d(-height_bound, height_bound);
    std::uniform_int_distribution<int> coin(0, 3);
    for (std::size_t t = 0; t < random_samples; ++t) {
        int d = deg_d(rng);
        std::vector<Rational> cs(static_cast<std::size_t>(d) + 1, Rational(0));
        for (auto& c : cs) {
            if (coin(rng) == 0) continue; // keep it sparse
            Rational u = rational_pow(p, pow_d(rng));
            c = (coin(rng) & 1) ? u : -u;
        }
        cs.back() = 1; // monic, mirroring candidate key polynomials
        if (check(Poly::from_coeffs(std::move(cs)))) return rep;
    }
    return rep;
}

} // namespace valtree
