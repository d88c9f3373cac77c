#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace valtree {

// How the members of a continuous family are produced.
enum class FamilyKind { nodes, centers, hensel, rule };

// Value sequence for rule-generated families [base; chi, beta_i].
struct BetaSeq {
    enum class Kind { list, arithmetic, geometric };
    Kind kind = Kind::list;
    std::vector<GroupElem> entries;              // list
    GroupElem first = GroupElem::infinity();     // arithmetic: first + i*step
    GroupElem step = GroupElem::infinity();
    GroupElem target = GroupElem::infinity();    // geometric: target - coeff*ratio^i
    Rational coeff = 0;
    Rational ratio = 0;

    static BetaSeq of_list(std::vector<GroupElem> vs) {
        if (vs.size() < 2) throw input_error("a beta list needs at least two entries");
        BetaSeq b;
        b.kind = Kind::list;
        b.entries = std::move(vs);
        return b;
    }
    static BetaSeq of_arithmetic(GroupElem first, GroupElem step) {
        if (first.is_infinity() || step.is_infinity())
            throw input_error("arithmetic beta sequences need finite parameters");
        if (!(step > GroupElem::zero(step.rank())))
            throw input_error("arithmetic beta step must be positive");
        BetaSeq b;
        b.kind = Kind::arithmetic;
        b.first = std::move(first);
        b.step = std::move(step);
        return b;
    }
    static BetaSeq of_geometric(GroupElem target, Rational coeff, Rational ratio) {
        if (target.is_infinity()) throw input_error("geometric beta target must be finite");
        if (coeff <= 0 || ratio <= 0 || ratio >= 1)
            throw input_error("geometric beta needs coeff > 0 and ratio in (0,1)");
        BetaSeq b;
        b.kind = Kind::geometric;
        b.target = std::move(target);
        b.coeff = std::move(coeff);
        b.ratio = std::move(ratio);
        return b;
    }

    GroupElem at(std::size_t i) const {
        switch (kind) {
            case Kind::list:
                if (i >= entries.size()) throw input_error("beta index beyond the given list");
                return entries[i];
            case Kind::arithmetic:
                return first + scalar_mul(Rational(i), step);
            case Kind::geometric:
                return target - GroupElem::from_rational(coeff * pow_ratio(i), target.rank());
        }
        throw error("unreachable");
    }

    std::optional<std::size_t> length() const {
        if (kind == Kind::list) return entries.size();
        return std::nullopt;
    }

private:
    Rational pow_ratio(std::size_t i) const {
        Rational r = 1;
        for (std::size_t k = 0; k < i; ++k) r *= ratio;
        return r;
    }
};

struct StableValue {
    GroupElem value;
    std::size_t certified_at;  // members examined when the value was certified
    bool short_circuit;        // degree below the family degree: constant along it
};
struct UnstableUpTo {
    std::size_t members_tried;
    std::vector<GroupElem> values; // strictly growing value sequence observed
};
using StabilityResult = std::variant<StableValue, UnstableUpTo>;

enum class FamilyClass { essential, inessential, unknown };
struct UnstableSearch {
    FamilyClass cls = FamilyClass::unknown;
    std::optional<Poly> witness;   // minimal-degree unstable polynomial found
    int unstable_degree = -1;      // -1 when no witness surfaced
    std::size_t members_tried = 0;
};

// A totally ordered sequence of equal-degree valuations with no maximum,
// generated lazily up to a horizon.  Supplies stable values for limit nodes.
class Family : public std::enable_shared_from_this<Family> {
public:
    static FamilyPtr from_nodes(std::vector<NodePtr> members, std::size_t horizon = 24,
                                std::optional<GroupElem> declared_sup = std::nullopt) {
        if (members.size() < 2) throw input_error("a family needs at least two members");
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (!members[i]) throw input_error("null family member");
            if (!(members[i]->ground() == members[0]->ground()))
                throw input_error("family members disagree on the ground valuation");
            if (members[i]->degree() != members[0]->degree())
                throw input_error("family members must share one degree");
            if (members[i]->sv().is_infinity())
                throw input_error("family members must have finite defining values");
            if (i > 0) {
                if (!leq(members[i - 1], members[i]) || leq(members[i], members[i - 1]))
                    throw input_error("family members must be strictly increasing");
            }
        }
        auto fam = std::make_shared<Family>(Token{}, members[0]->ground(), FamilyKind::nodes,
                                            horizon, std::move(declared_sup));
        fam->cache_ = std::move(members);
        return fam;
    }

    // Depth-zero members from a pseudo-convergent center list a_0, a_1, ...:
    // member i is omega_{a_i, v(a_{i+1} - a_i)}.
    static FamilyPtr from_centers(const GroundValuation& gv, std::vector<Rational> centers,
                                  std::size_t horizon = 24,
                                  std::optional<GroupElem> declared_sup = std::nullopt) {
        if (centers.size() < 3)
            throw input_error("a center list needs at least three entries (two members)");
        auto fam = std::make_shared<Family>(Token{}, gv, FamilyKind::centers, horizon,
                                            std::move(declared_sup));
        fam->centers_ = std::move(centers);
        fam->member(1); // force validation of the pseudo-convergence condition
        return fam;
    }

    // Centers by Hensel lifting of an approximate root of F: each step raises
    // v(F(a_i)) by adjusting a_i modulo the next power of p.
    static FamilyPtr hensel(const GroundValuation& gv, Poly F, Int start,
                            std::size_t horizon = 24,
                            std::optional<GroupElem> declared_sup = std::nullopt) {
        if (F.degree() < 2) throw input_error("the Hensel generator expects deg F >= 2");
        for (const Rational& c : F.coeffs())
            if (!is_integral(c)) throw input_error("the Hensel generator expects integer coefficients");
        auto fam = std::make_shared<Family>(Token{}, gv, FamilyKind::hensel, horizon,
                                            std::move(declared_sup));
        fam->hensel_poly_ = std::move(F);
        fam->hcenters_.push_back(std::move(start));
        fam->member(1); // surfaces simple-root violations immediately
        return fam;
    }

    // Members [base; chi, beta_i] for a strictly increasing beta sequence.
    static FamilyPtr from_rule(NodePtr base, Poly chi, BetaSeq betas, std::size_t horizon = 24,
                               std::optional<GroupElem> declared_sup = std::nullopt) {
        if (!base) throw input_error("rule family needs a base node");
        auto fam = std::make_shared<Family>(Token{}, base->ground(), FamilyKind::rule, horizon,
                                            std::move(declared_sup));
        fam->rule_base_ = std::move(base);
        fam->rule_poly_ = std::move(chi);
        fam->betas_ = std::move(betas);
        fam->member(1);
        return fam;
    }

    FamilyKind kind() const { return kind_; }
    const GroundValuation& ground() const { return gv_; }
    std::size_t horizon() const { return horizon_; }
    const std::optional<GroupElem>& declared_sup() const { return declared_sup_; }

    int degree() const {
        switch (kind_) {
            case FamilyKind::nodes: return cache_.front()->degree();
            case FamilyKind::centers:
            case FamilyKind::hensel: return 1;
            case FamilyKind::rule: return rule_poly_.degree();
        }
        throw error("unreachable");
    }

    // Number of members this family can produce, when bounded.
    std::optional<std::size_t> available() const {
        switch (kind_) {
            case FamilyKind::nodes: return cache_.size();
            case FamilyKind::centers: return centers_.size() - 1;
            case FamilyKind::hensel: return std::nullopt;
            case FamilyKind::rule:
                if (auto n = betas_.length()) return *n;
                return std::nullopt;
        }
        throw error("unreachable");
    }

    NodePtr member(std::size_t i) const {
        std::lock_guard<std::mutex> lock(mu_);
        extend_locked(i + 1);
        return cache_[i];
    }
    NodePtr first() const { return member(0); }

    std::vector<NodePtr> prefix(std::size_t n) const {
        std::vector<NodePtr> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(member(i));
        return out;
    }

    // Members the stability searches may consult.
    std::size_t search_limit() const {
        auto avail = available();
        return avail ? std::min(horizon_, *avail) : horizon_;
    }

    StabilityResult stable_value(const Poly& f) const {
        if (f.is_zero()) return StableValue{GroupElem::infinity(), 0, true};
        if (f.degree() < degree()) return StableValue{member(0)->eval(f), 1, true};
        const std::size_t limit = search_limit();
        std::vector<GroupElem> seen;
        for (std::size_t i = 0; i < limit; ++i) {
            GroupElem v = member(i)->eval(f);
            if (!seen.empty() && seen.back() == v)
                return StableValue{std::move(v), i + 1, false};
            seen.push_back(std::move(v));
        }
        return UnstableUpTo{limit, std::move(seen)};
    }

    GroupElem value_or_throw(const Poly& f) const {
        StabilityResult r = stable_value(f);
        if (auto* s = std::get_if<StableValue>(&r)) return s->value;
        throw stability_error("value did not stabilize within the family horizon",
                              std::get<UnstableUpTo>(r).members_tried);
    }

    std::vector<GroupElem> prefix_values(const Poly& f, std::size_t n) const {
        std::vector<GroupElem> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(member(i)->eval(f));
        return out;
    }

    // Search for a minimal-degree unstable polynomial among the candidates plus
    // generator-specific suggestions.  Unstable degree == family degree means
    // the family is inessential (a single augmentation reproduces its limit).
    UnstableSearch find_unstable(std::vector<Poly> candidates = {}) const {
        switch (kind_) {
            case FamilyKind::hensel: candidates.push_back(hensel_poly_); break;
            case FamilyKind::rule: candidates.push_back(rule_poly_); break;
            default: break;
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Poly& a, const Poly& b) { return a.degree() < b.degree(); });
        UnstableSearch out;
        out.members_tried = search_limit();
        for (const Poly& f : candidates) {
            if (f.is_zero()) continue;
            if (std::holds_alternative<UnstableUpTo>(stable_value(f))) {
                out.witness = f;
                out.unstable_degree = f.degree();
                out.cls = (f.degree() == degree()) ? FamilyClass::inessential
                                                   : FamilyClass::essential;
                return out;
            }
        }
        return out;
    }

    // Supremum of the members' defining values.  A declared sup is validated
    // against the prefix and returned.  Otherwise the generator decides:
    // pseudo-convergent centers have strictly increasing integer deltas under
    // any continuation (so the values are unbounded), arithmetic rules
    // diverge, geometric rules approach their target from below.  Explicit
    // member lists fall back to exact constant-ratio recognition.
    GroupElem value_sup() const {
        const std::size_t rank = gv_.rank();
        if (declared_sup_) {
            const std::size_t limit = search_limit();
            for (std::size_t i = 0; i < limit; ++i)
                if (!(member(i)->sv() < *declared_sup_))
                    throw input_error("declared family sup is not an upper bound: member value " +
                                      member(i)->sv().str());
            return *declared_sup_;
        }
        switch (kind_) {
            case FamilyKind::centers:
            case FamilyKind::hensel:
                return GroupElem::infinity_minus(rank);
            case FamilyKind::rule:
                switch (betas_.kind) {
                    case BetaSeq::Kind::arithmetic:
                        return GroupElem::infinity_minus(rank);
                    case BetaSeq::Kind::geometric:
                        if (betas_.target.is_rational())
                            return GroupElem::ball_minus(betas_.target.main(), rank);
                        throw stability_error("sup of a geometric rule with a non-rational "
                                              "target must be declared",
                                              search_limit());
                    case BetaSeq::Kind::list:
                        throw stability_error("sup of a finite beta list must be declared",
                                              search_limit());
                }
                throw error("unreachable");
            case FamilyKind::nodes: {
                std::vector<Rational> vals;
                for (const NodePtr& n : cache_) {
                    if (!n->sv().is_rational())
                        throw stability_error("sup recognition needs rational member values; "
                                              "declare the sup instead",
                                              cache_.size());
                    vals.push_back(n->sv().main());
                }
                if (vals.size() < 3)
                    throw stability_error("family sup undetermined from this few members; "
                                          "declare it",
                                          vals.size());
                std::vector<Rational> d;
                for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                    Rational di = vals[i + 1] - vals[i];
                    if (di <= 0) throw input_error("family member values must strictly increase");
                    d.push_back(std::move(di));
                }
                Rational r = d[1] / d[0];
                for (std::size_t i = 1; i + 1 < d.size(); ++i)
                    if (d[i + 1] / d[i] != r)
                        throw stability_error("family sup undetermined: difference ratio is "
                                              "not constant; declare the sup instead",
                                              vals.size());
                if (r >= 1) return GroupElem::infinity_minus(rank);
                return GroupElem::ball_minus(vals.back() + d.back() * r / (1 - r), rank);
            }
        }
        throw error("unreachable");
    }

    // --- generator-specific accessors (serialization) ---
    const std::vector<NodePtr>& given_nodes() const {
        need(FamilyKind::nodes);
        return cache_;
    }
    const std::vector<Rational>& center_list() const {
        need(FamilyKind::centers);
        return centers_;
    }
    const Poly& hensel_poly() const {
        need(FamilyKind::hensel);
        return hensel_poly_;
    }
    const Int& hensel_start() const {
        need(FamilyKind::hensel);
        return hcenters_.front();
    }
    NodePtr rule_base() const {
        need(FamilyKind::rule);
        return rule_base_;
    }
    const Poly& rule_poly() const {
        need(FamilyKind::rule);
        return rule_poly_;
    }
    const BetaSeq& betas() const {
        need(FamilyKind::rule);
        return betas_;
    }

    struct Token {};
    Family(Token, GroundValuation gv, FamilyKind k, std::size_t horizon,
           std::optional<GroupElem> declared_sup)
        : gv_(std::move(gv)), kind_(k), horizon_(horizon), declared_sup_(std::move(declared_sup)) {
        if (horizon_ < 3) throw config_error("family horizon must be at least 3");
    }

private:
    void need(FamilyKind k) const {
        if (kind_ != k) throw precondition_error("accessor does not match the family generator");
    }

    void extend_locked(std::size_t n) const {
        while (cache_.size() < n) {
            std::size_t i = cache_.size();
            switch (kind_) {
                case FamilyKind::nodes:
                    throw input_error("family has only " + std::to_string(cache_.size()) +
                                      " members");
                case FamilyKind::centers: {
                    if (i + 1 >= centers_.size())
                        throw input_error("center list exhausted after " +
                                          std::to_string(cache_.size()) + " members");
                    auto d = rational_ord(centers_[i + 1] - centers_[i], gv_.p());
                    if (!d) throw input_error("repeated centers in a pseudo-convergent list");
                    GroupElem delta = GroupElem::from_rational(Rational(*d), gv_.rank());
                    if (!cache_.empty() && !(delta > cache_.back()->sv()))
                        throw input_error("centers are not pseudo-convergent: v(a_{i+1}-a_i) "
                                          "must strictly increase");
                    cache_.push_back(Node::make_depth_zero(gv_, centers_[i], delta));
                    break;
                }
                case FamilyKind::hensel: {
                    while (hcenters_.size() < i + 2) hensel_step();
                    Int diff = hcenters_[i + 1] - hcenters_[i];
                    GroupElem delta =
                        GroupElem::from_rational(Rational(int_ord(diff, gv_.p())), gv_.rank());
                    cache_.push_back(Node::make_depth_zero(gv_, Rational(hcenters_[i]), delta));
                    break;
                }
                case FamilyKind::rule: {
                    GroupElem b = betas_.at(i);
                    if (!cache_.empty() && !(b > cache_.back()->sv()))
                        throw input_error("beta sequence must strictly increase");
                    cache_.push_back(Node::make_augmentation(rule_base_, rule_poly_, std::move(b)));
                    break;
                }
            }
        }
    }

    void hensel_step() const {
        const Int& p = gv_.p();
        const Int& a = hcenters_.back();
        Int Fa = 0, Fpa = 0; // F(a) and F'(a), by Horner on the integer form
        {
            const auto& cs = hensel_poly_.coeffs();
            for (std::size_t i = cs.size(); i-- > 0;) {
                Fpa = Fpa * a + Fa;
                Fa = Fa * a + boost::multiprecision::numerator(cs[i]);
            }
        }
        if (Fa == 0)
            throw stability_error("Hensel generation reached an exact root; "
                                  "the center sequence terminates",
                                  hcenters_.size());
        Int fp_mod = Fpa % p;
        if (fp_mod < 0) fp_mod += p;
        if (fp_mod == 0)
            throw config_error("Hensel generator needs a simple approximate root "
                               "(v(F'(a)) = 0)");
        long m = int_ord(Fa, p);
        Int pm = int_pow(p, static_cast<unsigned long>(m));
        Int u = Fa / pm;
        Int inv = boost::multiprecision::powm(fp_mod, p - 2, p);
        Int t = (-(u % p) * inv) % p;
        if (t < 0) t += p;
        hcenters_.push_back(a + t * pm);
    }

    GroundValuation gv_;
    FamilyKind kind_;
    std::size_t horizon_;
    std::optional<GroupElem> declared_sup_;

    mutable std::mutex mu_;
    mutable std::vector<NodePtr> cache_;

    std::vector<Rational> centers_;          // centers generator
    Poly hensel_poly_;                       // hensel generator
    mutable std::vector<Int> hcenters_;
    NodePtr rule_base_;                      // rule generator
    Poly rule_poly_;
    BetaSeq betas_ = BetaSeq{};

    friend NodePtr make_limit_augmentation(const FamilyPtr& family, Poly phi, GroupElem gamma);
};

inline NodePtr make_limit_augmentation(const FamilyPtr& family, Poly phi, GroupElem gamma) {
    if (!family) throw precondition_error("limit augmentation needs a family");
    if (!phi.is_monic() || phi.degree() < family->degree())
        throw precondition_error("limit augmentation polynomial must be monic of degree >= "
                                 "the family degree");
    if (gamma.is_finite() && gamma.rank() != family->ground().rank())
        throw config_error("value rank does not match the configured rank");
    StabilityResult st = family->stable_value(phi);
    if (std::holds_alternative<StableValue>(st))
        throw precondition_error("polynomial is stable along the family (value " +
                                 std::get<StableValue>(st).value.str() +
                                 "); use an ordinary augmentation");
    for (const GroupElem& v : std::get<UnstableUpTo>(st).values)
        if (!(gamma > v))
            throw precondition_error("limit value must exceed every member value; saw " + v.str());
    auto n = std::make_shared<Node>(Node::Private{}, NodeKind::limit, family->ground(),
                                    std::move(gamma));
    n->phi_ = std::move(phi);
    n->degree_ = n->phi_.degree();
    n->family_ = family;
    n->coeff_value_ = [fam = family](const Poly& a) { return fam->value_or_throw(a); };
    n->finish_groups(family->first()->value_group_zero());
    n->walk_parent_ = family->first();
    return n;
}

} // namespace valtree
