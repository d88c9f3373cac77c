#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace valtree {

// Element of a finite-rank lexicographic group Q^r (slot 0 = most significant,
// called "top"; slot 1 = "main", where the ground valuation lives; the
// remaining slots are infinitesimal tie-breakers), plus an absorbing INFINITY.
//
// Cut-like elements are ordinary vectors:
//   -infinity  = (-1|0|...|0)     below every main-slot value
//   infinity^- = ( 1|0|...|0)     above every main-slot value, below INFINITY
//   b^-        = ( 0|b|...|-1)    just below the rational b
//   b^+        = ( 0|b|...|+1)    just above the rational b
// so all arithmetic and comparisons are plain lexicographic arithmetic.
class GroupElem {
public:
    static GroupElem infinity() { return GroupElem(true, {}); }

    static GroupElem zero(std::size_t rank) {
        return GroupElem(false, std::vector<Rational>(check_rank(rank), Rational(0)));
    }

    static GroupElem from_slots(std::vector<Rational> slots) {
        check_rank(slots.size());
        return GroupElem(false, std::move(slots));
    }

    // Rational q embedded in the main slot.
    static GroupElem from_rational(const Rational& q, std::size_t rank) {
        auto e = zero(rank);
        e.s_[1] = q;
        return e;
    }

    static GroupElem neg_infinity(std::size_t rank) {
        auto e = zero(rank);
        e.s_[0] = -1;
        return e;
    }

    static GroupElem infinity_minus(std::size_t rank) {
        auto e = zero(rank);
        e.s_[0] = 1;
        return e;
    }

    static GroupElem ball_minus(const Rational& b, std::size_t rank) {
        if (rank < 3) throw config_error("ball cuts need rank >= 3");
        auto e = from_rational(b, rank);
        e.s_[2] = -1;
        return e;
    }

    static GroupElem ball_plus(const Rational& b, std::size_t rank) {
        if (rank < 3) throw config_error("ball cuts need rank >= 3");
        auto e = from_rational(b, rank);
        e.s_[2] = 1;
        return e;
    }

    bool is_infinity() const { return inf_; }
    bool is_finite() const { return !inf_; }

    std::size_t rank() const {
        require_finite("rank of INFINITY");
        return s_.size();
    }

    const Rational& slot(std::size_t i) const {
        require_finite("slot of INFINITY");
        return s_.at(i);
    }
    const Rational& top() const { return slot(0); }
    const Rational& main() const { return slot(1); }
    const std::vector<Rational>& slots() const {
        require_finite("slots of INFINITY");
        return s_;
    }

    bool is_zero() const {
        return !inf_ && std::all_of(s_.begin(), s_.end(),
                                    [](const Rational& q) { return q == 0; });
    }

    // Purely rational = representable in the main slot alone.
    bool is_rational() const {
        if (inf_) return false;
        for (std::size_t i = 0; i < s_.size(); ++i)
            if (i != 1 && s_[i] != 0) return false;
        return true;
    }

    // -1 / 0 / +1; INFINITY compares above everything finite.
    static int compare(const GroupElem& a, const GroupElem& b) {
        if (a.inf_ && b.inf_) return 0;
        if (a.inf_) return 1;
        if (b.inf_) return -1;
        check_same_rank(a, b);
        for (std::size_t i = 0; i < a.s_.size(); ++i) {
            if (a.s_[i] < b.s_[i]) return -1;
            if (a.s_[i] > b.s_[i]) return 1;
        }
        return 0;
    }

    friend bool operator==(const GroupElem& a, const GroupElem& b) { return compare(a, b) == 0; }
    friend bool operator!=(const GroupElem& a, const GroupElem& b) { return compare(a, b) != 0; }
    friend bool operator<(const GroupElem& a, const GroupElem& b) { return compare(a, b) < 0; }
    friend bool operator<=(const GroupElem& a, const GroupElem& b) { return compare(a, b) <= 0; }
    friend bool operator>(const GroupElem& a, const GroupElem& b) { return compare(a, b) > 0; }
    friend bool operator>=(const GroupElem& a, const GroupElem& b) { return compare(a, b) >= 0; }

    friend GroupElem operator+(const GroupElem& a, const GroupElem& b) {
        if (a.inf_ || b.inf_) return infinity();
        check_same_rank(a, b);
        GroupElem r = a;
        for (std::size_t i = 0; i < r.s_.size(); ++i) r.s_[i] += b.s_[i];
        return r;
    }

    GroupElem operator-() const {
        require_finite("negation of INFINITY");
        GroupElem r = *this;
        for (auto& q : r.s_) q = -q;
        return r;
    }

    friend GroupElem operator-(const GroupElem& a, const GroupElem& b) { return a + (-b); }

    std::string str() const {
        if (inf_) return "inf";
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < s_.size(); ++i) {
            if (i) os << '|';
            os << rational_str(s_[i]);
        }
        os << ')';
        return os.str();
    }

private:
    GroupElem(bool inf, std::vector<Rational> slots) : inf_(inf), s_(std::move(slots)) {}

    static std::size_t check_rank(std::size_t rank) {
        if (rank < 2) throw config_error("group rank must be at least 2 (top + main)");
        return rank;
    }
    static void check_same_rank(const GroupElem& a, const GroupElem& b) {
        if (a.s_.size() != b.s_.size())
            throw config_error("mixed group ranks: " + std::to_string(a.s_.size()) +
                               " vs " + std::to_string(b.s_.size()));
    }
    void require_finite(const char* what) const {
        if (inf_) throw precondition_error(std::string(what) + " is undefined");
    }

    bool inf_;
    std::vector<Rational> s_;
};

// n * x.  On INFINITY only positive scaling is defined.
inline GroupElem scalar_mul(const Rational& n, const GroupElem& x) {
    if (x.is_infinity()) {
        if (n <= 0) throw precondition_error("scalar_mul by n <= 0 on INFINITY");
        return GroupElem::infinity();
    }
    std::vector<Rational> s = x.slots();
    for (auto& q : s) q *= n;
    return GroupElem::from_slots(std::move(s));
}

inline GroupElem scalar_mul(long n, const GroupElem& x) { return scalar_mul(Rational(n), x); }

// "inf" | "-oo" | "oo-" | "(t|m|...)" | bare rational "q" | ball sugar "q-" / "q+".
inline GroupElem parse_group_elem(std::string_view text, std::size_t rank) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string s(text.substr(b, e - b));
    if (s.empty()) throw input_error("empty group element literal");

    if (s == "inf") return GroupElem::infinity();
    if (s == "-oo") return GroupElem::neg_infinity(rank);
    if (s == "oo-") return GroupElem::infinity_minus(rank);

    if (s.front() == '(') {
        if (s.back() != ')') throw input_error("unterminated slot vector: " + s);
        std::vector<Rational> slots;
        std::string body = s.substr(1, s.size() - 2);
        std::size_t pos = 0;
        while (true) {
            auto bar = body.find('|', pos);
            slots.push_back(parse_rational(body.substr(pos, bar - pos)));
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        if (slots.size() != rank)
            throw input_error("slot vector has " + std::to_string(slots.size()) +
                              " slots, configured rank is " + std::to_string(rank));
        return GroupElem::from_slots(std::move(slots));
    }

    if (s.size() > 1 && (s.back() == '-' || s.back() == '+')) {
        char side = s.back();
        // Distinguish ball sugar "3/2-" from a plain negative "-3": sugar has
        // digits before the sign.
        std::string head = s.substr(0, s.size() - 1);
        if (!head.empty() && std::isdigit(static_cast<unsigned char>(head.back()))) {
            Rational q = parse_rational(head);
            return side == '-' ? GroupElem::ball_minus(q, rank)
                               : GroupElem::ball_plus(q, rank);
        }
    }

    return GroupElem::from_rational(parse_rational(s), rank);
}

// Index of a subgroup extension: a positive integer or INFINITE.
struct ExtensionIndex {
    bool finite;
    Int value; // meaningful when finite

    static ExtensionIndex of(Int v) { return {true, std::move(v)}; }
    static ExtensionIndex infinite() { return {false, 0}; }

    std::string str() const { return finite ? value.str() : "INFINITE"; }

    friend bool operator==(const ExtensionIndex& a, const ExtensionIndex& b) {
        return a.finite == b.finite && (!a.finite || a.value == b.value);
    }
};

// Finitely generated subgroup of the lex group that actually occurs as a node
// value group: a cyclic rational part g·Z (in the main slot), optionally
// joined with a single incommensurable generator.
class SubgroupDescriptor {
public:
    static SubgroupDescriptor integers() { return cyclic(Rational(1)); }

    static SubgroupDescriptor cyclic(Rational g) {
        if (g <= 0) throw precondition_error("subgroup generator must be positive");
        SubgroupDescriptor d;
        d.gen_ = std::move(g);
        return d;
    }

    static SubgroupDescriptor mixed(Rational g, GroupElem xi) {
        auto d = cyclic(std::move(g));
        if (xi.is_infinity() || xi.is_rational())
            throw precondition_error("mixed part must be an incommensurable finite element");
        d.xi_ = std::move(xi);
        return d;
    }

    const Rational& generator() const { return gen_; }
    bool is_mixed() const { return xi_.has_value(); }
    const GroupElem& incommensurable_part() const {
        if (!xi_) throw precondition_error("no incommensurable part");
        return *xi_;
    }

    bool contains_rational(const Rational& q) const { return is_integral(q / gen_); }

    // Membership of a finite element: x = m·g + n·xi with m, n integers.
    bool contains(const GroupElem& x) const {
        if (x.is_infinity()) return false;
        if (x.is_rational()) return contains_rational(x.main());
        if (!xi_) return false;
        // Solve the multiple of xi from the first slot where xi is nonzero
        // outside the main slot, then the remainder must be rational in g·Z.
        const auto& xs = xi_->slots();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i == 1 || xs[i] == 0) continue;
            Rational n = x.slot(i) / xs[i];
            if (!is_integral(n)) return false;
            GroupElem rem = x - scalar_mul(n, *xi_);
            return rem.is_rational() && contains_rational(rem.main());
        }
        return false; // xi rational is excluded by the factory
    }

    std::string str() const {
        std::string s = "(" + rational_str(gen_) + ")Z";
        if (xi_) s = "<" + s + ", " + xi_->str() + ">";
        return s;
    }

    friend bool operator==(const SubgroupDescriptor& a, const SubgroupDescriptor& b) {
        if (a.gen_ != b.gen_ || a.xi_.has_value() != b.xi_.has_value()) return false;
        return !a.xi_ || *a.xi_ == *b.xi_;
    }

private:
    SubgroupDescriptor() : gen_(1) {}
    Rational gen_;
    std::optional<GroupElem> xi_;
};

// <H, gamma> together with the index (<H, gamma> : H).
inline std::pair<SubgroupDescriptor, ExtensionIndex>
extend_subgroup(const SubgroupDescriptor& H, const GroupElem& gamma) {
    if (gamma.is_infinity())
        throw precondition_error("cannot extend a subgroup by INFINITY");

    if (gamma.is_rational()) {
        const Rational q = abs(gamma.main());
        if (q == 0 || H.contains_rational(q)) return {H, ExtensionIndex::of(1)};
        Rational g2 = rational_gcd(H.generator(), q);
        Rational idx = H.generator() / g2;
        SubgroupDescriptor ext = H.is_mixed()
            ? SubgroupDescriptor::mixed(g2, H.incommensurable_part())
            : SubgroupDescriptor::cyclic(g2);
        return {ext, ExtensionIndex::of(numerator(idx))};
    }

    if (!H.is_mixed())
        return {SubgroupDescriptor::mixed(H.generator(), gamma), ExtensionIndex::infinite()};
    if (H.contains(gamma)) return {H, ExtensionIndex::of(1)};
    throw config_error("subgroup descriptor holds a single incommensurable generator; "
                       "a second independent one cannot be represented");
}

// Position of an element relative to the rationals (the divisible hull of the
// main-slot value group): either a rational itself, infinitesimally next to
// one, or beyond all of them.
struct QuasiCut {
    enum class Kind { principal, ball_minus, ball_plus, improper_low, improper_high };
    Kind kind;
    Rational at; // meaningful for principal / ball kinds

    std::string str() const {
        switch (kind) {
            case Kind::principal:     return "principal(" + rational_str(at) + ")";
            case Kind::ball_minus:    return "ball_minus(" + rational_str(at) + ")";
            case Kind::ball_plus:     return "ball_plus(" + rational_str(at) + ")";
            case Kind::improper_low:  return "improper_low";
            case Kind::improper_high: return "improper_high";
        }
        return "?";
    }

    friend bool operator==(const QuasiCut& a, const QuasiCut& b) {
        if (a.kind != b.kind) return false;
        if (a.kind == Kind::improper_low || a.kind == Kind::improper_high) return true;
        return a.at == b.at;
    }
};

inline QuasiCut quasi_cut(const GroupElem& x, const SubgroupDescriptor& /*Gamma*/) {
    if (x.is_infinity())
        throw precondition_error("quasi-cut of INFINITY is undefined");
    if (x.top() < 0) return {QuasiCut::Kind::improper_low, 0};
    if (x.top() > 0) return {QuasiCut::Kind::improper_high, 0};
    for (std::size_t i = 2; i < x.rank(); ++i) {
        if (x.slot(i) < 0) return {QuasiCut::Kind::ball_minus, x.main()};
        if (x.slot(i) > 0) return {QuasiCut::Kind::ball_plus, x.main()};
    }
    return {QuasiCut::Kind::principal, x.main()};
}

inline bool sme_equiv(const GroupElem& x, const GroupElem& y, const SubgroupDescriptor& G) {
    return quasi_cut(x, G) == quasi_cut(y, G);
}

inline GroupElem sme_canonical(const GroupElem& x, const SubgroupDescriptor& G) {
    const std::size_t rank = x.rank(); // throws on INFINITY, as intended
    switch (quasi_cut(x, G).kind) {
        case QuasiCut::Kind::principal:     return GroupElem::from_rational(x.main(), rank);
        case QuasiCut::Kind::ball_minus:    return GroupElem::ball_minus(x.main(), rank);
        case QuasiCut::Kind::ball_plus:     return GroupElem::ball_plus(x.main(), rank);
        case QuasiCut::Kind::improper_low:  return GroupElem::neg_infinity(rank);
        case QuasiCut::Kind::improper_high: return GroupElem::infinity_minus(rank);
    }
    throw error("unreachable");
}

} // namespace valtree
