#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace valtree {

// Dense univariate polynomial over Q.  Coefficients are stored ascending;
// the zero polynomial has no coefficients and degree() == -1 (the finite
// stand-in for "degree -infinity").
class Poly {
public:
    Poly() = default;

    static Poly zero() { return Poly(); }
    static Poly one() { return constant(1); }
    static Poly x() { return monomial(1, 1); }

    static Poly constant(Rational c) {
        Poly p;
        if (c != 0) p.c_.push_back(std::move(c));
        return p;
    }

    static Poly monomial(Rational c, std::size_t k) {
        Poly p;
        if (c != 0) {
            p.c_.assign(k + 1, Rational(0));
            p.c_[k] = std::move(c);
        }
        return p;
    }

    // x - a
    static Poly linear_root(const Rational& a) {
        Poly p;
        p.c_ = {-a, Rational(1)};
        p.normalize();
        return p;
    }

    static Poly from_coeffs(std::vector<Rational> ascending) {
        Poly p;
        p.c_ = std::move(ascending);
        p.normalize();
        return p;
    }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    const Rational& coeff(std::size_t i) const {
        static const Rational kZero(0);
        return i < c_.size() ? c_[i] : kZero;
    }
    const std::vector<Rational>& coeffs() const { return c_; }

    const Rational& lc() const {
        if (is_zero()) throw precondition_error("leading coefficient of zero polynomial");
        return c_.back();
    }
    bool is_monic() const { return !is_zero() && c_.back() == 1; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.c_.resize(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = a.coeff(i) + b.coeff(i);
        r.normalize();
        return r;
    }

    Poly operator-() const {
        Poly r = *this;
        for (auto& q : r.c_) q = -q;
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        Poly r;
        r.c_.assign(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            for (std::size_t j = 0; j < b.c_.size(); ++j)
                r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        r.normalize();
        return r;
    }

    friend Poly operator*(const Rational& c, const Poly& p) {
        if (c == 0) return zero();
        Poly r = p;
        for (auto& q : r.c_) q *= c;
        return r;
    }

    Poly pow(unsigned e) const {
        Poly r = one(), b = *this;
        while (e) {
            if (e & 1u) r = r * b;
            b = b * b;
            e >>= 1u;
        }
        return r;
    }

    Rational eval_at(const Rational& x0) const {
        Rational acc(0);
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x0 + c_[i];
        return acc;
    }

    // Euclidean division by a monic divisor; defined after the class because
    // the result struct holds two Polys.
    struct DivMod;
    static DivMod divmod(const Poly& f, const Poly& g);

    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (std::size_t i = c_.size(); i-- > 0;) {
            const Rational& c = c_[i];
            if (c == 0) continue;
            Rational a = abs(c);
            if (first) {
                if (c < 0) os << '-';
                first = false;
            } else {
                os << (c < 0 ? " - " : " + ");
            }
            const bool unit = (a == 1);
            if (i == 0 || !unit) os << rational_str(a);
            if (i > 0) {
                if (!unit) os << '*';
                os << 'x';
                if (i > 1) os << '^' << i;
            }
        }
        return os.str();
    }

    // "[c0, c1, ...]" ascending, exact rationals.
    std::string coeff_list_str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (i) os << ", ";
            os << rational_str(c_[i]);
        }
        os << ']';
        return os.str();
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;

    friend Poly::DivMod divmod_impl(const Poly& f, const Poly& g);
};

struct Poly::DivMod {
    Poly quot, rem;
};

inline Poly::DivMod divmod_impl(const Poly& f, const Poly& g) {
    if (g.is_zero() || !g.is_monic() || g.degree() < 1)
        throw precondition_error("division requires a monic divisor of degree >= 1");
    if (f.degree() < g.degree()) return {Poly::zero(), f};
    std::vector<Rational> rem = f.c_;
    const std::size_t dg = static_cast<std::size_t>(g.degree());
    std::vector<Rational> quot(rem.size() - dg, Rational(0));
    for (std::size_t i = rem.size(); i-- > dg;) {
        Rational q = rem[i];
        if (q == 0) continue;
        quot[i - dg] = q;
        rem[i] = 0;
        for (std::size_t j = 0; j < dg; ++j) rem[i - dg + j] -= q * g.c_[j];
    }
    return {Poly::from_coeffs(std::move(quot)), Poly::from_coeffs(std::move(rem))};
}

inline Poly::DivMod Poly::divmod(const Poly& f, const Poly& g) { return divmod_impl(f, g); }

// Coefficients of f in powers of phi: f = sum a_s phi^s, deg a_s < deg phi.
// The zero polynomial yields the empty list.
inline std::vector<Poly> phi_expand(const Poly& f, const Poly& phi) {
    if (phi.is_zero() || !phi.is_monic() || phi.degree() < 1)
        throw precondition_error("expansion base must be monic of degree >= 1");
    std::vector<Poly> out;
    Poly rest = f;
    while (!rest.is_zero()) {
        auto [q, r] = Poly::divmod(rest, phi);
        out.push_back(r);
        rest = q;
    }
    return out;
}

// Smallest s with a nonzero coefficient in the phi-expansion; nullopt for 0.
inline std::optional<std::size_t> ord_phi(const Poly& f, const Poly& phi) {
    if (f.is_zero()) return std::nullopt;
    std::size_t s = 0;
    Poly rest = f;
    for (;;) {
        auto [q, r] = Poly::divmod(rest, phi);
        if (!r.is_zero()) return s;
        ++s;
        rest = q;
    }
}

namespace detail {

// Recursive-descent parser for polynomial expressions:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor (('*' | juxtaposition) factor)*
//   factor := atom ('^' uint)?
//   atom   := rational | 'x' | '(' expr ')'
class PolyParser {
public:
    explicit PolyParser(std::string_view s) : s_(s) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw input_error("trailing characters in polynomial: '" +
                              std::string(s_.substr(pos_)) + "'");
        return p;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    Poly expr() {
        Poly acc;
        char sign = '+';
        if (peek() == '+' || peek() == '-') sign = s_[pos_++];
        acc = (sign == '-') ? -term() : term();
        while (true) {
            char c = peek();
            if (c != '+' && c != '-') break;
            ++pos_;
            Poly t = term();
            acc = (c == '-') ? acc - t : acc + t;
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc = acc * factor();
            } else if (c == 'x' || c == '(') { // juxtaposition, e.g. "3x^2"
                acc = acc * factor();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly factor() {
        Poly base = atom();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == start) throw input_error("exponent must be a nonnegative integer");
            unsigned e = 0;
            for (std::size_t i = start; i < pos_; ++i) e = e * 10 + (s_[i] - '0');
            base = base.pow(e);
        }
        return base;
    }

    Poly atom() {
        char c = peek();
        if (c == 'x') {
            ++pos_;
            return Poly::x();
        }
        if (c == '(') {
            ++pos_;
            Poly p = expr();
            if (peek() != ')') throw input_error("missing ')' in polynomial");
            ++pos_;
            return p;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/'))
                ++pos_;
            return Poly::constant(parse_rational(s_.substr(start, pos_ - start)));
        }
        throw input_error(std::string("unexpected character in polynomial: '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace detail

// Accepts the coefficient-list form "[c0, c1, ...]" or an expression "x^5 + 343".
inline Poly parse_poly(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string_view s = text.substr(b, e - b);
    if (s.empty()) throw input_error("empty polynomial literal");
    if (s.front() == '[') {
        if (s.back() != ']') throw input_error("unterminated coefficient list");
        std::string_view body = s.substr(1, s.size() - 2);
        std::vector<Rational> cs;
        std::size_t pos = 0;
        while (pos <= body.size() && !body.empty()) {
            auto comma = body.find(',', pos);
            cs.push_back(parse_rational(body.substr(pos, comma - pos)));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        return Poly::from_coeffs(std::move(cs));
    }
    return detail::PolyParser(s).parse();
}

// The p-adic valuation on the ground field Q, producing lex-group elements of
// a fixed rank.  Carries the slot rank so every value it emits is compatible.
class GroundValuation {
public:
    GroundValuation(Int p, std::size_t rank) : p_(std::move(p)), rank_(rank) {
        if (!is_prime(p_)) throw input_error("ground modulus must be prime, got " + p_.str());
        if (rank < 2) throw config_error("rank must be at least 2");
    }

    const Int& p() const { return p_; }
    std::size_t rank() const { return rank_; }

    std::optional<long> ord(const Rational& q) const { return rational_ord(q, p_); }

    GroupElem operator()(const Rational& q) const {
        auto k = ord(q);
        if (!k) return GroupElem::infinity();
        return GroupElem::from_rational(Rational(*k), rank_);
    }

    friend bool operator==(const GroundValuation& a, const GroundValuation& b) {
        return a.p_ == b.p_ && a.rank_ == b.rank_;
    }

private:
    Int p_;
    std::size_t rank_;
};

} // namespace valtree
