#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace valtree {

using Int      = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string rational_str(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

// Accepts "12", "-3/5", "+7", with optional surrounding whitespace.
inline Rational parse_rational(std::string_view text) {
    std::size_t b = 0, e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string_view s = text.substr(b, e - b);
    if (s.empty()) throw input_error("empty rational literal");

    auto parse_int = [](std::string_view t) -> Int {
        if (t.empty()) throw input_error("empty integer literal");
        std::size_t i = 0;
        bool neg = false;
        if (t[0] == '+' || t[0] == '-') { neg = (t[0] == '-'); i = 1; }
        if (i == t.size()) throw input_error("sign without digits in integer literal");
        Int v = 0;
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i])))
                throw input_error("bad digit in integer literal: '" + std::string(t) + "'");
            v = v * 10 + (t[i] - '0');
        }
        return neg ? Int(-v) : v;
    };

    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(s));
    Int num = parse_int(s.substr(0, slash));
    Int den = parse_int(s.substr(slash + 1));
    if (den == 0) throw input_error("zero denominator in rational literal");
    return Rational(num, den);
}

// gcd on positive rationals: the generator of a/b Z + c/d Z.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
    if (a == 0) return abs(b);
    if (b == 0) return abs(a);
    Int an = abs(numerator(a)), ad = denominator(a);
    Int bn = abs(numerator(b)), bd = denominator(b);
    return Rational(gcd(an * bd, bn * ad), ad * bd);
}

inline bool is_integral(const Rational& q) { return denominator(q) == 1; }

// Exponent of p in a nonzero integer.
inline long int_ord(Int n, const Int& p) {
    if (n == 0) throw precondition_error("p-adic order of zero");
    long k = 0;
    Int q, r;
    for (;;) {
        divide_qr(n, p, q, r);
        if (r != 0) return k;
        n = q;
        ++k;
    }
}

// Exponent of p in a nonzero rational; nullopt for zero.
inline std::optional<long> rational_ord(const Rational& q, const Int& p) {
    if (q == 0) return std::nullopt;
    return int_ord(numerator(q), p) - int_ord(denominator(q), p);
}

inline Int int_pow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1u) r *= base;
        base *= base;
        e >>= 1u;
    }
    return r;
}

inline Rational rational_pow(const Rational& base, long e) {
    if (e >= 0) {
        return Rational(int_pow(numerator(base), static_cast<unsigned>(e)),
                        int_pow(denominator(base), static_cast<unsigned>(e)));
    }
    if (base == 0) throw precondition_error("negative power of zero");
    return Rational(int_pow(denominator(base), static_cast<unsigned>(-e)),
                    int_pow(numerator(base), static_cast<unsigned>(-e)));
}

// Trial-division primality; inputs here are small user-supplied moduli.
inline bool is_prime(const Int& n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (Int d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

} // namespace valtree
