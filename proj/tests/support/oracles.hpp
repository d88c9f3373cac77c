#pragma once

// Independent reference computations the tests compare the library against.
// Everything here is deliberately naive: brute force over bounded sets, plain
// rational arithmetic, no reuse of the structures under test.

#include <valtree/valtree.hpp>

#include <algorithm>
#include <optional>
#include <random>
#include <vector>

namespace oracles {

using namespace valtree;

// Classify a finite lex element against the rationals purely by comparisons
// with rational sample points of bounded denominator.  Mirrors what an
// observer who can only compare against Q would report.
struct CutClass {
    enum Kind { at_rational, just_below, just_above, below_all, above_all } kind;
    Rational witness; // for the first three kinds
};

inline CutClass cut_by_comparisons(const GroupElem& x, long max_den = 100) {
    const std::size_t rank = x.rank();
    // Candidate rationals: everything with denominator <= max_den inside a
    // window around the main slot, plus the main slot itself.
    std::vector<Rational> samples;
    samples.push_back(x.main());
    for (long d = 1; d <= max_den; ++d) {
        samples.push_back(x.main() + Rational(1, d));
        samples.push_back(x.main() - Rational(1, d));
    }
    samples.push_back(x.main() + 1000000);
    samples.push_back(x.main() - 1000000);

    bool above_some = false, below_some = false;
    for (const Rational& q : samples) {
        GroupElem e = GroupElem::from_rational(q, rank);
        if (x == e) return {CutClass::at_rational, q};
        if (x > e) above_some = true;
        if (x < e) below_some = true;
    }
    if (!above_some) return {CutClass::below_all, 0};
    if (!below_some) return {CutClass::above_all, 0};
    // x is strictly between rationals.  It sits infinitesimally next to b
    // when every sample on one side of b is cleared: test both adjacencies.
    const Rational& b = x.main();
    GroupElem be = GroupElem::from_rational(b, rank);
    if (x < be) {
        // just below b iff x beats every sampled rational strictly below b
        for (long d = 1; d <= max_den; ++d)
            if (!(x > GroupElem::from_rational(b - Rational(1, d), rank)))
                return {CutClass::below_all, 0}; // outside the observable window
        return {CutClass::just_below, b};
    }
    for (long d = 1; d <= max_den; ++d)
        if (!(x < GroupElem::from_rational(b + Rational(1, d), rank)))
            return {CutClass::above_all, 0};
    return {CutClass::just_above, b};
}

inline bool same_cut(const CutClass& a, const CutClass& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == CutClass::below_all || a.kind == CutClass::above_all) return true;
    return a.witness == b.witness;
}

// Smallest n >= 1 with n*q in g*Z, by trial up to the bound.
inline std::optional<long> index_by_trial(const Rational& g, const Rational& q,
                                          long bound = 10000) {
    for (long n = 1; n <= bound; ++n)
        if (is_integral(Rational(n) * q / g)) return n;
    return std::nullopt;
}

// Depth-zero comparison law, straight from the ball picture.
inline bool depth_zero_leq_formula(const GroundValuation& gv, const Rational& a,
                                   const GroupElem& delta, const Rational& b,
                                   const GroupElem& eps) {
    GroupElem vba = gv(b - a); // INFINITY when a == b
    GroupElem m = vba <= eps ? vba : eps;
    return m >= delta;
}

// Seeded random rationals u * p^j with small numerators: the shape ground
// valuations see most sharply.
class RationalGen {
public:
    RationalGen(Int p, long height, std::uint64_t seed)
        : p_(std::move(p)), height_(height), rng_(seed) {}

    Rational unit() {
        std::uniform_int_distribution<long> num(1, 50), den(1, 50);
        Rational u(num(rng_), den(rng_));
        // strip any accidental p-part so the height is exactly the chosen j
        while (numerator(u) % p_ == 0) u /= Rational(p_);
        while (denominator(u) % p_ == 0) u *= Rational(p_);
        std::uniform_int_distribution<int> sign(0, 1);
        return sign(rng_) ? u : -u;
    }

    Rational value() {
        std::uniform_int_distribution<long> jd(-height_, height_);
        return unit() * rational_pow(Rational(p_), jd(rng_));
    }

    Poly poly(int max_deg, double density = 0.7) {
        std::uniform_int_distribution<int> dd(0, max_deg);
        int deg = dd(rng_);
        std::vector<Rational> cs(static_cast<std::size_t>(deg) + 1, Rational(0));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (auto& c : cs)
            if (coin(rng_) < density) c = value();
        cs.back() = value(); // pin the degree
        return Poly::from_coeffs(std::move(cs));
    }

    Poly monic_poly(int deg) {
        std::vector<Rational> cs(static_cast<std::size_t>(deg) + 1, Rational(0));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (std::size_t i = 0; i + 1 < cs.size(); ++i)
            if (coin(rng_) < 0.7) cs[i] = value();
        cs.back() = 1;
        return Poly::from_coeffs(std::move(cs));
    }

    std::mt19937_64& rng() { return rng_; }

private:
    Int p_;
    long height_;
    std::mt19937_64 rng_;
};

} // namespace oracles
