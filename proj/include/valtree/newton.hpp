#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "node.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "value_group.hpp"

namespace valtree {

struct NewtonPoint {
    std::size_t s;   // phi-exponent
    GroupElem value; // mu(a_s), always finite (zero coefficients are skipped)
};

struct NewtonSegment {
    std::size_t s0, s1;
    Rational slope;
};

struct NewtonData {
    Poly phi;
    std::vector<NewtonPoint> points;
    std::vector<std::size_t> excluded_mixed;           // values with cut slots: not plottable
    std::vector<std::pair<std::size_t, Rational>> hull; // lower-hull vertices
    std::vector<NewtonSegment> segments;
};

// Points (s, mu(a_s)) of the phi-expansion of f under mu, with the exact lower
// convex hull of the purely rational ones.
inline NewtonData newton_data(const NodePtr& mu, const Poly& phi, const Poly& f) {
    if (!mu) throw precondition_error("newton_data needs a node");
    if (f.is_zero()) throw input_error("newton polygon of the zero polynomial is empty");
    NewtonData nd;
    nd.phi = phi;
    std::vector<std::pair<Rational, Rational>> plot; // (s, value) for hull work
    for (std::size_t s = 0; const Poly& a : phi_expand(f, phi)) {
        if (!a.is_zero()) {
            GroupElem v = mu->eval(a);
            if (v.is_infinity())
                throw precondition_error("expansion coefficient lies in the node's support");
            if (v.is_rational())
                plot.emplace_back(Rational(s), v.main());
            else
                nd.excluded_mixed.push_back(s);
            nd.points.push_back({s, std::move(v)});
        }
        ++s;
    }
    if (plot.size() >= 1) {
        // Andrew monotone chain, lower hull only; abscissas are already
        // strictly increasing.
        auto cross = [](const std::pair<Rational, Rational>& o,
                        const std::pair<Rational, Rational>& a,
                        const std::pair<Rational, Rational>& b) {
            return (a.first - o.first) * (b.second - o.second) -
                   (a.second - o.second) * (b.first - o.first);
        };
        std::vector<std::pair<Rational, Rational>> h;
        for (const auto& p : plot) {
            while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
            h.push_back(p);
        }
        for (const auto& [x, y] : h)
            nd.hull.emplace_back(static_cast<std::size_t>(x.convert_to<long>()), y);
        for (std::size_t i = 0; i + 1 < nd.hull.size(); ++i) {
            const auto& [x0, y0] = nd.hull[i];
            const auto& [x1, y1] = nd.hull[i + 1];
            nd.segments.push_back({x0, x1, (y1 - y0) / (Rational(x1) - Rational(x0))});
        }
    }
    return nd;
}

// min over all points of value + s*gamma: the augmentation [mu; phi, gamma]
// evaluated through the polygon.
inline GroupElem value_from_polygon(const NewtonData& nd, const GroupElem& gamma) {
    GroupElem best = GroupElem::infinity();
    for (const NewtonPoint& p : nd.points) {
        GroupElem term = (p.s == 0)
                             ? p.value
                             : p.value + scalar_mul(static_cast<long>(p.s), gamma);
        if (term < best) best = term;
    }
    return best;
}

inline std::string render_ascii(const NewtonData& nd, std::size_t rows = 11) {
    if (nd.hull.empty()) return "(no rational points)\n";
    Rational lo = nd.hull.front().second, hi = lo;
    std::size_t smax = 0;
    for (const NewtonPoint& p : nd.points) smax = std::max(smax, p.s);
    for (const NewtonPoint& p : nd.points) {
        if (!p.value.is_rational()) continue;
        lo = std::min(lo, p.value.main());
        hi = std::max(hi, p.value.main());
    }
    const std::size_t cols = 4 * (smax + 1);
    std::vector<std::string> grid(rows, std::string(cols, ' '));
    auto row_of = [&](const Rational& v) -> std::size_t {
        if (hi == lo) return rows / 2;
        Rational t = (hi - v) / (hi - lo) * Rational(rows - 1);
        long r = t.convert_to<long>();
        return static_cast<std::size_t>(std::min<long>(std::max<long>(r, 0), rows - 1));
    };
    for (const NewtonPoint& p : nd.points)
        if (p.value.is_rational()) grid[row_of(p.value.main())][4 * p.s] = '*';
    for (const auto& [s, v] : nd.hull) grid[row_of(v)][4 * s] = 'o';
    std::ostringstream out;
    out << "value\n";
    for (const std::string& line : grid) out << "| " << line << "\n";
    out << "+";
    for (std::size_t i = 0; i < cols; ++i) out << "-";
    out << " s\n  ";
    for (std::size_t s = 0; s <= smax; ++s) {
        std::string label = std::to_string(s);
        label.resize(4, ' ');
        out << label;
    }
    out << "\n";
    for (const NewtonSegment& seg : nd.segments)
        out << "segment s=" << seg.s0 << ".." << seg.s1 << "  slope " << rational_str(seg.slope)
            << "\n";
    if (!nd.excluded_mixed.empty()) {
        out << "excluded (cut-valued):";
        for (std::size_t s : nd.excluded_mixed) out << " s=" << s;
        out << "\n";
    }
    return out.str();
}

} // namespace valtree
