#pragma once

/*
 * Exact-rational evaluation of the cooperative-repair bandwidth bound.
 *
 * For a file of B packets on parameters (k, d, r) with d >= k, the
 * per-newcomer repair bandwidth gamma = d*beta1 + (r-1)*beta2 satisfies
 *
 *     gamma >= B(2d+r-1) / (k(2d+r-k)),
 *
 * with equality only at (beta1, beta2) = (2B, B) / (k(2d+r-k)). The bound
 * is certified here by a two-variable linear program over the full set of
 * staged-cut constraints B <= a(t)*beta1 + b(t)*beta2, one per cut type t
 * (a composition of k with parts in [1, r]).
 */

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"

namespace mbcr {

struct SystemParams {
    long B = 0;
    int k = 0, d = 0, r = 0;
    int n = 0; // optional; 0 when not relevant to the query

    void validate() const {
        if (B < 0)
            throw parameter_error("file size must be nonnegative");
        if (k < 1 || r < 1)
            throw parameter_error("need k >= 1 and r >= 1");
        if (d < k)
            throw unsupported_regime_error("bound holds only for d >= k, got d=" +
                                           std::to_string(d) + " k=" + std::to_string(k));
        if (n != 0 && n < k)
            throw parameter_error("need k <= n");
    }
};

/// Composition (l_1, ..., l_s) of k with parts in [1, r].
struct CutType {
    std::vector<int> parts;

    int k() const {
        int sum = 0;
        for (int p : parts)
            sum += p;
        return sum;
    }

    std::string str() const {
        std::string s = "(";
        for (size_t i = 0; i < parts.size(); ++i)
            s += (i ? "," : "") + std::to_string(parts[i]);
        return s + ")";
    }

    friend bool operator==(const CutType&, const CutType&) = default;
};

/// gamma = d*beta1 + (r-1)*beta2.
inline Rational gamma(int d, int r, const Rational& beta1, const Rational& beta2) {
    if (d < 1 || r < 1)
        throw parameter_error("need d >= 1 and r >= 1");
    return Rational(d) * beta1 + Rational(r - 1) * beta2;
}

inline Rational mbcr_lower_bound(const SystemParams& p) {
    p.validate();
    return Rational(p.B) * (2 * p.d + p.r - 1) / (Rational(p.k) * (2 * p.d + p.r - p.k));
}

/// The unique (beta1, beta2) meeting the bound; beta1 = 2*beta2 always.
inline std::pair<Rational, Rational> mbcr_point(const SystemParams& p) {
    p.validate();
    const Rational unit = Rational(p.B) / (Rational(p.k) * (2 * p.d + p.r - p.k));
    return {2 * unit, unit};
}

/// Minimum bandwidth for one-by-one repair: 2dB / (k(2d+1-k)).
inline Rational single_loss_bound(long B, int k, int d) {
    return mbcr_lower_bound(SystemParams{B, k, d, 1, 0});
}

/// All compositions of k into parts in [1, r], lexicographic.
inline std::vector<CutType> enumerate_cut_types(int k, int r) {
    if (k < 1 || r < 1)
        throw parameter_error("need k >= 1 and r >= 1");
    std::vector<CutType> out;
    std::vector<int> parts;
    auto rec = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            out.push_back(CutType{parts});
            return;
        }
        for (int p = 1; p <= std::min(remaining, r); ++p) {
            parts.push_back(p);
            self(self, remaining - p);
            parts.pop_back();
        }
    };
    rec(rec, k);
    return out;
}

namespace detail {

/// Coefficients (a, b) of the cut-type constraint B <= a*beta1 + b*beta2:
/// a = dk - sum_{i>j} l_i l_j, b = rk - sum_i l_i^2.
inline std::pair<BigInt, BigInt> cut_coefficients(const CutType& t, int d, int r) {
    const int k = t.k();
    BigInt cross = 0;
    BigInt squares = 0;
    for (size_t i = 0; i < t.parts.size(); ++i) {
        squares += BigInt(t.parts[i]) * t.parts[i];
        for (size_t j = 0; j < i; ++j)
            cross += BigInt(t.parts[i]) * t.parts[j];
    }
    return {BigInt(d) * k - cross, BigInt(r) * k - squares};
}

} // namespace detail

/// Largest file size a cut of this type permits at the given traffic split.
inline Rational file_size_bound(const CutType& t, int d, int r, const Rational& beta1,
                                const Rational& beta2) {
    for (int p : t.parts)
        if (p < 1 || p > r)
            throw parameter_error("cut type part " + std::to_string(p) + " outside [1, r]");
    auto [a, b] = detail::cut_coefficients(t, d, r);
    return Rational(a) * beta1 + Rational(b) * beta2;
}

struct CutConstraint {
    CutType type;
    Rational beta1_coeff; // a in B <= a*beta1 + b*beta2
    Rational beta2_coeff; // b
};

/// The binding constraints the closed-form proof singles out: type (1,...,1)
/// always; type (k) when k <= r; type (r,...,r,b) with a = floor(k/r) copies
/// of r and remainder b when k > r.
inline std::vector<CutConstraint> special_constraints(int k, int d, int r) {
    if (k < 1 || r < 1)
        throw parameter_error("need k >= 1 and r >= 1");
    if (d < k)
        throw unsupported_regime_error("need d >= k");
    auto make = [&](CutType t) {
        auto [a, b] = detail::cut_coefficients(t, d, r);
        return CutConstraint{std::move(t), Rational(a), Rational(b)};
    };
    std::vector<CutConstraint> out;
    out.push_back(make(CutType{std::vector<int>(size_t(k), 1)}));
    if (k <= r) {
        out.push_back(make(CutType{{k}}));
    } else {
        const int a = k / r;
        const int b = k - r * a;
        std::vector<int> parts(size_t(a), r);
        if (b > 0)
            parts.push_back(b);
        out.push_back(make(CutType{std::move(parts)}));
    }
    return out;
}

struct LpResult {
    Rational beta1, beta2, gamma;
};

/*
 * Minimizes d*beta1 + (r-1)*beta2 over beta1, beta2 >= 0 subject to every
 * cut-type constraint, by exact enumeration of candidate points: pairwise
 * line intersections, axis crossings, and each line's crossing with the ray
 * beta1 = 2*beta2. The ray crossings make the returned optimum canonical
 * when the optimal face is not a single vertex (k = 1 or r = 1); for
 * k, r >= 2 the optimum vertex is unique and lies on the ray anyway.
 */
inline LpResult optimal_tradeoff_lp(const SystemParams& p) {
    p.validate();
    const Rational B(p.B);

    struct Line {
        Rational a, b; // a*beta1 + b*beta2 = B
    };
    std::vector<Line> lines;
    for (const CutType& t : enumerate_cut_types(p.k, p.r)) {
        auto [a, b] = detail::cut_coefficients(t, p.d, p.r);
        lines.push_back({Rational(a), Rational(b)});
    }

    std::vector<std::pair<Rational, Rational>> candidates;
    for (size_t i = 0; i < lines.size(); ++i) {
        for (size_t j = i + 1; j < lines.size(); ++j) {
            const Rational det = lines[i].a * lines[j].b - lines[j].a * lines[i].b;
            if (det == 0)
                continue;
            candidates.emplace_back((B * lines[j].b - B * lines[i].b) / det,
                                    (lines[i].a * B - lines[j].a * B) / det);
        }
        if (lines[i].a != 0)
            candidates.emplace_back(B / lines[i].a, Rational(0));
        if (lines[i].b != 0)
            candidates.emplace_back(Rational(0), B / lines[i].b);
        // crossing with beta1 = 2*beta2
        const Rational denom = 2 * lines[i].a + lines[i].b;
        if (denom != 0)
            candidates.emplace_back(2 * B / denom, B / denom);
    }

    auto feasible = [&](const std::pair<Rational, Rational>& pt) {
        if (pt.first < 0 || pt.second < 0)
            return false;
        for (const Line& l : lines)
            if (l.a * pt.first + l.b * pt.second < B)
                return false;
        return true;
    };

    bool found = false;
    LpResult best;
    bool best_on_ray = false;
    for (const auto& pt : candidates) {
        if (!feasible(pt))
            continue;
        const Rational g = gamma(p.d, p.r, pt.first, pt.second);
        const bool on_ray = pt.first == 2 * pt.second;
        const bool better =
            !found || g < best.gamma ||
            (g == best.gamma && ((on_ray && !best_on_ray) ||
                                 (on_ray == best_on_ray &&
                                  (pt.first < best.beta1 ||
                                   (pt.first == best.beta1 && pt.second < best.beta2)))));
        if (better) {
            best = {pt.first, pt.second, g};
            best_on_ray = on_ray;
            found = true;
        }
    }
    if (!found)
        throw internal_error("LP found no feasible candidate; constraint region should be "
                             "nonempty and upward-closed");
    return best;
}

} // namespace mbcr
