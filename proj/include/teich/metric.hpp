#pragma once

// Distances: Minsky's annular coordinates, the product-regions estimate,
// exact distances and geodesics on the once-punctured torus, Wolpert's lower
// bound, short intervals and the Γ bookkeeping of the lower-bound argument.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "teich/curves.hpp"
#include "teich/flat.hpp"
#include "teich/hyperbolic.hpp"
#include "teich/uniformize.hpp"

namespace teich {

// ---------------------------------------------------------------------------
// Annular coordinates

/// Π_α(σ) = s_α(σ) + i/l_σ(α) in the curve's own upper half-plane.
struct AnnulusCoord {
    Slope curve;
    double s = 0;
    double l = 1;
    cplx point() const { return {s, 1.0 / l}; }
};

/// Coordinate of x in the annulus of a: the twist is measured in the FN
/// chart whose pants curve is a.
inline AnnulusCoord annulus_coord(const FNPoint& x, const Slope& a) {
    const FNPoint y = rebase(x, a);
    return {a, y.twist(), y.length()};
}

struct AnnulusDistance {
    double exact = 0;
    double surrogate = 0;
    /// The surrogate's max exceeds e², where it is meant to be accurate.
    bool coarse_regime = false;
};

/// Half the hyperbolic distance, and the coarse surrogate
/// ½·log max{Δs²·l_a·l_b, l_a/l_b, l_b/l_a}.
inline AnnulusDistance d_annulus(const AnnulusCoord& a, const AnnulusCoord& b) {
    if (!(a.curve == b.curve)) throw std::domain_error("d_annulus: coordinates of different curves");
    AnnulusDistance d;
    d.exact = 0.5 * hyperbolic_distance(a.point(), b.point());
    const double ds = a.s - b.s;
    const double big = std::max({ds * ds * a.l * b.l, a.l / b.l, b.l / a.l});
    d.surrogate = 0.5 * std::log(big);
    d.coarse_regime = big > std::exp(2.0);
    return d;
}

// ---------------------------------------------------------------------------
// Coarse distances

enum class Provenance { Exact, ProductRegions, Proxy };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::Exact: return "exact";
        case Provenance::ProductRegions: return "product_regions";
        case Provenance::Proxy: return "proxy";
    }
    return "?";
}

/// A distance known up to value·[1/mul, mul] ± add.
struct CoarseDistance {
    double value = 0;
    double additive_slack = 0;
    double multiplicative_slack = 1;
    Provenance provenance = Provenance::Exact;

    static CoarseDistance exact(double v) { return {v, 0, 1, Provenance::Exact}; }
};

/// max of two coarse distances; slack and provenance take the worse side.
inline CoarseDistance coarse_max(const CoarseDistance& a, const CoarseDistance& b) {
    CoarseDistance out;
    out.value = std::max(a.value, b.value);
    out.additive_slack = std::max(a.additive_slack, b.additive_slack);
    out.multiplicative_slack = std::max(a.multiplicative_slack, b.multiplicative_slack);
    out.provenance = std::max(a.provenance, b.provenance);
    return out;
}

/// Product-regions estimate on T(1,1). Cutting any curve leaves a thrice
/// punctured sphere, so the cut-surface term is 0 unless G is empty, when it
/// is the distance itself.
inline CoarseDistance product_regions_distance(const FNPoint& x, const FNPoint& y, const std::vector<Slope>& G,
                                               double eps0, double additive_slack) {
    if (G.empty()) return CoarseDistance::exact(exact_distance_T11(x, y));
    CoarseDistance out{0, additive_slack, 1, Provenance::ProductRegions};
    for (const auto& a : G) {
        const double lx = curve_length(x, CurveClass{a}), ly = curve_length(y, CurveClass{a});
        if (!(lx < eps0) || !(ly < eps0))
            throw std::domain_error("product_regions_distance: curve " + to_string(CurveClass{a}) +
                                    " is not short at both points");
        out.value = std::max(out.value, d_annulus(annulus_coord(x, a), annulus_coord(y, a)).exact);
    }
    return out;
}

/// Teichmüller geodesic at time t: the flowed flat surface and its hyperbolic
/// uniformization.
inline std::pair<FlatSurface, FNPoint> geodesic_point_T11(const MeasuredMulticurve& p, const MeasuredMulticurve& m,
                                                          double t) {
    FlatSurface q = flow(build_flat_surface(p, m), t);
    FNPoint x = fn_from_flat(q);
    return {std::move(q), std::move(x)};
}

/// max over probes of ½|log(l_y/l_x)|; a lower bound for d_T(x, y).
inline double wolpert_bound(const FNPoint& x, const FNPoint& y, const std::vector<CurveClass>& probes) {
    double best = 0;
    for (const auto& g : probes)
        best = std::max(best, 0.5 * std::fabs(std::log(curve_length(y, g) / curve_length(x, g))));
    return best;
}

// ---------------------------------------------------------------------------
// Short intervals

/// I_α(ε): the maximal interval around t_α on which α is shorter than ε.
/// Half-lines use ±∞ endpoints.
struct ShortInterval {
    CurveClass curve;
    double epsilon = 0;
    double lo = 0, hi = 0;
    bool empty = true;
    /// Computed from max(D, log K) instead of a hyperbolic length.
    bool proxy = false;
    bool contains(double t) const { return !empty && t > lo && t < hi; }
};

namespace detail {

/// Crossing of f from below eps at `inside` to at least eps, searched in
/// direction dir; ±∞ if none within the horizon.
template <class F>
double interval_end(F&& f, double inside, double dir, double eps, double horizon, double tol) {
    double a = inside, step = 0.25;
    double b = inside + dir * step;
    while (f(b) < eps) {
        a = b;
        step *= 2;
        if (std::fabs(b - inside) > horizon) return dir * std::numeric_limits<double>::infinity();
        b = inside + dir * std::min(std::fabs(b - inside) + step, horizon + 1);
    }
    while (std::fabs(b - a) > tol) {
        const double c = 0.5 * (a + b);
        (f(c) < eps ? a : b) = c;
    }
    return 0.5 * (a + b);
}

template <class F>
ShortInterval interval_around(F&& f, const CurveClass& a, const BalanceTime& ta, double eps, double horizon,
                              double tol) {
    ShortInterval I;
    I.curve = a;
    I.epsilon = eps;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (ta.finite()) {
        if (!(f(ta.value) < eps)) return I;
        I.lo = interval_end(f, ta.value, -1.0, eps, horizon, tol);
        I.hi = interval_end(f, ta.value, +1.0, eps, horizon, tol);
    } else {
        // The curve is short towards the infinite end; find where it stops.
        const double dir = ta.vertical() ? -1.0 : 1.0;
        const double far = dir * horizon;
        if (!(f(far) < eps)) return I;
        const double end = interval_end(f, far, -dir, eps, 2 * horizon, tol);
        I.lo = ta.vertical() ? -inf : end;
        I.hi = ta.vertical() ? end : inf;
    }
    I.empty = false;
    return I;
}

}  // namespace detail

/// I_α(ε) on the punctured torus from the hyperbolic length along G_t.
inline ShortInterval short_interval_T11(const MeasuredMulticurve& p, const MeasuredMulticurve& m, const Slope& a,
                                        double eps, double horizon = 40, double tol = 1e-9) {
    const FlatSurface q0 = build_flat_surface(p, m);
    auto len = [&](double t) { return curve_length(fn_from_flat(flow(q0, t)), CurveClass{a}); };
    return detail::interval_around(len, CurveClass{a}, balance_time(CurveClass{a}, p, m), eps, horizon, tol);
}

/// Proxy I_α(ε) on origami surfaces: l ≈ 1/max(D, log K).
inline ShortInterval short_interval_proxy(const MeasuredMulticurve& p, const MeasuredMulticurve& m,
                                          const CurveClass& a, double eps, double horizon = 20, double tol = 1e-6) {
    const FlatSurface q0 = build_flat_surface(p, m);
    auto len = [&](double t) {
        auto e = short_curve_estimate(q0, a, t, p, m);
        const double inv = std::max(e.D, std::log(std::max(e.K, 1.0)));
        return inv > 0 ? 1.0 / inv : std::numeric_limits<double>::infinity();
    };
    auto I = detail::interval_around(len, a, balance_time(a, p, m), eps, horizon, tol);
    I.proxy = true;
    return I;
}

// ---------------------------------------------------------------------------
// Γ bookkeeping and the trichotomy

enum class TrichotomyCase { K_large, D_first, D_last, None };

inline const char* to_string(TrichotomyCase c) {
    switch (c) {
        case TrichotomyCase::K_large: return "i";
        case TrichotomyCase::D_first: return "ii";
        case TrichotomyCase::D_last: return "iii";
        case TrichotomyCase::None: return "none";
    }
    return "?";
}

struct EstimateSample {
    double t = 0, D = 0, K = 0;
};

struct TrichotomyTag {
    TrichotomyCase kind = TrichotomyCase::None;
    /// Endpoint u of the D-dominated prefix (ii) or suffix (iii).
    double u = 0;
    /// √K_b·e^{−(u−a)} for (ii), √K_a·e^{−(b−u)} for (iii); bounded by a constant.
    double ratio = 0;
};

/// Which case of the trichotomy a sampled interval [a, b] falls in.
inline TrichotomyTag classify_interval(const std::vector<EstimateSample>& s, double M) {
    TrichotomyTag tag;
    if (s.empty()) return tag;
    if (std::all_of(s.begin(), s.end(), [&](const EstimateSample& e) { return e.K > M; })) {
        tag.kind = TrichotomyCase::K_large;
        return tag;
    }
    auto dom = [](const EstimateSample& e) { return e.D >= std::sqrt(e.K); };
    const double a = s.front().t, b = s.back().t;
    if (dom(s.front())) {
        std::size_t k = 0;
        while (k + 1 < s.size() && dom(s[k + 1])) ++k;
        tag.kind = TrichotomyCase::D_first;
        tag.u = s[k].t;
        tag.ratio = std::sqrt(s.back().K) * std::exp(-(tag.u - a));
        return tag;
    }
    if (dom(s.back())) {
        std::size_t k = s.size() - 1;
        while (k > 0 && dom(s[k - 1])) --k;
        tag.kind = TrichotomyCase::D_last;
        tag.u = s[k].t;
        tag.ratio = std::sqrt(s.front().K) * std::exp(-(b - tag.u));
    }
    return tag;
}

struct GammaSplit {
    std::vector<Slope> gamma_a, gamma_b, gamma;
    /// Trichotomy tag per member of gamma, in the same order.
    std::vector<TrichotomyTag> tags;
};

/// Curves shorter than ε′ at G_a only, G_b only, or both; members of Γ are
/// tagged from D and K sampled on [a, b].
inline GammaSplit classify_gamma(const MeasuredMulticurve& p, const MeasuredMulticurve& m, double a, double b,
                                 double eps_prime, double M, double step = 0.1) {
    const FlatSurface q0 = build_flat_surface(p, m);
    const FNPoint xa = fn_from_flat(flow(q0, a)), xb = fn_from_flat(flow(q0, b));
    std::vector<Slope> cand;
    for (const auto& x : {xa, xb})
        for (const auto& s : thick_thin(x, eps_prime))
            if (std::find(cand.begin(), cand.end(), s.curve) == cand.end()) cand.push_back(s.curve);
    GammaSplit out;
    for (const auto& c : cand) {
        const bool sa = curve_length(xa, CurveClass{c}) < eps_prime;
        const bool sb = curve_length(xb, CurveClass{c}) < eps_prime;
        if (sa && sb) {
            out.gamma.push_back(c);
            std::vector<EstimateSample> samples;
            const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
            for (int k = 0; k <= n; ++k) {
                const double t = a + (b - a) * k / n;
                auto e = short_curve_estimate(q0, CurveClass{c}, t, p, m);
                samples.push_back({t, e.D, e.K});
            }
            out.tags.push_back(classify_interval(samples, M));
        } else if (sa) {
            out.gamma_a.push_back(c);
        } else if (sb) {
            out.gamma_b.push_back(c);
        }
    }
    return out;
}

}  // namespace teich
