#pragma once

// Flat-geometry layer: rectangle complexes carrying the quadratic differential
// q_t, the Teichmüller flow, flat cylinders, the expanding-annulus quantity K,
// the short-curve estimate D, and the cut-and-reglue surgery.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "curves.hpp"

namespace teich {

struct Vec2 {
    double x = 0, y = 0;
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double k) const { return {x * k, y * k}; }
    double norm() const { return std::hypot(x, y); }
};
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Holonomy of the homology basis (slope 0, slope ∞) of a marked flat torus at
/// t = 0 and unit scale. Holonomy of (q, p) is q·e1 + p·e2.
struct TorusMarking {
    Vec2 e1, e2;
};

/// Rectangle complex realizing q_t. Dimensions are exact rational bases times
/// exponentials kept in an additive ledger, so the flow is exact:
///   width  = base_width  · e^{ t + log_scale}
///   height = base_height · e^{-t + log_scale}
class FlatSurface {
public:
    FlatSurface() = default;

    FlatSurface(std::shared_ptr<const Origami> o, std::vector<Rational> widths, std::vector<Rational> heights,
                std::optional<TorusMarking> marking = std::nullopt)
        : origami_(std::move(o)), widths_(std::move(widths)), heights_(std::move(heights)),
          marking_(std::move(marking)) {
        if (!origami_) throw std::invalid_argument("flat surface needs an origami");
        const int n = origami_->size();
        if (static_cast<int>(widths_.size()) != n || static_cast<int>(heights_.size()) != n)
            throw std::invalid_argument("one width and one height per square");
        for (int s = 0; s < n; ++s) {
            if (widths_[s] <= Rational(0) || heights_[s] < Rational(0)) throw std::invalid_argument("rectangle dimensions must be positive");
            if (heights_[s] != heights_[origami_->right[s]])
                throw std::invalid_argument("heights must agree across right gluings");
            if (widths_[s] != widths_[origami_->top[s]])
                throw std::invalid_argument("widths must agree across top gluings");
        }
        sig_ = marking_ ? SurfaceSig(1, 1) : origami_->signature();
        if (base_area() <= 0) throw std::invalid_argument("flat surface has zero area");
        log_scale_ = -0.5 * std::log(base_area());
    }

    const Origami& origami() const { return *origami_; }
    const std::shared_ptr<const Origami>& origami_ptr() const { return origami_; }
    const SurfaceSig& surface() const { return sig_; }
    const std::optional<TorusMarking>& marking() const { return marking_; }
    int size() const { return origami_->size(); }
    double t() const { return t_; }
    double log_scale() const { return log_scale_; }
    const std::vector<Rational>& base_widths() const { return widths_; }
    const std::vector<Rational>& base_heights() const { return heights_; }

    double horizontal_factor() const { return std::exp(t_ + log_scale_); }
    double vertical_factor() const { return std::exp(-t_ + log_scale_); }
    double width(int s) const { return to_double(widths_[s]) * horizontal_factor(); }
    double height(int s) const { return to_double(heights_[s]) * vertical_factor(); }

    double base_area() const {
        double a = 0;
        for (int s = 0; s < size(); ++s) a += to_double(widths_[s]) * to_double(heights_[s]);
        return a;
    }
    double area() const { return base_area() * std::exp(2 * log_scale_); }

    /// Holonomy of a slope on a marked torus at the current time.
    Vec2 holonomy(const Slope& c) const {
        if (!marking_) throw std::domain_error("surface carries no torus marking");
        Vec2i h = c.homology();
        Vec2 v = marking_->e1 * static_cast<double>(h.x) + marking_->e2 * static_cast<double>(h.y);
        return {v.x * horizontal_factor(), v.y * vertical_factor()};
    }

    /// Period τ = hol(e2)/hol(e1) of a marked torus.
    std::complex<double> period() const {
        Vec2 a = holonomy(Slope(0, 1)), b = holonomy(Slope::infinity());
        return std::complex<double>(b.x, b.y) / std::complex<double>(a.x, a.y);
    }

    FlatSurface flowed(double dt) const {
        FlatSurface q = *this;
        q.t_ += dt;
        return q;
    }

    /// Copy without the area normalization. Scale-invariant ratios computed
    /// here depend only on the exact base dimensions and t.
    FlatSurface unscaled() const {
        FlatSurface q = *this;
        q.log_scale_ = 0;
        return q;
    }

    /// Copy with new base heights, renormalized to unit area.
    FlatSurface with_heights(std::vector<Rational> heights) const {
        FlatSurface q(origami_, widths_, std::move(heights), marking_);
        q.t_ = t_;
        return q;
    }

    friend bool operator==(const FlatSurface& a, const FlatSurface& b) {
        return *a.origami_ == *b.origami_ && a.widths_ == b.widths_ && a.heights_ == b.heights_ &&
               a.t_ == b.t_ && a.log_scale_ == b.log_scale_;
    }

private:
    std::shared_ptr<const Origami> origami_;
    std::vector<Rational> widths_, heights_;
    std::optional<TorusMarking> marking_;
    SurfaceSig sig_;
    double t_ = 0.0;
    double log_scale_ = 0.0;
};

/// Flow by dt: horizontal lengths scale by e^{dt}, vertical by e^{-dt}.
inline FlatSurface flow(const FlatSurface& q, double dt) { return q.flowed(dt); }

// ---------------------------------------------------------------------------
// Construction from a filling pair

/// Rectangle complex of a filling pair: one rectangle per intersection point,
/// vertical cylinder cores carry p and horizontal ones carry m. Rectangles at a
/// crossing have width w(p) and height w(m) before unit-area normalization.
inline FlatSurface build_flat_surface(const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    if (!fills(p, m)) throw std::domain_error("build_flat_surface: laminations do not fill");
    if (p.origami()) {
        // On an origami the filling pair is vertical and horizontal cores.
        const auto& o = *p.origami();
        const auto rows = o.rows();
        const auto cols = o.columns();
        std::vector<Rational> w(o.size(), Rational(0)), h(o.size(), Rational(0));
        for (const auto& c : p.components()) {
            const auto& oc = std::get<OrigamiCurve>(c.curve);
            if (oc.kind != OrigamiCurve::Kind::VerticalCore)
                throw std::domain_error("vertical lamination must consist of vertical cores");
            for (int s : cols[oc.index]) w[s] = c.weight;
        }
        for (const auto& c : m.components()) {
            const auto& oc = std::get<OrigamiCurve>(c.curve);
            if (oc.kind != OrigamiCurve::Kind::HorizontalCore)
                throw std::domain_error("horizontal lamination must consist of horizontal cores");
            for (int s : rows[oc.index]) h[s] = c.weight;
        }
        return FlatSurface(p.origami(), w, h);
    }
    const Slope a = p.torus_slope(), b = m.torus_slope();
    const Rational wp = p.torus_weight(), wm = m.torus_weight();
    const Vec2i ha = a.homology(), hb = b.homology();
    const std::int64_t n = std::llabs(cross(ha, hb));
    // hol(γ) = (w⁺ <γ,a>, σ w⁻ <γ,b>) with σ fixing the orientation.
    auto hol = [&](const Vec2i& g, double sigma) {
        return Vec2{to_double(wp) * static_cast<double>(cross(g, ha)),
                    sigma * to_double(wm) * static_cast<double>(cross(g, hb))};
    };
    double sigma = cross(hol({1, 0}, 1.0), hol({0, 1}, 1.0)) > 0 ? 1.0 : -1.0;
    TorusMarking mk{hol({1, 0}, sigma), hol({0, 1}, sigma)};
    // Column of n rectangles; a curve γ with <γ,a> = 1 gives the right-gluing shift.
    auto [s0, t0] = bezout(ha.x, ha.y);
    Vec2i g{-t0, s0};  // cross(g, ha) = -t0*ha.y - s0*ha.x ... fix sign below
    if (cross(g, ha) != 1) g = g * -1;
    if (cross(g, ha) != 1) throw std::logic_error("no dual curve for the vertical slope");
    const Vec2 hg = hol(g, sigma);
    // hol(g) = (w⁺, k·w⁻) and the vertical period is ±n·w⁻.
    const auto k = static_cast<std::int64_t>(std::llround(hg.y / to_double(wm)));
    std::vector<int> right(n), top(n);
    for (std::int64_t j = 0; j < n; ++j) {
        top[j] = static_cast<int>((j + 1) % n);
        right[j] = static_cast<int>((((j - k) % n) + n) % n);
    }
    auto o = std::make_shared<const Origami>(right, top);
    return FlatSurface(o, std::vector<Rational>(n, wp), std::vector<Rational>(n, wm), mk);
}

/// Unit square torus: p = slope 0 vertical, m = slope ∞ horizontal.
inline FlatSurface unit_square_torus() {
    return build_flat_surface(MeasuredMulticurve::slope(Slope(0, 1)), MeasuredMulticurve::slope(Slope::infinity()));
}

/// Origami with unit squares, normalized to area 1.
inline FlatSurface square_tiled(std::vector<int> right, std::vector<int> top) {
    auto o = std::make_shared<const Origami>(std::move(right), std::move(top));
    return FlatSurface(o, std::vector<Rational>(o->size(), Rational(1)), std::vector<Rational>(o->size(), Rational(1)));
}

/// Genus-2 L-shaped origami: squares 0,1 in a row, square 2 on top of square 0.
inline FlatSurface l_origami() { return square_tiled({1, 0, 2}, {2, 1, 0}); }

/// The filling pair realized by an origami's cylinder decomposition: vertical
/// cores weighted by column width, horizontal cores by row height.
inline std::pair<MeasuredMulticurve, MeasuredMulticurve> cylinder_laminations(const FlatSurface& q) {
    const auto& o = q.origami();
    std::vector<MulticurveComponent> pv, mh;
    auto cols = o.columns(), rows = o.rows();
    for (std::size_t c = 0; c < cols.size(); ++c)
        pv.push_back({CurveClass{OrigamiCurve{OrigamiCurve::Kind::VerticalCore, static_cast<int>(c), {}}},
                      q.base_widths()[cols[c][0]]});
    for (std::size_t r = 0; r < rows.size(); ++r) {
        Rational h = q.base_heights()[rows[r][0]];
        if (h > Rational(0))
            mh.push_back({CurveClass{OrigamiCurve{OrigamiCurve::Kind::HorizontalCore, static_cast<int>(r), {}}}, h});
    }
    return {MeasuredMulticurve::on_origami(q.origami_ptr(), pv), MeasuredMulticurve::on_origami(q.origami_ptr(), mh)};
}

// ---------------------------------------------------------------------------
// Developed corridors and geodesic length of edge words

namespace detail {

struct Portal {
    Vec2 left, right;
};

/// Portals crossed by `reps` repetitions of a closed word, in developed
/// coordinates starting from the lower-left corner of the start square.
inline std::vector<Portal> develop_word(const FlatSurface& q, const OrigamiCurve& c, int reps, Vec2& holonomy) {
    const auto& o = q.origami();
    auto l = o.left(), b = o.bottom();
    std::vector<Portal> portals;
    int s = c.index;
    Vec2 pos{0, 0};
    for (int r = 0; r < reps; ++r) {
        for (char ch : c.word) {
            const double w = q.width(s), h = q.height(s);
            switch (ch) {
                case 'r':
                    portals.push_back({{pos.x + w, pos.y + h}, {pos.x + w, pos.y}});
                    pos.x += w;
                    s = o.right[s];
                    break;
                case 'u':
                    portals.push_back({{pos.x, pos.y + h}, {pos.x + w, pos.y + h}});
                    pos.y += h;
                    s = o.top[s];
                    break;
                case 'l':
                    portals.push_back({{pos.x, pos.y}, {pos.x, pos.y + h}});
                    s = l[s];
                    pos.x -= q.width(s);
                    break;
                case 'd':
                    portals.push_back({{pos.x + w, pos.y}, {pos.x, pos.y}});
                    s = b[s];
                    pos.y -= q.height(s);
                    break;
                default: throw std::domain_error("bad edge-word letter");
            }
        }
        if (r == 0) holonomy = pos;
    }
    return portals;
}

/// Shortest path through a sequence of portals (string pulling).
inline double funnel_length(const Vec2& start, const Vec2& goal, const std::vector<Portal>& portals, std::size_t first,
                            std::size_t last) {
    std::vector<Portal> seq(portals.begin() + static_cast<std::ptrdiff_t>(first),
                            portals.begin() + static_cast<std::ptrdiff_t>(last));
    seq.push_back({goal, goal});
    auto tri = [](const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); };
    auto same = [](const Vec2& a, const Vec2& b) { return std::fabs(a.x - b.x) + std::fabs(a.y - b.y) < 1e-14; };
    double length = 0;
    Vec2 apex = start, pl = start, pr = start;
    std::size_t il = 0, ir = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const Vec2& L = seq[i].left;
        const Vec2& R = seq[i].right;
        if (tri(apex, pr, R) >= 0) {
            if (same(apex, pr) || tri(apex, pl, R) < 0) {
                pr = R;
                ir = i;
            } else {
                length += (pl - apex).norm();
                apex = pl;
                i = il;
                pl = pr = apex;
                il = ir = i;
                continue;
            }
        }
        if (tri(apex, pl, L) <= 0) {
            if (same(apex, pl) || tri(apex, pr, L) > 0) {
                pl = L;
                il = i;
            } else {
                length += (pr - apex).norm();
                apex = pr;
                i = ir;
                pl = pr = apex;
                il = ir = i;
                continue;
            }
        }
    }
    return length + (goal - apex).norm();
}

struct WordGeodesic {
    double length = 0;
    double cross_section = 0;  // width of the family of closed geodesics (cylinder height)
};

/// Closed geodesic in the class of an edge word: minimize over the crossing
/// point P on a portal the corridor distance from P to P + holonomy. The
/// distance is convex in P, so a golden-section search finds the minimum and
/// the flat bottom of the minimum measures the cylinder height.
inline WordGeodesic word_geodesic(const FlatSurface& q, const OrigamiCurve& c) {
    Vec2 hol;
    const std::size_t n = c.word.size();
    auto portals = develop_word(q, c, 3, hol);
    if (hol.norm() == 0) throw std::domain_error("edge word has trivial holonomy");
    // Base the search on the portal most transverse to the holonomy.
    std::size_t j = 0;
    double best_sin = -1;
    for (std::size_t k = 0; k < n; ++k) {
        Vec2 d = portals[k].left - portals[k].right;
        double sn = std::fabs(cross(d, hol)) / d.norm();
        if (sn > best_sin + 1e-12) { best_sin = sn; j = k; }
    }
    const Portal base = portals[n + j];
    auto point = [&](double u) { return base.right + (base.left - base.right) * u; };
    auto f = [&](double u) {
        Vec2 p = point(u);
        return funnel_length(p, p + hol, portals, n + j + 1, 2 * n + j);
    };
    double lo = 0, hi = 1;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        if (f1 <= f2) { hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = f(x1); }
        else { lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = f(x2); }
    }
    double umin = 0.5 * (lo + hi);
    double fmin = std::min({f(umin), f(0.0), f(1.0)});
    if (f(0.0) == fmin) umin = 0;
    if (f(1.0) == fmin) umin = 1;
    // Extent of the flat bottom on either side.
    const double tol = 1e-11 * std::max(1.0, fmin);
    auto edge = [&](double inside, double outside) {
        if (f(outside) <= fmin + tol) return outside;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (inside + outside);
            (f(mid) <= fmin + tol ? inside : outside) = mid;
        }
        return inside;
    };
    double ua = edge(umin, 0.0), ub = edge(umin, 1.0);
    Vec2 dir = base.left - base.right;
    double sin_angle = std::fabs(cross(dir, hol)) / (dir.norm() * hol.norm());
    double section = (ub - ua) * dir.norm() * sin_angle;
    if (section < 1e-9 * hol.norm()) section = 0;
    return {fmin, section};
}

inline const OrigamiCurve& origami_curve(const CurveClass& c) {
    if (auto* oc = std::get_if<OrigamiCurve>(&c)) return *oc;
    throw std::domain_error("curve " + to_string(c) + " is not an origami curve");
}

}  // namespace detail

/// Length of the q-geodesic representative of a.
inline double q_length(const FlatSurface& q, const CurveClass& a) {
    if (q.marking()) return q.holonomy(as_slope(a)).norm();
    const auto& oc = detail::origami_curve(a);
    const auto& o = q.origami();
    using K = OrigamiCurve::Kind;
    if (oc.kind == K::HorizontalCore) {
        auto rows = o.rows();
        if (oc.index < 0 || oc.index >= static_cast<int>(rows.size())) throw std::domain_error("no such cylinder");
        double len = 0;
        for (int s : rows[oc.index]) len += q.width(s);
        return len;
    }
    if (oc.kind == K::VerticalCore) {
        auto cols = o.columns();
        if (oc.index < 0 || oc.index >= static_cast<int>(cols.size())) throw std::domain_error("no such cylinder");
        double len = 0;
        for (int s : cols[oc.index]) len += q.height(s);
        return len;
    }
    detail::check_word_closes(o, oc);
    return detail::word_geodesic(q, oc).length;
}

// ---------------------------------------------------------------------------
// Flat and expanding annuli

struct FlatAnnulus {
    enum class Kind { Flat, Expanding };
    Kind kind = Kind::Flat;
    CurveClass core;
    double circumference = 0;
    double height = 0;                 // flat case
    double inner_boundary_length = 0;  // expanding case
    double escape_distance = 0;        // expanding case
    double modulus = 0;
    bool degenerate() const { return kind == Kind::Flat && height == 0; }
};

/// Maximal flat cylinder F(a); degenerate (modulus 0) when the geodesic is unique.
inline FlatAnnulus flat_cylinder(const FlatSurface& q, const CurveClass& a) {
    FlatAnnulus f;
    f.core = a;
    if (q.marking()) {
        // The whole punctured torus is one cylinder around any slope.
        f.circumference = q.holonomy(as_slope(a)).norm();
        f.height = q.area() / f.circumference;
    } else {
        const auto& oc = detail::origami_curve(a);
        const auto& o = q.origami();
        using K = OrigamiCurve::Kind;
        if (oc.kind == K::Word) {
            detail::check_word_closes(o, oc);
            auto g = detail::word_geodesic(q, oc);
            f.circumference = g.length;
            f.height = g.cross_section;
        } else {
            f.circumference = q_length(q, a);
            int s = oc.kind == K::HorizontalCore ? o.rows()[oc.index][0] : o.columns()[oc.index][0];
            f.height = oc.kind == K::HorizontalCore ? q.height(s) : q.width(s);
        }
    }
    f.modulus = f.height / f.circumference;
    return f;
}

namespace detail {

/// Shortest lattice vector not parallel to v (shortest saddle connection
/// crossing the cylinder of v on a marked torus).
inline double shortest_crossing(const FlatSurface& q, const Slope& a) {
    auto basis = TorusBasis::adapted_to(a);
    Vec2 va = q.holonomy(Slope::from_homology(basis.a));
    // Orientation of from_homology may flip; only lengths matter here.
    Vec2 hb_int = q.holonomy(Slope::from_homology(basis.b));
    Vec2i bh = basis.b;
    Vec2i norm_b = Slope::from_homology(bh).homology();
    if (!(norm_b == bh)) hb_int = hb_int * -1.0;
    Vec2i norm_a = Slope::from_homology(basis.a).homology();
    if (!(norm_a == basis.a)) va = va * -1.0;
    const double height = std::fabs(cross(va, hb_int)) / va.norm();
    double best = std::numeric_limits<double>::infinity();
    for (int k = 1; k * height < best; ++k) {
        Vec2 w = hb_int * static_cast<double>(k);
        double m0 = -dot(w, va) / dot(va, va);
        for (double m : {std::floor(m0), std::ceil(m0)}) best = std::min(best, (w + va * m).norm());
    }
    return best;
}

/// Vertical (or horizontal) escape lengths from one side of a row (column):
/// walk across the neighbouring cylinders until the walk re-enters the row.
inline double escape_length(const FlatSurface& q, const std::vector<int>& cyl, bool horizontal_core, bool upward) {
    const auto& o = q.origami();
    auto next = horizontal_core ? (upward ? o.top : o.bottom()) : (upward ? o.right : o.left());
    std::vector<char> in(o.size(), 0);
    for (int s : cyl) in[s] = 1;
    double best = std::numeric_limits<double>::infinity();
    for (int s : cyl) {
        double len = 0;
        int c = next[s];
        int steps = 0;
        bool escaped = false;
        while (!in[c] && steps++ <= o.size()) {
            len += horizontal_core ? q.height(c) : q.width(c);
            escaped = true;
            c = next[c];
        }
        if (escaped) best = std::min(best, len);
    }
    return best;
}

}  // namespace detail

/// K = d / l(∂0): half the shortest essential return arc from the flat
/// cylinder to itself over the cylinder's circumference, taking the side of
/// larger modulus. When the cylinder fills the surface the return arc crosses it.
inline double expanding_K(const FlatSurface& scaled, const CurveClass& a) {
    const FlatSurface q = scaled.unscaled();
    if (q.marking()) {
        const auto& s = as_slope(a);
        return 0.5 * detail::shortest_crossing(q, s) / q.holonomy(s).norm();
    }
    const auto& oc = detail::origami_curve(a);
    if (oc.kind == OrigamiCurve::Kind::Word)
        throw std::domain_error("expanding_K is implemented for cylinder cores");
    const auto& o = q.origami();
    const bool horiz = oc.kind == OrigamiCurve::Kind::HorizontalCore;
    const auto cyl = horiz ? o.rows()[oc.index] : o.columns()[oc.index];
    const double circ = q_length(q, a);
    double up = detail::escape_length(q, cyl, horiz, true);
    double down = detail::escape_length(q, cyl, horiz, false);
    if (!std::isfinite(up) && !std::isfinite(down)) {
        // Cylinder fills the surface; the perpendicular crossing is a saddle connection.
        double cross_len = horiz ? q.height(cyl[0]) : q.width(cyl[0]);
        return 0.5 * cross_len / circ;
    }
    double d = 0.5 * std::max(std::isfinite(up) ? up : 0.0, std::isfinite(down) ? down : 0.0);
    return d / circ;
}

/// Expanding annulus record for a cylinder core (modulus via log(d / l(∂0))).
inline FlatAnnulus expanding_annulus(const FlatSurface& q, const CurveClass& a) {
    FlatAnnulus e;
    e.kind = FlatAnnulus::Kind::Expanding;
    e.core = a;
    e.circumference = q_length(q, a);
    e.inner_boundary_length = e.circumference;
    e.escape_distance = expanding_K(q, a) * e.circumference;
    e.modulus = std::max(0.0, std::log(e.escape_distance / e.inner_boundary_length));
    return e;
}

// ---------------------------------------------------------------------------
// Short-curve estimate D

struct ShortCurveEstimate {
    CurveClass curve;
    double t = 0;
    double D = 0;
    double K = 0;
    BalanceTime t_alpha;
};

/// D_t(a) = e^{-2|t - t_a|} d_a(ν⁺, ν⁻), or e^{∓2t} Mod F_0(a) when a is
/// vertical / horizontal. `q0` is the flat surface of the pair at t = 0.
inline double estimate_D(const FlatSurface& q0, const CurveClass& a, double t, const MeasuredMulticurve& p,
                         const MeasuredMulticurve& m) {
    BalanceTime ta = balance_time(a, p, m);
    if (ta.finite()) return std::exp(-2 * std::fabs(t - ta.value)) * relative_twist(p, m, a);
    const double mod0 = flat_cylinder(flow(q0, -q0.t()), a).modulus;
    return ta.vertical() ? std::exp(-2 * t) * mod0 : std::exp(2 * t) * mod0;
}

inline double estimate_D(const CurveClass& a, double t, const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    return estimate_D(build_flat_surface(p, m), a, t, p, m);
}

inline ShortCurveEstimate short_curve_estimate(const FlatSurface& q0, const CurveClass& a, double t,
                                               const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    ShortCurveEstimate e;
    e.curve = a;
    e.t = t;
    e.t_alpha = balance_time(a, p, m);
    e.D = estimate_D(q0, a, t, p, m);
    e.K = expanding_K(flow(q0, t - q0.t()), a);
    return e;
}

// ---------------------------------------------------------------------------
// Cut and reglue

/// Removes the maximal flat cylinder around a cylinder core and glues its two
/// boundary components by the perpendicular isometry. The deleted rows keep
/// their combinatorics with height zero, so the marking and the gluing curve
/// survive; the area is renormalized to 1.
inline FlatSurface cut_and_reglue(const FlatSurface& q, const CurveClass& a) {
    if (q.marking()) throw std::domain_error("cut_and_reglue: the cylinder fills the punctured torus");
    const auto& oc = detail::origami_curve(a);
    if (oc.kind == OrigamiCurve::Kind::Word)
        throw std::domain_error("cut_and_reglue is implemented for cylinder cores");
    if (flat_cylinder(q, a).degenerate()) throw std::domain_error("cut_and_reglue: degenerate cylinder");
    const auto& o = q.origami();
    const bool horiz = oc.kind == OrigamiCurve::Kind::HorizontalCore;
    const auto cyl = horiz ? o.rows()[oc.index] : o.columns()[oc.index];
    if (static_cast<int>(cyl.size()) == o.size()) throw std::domain_error("cut_and_reglue: the cylinder fills the surface");
    if (!horiz) throw std::domain_error("cut_and_reglue along vertical cores: transpose the origami first");
    auto h = q.base_heights();
    for (int s : cyl) h[s] = Rational(0);
    return q.with_heights(std::move(h));
}

/// Drops zero-height rectangles, routing top gluings through them.
inline FlatSurface collapse_degenerate(const FlatSurface& q) {
    const auto& o = q.origami();
    std::vector<int> keep, index(o.size(), -1);
    for (int s = 0; s < o.size(); ++s)
        if (q.base_heights()[s] > Rational(0)) { index[s] = static_cast<int>(keep.size()); keep.push_back(s); }
    std::vector<int> right(keep.size()), top(keep.size());
    std::vector<Rational> w, h;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        int s = keep[i];
        right[i] = index[o.right[s]];
        int c = o.top[s];
        while (index[c] < 0) c = o.top[c];
        top[i] = index[c];
        w.push_back(q.base_widths()[s]);
        h.push_back(q.base_heights()[s]);
    }
    auto no = std::make_shared<const Origami>(right, top);
    return FlatSurface(no, w, h).flowed(q.t());
}

/// Labeled isometry test: same gluing data after canonical relabeling and
/// rectangle dimensions within `tol`.
inline bool isometric(const FlatSurface& a, const FlatSurface& b, double tol = 1e-12) {
    if (a.size() != b.size()) return false;
    const int n = a.size();
    auto canonical = [](const FlatSurface& q, int start) {
        const auto& o = q.origami();
        std::vector<int> label(o.size(), -1), order;
        label[start] = 0;
        order.push_back(start);
        for (std::size_t i = 0; i < order.size(); ++i) {
            int s = order[i];
            for (int nb : {o.right[s], o.top[s]}) {
                if (label[nb] < 0) { label[nb] = static_cast<int>(order.size()); order.push_back(nb); }
            }
        }
        return std::make_pair(label, order);
    };
    auto [la, oa] = canonical(a, 0);
    if (static_cast<int>(oa.size()) != n) return false;
    for (int start = 0; start < n; ++start) {
        auto [lb, ob] = canonical(b, start);
        if (static_cast<int>(ob.size()) != n) continue;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            int sa = oa[i], sb = ob[i];
            ok = la[a.origami().right[sa]] == lb[b.origami().right[sb]] &&
                 la[a.origami().top[sa]] == lb[b.origami().top[sb]] &&
                 std::fabs(a.width(sa) - b.width(sb)) <= tol && std::fabs(a.height(sa) - b.height(sb)) <= tol;
        }
        if (ok) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Saddle connections

struct SaddleConnection {
    int start_square = 0;   // square whose lower-left (or lower-right) corner starts it
    bool from_lower_right = false;
    Vec2 holonomy;
    std::vector<int> squares;  // squares traversed
    double length() const { return holonomy.norm(); }
};

/// Saddle connections with holonomy in the upper half plane (direction in
/// [0, π)) and length at most `cap`, one per (start corner, direction).
inline std::vector<SaddleConnection> saddle_connections(const FlatSurface& q, double cap) {
    const auto& o = q.origami();
    auto l = o.left();
    std::vector<SaddleConnection> out;
    // Walk a ray from a corner; dir.x >= 0 uses lower-left corners, dir.x < 0 lower-right.
    auto walk = [&](int s0, bool lr, Vec2 dir) -> std::optional<SaddleConnection> {
        SaddleConnection sc{s0, lr, {}, {s0}};
        int s = s0;
        // Position relative to the current square's lower-left corner.
        Vec2 pos{lr ? q.width(s0) : 0.0, 0.0};
        double travelled = 0;
        for (int steps = 0; steps < 100000; ++steps) {
            const double w = q.width(s), h = q.height(s);
            double tx = dir.x > 0 ? (w - pos.x) / dir.x : dir.x < 0 ? -pos.x / dir.x : INFINITY;
            double ty = dir.y > 0 ? (h - pos.y) / dir.y : INFINITY;
            double tt = std::min(tx, ty);
            travelled += tt;
            if (travelled > cap * (1 + 1e-12)) return std::nullopt;
            const double eps = 1e-12 * std::max(1.0, travelled);
            bool hit_x = std::fabs(tx - tt) <= eps, hit_y = std::fabs(ty - tt) <= eps;
            // Rays along an edge meet a corner at every crossing.
            if ((hit_x && dir.y == 0) || (hit_y && dir.x == 0) || (hit_x && hit_y)) {
                sc.holonomy = dir * travelled;
                return sc;
            }
            pos = pos + dir * tt;
            if (hit_x) {
                if (dir.x > 0) { s = o.right[s]; pos.x = 0; }
                else { s = l[s]; pos.x = q.width(s); }
            } else {
                s = o.top[s];
                pos.y = 0;
            }
            if (q.height(s) == 0) return std::nullopt;
            sc.squares.push_back(s);
        }
        return std::nullopt;
    };
    for (int s0 = 0; s0 < o.size(); ++s0) {
        if (q.height(s0) == 0) continue;
        for (bool lr : {false, true}) {
            // Candidate directions: developed corners reachable by monotone walks.
            std::vector<Vec2> targets;
            struct Node { int s; Vec2 origin; };
            std::vector<Node> stack{{s0, {lr ? -q.width(s0) : 0.0, 0.0}}};
            std::map<std::pair<long long, long long>, int> seen;
            while (!stack.empty()) {
                auto [s, org] = stack.back();
                stack.pop_back();
                if (q.height(s) == 0) continue;
                const double w = q.width(s), h = q.height(s);
                for (Vec2 c : {Vec2{org.x, org.y + h}, Vec2{org.x + w, org.y + h}, Vec2{org.x + w, org.y},
                               Vec2{org.x, org.y}}) {
                    if (c.norm() <= cap && c.norm() > 1e-12 && c.y >= 0 && (lr ? c.x < 0 : c.x >= 0) &&
                        !(c.y == 0 && lr))
                        targets.push_back(c);
                }
                std::vector<std::pair<int, Vec2>> nexts{{o.top[s], {org.x, org.y + h}}};
                if (lr) nexts.push_back({l[s], {org.x - q.width(l[s]), org.y}});
                else nexts.push_back({o.right[s], {org.x + w, org.y}});
                for (auto& [ns, no] : nexts) {
                    // Reachable region: within cap of the start corner.
                    double dx = std::max({0.0, lr ? -(no.x + q.width(ns)) : no.x});
                    if (std::hypot(dx, no.y) > cap) continue;
                    auto key = std::make_pair(std::llround(no.x * 1e9) * 1000003 + ns, std::llround(no.y * 1e9));
                    if (seen.count(key)) continue;
                    seen[key] = 1;
                    stack.push_back({ns, no});
                }
            }
            std::vector<Vec2> dirs;
            for (auto& c : targets) {
                Vec2 d = c * (1.0 / c.norm());
                bool dup = false;
                for (auto& e : dirs) dup = dup || (std::fabs(e.x - d.x) < 1e-12 && std::fabs(e.y - d.y) < 1e-12);
                if (!dup) dirs.push_back(d);
            }
            for (auto& d : dirs) {
                if (auto sc = walk(s0, lr, d)) out.push_back(*sc);
            }
        }
    }
    return out;
}

}  // namespace teich
