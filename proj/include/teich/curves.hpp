#pragma once

// Topological layer: surfaces, simple closed curves, weighted multicurves,
// intersection numbers, Dehn twists, relative twists and balance times.
//
// Two families of surfaces are supported. The once-punctured torus, where a
// curve is a slope p/q, and square-tiled surfaces (origamis), where curves
// are cylinder cores or closed edge words in the square-gluing graph.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/rational.hpp>

namespace teich {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

/// Parses "n", "n/d" or a finite decimal "x.yz" exactly.
inline Rational parse_rational(const std::string& text) {
    auto integer = [&](const std::string& part) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || part.empty())
            throw std::invalid_argument("malformed rational literal '" + text + "'");
        return v;
    };
    try {
        if (auto slash = text.find('/'); slash != std::string::npos)
            return Rational(integer(text.substr(0, slash)), integer(text.substr(slash + 1)));
        if (auto dot = text.find('.'); dot != std::string::npos) {
            std::string frac = text.substr(dot + 1);
            if (frac.size() > 15) throw std::invalid_argument("too many decimals in '" + text + "'");
            std::int64_t den = 1;
            for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
            std::string whole = text.substr(0, dot);
            bool neg = !whole.empty() && whole[0] == '-';
            std::int64_t w = whole.empty() || whole == "-" ? 0 : integer(whole);
            std::int64_t f = frac.empty() ? 0 : integer(frac);
            Rational r(std::llabs(w) * den + f, den);
            return neg ? -r : r;
        }
        return Rational(integer(text));
    } catch (const boost::bad_rational&) {
        throw std::invalid_argument("zero denominator in '" + text + "'");
    }
}

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r.numerator() << '/' << r.denominator();
    return os.str();
}

/// Best rational approximation with bounded denominator (Stern-Brocot walk).
inline Rational approximate_rational(double x, std::int64_t max_den = 1000000) {
    if (!std::isfinite(x)) throw std::domain_error("cannot approximate a non-finite weight");
    const bool neg = x < 0;
    x = std::fabs(x);
    std::int64_t a = static_cast<std::int64_t>(std::floor(x));
    std::int64_t p0 = 1, q0 = 0, p1 = a, q1 = 1;
    double frac = x - static_cast<double>(a);
    while (frac > 1e-15) {
        double inv = 1.0 / frac;
        std::int64_t ai = static_cast<std::int64_t>(std::floor(inv));
        std::int64_t q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        std::int64_t p2 = ai * p1 + p0;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        frac = inv - static_cast<double>(ai);
    }
    return Rational(neg ? -p1 : p1, q1);
}

// ---------------------------------------------------------------------------
// Surfaces

struct SurfaceSig {
    int genus = 1;
    int punctures = 1;

    SurfaceSig() = default;
    SurfaceSig(int g, int p) : genus(g), punctures(p) {
        if (g < 0 || p < 0) throw std::invalid_argument("surface signature must be nonnegative");
        if (complexity() < 1) throw std::invalid_argument("surface has no essential curves");
    }

    int complexity() const { return 3 * genus - 3 + punctures; }
    bool is_punctured_torus() const { return genus == 1 && punctures == 1; }
    friend bool operator==(const SurfaceSig&, const SurfaceSig&) = default;
};

/// Square-gluing combinatorics. Square `right[i]` is glued to the right edge
/// of square i and `top[i]` to its top edge.
struct Origami {
    std::vector<int> right;
    std::vector<int> top;

    Origami() = default;
    Origami(std::vector<int> r, std::vector<int> t) : right(std::move(r)), top(std::move(t)) {
        validate();
    }

    int size() const { return static_cast<int>(right.size()); }

    void validate() const {
        const int n = size();
        if (n == 0 || static_cast<int>(top.size()) != n)
            throw std::invalid_argument("origami needs two permutations of equal nonzero length");
        for (const auto* perm : {&right, &top}) {
            std::vector<char> seen(n, 0);
            for (int v : *perm) {
                if (v < 0 || v >= n || seen[v]) throw std::invalid_argument("origami gluing is not a permutation");
                seen[v] = 1;
            }
        }
        if (!connected()) throw std::invalid_argument("origami is not connected");
    }

    static std::vector<int> inverse(const std::vector<int>& p) {
        std::vector<int> inv(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
        return inv;
    }
    std::vector<int> left() const { return inverse(right); }
    std::vector<int> bottom() const { return inverse(top); }

    bool connected() const {
        const int n = size();
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        auto l = left(), b = bottom();
        int count = 1;
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            for (int nb : {right[s], top[s], l[s], b[s]}) {
                if (!seen[nb]) { seen[nb] = 1; ++count; stack.push_back(nb); }
            }
        }
        return count == n;
    }

    static std::vector<std::vector<int>> cycles(const std::vector<int>& perm) {
        std::vector<std::vector<int>> out;
        std::vector<char> seen(perm.size(), 0);
        for (std::size_t s = 0; s < perm.size(); ++s) {
            if (seen[s]) continue;
            std::vector<int> cyc;
            for (int c = static_cast<int>(s); !seen[c]; c = perm[c]) { seen[c] = 1; cyc.push_back(c); }
            out.push_back(std::move(cyc));
        }
        return out;
    }

    /// Horizontal cylinders: every corner is a marked point, so each cycle of
    /// `right` bounds its own cylinder.
    std::vector<std::vector<int>> rows() const { return cycles(right); }
    std::vector<std::vector<int>> columns() const { return cycles(top); }

    /// Cone angles (in units of 2π) of the corner points. The lower-left corner
    /// of square s is followed counterclockwise by walking the commutator.
    std::vector<int> vertex_angles() const {
        // The commutator r t r^{-1} t^{-1} permutes the squares sharing a lower-left corner.
        const int n = size();
        auto l = left(), b = bottom();
        std::vector<int> comm(n);
        for (int s = 0; s < n; ++s) comm[s] = right[top[l[b[s]]]];
        std::vector<int> angles;
        for (const auto& c : cycles(comm)) angles.push_back(static_cast<int>(c.size()));
        return angles;
    }

    SurfaceSig signature() const {
        auto angles = vertex_angles();
        const int v = static_cast<int>(angles.size());
        const int euler = v - size();  // V - E + F with E = 2n, F = n
        const int genus = (2 - euler) / 2;
        const int regular = static_cast<int>(std::count(angles.begin(), angles.end(), 1));
        return SurfaceSig(genus, regular);
    }

    friend bool operator==(const Origami&, const Origami&) = default;
};

// ---------------------------------------------------------------------------
// Curves

/// Integer homology vector on the torus; slope p/q corresponds to (q, p).
struct Vec2i {
    std::int64_t x = 0, y = 0;
    friend bool operator==(const Vec2i&, const Vec2i&) = default;
    Vec2i operator+(const Vec2i& o) const { return {x + o.x, y + o.y}; }
    Vec2i operator-(const Vec2i& o) const { return {x - o.x, y - o.y}; }
    Vec2i operator*(std::int64_t k) const { return {x * k, y * k}; }
};

/// Algebraic intersection <u, v>.
inline std::int64_t cross(const Vec2i& u, const Vec2i& v) { return u.x * v.y - u.y * v.x; }

/// Slope p/q of a simple closed curve on the once-punctured torus, reduced with
/// q >= 0 and ∞ encoded as 1/0.
struct Slope {
    std::int64_t p = 0, q = 1;

    Slope() = default;
    Slope(std::int64_t num, std::int64_t den) : p(num), q(den) {
        if (p == 0 && q == 0) throw std::domain_error("0/0 is not a slope");
        std::int64_t g = std::gcd(p, q);
        p /= g;
        q /= g;
        if (q < 0 || (q == 0 && p < 0)) { p = -p; q = -q; }
    }
    static Slope from_homology(const Vec2i& v) { return Slope(v.y, v.x); }
    static Slope infinity() { return Slope(1, 0); }

    Vec2i homology() const { return {q, p}; }
    bool is_infinite() const { return q == 0; }
    std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }

    friend bool operator==(const Slope&, const Slope&) = default;
    friend auto operator<=>(const Slope&, const Slope&) = default;
};

/// A curve on an origami: a horizontal or vertical cylinder core, or a closed
/// walk given by letters r/l/u/d from a starting square.
struct OrigamiCurve {
    enum class Kind { HorizontalCore, VerticalCore, Word };
    Kind kind = Kind::HorizontalCore;
    int index = 0;       // cylinder index, or starting square for words
    std::string word;    // only for Kind::Word

    friend bool operator==(const OrigamiCurve&, const OrigamiCurve&) = default;
    friend auto operator<=>(const OrigamiCurve&, const OrigamiCurve&) = default;

    std::string str() const {
        switch (kind) {
            case Kind::HorizontalCore: return "h" + std::to_string(index);
            case Kind::VerticalCore: return "v" + std::to_string(index);
            default: return "s" + std::to_string(index) + ":" + word;
        }
    }
};

using CurveClass = std::variant<Slope, OrigamiCurve>;

inline std::string to_string(const CurveClass& c) {
    return std::visit([](const auto& v) { return v.str(); }, c);
}

inline const Slope& as_slope(const CurveClass& c) {
    if (auto* s = std::get_if<Slope>(&c)) return *s;
    throw std::domain_error("curve " + to_string(c) + " is not a torus slope");
}

namespace detail {

inline void check_word_closes(const Origami& o, const OrigamiCurve& c) {
    if (c.kind != OrigamiCurve::Kind::Word) return;
    if (c.word.empty()) throw std::domain_error("empty edge word is a trivial curve");
    auto l = o.left(), b = o.bottom();
    int s = c.index;
    if (s < 0 || s >= o.size()) throw std::domain_error("edge word starts outside the origami");
    int dx = 0, dy = 0;
    for (char ch : c.word) {
        switch (ch) {
            case 'r': s = o.right[s]; ++dx; break;
            case 'l': s = l[s]; --dx; break;
            case 'u': s = o.top[s]; ++dy; break;
            case 'd': s = b[s]; --dy; break;
            default: throw std::domain_error(std::string("bad edge-word letter '") + ch + "'");
        }
    }
    if (s != c.index) throw std::domain_error("edge word " + c.str() + " does not close up");
    if (dx == 0 && dy == 0) throw std::domain_error("edge word " + c.str() + " has trivial holonomy");
}

}  // namespace detail

/// Rotates a closed edge word to its lexicographically least (start, word) form.
inline OrigamiCurve canonical_word(const Origami& o, OrigamiCurve c) {
    if (c.kind != OrigamiCurve::Kind::Word) return c;
    detail::check_word_closes(o, c);
    auto l = o.left(), b = o.bottom();
    const std::size_t n = c.word.size();
    OrigamiCurve best = c;
    int s = c.index;
    for (std::size_t k = 0; k < n; ++k) {
        std::string rotated = c.word.substr(k) + c.word.substr(0, k);
        OrigamiCurve cand{OrigamiCurve::Kind::Word, s, rotated};
        if (cand < best) best = cand;
        char ch = c.word[k];
        s = ch == 'r' ? o.right[s] : ch == 'l' ? l[s] : ch == 'u' ? o.top[s] : b[s];
    }
    return best;
}

// ---------------------------------------------------------------------------
// Weighted multicurves

struct MulticurveComponent {
    CurveClass curve;
    Rational weight;
    friend bool operator==(const MulticurveComponent&, const MulticurveComponent&) = default;
};

/// Weighted simple multicurve; the rational points of ML(S) used throughout.
class MeasuredMulticurve {
public:
    MeasuredMulticurve() = default;

    /// Multicurve on the once-punctured torus. Components with equal slopes merge.
    static MeasuredMulticurve on_torus(std::vector<MulticurveComponent> comps) {
        MeasuredMulticurve m;
        m.sig_ = SurfaceSig(1, 1);
        m.set_components(std::move(comps));
        return m;
    }
    static MeasuredMulticurve slope(Slope s, Rational w = Rational(1)) {
        return on_torus({{CurveClass{s}, w}});
    }
    static MeasuredMulticurve on_origami(std::shared_ptr<const Origami> o, std::vector<MulticurveComponent> comps) {
        if (!o) throw std::invalid_argument("null origami");
        MeasuredMulticurve m;
        m.sig_ = o->signature();
        m.origami_ = std::move(o);
        m.set_components(std::move(comps));
        return m;
    }

    const SurfaceSig& surface() const { return sig_; }
    const std::shared_ptr<const Origami>& origami() const { return origami_; }
    const std::vector<MulticurveComponent>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }

    /// Single torus slope carried by this multicurve.
    const Slope& torus_slope() const {
        if (!sig_.is_punctured_torus() || origami_ || comps_.size() != 1)
            throw std::domain_error("multicurve is not a single slope on the punctured torus");
        return as_slope(comps_.front().curve);
    }
    Rational torus_weight() const {
        torus_slope();
        return comps_.front().weight;
    }

    MeasuredMulticurve scaled(const Rational& k) const {
        if (k <= Rational(0)) throw std::domain_error("multicurve scale must be positive");
        MeasuredMulticurve m = *this;
        for (auto& c : m.comps_) c.weight *= k;
        return m;
    }

    bool same_surface(const MeasuredMulticurve& o) const {
        if (!(sig_ == o.sig_)) return false;
        if (static_cast<bool>(origami_) != static_cast<bool>(o.origami_)) return false;
        return !origami_ || *origami_ == *o.origami_;
    }

    friend bool operator==(const MeasuredMulticurve& a, const MeasuredMulticurve& b) {
        return a.same_surface(b) && a.comps_ == b.comps_;
    }

private:
    void set_components(std::vector<MulticurveComponent> comps);

    SurfaceSig sig_;
    std::shared_ptr<const Origami> origami_;
    std::vector<MulticurveComponent> comps_;
};

namespace detail {

/// Geometric intersection number of two single curves.
inline std::int64_t curve_intersection(const CurveClass& a, const CurveClass& b, const Origami* o) {
    if (auto* sa = std::get_if<Slope>(&a)) {
        const auto& sb = as_slope(b);
        return std::llabs(cross(sa->homology(), sb.homology()));
    }
    if (!o) throw std::domain_error("origami curve without an origami");
    const auto& ca = std::get<OrigamiCurve>(a);
    const auto& cb = std::get<OrigamiCurve>(b);
    using K = OrigamiCurve::Kind;
    if (ca.kind == K::Word || cb.kind == K::Word)
        throw std::domain_error("intersection numbers are only implemented for cylinder cores");
    if (ca.kind == cb.kind) return 0;
    const auto rows = o->rows();
    const auto cols = o->columns();
    const auto& h = ca.kind == K::HorizontalCore ? ca : cb;
    const auto& v = ca.kind == K::HorizontalCore ? cb : ca;
    if (h.index < 0 || h.index >= static_cast<int>(rows.size()) || v.index < 0 ||
        v.index >= static_cast<int>(cols.size()))
        throw std::domain_error("cylinder index out of range");
    std::int64_t count = 0;
    for (int s : rows[h.index])
        if (std::find(cols[v.index].begin(), cols[v.index].end(), s) != cols[v.index].end()) ++count;
    return count;
}

inline void check_curve(const CurveClass& c, const SurfaceSig& sig, const Origami* o) {
    if (std::holds_alternative<Slope>(c)) {
        if (!sig.is_punctured_torus() || o) throw std::domain_error("slopes only live on the punctured torus");
        return;
    }
    if (!o) throw std::domain_error("origami curve on a surface without an origami");
    const auto& oc = std::get<OrigamiCurve>(c);
    using K = OrigamiCurve::Kind;
    if (oc.kind == K::HorizontalCore && (oc.index < 0 || oc.index >= static_cast<int>(o->rows().size())))
        throw std::domain_error("no horizontal cylinder " + std::to_string(oc.index));
    if (oc.kind == K::VerticalCore && (oc.index < 0 || oc.index >= static_cast<int>(o->columns().size())))
        throw std::domain_error("no vertical cylinder " + std::to_string(oc.index));
    if (oc.kind == K::Word) check_word_closes(*o, oc);
}

}  // namespace detail

inline void MeasuredMulticurve::set_components(std::vector<MulticurveComponent> comps) {
    std::vector<MulticurveComponent> merged;
    for (auto& c : comps) {
        if (c.weight <= Rational(0)) throw std::domain_error("multicurve weights must be positive");
        detail::check_curve(c.curve, sig_, origami_.get());
        if (origami_) {
            if (auto* oc = std::get_if<OrigamiCurve>(&c.curve)) c.curve = canonical_word(*origami_, *oc);
        }
        auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& m) { return m.curve == c.curve; });
        if (it != merged.end()) it->weight += c.weight;
        else merged.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < merged.size(); ++i)
        for (std::size_t j = i + 1; j < merged.size(); ++j)
            if (detail::curve_intersection(merged[i].curve, merged[j].curve, origami_.get()) != 0)
                throw std::domain_error("multicurve components " + to_string(merged[i].curve) + " and " +
                                        to_string(merged[j].curve) + " intersect");
    std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) { return a.curve < b.curve; });
    comps_ = std::move(merged);
}

inline Rational intersection_number(const MeasuredMulticurve& a, const MeasuredMulticurve& b) {
    if (!a.same_surface(b)) throw std::domain_error("intersection of multicurves on different surfaces");
    Rational total(0);
    for (const auto& ca : a.components())
        for (const auto& cb : b.components())
            total += ca.weight * cb.weight *
                     Rational(detail::curve_intersection(ca.curve, cb.curve, a.origami().get()));
    return total;
}

/// i(c, m) for a single curve against a multicurve.
inline Rational intersection_number(const CurveClass& c, const MeasuredMulticurve& m) {
    detail::check_curve(c, m.surface(), m.origami().get());
    Rational total(0);
    for (const auto& cm : m.components())
        total += cm.weight * Rational(detail::curve_intersection(c, cm.curve, m.origami().get()));
    return total;
}

/// All slopes p/q with max(|p|, q) <= height.
inline std::vector<Slope> slopes_up_to_height(std::int64_t height) {
    std::vector<Slope> out{Slope::infinity()};
    for (std::int64_t q = 1; q <= height; ++q)
        for (std::int64_t p = -height; p <= height; ++p)
            if (std::gcd(p, q) == 1) out.emplace_back(p, q);
    return out;
}

/// Whether p and m fill the surface.
inline bool fills(const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    if (!p.same_surface(m)) throw std::domain_error("fills: multicurves on different surfaces");
    if (p.empty() || m.empty()) return false;
    if (!p.origami()) {
        // Two distinct slopes cut the torus into one square; checked on a generating family.
        for (const auto& g : slopes_up_to_height(6)) {
            CurveClass gc{g};
            if (intersection_number(gc, p) + intersection_number(gc, m) == Rational(0)) return false;
        }
        return intersection_number(p, m) > Rational(0);
    }
    // Origami: complementary pieces are vertex neighbourhoods iff every square is
    // crossed by a horizontal and by a vertical component.
    const auto& o = *p.origami();
    const auto rows = o.rows();
    const auto cols = o.columns();
    std::vector<char> h(o.size(), 0), v(o.size(), 0);
    for (const auto* mc : {&p, &m}) {
        for (const auto& c : mc->components()) {
            const auto& oc = std::get<OrigamiCurve>(c.curve);
            if (oc.kind == OrigamiCurve::Kind::HorizontalCore) for (int s : rows[oc.index]) h[s] = 1;
            else if (oc.kind == OrigamiCurve::Kind::VerticalCore) for (int s : cols[oc.index]) v[s] = 1;
            else return false;
        }
    }
    for (int s = 0; s < o.size(); ++s)
        if (!h[s] || !v[s]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// SL(2, Z) bookkeeping on the torus

/// Extended Euclid: returns (x, y) with a x + b y = gcd(a, b).
inline std::pair<std::int64_t, std::int64_t> bezout(std::int64_t a, std::int64_t b) {
    std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        std::int64_t qt = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - qt * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - qt * s);
        std::tie(old_t, t) = std::make_pair(t, old_t - qt * t);
    }
    if (old_r < 0) { old_s = -old_s; old_t = -old_t; }
    return {old_s, old_t};
}

/// Integral basis (a, b) with <a, b> = 1. Columns of an SL(2,Z) matrix.
struct TorusBasis {
    Vec2i a{1, 0}, b{0, 1};

    /// Basis whose first vector is the curve `first`; the second is a dual curve
    /// crossing it once, chosen by the Euclidean algorithm.
    static TorusBasis adapted_to(const Slope& first) {
        Vec2i a = first.homology();
        auto [s, t] = bezout(a.x, a.y);  // a.x s + a.y t = 1
        // <a, b> = a.x b.y - a.y b.x = 1 with b = (-t, s)
        TorusBasis B{a, Vec2i{-t, s}};
        if (cross(B.a, B.b) != 1) throw std::logic_error("adapted basis is not unimodular");
        return B;
    }

    /// Coordinates of v in this basis (exact, since det = 1).
    Vec2i coords(const Vec2i& v) const { return {cross(v, b), cross(a, v)}; }
    Vec2i from_coords(const Vec2i& c) const { return a * c.x + b * c.y; }
    friend bool operator==(const TorusBasis&, const TorusBasis&) = default;
};

// ---------------------------------------------------------------------------
// Dehn twists, relative twist, balance time

/// n-fold Dehn twist of c about `about` on the punctured torus.
inline CurveClass dehn_twist(const CurveClass& c, const CurveClass& about, std::int64_t n) {
    const auto& s = as_slope(c);
    const auto& a = as_slope(about);
    Vec2i v = s.homology(), av = a.homology();
    return CurveClass{Slope::from_homology(v + av * (n * cross(v, av)))};
}

inline MeasuredMulticurve dehn_twist(const MeasuredMulticurve& m, const CurveClass& about, std::int64_t n) {
    std::vector<MulticurveComponent> comps;
    for (const auto& c : m.components()) comps.push_back({dehn_twist(c.curve, about, n), c.weight});
    return MeasuredMulticurve::on_torus(std::move(comps));
}

/// Twisting number of a torus curve around `a`: coordinate along a divided by
/// coordinate along the dual curve, in the basis adapted to a.
inline Rational twisting_number(const Slope& c, const Slope& a) {
    auto basis = TorusBasis::adapted_to(a);
    Vec2i k = basis.coords(c.homology());
    if (k.y == 0) throw std::domain_error("curve is disjoint from the twisting curve");
    return Rational(k.x, k.y);
}

/// Relative twist d_a(n1, n2): lift the arcs of both curves to the annular
/// cover of a, count crossings of each pair of lifted arcs across the collar,
/// and take the minimum over pairs.
inline double relative_twist(const MeasuredMulticurve& n1, const MeasuredMulticurve& n2, const CurveClass& a) {
    if (!n1.same_surface(n2)) throw std::domain_error("relative_twist: different surfaces");
    const auto& sa = as_slope(a);
    const auto& c1 = n1.torus_slope();
    const auto& c2 = n2.torus_slope();
    auto basis = TorusBasis::adapted_to(sa);
    Vec2i k1 = basis.coords(c1.homology()), k2 = basis.coords(c2.homology());
    if (k1.y == 0 || k2.y == 0) throw std::domain_error("relative twist undefined: lamination disjoint from curve");
    // Arcs cross the collar |y| < 1/2 as x = offset + slope * y (x mod 1).
    const double s1 = static_cast<double>(k1.x) / static_cast<double>(k1.y);
    const double s2 = static_cast<double>(k2.x) / static_cast<double>(k2.y);
    const std::int64_t m1 = std::llabs(k1.y), m2 = std::llabs(k2.y);
    if (s1 == s2) return 0.0;
    const double span = std::fabs(s1 - s2);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    // Generic offsets keep arcs off the punctures and off each other.
    constexpr double kOffset1 = 0.1234567, kOffset2 = 0.3456789;
    for (std::int64_t i = 0; i < m1; ++i) {
        for (std::int64_t j = 0; j < m2; ++j) {
            double x1 = (kOffset1 + static_cast<double>(i)) / static_cast<double>(m1);
            double x2 = (kOffset2 + static_cast<double>(j)) / static_cast<double>(m2);
            // crossings: integers n with (x2 - x1 + n) / (s1 - s2) in (-1/2, 1/2)
            double centre = x1 - x2;
            auto lo = static_cast<std::int64_t>(std::floor(centre - span / 2)) + 1;
            auto hi = static_cast<std::int64_t>(std::ceil(centre + span / 2)) - 1;
            best = std::min(best, std::max<std::int64_t>(0, hi - lo + 1));
        }
    }
    return static_cast<double>(best);
}

/// Balance time with the ±∞ conventions for curves disjoint from one lamination.
struct BalanceTime {
    double value = 0.0;
    bool finite() const { return std::isfinite(value); }
    /// i(a, ν⁻) = 0.
    bool vertical() const { return value == -std::numeric_limits<double>::infinity(); }
    /// i(a, ν⁺) = 0.
    bool horizontal() const { return value == std::numeric_limits<double>::infinity(); }
};

inline BalanceTime balance_time(const CurveClass& a, const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    Rational ip = intersection_number(a, p);
    Rational im = intersection_number(a, m);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (ip == Rational(0) && im == Rational(0)) throw std::domain_error("curve is disjoint from both laminations (pair does not fill)");
    if (ip == Rational(0)) return {inf};
    if (im == Rational(0)) return {-inf};
    return {0.5 * std::log(to_double(im) / to_double(ip))};
}

// ---------------------------------------------------------------------------
// Multicurve literal: [{"curve": "p/q" | "h0" | "v1" | "s0:ru", "weight": "num/den"}]

inline CurveClass parse_curve(const std::string& text, const Origami* o) {
    if (text.empty()) throw std::invalid_argument("empty curve literal");
    if (!o) {
        auto slash = text.find('/');
        if (slash == std::string::npos) throw std::invalid_argument("torus curve literal must be p/q: " + text);
        try {
            return CurveClass{Slope(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)))};
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("malformed slope literal '" + text + "'");
        }
    }
    OrigamiCurve c;
    try {
        if (text[0] == 'h' || text[0] == 'v') {
            c.kind = text[0] == 'h' ? OrigamiCurve::Kind::HorizontalCore : OrigamiCurve::Kind::VerticalCore;
            c.index = std::stoi(text.substr(1));
        } else if (text[0] == 's') {
            auto colon = text.find(':');
            if (colon == std::string::npos) throw std::invalid_argument(text);
            c.kind = OrigamiCurve::Kind::Word;
            c.index = std::stoi(text.substr(1, colon - 1));
            c.word = text.substr(colon + 1);
        } else {
            throw std::invalid_argument(text);
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed origami curve literal '" + text + "'");
    }
    detail::check_curve(CurveClass{c}, o->signature(), o);
    return CurveClass{canonical_word(*o, c)};
}

}  // namespace teich
