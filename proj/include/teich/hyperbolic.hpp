#pragma once

// Hyperbolic layer on the once-punctured torus: Fenchel–Nielsen coordinates,
// Markov trace triples, lengths of arbitrary slopes, holonomy matrices and
// twist of a lamination around a curve.
//
// With pants curve a (length l, twist s̃ in length units) and dual curve b,
//   tr a = 2 cosh(l/2),  tr b = 2 coth(l/2) cosh(s̃/2),  tr(a+b) = tr b at s̃ + l,
// and tr² a + tr² b + tr²(a+b) = tr a · tr b · tr(a+b). Lengths of other
// slopes follow from the Farey recursion tr(c+d) = tr c tr d − tr(c−d), run on
// logarithms of traces so that long curves never overflow. Length functions
// are templated so complex-step differentiation passes through them.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "curves.hpp"

namespace teich {

// ---------------------------------------------------------------------------
// Scalar helpers valid for double and complex-step numbers

inline double re(double x) { return x; }
inline double re(const std::complex<double>& x) { return x.real(); }

/// log(1 - e^a) for a < 0.
inline double log1m_exp(double a) {
    return a > -0.6931471805599453 ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}
inline std::complex<double> log1m_exp(const std::complex<double>& a) {
    const double r = a.real();
    const double e = std::exp(r);
    return {log1m_exp(r), a.imag() * (-e / (1 - e))};
}

/// log cosh(a), stable for large |a|.
template <class T>
T log_cosh(const T& a) {
    const double s = re(a) >= 0 ? 1.0 : -1.0;
    const T b = a * s;
    return b + std::log(T(1.0) + std::exp(T(-2.0) * b)) - std::log(2.0);
}

/// Hyperbolic length 2 arccosh(t/2) from log t.
template <class T>
T length_from_log_trace(const T& lt) {
    if (re(lt) < std::log(2.0) - 1e-12) throw std::domain_error("trace below 2: not a hyperbolic element");
    if (re(lt) < 3.0) {
        const T t = std::exp(lt);
        return T(2.0) * std::acosh(t / 2.0);
    }
    return T(2.0) * (lt - std::log(2.0) + std::log(T(1.0) + std::sqrt(T(1.0) - T(4.0) * std::exp(T(-2.0) * lt))));
}

inline double log_trace_from_length(double l) { return std::log(2.0) + log_cosh(l / 2); }

// ---------------------------------------------------------------------------
// Fenchel–Nielsen coordinates

/// Point of Teichmüller space in Fenchel–Nielsen coordinates relative to a
/// pants decomposition. Twists are normalized: s = s̃ / l.
struct FNPoint {
    SurfaceSig surface{1, 1};
    std::vector<CurveClass> pants;
    std::vector<double> lengths;
    std::vector<double> twists;

    static FNPoint torus(const Slope& pants_curve, double length, double twist) {
        if (!(length > 0) || !std::isfinite(length)) throw std::domain_error("pants length must be positive");
        if (!std::isfinite(twist)) throw std::domain_error("twist must be finite");
        return FNPoint{SurfaceSig(1, 1), {CurveClass{pants_curve}}, {length}, {twist}};
    }

    void require_torus() const {
        if (!surface.is_punctured_torus() || pants.size() != 1)
            throw std::domain_error("hyperbolic computations are implemented for the once-punctured torus");
    }
    const Slope& pants_curve() const { require_torus(); return as_slope(pants[0]); }
    double length() const { require_torus(); return lengths[0]; }
    double twist() const { require_torus(); return twists[0]; }
    /// Twist in length units.
    double twist_length() const { return twist() * length(); }
    TorusBasis basis() const { return TorusBasis::adapted_to(pants_curve()); }
};

namespace detail {

/// Log of |trace| of the class with coordinates (u, v) in the basis adapted
/// to the pants curve, given pants length l and twist s̃ (length units).
template <class T>
T log_trace_coords(const T& l, const T& stw, Vec2i uv) {
    if (uv.y == 0) {
        if (std::llabs(uv.x) != 1) throw std::domain_error("coordinates are not primitive");
        return std::log(2.0) + log_cosh(l / 2.0);
    }
    if (uv.y < 0) uv = uv * -1;
    // (u, v) at s̃ has the length of (u - kv, v) at s̃ + k l.
    std::int64_t k = uv.x >= 0 ? uv.x / uv.y : -((-uv.x + uv.y - 1) / uv.y);
    const std::int64_t u = uv.x - k * uv.y, v = uv.y;
    const T s = stw + T(static_cast<double>(k)) * l;
    const T log_coth = -std::log(std::tanh(l / 2.0));
    auto log_dual = [&](const T& tw) { return std::log(2.0) + log_coth + log_cosh(tw / 2.0); };
    T lL = log_dual(s);        // (0, 1)
    if (u == 0) {
        if (v != 1) throw std::domain_error("coordinates are not primitive");
        return lL;
    }
    T lR = log_dual(s + l);    // (1, 1)
    T lD = std::log(2.0) + log_cosh(l / 2.0);  // (1, 0) = R − L
    Vec2i L{0, 1}, R{1, 1};
    for (std::int64_t guard = 0; guard < 4 * (u + v) + 8; ++guard) {
        Vec2i M = L + R;
        const T lM = lL + lR + log1m_exp(lD - lL - lR);
        if (M.x == u && M.y == v) return lM;
        if (u * M.y < M.x * v) {  // target left of the mediant
            lD = lR; R = M; lR = lM;
        } else {
            lD = lL; L = M; lL = lM;
        }
    }
    throw std::domain_error("coordinates are not primitive");
}

}  // namespace detail

/// Length of a slope at the FN point (pants length l, twist s̃ in length units).
template <class T>
T torus_length(const T& l, const T& stw, const TorusBasis& basis, const Slope& c) {
    Vec2i uv = basis.coords(c.homology());
    if (uv.y == 0) return l;
    return length_from_log_trace(detail::log_trace_coords(l, stw, uv));
}

inline double log_trace(const FNPoint& x, const Slope& c) {
    return detail::log_trace_coords(x.length(), x.twist_length(), x.basis().coords(c.homology()));
}

/// Hyperbolic length of a curve at x.
inline double curve_length(const FNPoint& x, const CurveClass& c) {
    return torus_length(x.length(), x.twist_length(), x.basis(), as_slope(c));
}

/// Σ weights · lengths.
inline double multicurve_length(const FNPoint& x, const MeasuredMulticurve& m) {
    if (!m.surface().is_punctured_torus() || m.origami())
        throw std::domain_error("multicurve lives on another surface");
    double total = 0;
    for (const auto& c : m.components()) total += to_double(c.weight) * curve_length(x, c.curve);
    return total;
}

// ---------------------------------------------------------------------------
// Markov triples and systoles

/// Three slopes a, b, c = a ± b pairwise meeting once, with log traces.
struct MarkovTriple {
    std::array<Vec2i, 3> curves;
    std::array<double, 3> log_traces;
};

/// Descends the Farey graph by Vieta flips until no trace can decrease; the
/// resulting triple contains the systole and the second shortest curve.
inline MarkovTriple reduce_triple(MarkovTriple m) {
    for (int guard = 0; guard < 100000; ++guard) {
        int big = 0;
        for (int i = 1; i < 3; ++i)
            if (m.log_traces[i] > m.log_traces[big]) big = i;
        const int i1 = (big + 1) % 3, i2 = (big + 2) % 3;
        const double l1 = m.log_traces[i1], l2 = m.log_traces[i2];
        const double flipped = l1 + l2 + log1m_exp(m.log_traces[big] - l1 - l2);
        if (!(flipped < m.log_traces[big] - 1e-15)) return m;
        // The other neighbour of the edge {c1, c2}: c1 + c2 if big was c1 − c2 (up to sign) and conversely.
        Vec2i c1 = m.curves[i1], c2 = m.curves[i2], cb = m.curves[big];
        Vec2i sum = c1 + c2, diff = c1 - c2;
        Vec2i next = (sum == cb || sum == cb * -1) ? diff : sum;
        m.curves[big] = next;
        m.log_traces[big] = flipped;
    }
    throw std::runtime_error("Markov reduction did not terminate");
}

inline MarkovTriple triple_at(const FNPoint& x) {
    // Start from the dual curve with twist in [-l/2, l/2] to keep traces small.
    const auto B = x.basis();
    const Vec2i dual = B.b + B.a * static_cast<std::int64_t>(-std::llround(x.twist()));
    MarkovTriple m{{B.a, dual, B.a + dual}, {}};
    for (int i = 0; i < 3; ++i) m.log_traces[i] = log_trace(x, Slope::from_homology(m.curves[i]));
    return m;
}

struct ShortCurve {
    Slope curve;
    double length;
};

/// Systole and second shortest curve (which crosses it once).
inline std::pair<ShortCurve, ShortCurve> two_shortest(const FNPoint& x) {
    auto m = reduce_triple(triple_at(x));
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return m.log_traces[a] < m.log_traces[b]; });
    auto make = [&](int i) {
        Slope s = Slope::from_homology(m.curves[i]);
        return ShortCurve{s, curve_length(x, CurveClass{s})};
    };
    return {make(idx[0]), make(idx[1])};
}

inline ShortCurve systole(const FNPoint& x) { return two_shortest(x).first; }

/// Curves of length below eps (on the punctured torus at most one, the systole).
inline std::vector<ShortCurve> thick_thin(const FNPoint& x, double eps) {
    auto s = systole(x);
    if (s.length < eps) return {s};
    return {};
}

/// Same point expressed relative to another pants curve.
inline FNPoint rebase(const FNPoint& x, const Slope& pants) {
    if (pants == x.pants_curve()) return x;
    const auto B = TorusBasis::adapted_to(pants);
    const double l = curve_length(x, CurveClass{pants});
    const double ly = log_trace(x, Slope::from_homology(B.b));
    const double lz = log_trace(x, Slope::from_homology(B.a + B.b));
    // tr(a+b)/tr b = cosh(l/2) + tanh(s̃/2) sinh(l/2)
    const double th = (std::exp(lz - ly) - std::cosh(l / 2)) / std::sinh(l / 2);
    double stw;
    if (std::fabs(th) < 0.5) {
        stw = 2 * std::atanh(th);
    } else {
        // |s̃|/2 = arccosh(tr b · tanh(l/2) / 2), computed on logs.
        const double lc = ly - std::log(2.0) + std::log(std::tanh(l / 2));
        const double half = lc > 20 ? lc + std::log(2.0) : std::acosh(std::max(1.0, std::exp(lc)));
        stw = (th > 0 ? 2.0 : -2.0) * half;
    }
    return FNPoint::torus(pants, l, stw / l);
}

/// FN point relative to its own systole.
inline FNPoint rebase_to_systole(const FNPoint& x) { return rebase(x, systole(x).curve); }

// ---------------------------------------------------------------------------
// Holonomy

using Mat2 = std::array<double, 4>;  // row-major a b c d

inline Mat2 mul(const Mat2& x, const Mat2& y) {
    return {x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}
inline Mat2 inverse(const Mat2& m) { return {m[3], -m[1], -m[2], m[0]}; }
inline double trace(const Mat2& m) { return m[0] + m[3]; }

/// Generators A (pants curve, diagonal) and B (dual) of the holonomy
/// representation into SL(2, R) realizing the given FN point.
struct Holonomy {
    Mat2 A, B;

    static Holonomy at(double l, double stw) {
        const double lam = std::exp(l / 2);
        const double x = 2 * std::cosh(l / 2);
        const double y = 2 / std::tanh(l / 2) * std::cosh(stw / 2);
        const double z = 2 / std::tanh(l / 2) * std::cosh((stw + l) / 2);
        (void)x;
        Holonomy h;
        h.A = {lam, 0, 0, 1 / lam};
        const double b11 = (z - y / lam) / (lam - 1 / lam);
        const double b22 = y - b11;
        const double off = b11 * b22 - 1;
        const double r = std::sqrt(std::fabs(off));
        h.B = {b11, r, off >= 0 ? r : -r, b22};
        return h;
    }

    double commutator_trace() const { return trace(mul(mul(A, B), mul(inverse(A), inverse(B)))); }

    /// Matrix of the Christoffel word of coordinates (u, v), v > 0 or (±1, 0).
    Mat2 word(std::int64_t u, std::int64_t v) const {
        if (v < 0) { u = -u; v = -v; }
        if (v == 0) return u > 0 ? A : inverse(A);
        const Mat2 a = u >= 0 ? A : inverse(A);
        const std::int64_t au = std::llabs(u), n = au + v;
        Mat2 m{1, 0, 0, 1};
        for (std::int64_t i = 1; i <= n; ++i) {
            bool b_letter = (i * v) / n != ((i - 1) * v) / n;
            m = mul(m, b_letter ? B : a);
        }
        return m;
    }
};

/// Twist tw_σ(ν, a) of a slope ν around a: signed distance along the axis of
/// a between the projections of the endpoints of a crossing lift of ν,
/// minimized over lifts, in units of l(a).
inline double twist(const FNPoint& x, const Slope& nu, const Slope& a) {
    const FNPoint xa = rebase(x, a);
    const auto B = TorusBasis::adapted_to(a);
    Vec2i uv = B.coords(nu.homology());
    if (uv.y == 0) throw std::domain_error("twist: lamination disjoint from the curve");
    if (uv.y < 0) uv = uv * -1;
    const double l = xa.length();
    // Build the holonomy at the reduced twist s - j, which keeps B well
    // conditioned, and carry the j turns in the word: (u, v) at s̃ is
    // (u + jv, v) at s̃ - jl. The projections are frame independent.
    const std::int64_t j = std::llround(xa.twist());
    const Holonomy h = Holonomy::at(l, xa.twist_length() - static_cast<double>(j) * l);
    const std::int64_t u = uv.x + j * uv.y, v = uv.y;
    const Mat2 a_letter = u >= 0 ? h.A : inverse(h.A);
    const std::int64_t au = u >= 0 ? u : -u;
    const std::int64_t n = au + v;
    // Letters of the word, then every cyclic rotation.
    std::vector<char> letters;
    for (std::int64_t i = 1; i <= n; ++i) letters.push_back((i * v) / n != ((i - 1) * v) / n ? 'b' : 'a');
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t r = 0; r < n; ++r) {
        // Long words overflow, so the product is kept projectively: the true
        // matrix is e^{log_scale}·m with max |m_ij| = 1.
        Mat2 m{1, 0, 0, 1};
        double log_scale = 0;
        for (std::int64_t i = 0; i < n; ++i) {
            m = mul(m, letters[(r + i) % n] == 'b' ? h.B : a_letter);
            const double top = std::max({std::fabs(m[0]), std::fabs(m[1]), std::fabs(m[2]), std::fabs(m[3])});
            for (double& e : m) e /= top;
            log_scale += std::log(top);
        }
        const double tr = trace(m);
        if (m[2] == 0 || std::log(std::fabs(tr)) + log_scale <= std::log(2.0)) continue;
        // Roots of m2 z² + (m3 - m0) z - m1 = 0; the small root comes from
        // the product -m1/m2 to avoid cancellation. det m = e^{-2 log_scale}.
        const double bq = m[0] - m[3];
        const double disc = std::sqrt(std::fabs(tr * tr - 4 * std::exp(-2 * log_scale)));
        const double big = (bq + std::copysign(disc, bq)) / (2 * m[2]);
        const double small = (-m[1] / m[2]) / big;
        if (!(big * small < 0)) continue;
        const double pos = std::max(big, small), neg = std::min(big, small);
        // Axis of A is the imaginary axis; ξ projects to i|ξ|.
        const double d = (std::log(pos) - std::log(-neg)) / l;
        best = std::min(best, d);
    }
    if (!std::isfinite(best)) throw std::runtime_error("twist: no crossing lift found");
    return best;
}

}  // namespace teich
