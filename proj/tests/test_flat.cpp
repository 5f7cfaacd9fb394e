#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "teich/flat.hpp"

using namespace teich;
using oracle::mesh_word_length;

namespace {

MeasuredMulticurve mm(std::int64_t p, std::int64_t q, Rational w = Rational(1)) {
    return MeasuredMulticurve::slope(Slope(p, q), w);
}

// Brute-force shortest lattice vector of the torus not parallel to v.
double lattice_crossing(const FlatSurface& q, const Slope& a) {
    Vec2 va = q.holonomy(a);
    double best = std::numeric_limits<double>::infinity();
    for (int i = -60; i <= 60; ++i) {
        for (int j = -60; j <= 60; ++j) {
            if (i == 0 && j == 0) continue;
            Slope s(j, i);
            Vec2 w = q.holonomy(Slope(0, 1)) * i + q.holonomy(Slope::infinity()) * j;
            if (std::fabs(cross(w, va)) < 1e-12 * w.norm() * va.norm()) continue;
            best = std::min(best, w.norm());
        }
    }
    return best;
}

}  // namespace

TEST(FlatSurface, UnitSquareLengthsAndK) {
    auto q = unit_square_torus();
    EXPECT_NEAR(q.area(), 1.0, 1e-15);
    EXPECT_NEAR(q_length(q, CurveClass{Slope(0, 1)}), 1.0, 1e-15);
    EXPECT_NEAR(q_length(q, CurveClass{Slope(1, 1)}), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(expanding_K(q, CurveClass{Slope(0, 1)}), 0.5, 1e-15);
    for (double t : {-1.5, 0.7, 3.0}) {
        auto qt = flow(q, t);
        // Slope 0 is carried by the vertical foliation and contracts.
        EXPECT_NEAR(q_length(qt, CurveClass{Slope(0, 1)}), std::exp(-t), 1e-12);
        EXPECT_NEAR(q_length(qt, CurveClass{Slope::infinity()}), std::exp(t), 1e-12);
        EXPECT_NEAR(qt.area(), 1.0, 1e-12);
    }
    EXPECT_NEAR(expanding_K(flow(q, 1.0), CurveClass{Slope(0, 1)}), 0.5 * std::exp(2.0), 1e-12);
}

TEST(FlatSurface, BuildFromSlopePairs) {
    // One intersection gives one square with a sheared right gluing.
    auto q = build_flat_surface(mm(0, 1), mm(1, 1));
    EXPECT_EQ(q.size(), 1);
    EXPECT_EQ(q.surface(), SurfaceSig(1, 1));
    auto q2 = build_flat_surface(mm(1, 2, Rational(2)), mm(-1, 3));
    EXPECT_EQ(q2.size(), 5);
    EXPECT_NEAR(q2.area(), 1.0, 1e-12);
    // Vertical cores carry p: the p curve is vertical with length i(p,m)·w(m).
    Vec2 hp = q2.holonomy(Slope(1, 2));
    EXPECT_NEAR(hp.x, 0.0, 1e-12);
    for (const auto& s : slopes_up_to_height(4)) {
        // Transverse measures: horizontal extent is w(p)·i(c,p), vertical w(m)·i(c,m).
        Vec2 h = q2.holonomy(s);
        double scale = std::exp(q2.log_scale());
        EXPECT_NEAR(std::fabs(h.x), scale * 2.0 * std::llabs(cross(s.homology(), Slope(1, 2).homology())), 1e-12);
        EXPECT_NEAR(std::fabs(h.y), scale * std::llabs(cross(s.homology(), Slope(-1, 3).homology())), 1e-12);
    }
    EXPECT_THROW(build_flat_surface(mm(0, 1), mm(0, 1)), std::domain_error);
}

TEST(FlatSurface, TorusKAgainstLatticeOracle) {
    auto q = build_flat_surface(mm(1, 2, Rational(3, 2)), mm(2, 3));
    for (double t : {-0.8, 0.0, 0.4}) {
        auto qt = flow(q, t);
        for (const auto& s : slopes_up_to_height(3)) {
            double expect = 0.5 * lattice_crossing(qt, s) / qt.holonomy(s).norm();
            EXPECT_NEAR(expanding_K(qt, CurveClass{s}), expect, 1e-12) << s.str();
            EXPECT_NEAR(flat_cylinder(qt, CurveClass{s}).modulus, qt.area() / std::pow(qt.holonomy(s).norm(), 2), 1e-12);
        }
    }
}

TEST(Origami, LShapedSignatureAndCylinders) {
    auto q = l_origami();
    EXPECT_EQ(q.surface(), SurfaceSig(2, 0));
    EXPECT_EQ(q.origami().rows().size(), 2u);
    EXPECT_EQ(q.origami().columns().size(), 2u);
    auto h0 = parse_curve("h0", &q.origami());
    const double unit = 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(q_length(q, h0), 2 * unit, 1e-14);
    auto f = flat_cylinder(q, h0);
    EXPECT_NEAR(f.modulus, 0.5, 1e-14);
    EXPECT_NEAR(expanding_K(q, h0), 0.25, 1e-14);
    for (double t : {-2.0, 0.5}) EXPECT_NEAR(expanding_K(flow(q, t), h0), 0.25 * std::exp(-2 * t), 1e-12);
    // Square 1 sits in a column of its own.
    auto v = parse_curve("v1", &q.origami());
    EXPECT_NEAR(q_length(q, v), unit, 1e-14);
}

TEST(Origami, WordGeodesicsMatchMeshDijkstra) {
    auto q = l_origami();
    for (const char* lit : {"s0:rr", "s0:uu", "s0:rul", "s0:uurr", "s0:ruur", "s0:urdr"}) {
        OrigamiCurve c;
        try {
            c = std::get<OrigamiCurve>(parse_curve(lit, &q.origami()));
        } catch (const std::domain_error&) {
            continue;  // literal does not close on this origami
        }
        double exact = q_length(q, CurveClass{c});
        double mesh = mesh_word_length(q, c, 16);
        EXPECT_LE(exact, mesh + 1e-9) << lit;
        EXPECT_NEAR(exact, mesh, 2e-2 * exact) << lit;
    }
    // A detour through square 0 is homotopic to the core of column {1}.
    EXPECT_NEAR(q_length(q, parse_curve("s0:rul", &q.origami())), 1 / std::sqrt(3.0), 1e-10);
    auto f = flat_cylinder(q, parse_curve("s1:u", &q.origami()));
    EXPECT_NEAR(f.circumference, 1 / std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(f.height, 1 / std::sqrt(3.0), 1e-8);
}

TEST(CutAndReglue, PreservesKAndCommutesWithFlow) {
    auto q = l_origami();
    auto h0 = parse_curve("h0", &q.origami());
    auto cut = cut_and_reglue(q, h0);
    EXPECT_NEAR(cut.area(), 1.0, 1e-14);
    EXPECT_EQ(flat_cylinder(cut, h0).modulus, 0.0);
    EXPECT_NEAR(expanding_K(cut, h0), expanding_K(q, h0), 1e-12);
    for (double t : {-1.0, 0.3, 2.0})
        EXPECT_TRUE(isometric(cut_and_reglue(flow(q, t), h0), flow(cut, t))) << t;
    auto small = collapse_degenerate(cut);
    EXPECT_EQ(small.size(), 1);
    EXPECT_EQ(small.origami().right, std::vector<int>{0});
    EXPECT_EQ(small.origami().top, std::vector<int>{0});
    // The single-column core fills nothing it can lose.
    EXPECT_THROW(cut_and_reglue(unit_square_torus(), CurveClass{Slope(0, 1)}), std::domain_error);
}

TEST(SaddleConnections, SquareTorusMatchesPrimitiveVectors) {
    auto q = square_tiled({0}, {0});
    for (double cap : {1.0, 3.5, 7.2}) {
        int expect = 0;
        for (int a = -8; a <= 8; ++a)
            for (int b = 0; b <= 8; ++b)
                if ((b > 0 || a > 0) && std::gcd(a, b) == 1 && std::hypot(a, b) <= cap) ++expect;
        EXPECT_EQ(static_cast<int>(saddle_connections(q, cap).size()), expect) << cap;
    }
}

TEST(SaddleConnections, CutKeepsConnectionsAwayFromCylinder) {
    auto q = l_origami();
    auto h0 = parse_curve("h0", &q.origami());
    const auto row = q.origami().rows()[0];
    auto avoid = [&](const FlatSurface& s, double scale) {
        std::vector<double> lens;
        for (const auto& sc : saddle_connections(s, 4.0 / scale)) {
            bool touches = false;
            for (int sq : sc.squares) touches = touches || std::find(row.begin(), row.end(), sq) != row.end();
            if (!touches) lens.push_back(sc.length() * scale);
        }
        std::sort(lens.begin(), lens.end());
        return lens;
    };
    auto cut = cut_and_reglue(q, h0);
    // Compare before renormalization: divide out each surface's scale.
    auto a = avoid(q, 1.0 / std::exp(q.log_scale()));
    auto b = avoid(cut, 1.0 / std::exp(cut.log_scale()));
    ASSERT_EQ(a.size(), b.size());
    ASSERT_FALSE(a.empty());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
}

TEST(EstimateD, FiniteAndInfiniteBalanceTimes) {
    auto p = mm(0, 1), m = mm(1, 0);
    auto q0 = build_flat_surface(p, m);
    CurveClass diag{Slope(1, 1)};
    const double d = relative_twist(p, m, diag);
    for (double t : {-1.0, 0.0, 2.0}) EXPECT_NEAR(estimate_D(q0, diag, t, p, m), std::exp(-2 * std::fabs(t)) * d, 1e-14);
    // Slope ∞ is parallel to m: its flat modulus decays like e^{-2t}.
    EXPECT_NEAR(estimate_D(q0, CurveClass{Slope::infinity()}, 1.5, p, m), std::exp(-3.0), 1e-14);
    EXPECT_NEAR(estimate_D(q0, CurveClass{Slope(0, 1)}, 1.5, p, m), std::exp(3.0), 1e-12);
}
