#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "teich/curves.hpp"

using namespace teich;
using oracle::crossing_count;

namespace {

MeasuredMulticurve mm(std::int64_t p, std::int64_t q, Rational w = Rational(1)) {
    return MeasuredMulticurve::slope(Slope(p, q), w);
}

}  // namespace

TEST(Slope, NormalizesSignAndGcd) {
    EXPECT_EQ(Slope(2, 4), Slope(1, 2));
    EXPECT_EQ(Slope(1, -3), Slope(-1, 3));
    EXPECT_EQ(Slope(-5, 0), Slope::infinity());
    EXPECT_THROW(Slope(0, 0), std::domain_error);
    EXPECT_EQ(Slope::from_homology(Slope(3, 5).homology()), Slope(3, 5));
}

TEST(Intersection, ExamplesAndCrossingOracle) {
    EXPECT_EQ(intersection_number(mm(0, 1), mm(1, 0)), Rational(1));
    EXPECT_EQ(intersection_number(mm(1, 2), mm(1, 3)), Rational(1));
    EXPECT_EQ(intersection_number(mm(1, 2, Rational(3)), mm(1, 3, Rational(1, 2))), Rational(3, 2));
    for (const auto& a : slopes_up_to_height(4))
        for (const auto& b : slopes_up_to_height(4))
            EXPECT_EQ(intersection_number(CurveClass{a}, MeasuredMulticurve::slope(b)),
                      Rational(crossing_count(a, b)))
                << a.str() << " vs " << b.str();
}

TEST(Intersection, OrigamiCores) {
    auto o = std::make_shared<const Origami>(std::vector<int>{1, 0, 2}, std::vector<int>{2, 1, 0});
    EXPECT_EQ(o->signature(), SurfaceSig(2, 0));
    auto h0 = parse_curve("h0", o.get());
    auto v0 = parse_curve("v0", o.get());
    auto h = MeasuredMulticurve::on_origami(o, {{h0, Rational(1)}});
    auto v = MeasuredMulticurve::on_origami(o, {{v0, Rational(1)}});
    // Row {0,1} and column {0,2} share square 0.
    EXPECT_EQ(intersection_number(h, v), Rational(1));
    EXPECT_THROW(intersection_number(h, mm(0, 1)), std::domain_error);
}

TEST(Multicurve, RejectsBadInput) {
    EXPECT_THROW(mm(0, 1, Rational(0)), std::domain_error);
    EXPECT_THROW(MeasuredMulticurve::on_torus({{CurveClass{Slope(0, 1)}, Rational(1)}, {CurveClass{Slope(1, 0)}, Rational(1)}}),
                 std::domain_error);
    auto merged = MeasuredMulticurve::on_torus({{CurveClass{Slope(0, 1)}, Rational(1)}, {CurveClass{Slope(0, 1)}, Rational(2)}});
    EXPECT_EQ(merged.torus_weight(), Rational(3));
    EXPECT_THROW(parse_curve("1/x", nullptr), std::invalid_argument);
}

TEST(Fills, TorusAndOrigami) {
    EXPECT_TRUE(fills(mm(0, 1), mm(1, 0)));
    EXPECT_FALSE(fills(mm(0, 1), mm(0, 1, Rational(2))));
    auto o = std::make_shared<const Origami>(std::vector<int>{1, 0, 2}, std::vector<int>{2, 1, 0});
    auto cores = [&](char kind, int count) {
        std::vector<MulticurveComponent> c;
        for (int i = 0; i < count; ++i) c.push_back({parse_curve(std::string(1, kind) + std::to_string(i), o.get()), Rational(1)});
        return MeasuredMulticurve::on_origami(o, c);
    };
    EXPECT_TRUE(fills(cores('v', 2), cores('h', 2)));
    EXPECT_FALSE(fills(cores('v', 1), cores('h', 2)));
}

TEST(DehnTwist, MovesSlopes) {
    EXPECT_EQ(as_slope(dehn_twist(CurveClass{Slope(0, 1)}, CurveClass{Slope::infinity()}, 1)), Slope(1, 1));
    // Twists preserve intersection with the twisting curve and compose additively.
    for (const auto& c : slopes_up_to_height(3)) {
        CurveClass cc{c};
        CurveClass a{Slope(1, 2)};
        auto t3 = dehn_twist(cc, a, 3);
        EXPECT_EQ(intersection_number(t3, MeasuredMulticurve::slope(Slope(1, 2))),
                  intersection_number(cc, MeasuredMulticurve::slope(Slope(1, 2))));
        EXPECT_EQ(as_slope(dehn_twist(dehn_twist(cc, a, 1), a, 2)), as_slope(t3));
        EXPECT_EQ(as_slope(dehn_twist(t3, a, -3)), c);
    }
}

TEST(RelativeTwist, GrowsLinearlyUnderTwisting) {
    const CurveClass a{Slope::infinity()};
    for (std::int64_t n : {1, 2, 5, 17, 40}) {
        double d = relative_twist(mm(0, 1), mm(n, 1), a);
        EXPECT_NEAR(d, static_cast<double>(n), 2.0) << n;
    }
    // Closed form |k1 - k2| = i(c1, c2) / (i(c1, a) i(c2, a)) within the additive error.
    for (const auto& c1 : slopes_up_to_height(4)) {
        for (const auto& c2 : slopes_up_to_height(4)) {
            const Slope s{2, 5};
            auto i1 = std::llabs(cross(c1.homology(), s.homology()));
            auto i2 = std::llabs(cross(c2.homology(), s.homology()));
            if (i1 == 0 || i2 == 0) continue;
            double closed = static_cast<double>(std::llabs(cross(c1.homology(), c2.homology()))) /
                            static_cast<double>(i1 * i2);
            EXPECT_NEAR(relative_twist(MeasuredMulticurve::slope(c1), MeasuredMulticurve::slope(c2), CurveClass{s}),
                        closed, 1.0);
        }
    }
    EXPECT_THROW(relative_twist(mm(1, 0), mm(0, 1), a), std::domain_error);
}

TEST(BalanceTime, ClosedFormAndInfinities) {
    auto p = mm(0, 1), m = mm(1, 0);
    EXPECT_NEAR(balance_time(CurveClass{Slope(1, 1)}, p, m).value, 0.0, 1e-15);
    EXPECT_NEAR(balance_time(CurveClass{Slope(1, 4)}, p, m).value, 0.5 * std::log(4.0), 1e-15);
    EXPECT_TRUE(balance_time(CurveClass{Slope(0, 1)}, p, m).horizontal());
    EXPECT_TRUE(balance_time(CurveClass{Slope::infinity()}, p, m).vertical());
}

TEST(TorusBasis, AdaptedIsUnimodular) {
    for (const auto& s : slopes_up_to_height(7)) {
        auto b = TorusBasis::adapted_to(s);
        EXPECT_EQ(cross(b.a, b.b), 1);
        Vec2i v{3, -7};
        EXPECT_EQ(b.from_coords(b.coords(v)), v);
    }
}

TEST(Rational, ParseAndApproximate) {
    EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_NEAR(to_double(approximate_rational(std::exp(1.0), 1000000)), std::exp(1.0), 1e-11);
}
