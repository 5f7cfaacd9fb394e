#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "teich/minima.hpp"

using namespace teich;
using oracle::compass_minimum;

namespace {

MeasuredMulticurve slope(std::int64_t p, std::int64_t q, Rational w = Rational(1)) {
    return MeasuredMulticurve::slope(Slope(p, q), w);
}

}  // namespace

TEST(Objective, EvaluatesAtHexagonalPoint) {
    auto hex = FNPoint::torus(Slope(0, 1), 2 * std::acosh(1.5), 0.5);
    EXPECT_NEAR(objective(hex, slope(0, 1), slope(1, 0), 0.0), 2 * 2 * std::acosh(1.5), 1e-10);
    // Time only rescales weights.
    const double t = std::log(4.0);
    EXPECT_NEAR(objective(hex, slope(0, 1), slope(1, 0), t),
                objective(hex, slope(0, 1, Rational(4)), slope(1, 0, Rational(1, 4)), 0.0), 1e-12);
}

TEST(Minimize, SymmetricPairAtZeroIsSquare) {
    auto s = minimize(slope(0, 1), slope(1, 0), 0.0);
    EXPECT_LT(s.gradient_norm, 1e-9);
    const double lp = curve_length(s.point, CurveClass{Slope(0, 1)});
    const double lm = curve_length(s.point, CurveClass{Slope(1, 0)});
    EXPECT_NEAR(lp, lm, 1e-8);
    EXPECT_NEAR(lp, 2 * std::acosh(std::sqrt(2.0)), 1e-8);
    EXPECT_NEAR(std::remainder(s.point.twist(), 0.5), 0.0, 1e-8);
    EXPECT_THROW(minimize(slope(0, 1), slope(0, 1), 0.0), std::domain_error);
}

TEST(Minimize, UpweightedLaminationGetsShorter) {
    auto s = minimize(slope(0, 1), slope(1, 0), 1.0);
    EXPECT_LT(curve_length(s.point, CurveClass{Slope(0, 1)}), curve_length(s.point, CurveClass{Slope(1, 0)}));
}

TEST(Minimize, ReparameterizationIdentity) {
    const double s = std::log(2.0);
    for (double t : {-1.5, 0.3, 2.0}) {
        auto a = minimize(slope(1, 2), slope(-2, 3), t + s);
        auto b = minimize(slope(1, 2, Rational(2)), slope(-2, 3, Rational(1, 2)), t);
        EXPECT_LT(fn_distance(a.point, b.point), 1e-8);
    }
}

TEST(Minimize, MatchesCompassSearch) {
    struct Case { std::int64_t a, b, c, d; double t; };
    for (Case k : {Case{0, 1, 1, 0, 0.7}, Case{1, 2, -1, 1, -0.4}, Case{2, 5, -3, 4, 1.2}}) {
        auto p = slope(k.a, k.b), m = slope(k.c, k.d);
        auto s = minimize(p, m, k.t);
        const double oracle = compass_minimum(p, m, k.t, s.point.pants_curve(), std::log(s.point.length()) + 0.3,
                                              s.point.twist_length() + 0.2 * s.point.length());
        EXPECT_NEAR(s.objective_value, oracle, 1e-8 * oracle);
        EXPECT_LE(s.objective_value, oracle * (1 + 1e-12));
    }
}

TEST(Minimize, RestartsAgree) {
    auto p = slope(2, 5, Rational(3, 2)), m = slope(-3, 4);
    for (double t : {-5.0, -1.0, 0.0, 2.5, 6.0}) {
        auto s = minimize(p, m, t);
        EXPECT_LT(uniqueness_spread(p, m, s, 5, 17), 1e-6) << t;
    }
}

TEST(Objective, ConvexAlongTwistLines) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ul(-3, 1.5), us(-4, 4), ut(-3, 3);
    auto p = slope(1, 3), m = slope(-2, 1);
    for (int k = 0; k < 40; ++k) {
        const double l = std::exp(ul(rng)), s0 = us(rng), t = ut(rng), h = 0.05;
        auto f = [&](double s) { return objective(FNPoint::torus(Slope(1, 0), l, s), p, m, t); };
        EXPECT_GE(f(s0 + h) - 2 * f(s0) + f(s0 - h), -1e-8);
    }
}

TEST(Objective, ComplexStepGradientMatchesDifferences) {
    detail::Chart chart(Slope(0, 1), detail::objective_terms(slope(1, 2), slope(-3, 1), 0.4));
    const double u = std::log(0.8), s = 0.3;
    auto g = chart.gradient(u, s);
    for (double h : {1e-4, 5e-5}) {
        const double gu = (chart.value(u + h, s) - chart.value(u - h, s)) / (2 * h);
        const double gs = (chart.value(u, s + h) - chart.value(u, s - h)) / (2 * h);
        EXPECT_NEAR(gu / g[0], 1.0, 1e-6);
        EXPECT_NEAR(gs / g[1], 1.0, 1e-6);
    }
}

TEST(TraceLine, SymmetricSwapAndEnvelope) {
    auto p = slope(0, 1), m = slope(1, 0);
    std::vector<double> grid;
    for (int k = -20; k <= 20; ++k) grid.push_back(0.1 * k);
    auto tr = trace_line(p, m, grid);
    ASSERT_EQ(tr.size(), grid.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const auto& a = tr[i];
        const auto& b = tr[tr.size() - 1 - i];
        EXPECT_NEAR(multicurve_length(a.point, p), multicurve_length(b.point, m), 1e-6);
    }
    // d/dt of the minimum value equals the partial derivative in t.
    for (std::size_t i = 1; i + 1 < tr.size(); i += 5) {
        const double fd = (tr[i + 1].objective_value - tr[i - 1].objective_value) / 0.2;
        const double t = tr[i].t;
        const double env = std::exp(t) * multicurve_length(tr[i].point, p) - std::exp(-t) * multicurve_length(tr[i].point, m);
        EXPECT_NEAR(fd, env, 1e-2 * std::max(1.0, std::fabs(env)));
    }
    auto one = trace_line(p, m, {0.0});
    ASSERT_EQ(one.size(), 1u);
    EXPECT_LT(fn_distance(one[0].point, minimize(p, m, 0.0).point), 1e-12);
}
