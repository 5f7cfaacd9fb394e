#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "teich/hyperbolic.hpp"

using namespace teich;

namespace {

const Slope kZero(0, 1);

double markov_residual(double x, double y, double z) { return (x * x + y * y + z * z - x * y * z) / (x * y * z); }

}  // namespace

TEST(Markov, SquareAndHexagonalTraces) {
    const double ls = 2 * std::acosh(std::sqrt(2.0));
    auto sq = FNPoint::torus(kZero, ls, 0.0);
    EXPECT_NEAR(std::exp(log_trace(sq, kZero)), 2 * std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(std::exp(log_trace(sq, Slope::infinity())), 2 * std::sqrt(2.0), 1e-13);
    EXPECT_NEAR(std::exp(log_trace(sq, Slope(1, 1))), 4.0, 1e-13);
    const double lh = 2 * std::acosh(1.5);
    auto hex = FNPoint::torus(kZero, lh, 0.5);
    EXPECT_NEAR(std::exp(log_trace(hex, Slope::infinity())), 3.0, 1e-13);
    EXPECT_NEAR(std::exp(log_trace(hex, Slope(1, 1))), 6.0, 1e-13);
    EXPECT_NEAR(std::exp(log_trace(hex, Slope(-1, 1))), 3.0, 1e-13);
}

TEST(Markov, IdentityAndChristoffelOracle) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ul(0.2, 3.0), us(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double l = ul(rng), stw = us(rng);
        auto x = FNPoint::torus(kZero, l, stw / l);
        auto h = Holonomy::at(l, stw);
        EXPECT_NEAR(h.commutator_trace(), -2.0, 1e-9);
        const double tx = std::exp(log_trace(x, kZero)), ty = std::exp(log_trace(x, Slope::infinity())),
                     tz = std::exp(log_trace(x, Slope(1, 1)));
        EXPECT_NEAR(markov_residual(tx, ty, tz), 0.0, 1e-13);
        for (const auto& s : slopes_up_to_height(5)) {
            Vec2i uv = x.basis().coords(s.homology());
            const double oracle = std::fabs(trace(h.word(uv.x, uv.y)));
            EXPECT_NEAR(std::exp(log_trace(x, s)) / oracle, 1.0, 1e-9) << s.str() << " l=" << l << " s=" << stw;
        }
    }
}

TEST(Lengths, LongCurvesStayFinite) {
    auto x = FNPoint::torus(kZero, 1e-6, 3.0);
    const double lb = curve_length(x, CurveClass{Slope::infinity()});
    // Collar lemma scale: about 2 log(1/l).
    EXPECT_GT(lb, 2 * std::log(1e6));
    const double lc = curve_length(x, CurveClass{Slope(400, 1)});
    EXPECT_TRUE(std::isfinite(lc));
    EXPECT_GT(lc, 300 * lb);
}

TEST(Lengths, ComplexStepMatchesFiniteDifference) {
    const TorusBasis B = TorusBasis::adapted_to(kZero);
    for (const auto& s : {Slope::infinity(), Slope(2, 3), Slope(-5, 2)}) {
        const double l = 0.7, stw = 1.3, h = 1e-20, d = 1e-6;
        using C = std::complex<double>;
        double cs_l = torus_length(C(l, h), C(stw), B, s).imag() / h;
        double cs_s = torus_length(C(l), C(stw, h), B, s).imag() / h;
        double fd_l = (torus_length(l + d, stw, B, s) - torus_length(l - d, stw, B, s)) / (2 * d);
        double fd_s = (torus_length(l, stw + d, B, s) - torus_length(l, stw - d, B, s)) / (2 * d);
        EXPECT_NEAR(cs_l, fd_l, 1e-7 * std::max(1.0, std::fabs(fd_l)));
        EXPECT_NEAR(cs_s, fd_s, 1e-7 * std::max(1.0, std::fabs(fd_s)));
    }
}

TEST(Systole, ReductionFindsShortestSlope) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ul(-4.0, 1.5), us(-3.0, 3.0), big(-30.0, 30.0);
    const auto slopes = slopes_up_to_height(25);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = FNPoint::torus(Slope(3, 7), std::exp(ul(rng)), us(rng));
        double brute = std::numeric_limits<double>::infinity();
        for (const auto& s : slopes) brute = std::min(brute, curve_length(x, CurveClass{s}));
        EXPECT_NEAR(systole(x).length, brute, 1e-9 * brute);
        // Large twists push the systole far out; it still beats every listed slope.
        auto y = FNPoint::torus(Slope(3, 7), std::exp(ul(rng)), big(rng));
        const double sy = systole(y).length;
        for (const auto& s : slopes) EXPECT_LE(sy, curve_length(y, CurveClass{s}) * (1 + 1e-9));
        auto [first, second] = two_shortest(y);
        EXPECT_EQ(std::llabs(cross(first.curve.homology(), second.curve.homology())), 1);
    }
}

TEST(Rebase, PreservesLengthsOfTheNewFrame) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ul(-5.0, 1.0), us(-6.0, 6.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = FNPoint::torus(kZero, std::exp(ul(rng)), us(rng));
        const Slope target(2, 5);
        auto y = rebase(x, target);
        const auto B = TorusBasis::adapted_to(target);
        for (const Vec2i& v : {B.a, B.b, B.a + B.b, B.b - B.a, B.a * 3 + B.b}) {
            const Slope s = Slope::from_homology(v);
            double a = curve_length(x, CurveClass{s}), b = curve_length(y, CurveClass{s});
            EXPECT_NEAR(a, b, 1e-9 * a) << s.str();
        }
    }
    // On the thick part the round trip returns the original coordinates.
    std::uniform_real_distribution<double> thick(-0.5, 0.5), tw(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = FNPoint::torus(kZero, std::exp(thick(rng)), tw(rng));
        auto z = rebase(rebase(x, Slope(1, 2)), kZero);
        EXPECT_NEAR(z.length(), x.length(), 1e-9 * x.length());
        EXPECT_NEAR(z.twist_length(), x.twist_length(), 1e-8);
    }
}

TEST(Twist, TracksFenchelNielsenTwist) {
    // The twist of a fixed lamination differs from the FN twist by a bounded amount.
    for (double l : {0.05, 0.5, 2.0}) {
        for (double s : {-3.0, -0.4, 0.0, 1.7, 5.0}) {
            auto x = FNPoint::torus(kZero, l, s);
            for (const auto& nu : {Slope::infinity(), Slope(1, 3), Slope(-2, 5)}) {
                auto y = FNPoint::torus(kZero, l, 0.0);
                double dt = twist(x, nu, kZero) - twist(y, nu, kZero);
                EXPECT_NEAR(dt, s, 2.0) << l << " " << s << " " << nu.str();
            }
            EXPECT_NEAR(twist(x, Slope::infinity(), kZero), s, 1.0);
        }
    }
}
