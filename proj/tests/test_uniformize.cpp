#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "teich/uniformize.hpp"

using namespace teich;

namespace {

// Direct lattice sum of ℘(z1) − ℘(z2) over a square box; the difference
// converges absolutely, with error O(1/N).
cplx lattice_difference(cplx z1, cplx z2, cplx tau, int N) {
    cplx s = 1.0 / (z1 * z1) - 1.0 / (z2 * z2);
    for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) continue;
            const cplx w = double(m) + double(n) * tau;
            s += 1.0 / ((z1 - w) * (z1 - w)) - 1.0 / ((z2 - w) * (z2 - w));
        }
    return s;
}

}  // namespace

TEST(Weierstrass, MatchesLatticeSumAndLaurentSeries) {
    for (cplx tau : {cplx(0, 1), cplx(0.3, 1.4), cplx(-0.45, 2.5)}) {
        const cplx z1(0.31, 0.17), z2(0.12, 0.52);
        cplx direct = lattice_difference(z1, z2, tau, 300);
        cplx rows = weierstrass_p(z1, tau) - weierstrass_p(z2, tau);
        EXPECT_LT(std::abs(direct - rows), 2e-3 * std::abs(rows)) << tau;
        // ℘(z) = 1/z² + O(z²): no constant term.
        const cplx small(1e-3, 2e-3);
        EXPECT_LT(std::abs(weierstrass_p(small, tau) - 1.0 / (small * small)), 1e-4);
        // Periodicity.
        EXPECT_LT(std::abs(weierstrass_p(z1 + 1.0, tau) - weierstrass_p(z1, tau)), 1e-9);
        EXPECT_LT(std::abs(weierstrass_p(z1 + tau, tau) - weierstrass_p(z1, tau)), 1e-9);
    }
}

TEST(Uniformization, SquareAndHexagonalTori) {
    auto sq = fn_from_tau(cplx(0, 1));
    EXPECT_NEAR(sq.length(), 2 * std::acosh(std::sqrt(2.0)), 1e-9);
    EXPECT_NEAR(sq.twist(), 0.0, 1e-9);
    auto hex = fn_from_tau(std::polar(1.0, std::numbers::pi / 3));
    EXPECT_NEAR(hex.length(), 2 * std::acosh(1.5), 1e-9);
    EXPECT_NEAR(std::exp(log_trace(hex, Slope(1, 1))), 6.0, 1e-8);
    EXPECT_NEAR(std::exp(log_trace(hex, Slope(-1, 1))), 3.0, 1e-8);
    // The unit square flat torus is the square conformal class.
    auto flat = fn_from_flat(unit_square_torus());
    EXPECT_NEAR(curve_length(flat, CurveClass{Slope(0, 1)}), sq.length(), 1e-9);
}

TEST(Uniformization, MonodromyIsFuchsianWithParabolicCommutator) {
    for (cplx tau : {cplx(0.21, 1.3), cplx(-0.4, 3.7)}) {
        cplx B = detail::AccessoryCache::instance().solve(tau);
        auto M1 = detail::lame_monodromy(tau, B, 1.0);
        auto M2 = detail::lame_monodromy(tau, B, tau);
        auto inv = [](const detail::Mat2c& m) { return detail::Mat2c{m[3], -m[1], -m[2], m[0]}; };
        auto C = detail::mulc(detail::mulc(M1, M2), detail::mulc(inv(M1), inv(M2)));
        EXPECT_NEAR((C[0] + C[3]).real(), -2.0, 1e-8);
        auto t = detail::lame_traces(tau, B);
        for (cplx v : {t.x, t.y, t.z}) EXPECT_LT(std::fabs(v.imag()), 1e-10 * std::abs(v));
        const double x = t.x.real(), y = t.y.real(), z = t.z.real();
        EXPECT_NEAR((x * x + y * y + z * z) / (x * y * z), 1.0, 1e-10);
    }
}

TEST(Uniformization, RoundTripsAcrossThickAndThin) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ure(-3.0, 3.0), ulog(std::log(0.3), std::log(120.0));
    for (int trial = 0; trial < 12; ++trial) {
        const cplx tau(ure(rng), std::exp(ulog(rng)));
        auto x = fn_from_tau(tau);
        const cplx back = tau_from_fn(x);
        EXPECT_LT(hyperbolic_distance(tau, back), 1e-8) << tau << " -> " << back;
    }
}

TEST(Uniformization, ThinBranchJoinsContinuously) {
    const double y = detail::thin_model().y_switch;
    auto below = fn_from_tau(cplx(0.1, y * (1 - 1e-9)));
    auto above = fn_from_tau(cplx(0.1, y * (1 + 1e-9)));
    EXPECT_NEAR(below.length() / above.length(), 1.0, 1e-7);
    // Collar asymptotics: Im τ ≈ π/l.
    auto far = fn_from_tau(cplx(0, 2000));
    EXPECT_NEAR(far.length() * 2000 / std::numbers::pi, 1.0, 1e-3);
}

TEST(ExactDistance, FlowIsUnitSpeed) {
    auto q = build_flat_surface(MeasuredMulticurve::slope(Slope(1, 2)), MeasuredMulticurve::slope(Slope(-1, 1)));
    for (double t : {-2.0, 0.5, 4.0}) EXPECT_NEAR(exact_distance_T11(q, flow(q, t)), std::fabs(t), 1e-12);
    EXPECT_NEAR(exact_distance_T11(T11Point{cplx(0, 1)}, T11Point{cplx(0, 2)}), 0.5 * std::log(2.0), 1e-15);
}
