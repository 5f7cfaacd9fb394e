#pragma once

// Uniformization of the once-punctured torus: conversion between the period
// τ of a flat marked torus and Fenchel–Nielsen coordinates of the complete
// hyperbolic metric in the same conformal class.
//
// The hyperbolic structure on C/(Z + τZ) minus the origin is the quotient
// of the projective structure of the Lamé equation
//     y'' + ¼ (℘(z) + B) y = 0
// for the unique accessory parameter B making the monodromy real. The
// monodromy along the periods 1 and τ gives traces of the slopes 0/1 and 1/0.
// Very thin tori use the collar asymptotic Im τ ≈ π/l − 4 log 2/π + c l²,
// with c fitted to the equation at the switch point.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "flat.hpp"
#include "hyperbolic.hpp"

namespace teich {

using cplx = std::complex<double>;

/// Weierstrass ℘ for the lattice Z + τZ, summed by rows:
/// ℘(z) = −π²/3 + Σ_n [π²/sin²(π(z + nτ)) − π²/sin²(π n τ)] (n = 0 term has no subtraction).
inline cplx weierstrass_p(cplx z, cplx tau) {
    constexpr double pi = std::numbers::pi;
    auto f = [](cplx w) {
        // π²/sin²(πw) = −4π² e / (1 − e)² with e = exp(±2πiw), |e| < 1.
        const cplx e = w.imag() > 0 ? std::exp(cplx(0, 2 * pi) * w) : std::exp(cplx(0, -2 * pi) * w);
        return -4 * pi * pi * e / ((1.0 - e) * (1.0 - e));
    };
    cplx s = -pi * pi / 3 + f(z);
    const int rows = static_cast<int>(std::fabs(z.imag()) / tau.imag()) + 4;
    for (int n = 1; n <= rows; ++n)
        for (int sg : {1, -1}) s += f(z + double(sg * n) * tau) - f(double(sg * n) * tau);
    return s;
}

namespace detail {

using LameState = std::array<double, 8>;
using Mat2c = std::array<cplx, 4>;

inline Mat2c mulc(const Mat2c& a, const Mat2c& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

/// Monodromy of the Lamé equation along z0 + s·dir, s ∈ [0, 1], from z0 = (1 + τ)/2.
inline Mat2c lame_monodromy(cplx tau, cplx B, cplx dir) {
    namespace odeint = boost::numeric::odeint;
    const cplx z0 = (1.0 + tau) / 2.0;
    auto rhs = [&](const LameState& u, LameState& du, double s) {
        const cplx y1(u[0], u[1]), v1(u[2], u[3]), y2(u[4], u[5]), v2(u[6], u[7]);
        const cplx Q = 0.25 * (weierstrass_p(z0 + s * dir, tau) + B);
        const cplx d[4] = {dir * v1, -dir * Q * y1, dir * v2, -dir * Q * y2};
        for (int k = 0; k < 4; ++k) { du[2 * k] = d[k].real(); du[2 * k + 1] = d[k].imag(); }
    };
    LameState u{1, 0, 0, 0, 0, 0, 1, 0};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<LameState>>(1e-14, 1e-13);
    odeint::integrate_adaptive(stepper, rhs, u, 0.0, 1.0, 0.01);
    return {cplx(u[0], u[1]), cplx(u[4], u[5]), cplx(u[2], u[3]), cplx(u[6], u[7])};
}

struct LameTraces {
    cplx x, y, z;  // slopes 0/1, 1/0 and 1/1
};

inline LameTraces lame_traces(cplx tau, cplx B) {
    auto M1 = lame_monodromy(tau, B, 1.0);
    auto M2 = lame_monodromy(tau, B, tau);
    auto M = mulc(M1, M2);
    return {M1[0] + M1[3], M2[0] + M2[3], M[0] + M[3]};
}

/// Gauss–Newton solve for the accessory parameter: Im tr M1 = Im tr M2 =
/// Im tr M1M2 = 0. On rectangular lattices every real B makes the first two
/// real, so the product trace is needed. The traces are holomorphic in B, so
/// one complex difference gives the Jacobian.
inline cplx newton_accessory(cplx tau, cplx B) {
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        auto t = lame_traces(tau, B);
        const std::array<double, 3> F{t.x.imag(), t.y.imag(), t.z.imag()};
        const double scale = std::max({std::abs(t.x), std::abs(t.y), std::abs(t.z)});
        const double res = std::hypot(F[0], F[1], F[2]);
        if (res < 1e-12 * scale) return B;
        // The ODE error leaves a floor of a few 1e-12 relative, higher up the
        // cusp; once the residual stops halving below 1e-9 it has hit it.
        if (res < 1e-9 * scale && res > 0.5 * prev) return B;
        prev = res;
        const double h = 1e-7 * std::max(1.0, std::abs(B));
        auto t2 = lame_traces(tau, B + h);
        const std::array<cplx, 3> d{(t2.x - t.x) / h, (t2.y - t.y) / h, (t2.z - t.z) / h};
        // Row k: (∂Im/∂Re B, ∂Im/∂Im B) = (Im d, Re d).
        double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
        for (int k = 0; k < 3; ++k) {
            const double j0 = d[k].imag(), j1 = d[k].real();
            a00 += j0 * j0; a01 += j0 * j1; a11 += j1 * j1;
            b0 -= j0 * F[k]; b1 -= j1 * F[k];
        }
        const double det = a00 * a11 - a01 * a01;
        if (det == 0) break;
        B += cplx((b0 * a11 - a01 * b1) / det, (a00 * b1 - a01 * b0) / det);
    }
    throw std::runtime_error("accessory parameter solve did not converge");
}

/// Cache of solved (τ, B) pairs; new solves continue from the nearest entry.
class AccessoryCache {
public:
    cplx solve(cplx tau) {
        std::lock_guard<std::mutex> lock(mu_);
        cplx from = 0, B = 0;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [t, b] : table_) {
            double d = distance(t, tau);
            if (d < best) { best = d; from = t; B = b; }
        }
        if (best < 1e-14) return B;
        // Steps small in the hyperbolic metric keep Newton in its basin.
        const int steps = std::max(1, static_cast<int>(std::ceil(best / 0.25)));
        for (int k = 1; k <= steps; ++k) {
            const double s = static_cast<double>(k) / steps;
            const cplx t(from.real() + s * (tau.real() - from.real()),
                         std::exp(std::log(from.imag()) + s * (std::log(tau.imag()) - std::log(from.imag()))));
            B = newton_accessory(t, B);
        }
        if (table_.size() < 4096) table_.push_back({tau, B});
        return B;
    }

    static AccessoryCache& instance() {
        static AccessoryCache cache;
        return cache;
    }

private:
    AccessoryCache() {
        constexpr double pi = std::numbers::pi;
        table_ = {{cplx(0, 1), 0.0}, {std::polar(1.0, pi / 3), 0.0}, {std::polar(1.0, 2 * pi / 3), 0.0}};
    }
    static double distance(cplx a, cplx b) {
        return 2 * std::asinh(std::abs(a - b) / (2 * std::sqrt(a.imag() * b.imag())));
    }
    std::mutex mu_;
    std::vector<std::pair<cplx, cplx>> table_;
};

}  // namespace detail

/// Lattice reduction: returns τ' in the standard fundamental domain and the
/// integer basis (f1, f2) of homology with hol(f1) ∝ 1, hol(f2) ∝ τ'.
struct ReducedPeriod {
    cplx tau;
    Vec2i f1, f2;
};

inline ReducedPeriod reduce_period(cplx tau) {
    if (!(tau.imag() > 0)) throw std::domain_error("period must lie in the upper half plane");
    // Holonomies of the basis vectors.
    cplx w1 = 1.0, w2 = tau;
    Vec2i f1{1, 0}, f2{0, 1};
    for (int guard = 0; guard < 10000; ++guard) {
        // Shorten w2 against w1.
        const double m = std::round(std::real(w2 / w1));
        if (m != 0) {
            w2 -= m * w1;
            f2 = f2 - f1 * static_cast<std::int64_t>(m);
        }
        if (std::abs(w2) < std::abs(w1) * (1 - 1e-15)) {
            // Swap keeping orientation: (w1, w2) -> (w2, -w1).
            cplx t = w1;
            w1 = w2;
            w2 = -t;
            Vec2i g = f1;
            f1 = f2;
            f2 = g * -1;
            continue;
        }
        break;
    }
    return {w2 / w1, f1, f2};
}

namespace detail {

struct ThinModel {
    double y_switch = 40.0;
    double l_switch = 0.0;
    double c2 = 0.0;
};

inline double tau_imag_asymptotic(double l, double c2) {
    return std::numbers::pi / l - 4 * std::log(2.0) / std::numbers::pi + c2 * l * l;
}

/// FN data (pants e1, twist relative to e2) of a τ in the fundamental domain
/// below the switch height, from the Lamé monodromy.
inline std::pair<double, double> fn_from_reduced_tau(cplx tau) {
    const cplx B = AccessoryCache::instance().solve(tau);
    auto t = lame_traces(tau, B);
    const double x = std::fabs(t.x.real()), y = std::fabs(t.y.real()), z = std::fabs(t.z.real());
    const double l = 2 * std::acosh(std::max(1.0, x / 2));
    // tr(e1+e2)/tr e2 = cosh(l/2) + tanh(s̃/2) sinh(l/2); the sign of z fixes the handedness.
    const double sign_z = (t.x.real() * t.y.real() * t.z.real() >= 0) ? 1.0 : -1.0;
    const double zz = sign_z * z;
    const double th = (zz / y - std::cosh(l / 2)) / std::sinh(l / 2);
    double stw;
    if (std::fabs(th) < 0.5) {
        stw = 2 * std::atanh(th);
    } else {
        stw = (th > 0 ? 2.0 : -2.0) * std::acosh(std::max(1.0, y * std::tanh(l / 2) / 2));
    }
    return {l, stw};
}

inline const ThinModel& thin_model() {
    static ThinModel model;
    static std::once_flag once;
    std::call_once(once, [] {
        auto [l, stw] = fn_from_reduced_tau(cplx(0, model.y_switch));
        (void)stw;
        model.l_switch = l;
        model.c2 = (model.y_switch - tau_imag_asymptotic(l, 0.0)) / (l * l);
    });
    return model;
}

/// (l, s̃) relative to pants f1 and dual f2 of a reduced period.
inline std::pair<double, double> fn_of_reduced(cplx tau) {
    const auto& thin = thin_model();
    if (tau.imag() <= thin.y_switch) return fn_from_reduced_tau(tau);
    // Invert Im τ = π/l − 4 log 2/π + c l² by Newton from the leading term.
    double l = std::numbers::pi / (tau.imag() + 4 * std::log(2.0) / std::numbers::pi);
    for (int it = 0; it < 50; ++it) {
        const double g = tau_imag_asymptotic(l, thin.c2) - tau.imag();
        const double dg = -std::numbers::pi / (l * l) + 2 * thin.c2 * l;
        const double step = g / dg;
        l -= step;
        if (std::fabs(step) < 1e-16 * l) break;
    }
    return {l, tau.real() * l};
}

}  // namespace detail

/// Point of T(1,1) as the period τ = hol(slope ∞)/hol(slope 0) of the flat torus.
struct T11Point {
    cplx tau;
};

inline T11Point t11_point(const FlatSurface& q) { return {q.period()}; }

/// Hyperbolic Fenchel–Nielsen coordinates of the conformal class τ.
inline FNPoint fn_from_tau(cplx tau) {
    const auto red = reduce_period(tau);
    auto [l, stw] = detail::fn_of_reduced(red.tau);
    // Express the twist relative to the dual curve chosen by adapted_to.
    const Slope pants = Slope::from_homology(red.f1);
    const auto B = TorusBasis::adapted_to(pants);
    const std::int64_t eps = (B.a == red.f1) ? 1 : -1;
    const Vec2i f2 = red.f2 * eps;  // (eps f1, eps f2) has the same traces
    // B.b = f2 + k·a, so the twist relative to B.b is s̃ + k l.
    const std::int64_t k = B.coords(B.b - f2).x;
    return FNPoint::torus(pants, l, (stw + static_cast<double>(k) * l) / l);
}

inline FNPoint fn_from_flat(const FlatSurface& q) { return fn_from_tau(q.period()); }

/// Period τ of the conformal class of an FN point.
inline cplx tau_from_fn(const FNPoint& x) {
    const auto [sys, second] = two_shortest(x);
    (void)second;
    FNPoint y = rebase(x, sys.curve);
    const auto B = y.basis();
    // Dual with twist in [-1/2, 1/2].
    const std::int64_t shift = std::llround(y.twist());
    const Vec2i dual = B.b - B.a * shift;
    const double l = y.length();
    const double stw = y.twist_length() - static_cast<double>(shift) * l;
    const auto& thin = detail::thin_model();
    cplx tau_r;
    if (l < thin.l_switch) {
        // Inverse of the asymptotic branch used by fn_of_reduced.
        tau_r = cplx(stw / l, detail::tau_imag_asymptotic(l, thin.c2));
    } else {
        // Newton on τ: match (l, s̃) of the Lamé model.
        tau_r = cplx(stw / l, std::max(0.8, detail::tau_imag_asymptotic(l, thin.c2)));
        for (int it = 0; it < 40; ++it) {
            auto f = [&](cplx t) {
                auto [lt, st] = detail::fn_from_reduced_tau(t);
                return std::array<double, 2>{std::log(lt) - std::log(l), st - stw};
            };
            auto F = f(tau_r);
            if (std::hypot(F[0], F[1]) < 1e-12) break;
            const double h = 1e-6;
            auto Fx = f(tau_r + h), Fy = f(tau_r + cplx(0, h));
            const double J00 = (Fx[0] - F[0]) / h, J01 = (Fy[0] - F[0]) / h;
            const double J10 = (Fx[1] - F[1]) / h, J11 = (Fy[1] - F[1]) / h;
            const double det = J00 * J11 - J01 * J10;
            cplx step((-F[0] * J11 + F[1] * J01) / det, (-J00 * F[1] + J10 * F[0]) / det);
            // Stay in the upper half plane.
            while (tau_r.imag() + step.imag() <= 0.05) step *= 0.5;
            tau_r += step;
        }
    }
    // hol(a) = 1, hol(dual) = τ_r; express the standard basis e1, e2 in (a, dual).
    const TorusBasis frame{B.a, dual};
    const Vec2i c1 = frame.coords({1, 0}), c2 = frame.coords({0, 1});
    const cplx h1 = static_cast<double>(c1.x) + static_cast<double>(c1.y) * tau_r;
    const cplx h2 = static_cast<double>(c2.x) + static_cast<double>(c2.y) * tau_r;
    return h2 / h1;
}

/// Hyperbolic distance in the upper half plane.
inline double hyperbolic_distance(cplx a, cplx b) {
    return 2 * std::asinh(std::abs(a - b) / (2 * std::sqrt(a.imag() * b.imag())));
}

/// Exact Teichmüller distance on T(1,1): half the hyperbolic distance of periods.
inline double exact_distance_T11(const T11Point& a, const T11Point& b) {
    return 0.5 * hyperbolic_distance(a.tau, b.tau);
}
inline double exact_distance_T11(const FNPoint& a, const FNPoint& b) {
    return exact_distance_T11(T11Point{tau_from_fn(a)}, T11Point{tau_from_fn(b)});
}
inline double exact_distance_T11(const FlatSurface& a, const FlatSurface& b) {
    return exact_distance_T11(t11_point(a), t11_point(b));
}

}  // namespace teich
