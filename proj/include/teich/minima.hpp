#pragma once

// Kerckhoff lines of minima on the once-punctured torus: minimizers of
// e^t·l(ν⁺) + e^{−t}·l(ν⁻) over Fenchel–Nielsen coordinates, traced in t.

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "teich/curves.hpp"
#include "teich/hyperbolic.hpp"
#include "teich/uniformize.hpp"

namespace teich {

inline double objective(const FNPoint& x, const MeasuredMulticurve& p, const MeasuredMulticurve& m, double t) {
    return std::exp(t) * multicurve_length(x, p) + std::exp(-t) * multicurve_length(x, m);
}

struct MinimaSample {
    double t = 0;
    FNPoint point;
    double objective_value = 0;
    /// |∇ log objective| in (log l, s̃) coordinates.
    double gradient_norm = 0;
    int solver_iterations = 0;
    /// Set when the systole fell below 1e−6.
    bool near_cusp = false;
};

struct MinimizeOptions {
    double tol_grad = 1e-9;
    int max_iterations = 200;
};

namespace detail {

struct WeightedSlope {
    Slope curve;
    double weight;
};

inline std::vector<WeightedSlope> weighted_slopes(const MeasuredMulticurve& m, double scale) {
    if (!m.surface().is_punctured_torus() || m.origami())
        throw std::domain_error("lines of minima are implemented for the once-punctured torus");
    std::vector<WeightedSlope> out;
    for (const auto& c : m.components()) out.push_back({as_slope(c.curve), scale * to_double(c.weight)});
    return out;
}

/// The objective in the chart (log l, s̃) attached to a fixed pants curve.
class Chart {
public:
    Chart(const Slope& pants, std::vector<WeightedSlope> curves)
        : pants_(pants), basis_(TorusBasis::adapted_to(pants)), curves_(std::move(curves)) {}

    template <class T>
    T value(const T& log_l, const T& stw) const {
        const T l = std::exp(log_l);
        T sum = T(0);
        for (const auto& c : curves_) sum += c.weight * torus_length(l, stw, basis_, c.curve);
        return sum;
    }

    /// Complex-step gradient: exact to rounding, no subtractive cancellation.
    std::array<double, 2> gradient(double u, double s) const {
        using C = std::complex<double>;
        constexpr double h = 1e-30;
        return {value(C(u, h), C(s)).imag() / h, value(C(u), C(s, h)).imag() / h};
    }

    std::array<double, 4> hessian(double u, double s) const {
        const double h = 1e-5;
        auto gu1 = gradient(u + h, s), gu0 = gradient(u - h, s);
        auto gs1 = gradient(u, s + h), gs0 = gradient(u, s - h);
        const double huu = (gu1[0] - gu0[0]) / (2 * h), hss = (gs1[1] - gs0[1]) / (2 * h);
        const double hus = 0.5 * ((gu1[1] - gu0[1]) + (gs1[0] - gs0[0])) / (2 * h);
        return {huu, hus, hus, hss};
    }

    const Slope& pants() const { return pants_; }

private:
    Slope pants_;
    TorusBasis basis_;
    std::vector<WeightedSlope> curves_;
};

inline std::vector<WeightedSlope> objective_terms(const MeasuredMulticurve& p, const MeasuredMulticurve& m, double t) {
    auto terms = weighted_slopes(p, std::exp(t));
    for (auto& w : weighted_slopes(m, std::exp(-t))) terms.push_back(w);
    return terms;
}

/// Damped Newton in one chart. Returns false if the systole left the chart's
/// pants curve, in which case the caller rebases and resumes.
inline bool newton_in_chart(const Chart& chart, double& u, double& s, double tol, int& iterations, int max_iter,
                            double& grad_norm) {
    for (; iterations < max_iter; ++iterations) {
        const double f = chart.value(u, s);
        auto g = chart.gradient(u, s);
        grad_norm = std::hypot(g[0], g[1]) / f;
        if (grad_norm < tol) return true;
        auto H = chart.hessian(u, s);
        // Levenberg shift keeps the step a descent direction off the convex region.
        double lambda = 0;
        const double diag = std::max(std::fabs(H[0]), std::fabs(H[3]));
        std::array<double, 2> step{};
        for (int tries = 0; tries < 60; ++tries) {
            const double a = H[0] + lambda, b = H[1], d = H[3] + lambda;
            const double det = a * d - b * b;
            if (a > 0 && det > 0) {
                step = {-(d * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det};
                break;
            }
            lambda = lambda == 0 ? 1e-8 * std::max(diag, f) : 10 * lambda;
        }
        // Bound the move in log-length; twist moves are bounded by l.
        const double cap = 2.0;
        const double size = std::max(std::fabs(step[0]), std::fabs(step[1]) / std::max(std::exp(u), 1e-300));
        if (size > cap) { step[0] *= cap / size; step[1] *= cap / size; }
        const double slope = g[0] * step[0] + g[1] * step[1];
        double alpha = 1;
        bool moved = false;
        if (grad_norm < 1e-6) {
            // Inside the quadratic basin the decrease drops below rounding of
            // f, so the Armijo test is meaningless; take the Newton step.
            u += step[0]; s += step[1];
            moved = true;
        }
        for (int ls = 0; ls < 60 && !moved; ++ls) {
            const double un = u + alpha * step[0], sn = s + alpha * step[1];
            const double fn = chart.value(un, sn);
            if (std::isfinite(fn) && fn <= f + 1e-4 * alpha * slope) {
                u = un; s = sn; moved = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!moved) {
            return false;
        }
        // Leave the chart once its pants curve is no longer the systole.
        const FNPoint x = FNPoint::torus(chart.pants(), std::exp(u), s / std::exp(u));
        if (!(systole(x).curve == chart.pants())) {
            ++iterations;
            return false;
        }
    }
    return false;
}

}  // namespace detail

/// Initial guess: the Teichmüller geodesic point at t, which the line of
/// minima shadows in the thick part.
inline FNPoint geodesic_guess(const MeasuredMulticurve& p, const MeasuredMulticurve& m, double t) {
    return fn_from_flat(flow(build_flat_surface(p, m), t));
}

inline MinimaSample minimize(const MeasuredMulticurve& p, const MeasuredMulticurve& m, double t,
                             std::optional<FNPoint> warm = std::nullopt, const MinimizeOptions& opt = {}) {
    if (!fills(p, m)) throw std::domain_error("minimize: the laminations do not fill, the objective is not proper");
    const auto terms = detail::objective_terms(p, m, t);
    FNPoint x = rebase_to_systole(warm ? *warm : geodesic_guess(p, m, t));
    int iterations = 0;
    double grad_norm = std::numeric_limits<double>::infinity();
    for (int rebases = 0; rebases < 50; ++rebases) {
        detail::Chart chart(x.pants_curve(), terms);
        double u = std::log(x.length()), s = x.twist_length();
        const bool done = detail::newton_in_chart(chart, u, s, opt.tol_grad, iterations, opt.max_iterations, grad_norm);
        x = rebase_to_systole(FNPoint::torus(chart.pants(), std::exp(u), s / std::exp(u)));
        if (done && x.pants_curve() == chart.pants()) break;
        if (iterations >= opt.max_iterations) break;
    }
    if (!(grad_norm < opt.tol_grad))
        throw std::runtime_error("minimize: no convergence at t = " + std::to_string(t) +
                                 " (gradient " + std::to_string(grad_norm) + ")");
    MinimaSample out;
    out.t = t;
    out.point = x;
    out.objective_value = objective(x, p, m, t);
    out.gradient_norm = grad_norm;
    out.solver_iterations = iterations;
    out.near_cusp = x.length() < 1e-6;
    return out;
}

/// Distance between FN points in the chart of the first: |Δ log l| + |Δ s̃|.
inline double fn_distance(const FNPoint& a, const FNPoint& b) {
    const FNPoint bb = rebase(b, a.pants_curve());
    return std::fabs(std::log(a.length()) - std::log(bb.length())) + std::fabs(a.twist_length() - bb.twist_length());
}

/// Re-minimizes from random perturbations of a minimizer and returns the
/// largest FN distance to it.
inline double uniqueness_spread(const MeasuredMulticurve& p, const MeasuredMulticurve& m, const MinimaSample& s,
                                int restarts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> du(-0.7, 0.7), ds(-0.5, 0.5);
    double worst = 0;
    for (int k = 0; k < restarts; ++k) {
        const double l = s.point.length() * std::exp(du(rng));
        const double stw = s.point.twist_length() + ds(rng) * l;
        auto r = minimize(p, m, s.t, FNPoint::torus(s.point.pants_curve(), l, stw / l));
        worst = std::max(worst, fn_distance(s.point, r.point));
    }
    return worst;
}

namespace detail {

/// Jump measure between consecutive minima: largest change of log length
/// among the lamination components.
inline double trace_jump(const FNPoint& a, const FNPoint& b, const MeasuredMulticurve& p, const MeasuredMulticurve& m) {
    double worst = 0;
    for (const auto* mc : {&p, &m})
        for (const auto& c : mc->components())
            worst = std::max(worst, std::fabs(std::log(curve_length(a, c.curve)) - std::log(curve_length(b, c.curve))));
    return worst;
}

}  // namespace detail

/// Warm-started continuation along an increasing grid. A step whose jump is
/// more than 10× the local trend is bisected until the trend is restored.
inline std::vector<MinimaSample> trace_line(const MeasuredMulticurve& p, const MeasuredMulticurve& m,
                                            const std::vector<double>& t_grid, const MinimizeOptions& opt = {}) {
    std::vector<MinimaSample> out;
    if (t_grid.empty()) return out;
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw std::invalid_argument("trace_line: grid must increase");
    out.push_back(minimize(p, m, t_grid[0], std::nullopt, opt));
    double trend = -1;  // jump per unit t
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        const double t1 = t_grid[i];
        MinimaSample prev = out.back();
        // Walk from prev to t1, bisecting steps whose jump breaks the trend.
        double t = prev.t, h = t1 - prev.t;
        while (t < t1) {
            h = std::min(h, t1 - t);
            auto next = minimize(p, m, t + h, prev.point, opt);
            const double rate = detail::trace_jump(prev.point, next.point, p, m) / h;
            if (trend > 0 && rate > 10 * std::max(trend, 1.0)) {
                if (h < 1e-6) throw std::runtime_error("trace_line: discontinuity at t = " + std::to_string(t + h));
                h *= 0.5;
                continue;
            }
            trend = trend < 0 ? rate : 0.5 * (trend + rate);
            t += h;
            prev = next;
            h = t1 - t;
        }
        out.push_back(prev);
    }
    return out;
}

}  // namespace teich
