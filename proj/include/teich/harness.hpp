#pragma once

// Experiment runner: JSON run configuration, sweeps along G_t and L_t, the
// quasi-geodesy fit and the audits of the short-curve, decay, twist, surgery
// and dichotomy statements. Every audit reports the constant it measured.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "teich/curves.hpp"
#include "teich/flat.hpp"
#include "teich/hyperbolic.hpp"
#include "teich/metric.hpp"
#include "teich/minima.hpp"
#include "teich/uniformize.hpp"

namespace teich {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

struct Thresholds {
    double qg_c_max = 4;
    double qg_C_max = 10;
    double band_max = 20;
    double decay_max = 4;
    double twist_shift_max = 4;
    double twist_product_max = 50;
    double flat_twist_max = 50;
    double kappa_max = 2;
    double surrogate_max = 1;
    double annulus_slack_max = 3;
};

struct RunConfig {
    std::string name = "run";
    std::shared_ptr<const Origami> origami;  // null: the punctured torus
    MeasuredMulticurve plus, minus;
    double t_min = -6, t_max = 6, t_step = 0.1;
    double eps0 = 0.1, eps_prime = 0.1, M = 10;
    double tol_grad = 1e-9;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    /// Extra randomized slope pairs for the torus audits.
    int random_pairs = 0;
    /// Curve cut by the surgery check (origami runs).
    std::string alpha;
    Thresholds thresholds;

    std::vector<double> grid() const {
        if (!(t_step > 0)) throw std::invalid_argument("t step must be positive");
        const auto n = static_cast<int>(std::llround((t_max - t_min) / t_step));
        std::vector<double> g;
        for (int k = 0; k <= n; ++k) g.push_back(t_min + t_step * k);
        return g;
    }
    bool torus() const { return !origami; }
};

inline MeasuredMulticurve parse_multicurve(const json& j, const std::shared_ptr<const Origami>& o) {
    std::vector<MulticurveComponent> comps;
    for (const auto& c : j) {
        const std::string w = c.contains("weight") ? c.at("weight").get<std::string>() : "1";
        comps.push_back({parse_curve(c.at("curve").get<std::string>(), o.get()), parse_rational(w)});
    }
    return o ? MeasuredMulticurve::on_origami(o, comps) : MeasuredMulticurve::on_torus(comps);
}

inline RunConfig parse_config(const json& j) {
    RunConfig cfg;
    cfg.name = j.value("name", cfg.name);
    if (j.contains("surface") && j.at("surface").is_object()) {
        const auto& s = j.at("surface");
        auto o = std::make_shared<const Origami>(s.at("right").get<std::vector<int>>(), s.at("top").get<std::vector<int>>());
        if (s.contains("squares") && s.at("squares").get<int>() != o->size())
            throw std::invalid_argument("origami square count does not match the permutations");
        cfg.origami = o;
        if (!j.contains("plus") && s.contains("widths")) {
            // Widths and heights determine the vertical and horizontal cores.
            std::vector<Rational> w, h;
            for (const auto& x : s.at("widths")) w.push_back(parse_rational(x.get<std::string>()));
            for (const auto& x : s.at("heights")) h.push_back(parse_rational(x.get<std::string>()));
            auto lam = cylinder_laminations(FlatSurface(o, w, h));
            cfg.plus = lam.first;
            cfg.minus = lam.second;
        }
    } else if (j.contains("surface") && j.at("surface").get<std::string>() != "torus") {
        throw std::invalid_argument("surface must be \"torus\" or an origami object");
    }
    if (j.contains("plus")) cfg.plus = parse_multicurve(j.at("plus"), cfg.origami);
    if (j.contains("minus")) cfg.minus = parse_multicurve(j.at("minus"), cfg.origami);
    if (cfg.plus.empty() || cfg.minus.empty()) throw std::invalid_argument("config needs both laminations");
    if (j.contains("t")) {
        const auto& t = j.at("t");
        cfg.t_min = t.value("min", cfg.t_min);
        cfg.t_max = t.value("max", cfg.t_max);
        cfg.t_step = t.value("step", cfg.t_step);
    }
    cfg.eps0 = j.value("eps0", cfg.eps0);
    cfg.eps_prime = j.value("eps_prime", cfg.eps_prime);
    cfg.M = j.value("M", cfg.M);
    cfg.tol_grad = j.value("tol_grad", cfg.tol_grad);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.out_dir = j.value("out", cfg.out_dir);
    cfg.random_pairs = j.value("random_pairs", cfg.random_pairs);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("thresholds")) {
        const auto& t = j.at("thresholds");
        auto& th = cfg.thresholds;
        th.qg_c_max = t.value("qg_c_max", th.qg_c_max);
        th.qg_C_max = t.value("qg_C_max", th.qg_C_max);
        th.band_max = t.value("band_max", th.band_max);
        th.decay_max = t.value("decay_max", th.decay_max);
        th.twist_shift_max = t.value("twist_shift_max", th.twist_shift_max);
        th.twist_product_max = t.value("twist_product_max", th.twist_product_max);
        th.flat_twist_max = t.value("flat_twist_max", th.flat_twist_max);
        th.kappa_max = t.value("kappa_max", th.kappa_max);
        th.surrogate_max = t.value("surrogate_max", th.surrogate_max);
        th.annulus_slack_max = t.value("annulus_slack_max", th.annulus_slack_max);
    }
    if (!(cfg.eps_prime <= cfg.eps0)) throw std::invalid_argument("eps_prime must not exceed eps0");
    if (!(cfg.t_max >= cfg.t_min)) throw std::invalid_argument("t range is empty");
    if (!fills(cfg.plus, cfg.minus)) throw std::invalid_argument("the laminations do not fill");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return parse_config(json::parse(in));
}

// ---------------------------------------------------------------------------
// Output

/// CSV writer with 17 significant digits, so fixed seeds give identical bytes.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    Csv& row() {
        rows_.emplace_back();
        return *this;
    }
    Csv& operator<<(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return add(buf);
    }
    Csv& operator<<(int v) { return add(std::to_string(v)); }
    Csv& operator<<(const std::string& s) { return add(s); }
    Csv& operator<<(const char* s) { return add(s); }

    std::size_t size() const { return rows_.size(); }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << join(header_) << '\n';
        for (const auto& r : rows_) out << join(r) << '\n';
    }

private:
    Csv& add(std::string s) {
        if (rows_.empty()) throw std::logic_error("Csv: value before row()");
        rows_.back().push_back(std::move(s));
        return *this;
    }
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::filesystem::path& path, const json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Random filling pairs

struct SlopePair {
    std::string label;
    MeasuredMulticurve plus, minus;
};

/// Filling pairs with a built-in twist: p and r are random slopes, and the
/// minus lamination is r twisted n times about a third slope crossing both,
/// so some curve gets short through twisting.
inline std::vector<SlopePair> random_slope_pairs(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> num(-4, 4), den(0, 4), turns(0, 80);
    auto draw = [&] {
        for (;;) {
            const std::int64_t p = num(rng), q = den(rng);
            if ((p != 0 || q != 0) && std::gcd(p, q) == 1) return Slope(p, q);
        }
    };
    std::vector<SlopePair> out;
    while (static_cast<int>(out.size()) < count) {
        const Slope a = draw(), p = draw(), r = draw();
        const auto ia = [](const Slope& x, const Slope& y) { return std::llabs(cross(x.homology(), y.homology())); };
        if (ia(a, p) == 0 || ia(a, r) == 0 || ia(p, r) == 0) continue;
        const std::int64_t n = turns(rng);
        const Slope m = as_slope(dehn_twist(CurveClass{r}, CurveClass{a}, n));
        if (ia(p, m) == 0) continue;
        out.push_back({"random" + std::to_string(out.size()) + "_" + p.str() + "_" + m.str(),
                       MeasuredMulticurve::slope(p), MeasuredMulticurve::slope(m)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPoint {
    double t = 0;
    FNPoint g;         // G_t, uniformized
    cplx g_tau;        // period of G_t
    MinimaSample L;    // L_t
    cplx l_tau;        // period of L_t
};

struct Sweep {
    std::string label;
    MeasuredMulticurve plus, minus;
    FlatSurface q0;
    std::vector<SweepPoint> points;

    FlatSurface flat_at(double t) const { return flow(q0, t - q0.t()); }
};

/// G_t and L_t on the grid, both with their periods.
inline Sweep run_sweep(const std::string& label, const MeasuredMulticurve& p, const MeasuredMulticurve& m,
                       const std::vector<double>& grid, double tol_grad) {
    Sweep s{label, p, m, build_flat_surface(p, m), {}};
    MinimizeOptions opt;
    opt.tol_grad = tol_grad;
    auto line = trace_line(p, m, grid, opt);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepPoint pt;
        pt.t = grid[i];
        pt.g_tau = flow(s.q0, grid[i]).period();
        pt.g = fn_from_tau(pt.g_tau);
        pt.L = std::move(line[i]);
        pt.l_tau = tau_from_fn(pt.L.point);
        s.points.push_back(std::move(pt));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Quasi-geodesy

struct QGPair {
    double a, b, d;
};

struct QGReport {
    std::string label;
    double c = 1, C = 0;
    int violations = 0;
    std::vector<QGPair> pairs;
    /// d(L_first, L_b) never drops by more than 2C as b grows.
    bool monotone = true;
    /// Largest d(G_t, L_t) over t where neither has a curve shorter than ε₀.
    double thick_distance = 0;
    GammaSplit gamma;
};

/// Smallest C for a given c so that (b−a)/c − C ≤ d ≤ c(b−a) + C on all pairs.
inline double qg_additive(const std::vector<QGPair>& pairs, double c) {
    double C = 0;
    for (const auto& p : pairs) {
        const double s = p.b - p.a;
        C = std::max({C, s / c - p.d, p.d - c * s});
    }
    return C;
}

/// Grid c ∈ {1.0, 1.1, …, 8.0} minimizing C, then a local refinement.
inline std::pair<double, double> fit_qg(const std::vector<QGPair>& pairs) {
    double best_c = 1, best_C = std::numeric_limits<double>::infinity();
    auto consider = [&](double c) {
        const double C = qg_additive(pairs, c);
        if (C < best_C - 1e-12) { best_C = C; best_c = c; }
    };
    for (int k = 10; k <= 80; ++k) consider(k / 10.0);
    const double coarse = best_c;
    for (int k = -100; k <= 100; ++k) {
        const double c = coarse + k * 0.001;
        if (c >= 1.0) consider(c);
    }
    return {best_c, best_C};
}

inline QGReport qgeo_report(const Sweep& s, const RunConfig& cfg) {
    QGReport r;
    r.label = s.label;
    const auto& pts = s.points;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i; j < pts.size(); ++j)
            r.pairs.push_back({pts[i].t, pts[j].t, 0.5 * hyperbolic_distance(pts[i].l_tau, pts[j].l_tau)});
    std::tie(r.c, r.C) = fit_qg(r.pairs);
    for (const auto& p : r.pairs) {
        const double span = p.b - p.a;
        if (p.d < span / r.c - r.C - 1e-12 || p.d > r.c * span + r.C + 1e-12) ++r.violations;
    }
    double prev = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double d = 0.5 * hyperbolic_distance(pts[0].l_tau, pts[j].l_tau);
        if (d < prev - 2 * r.C - 1e-9) r.monotone = false;
        prev = std::max(prev, d);
    }
    for (const auto& pt : pts)
        if (systole(pt.g).length >= cfg.eps0 && systole(pt.L.point).length >= cfg.eps0)
            r.thick_distance = std::max(r.thick_distance, 0.5 * hyperbolic_distance(pt.g_tau, pt.l_tau));
    r.gamma = classify_gamma(s.plus, s.minus, pts.front().t, pts.back().t, cfg.eps_prime, cfg.M, cfg.t_step);
    return r;
}

// ---------------------------------------------------------------------------
// Short-curve estimates along G_t and L_t

struct ShortCurveRow {
    double t;
    std::string side;  // "G" or "L"
    std::string curve;
    double length, D, K;
    /// max(D, log K) on G, max(D, √K) on L.
    double estimate;
    double ratio;  // (1/l) / estimate
    bool proxy;
};

struct ShortCurveAudit {
    std::vector<ShortCurveRow> rows;
    double band = 1;  // smallest c₂ with every ratio in [1/c₂, c₂]
};

inline void add_short_rows(const Sweep& s, double eps0, ShortCurveAudit& audit) {
    for (const auto& pt : s.points) {
        const FlatSurface q = s.flat_at(pt.t);
        for (int side = 0; side < 2; ++side) {
            const ShortCurve sc = systole(side == 0 ? pt.g : pt.L.point);
            if (!(sc.length < eps0)) continue;
            const CurveClass a{sc.curve};
            const double D = estimate_D(s.q0, a, pt.t, s.plus, s.minus);
            const double K = expanding_K(q, a);
            const double est = side == 0 ? std::max(D, std::log(K)) : std::max(D, std::sqrt(K));
            const double ratio = (1.0 / sc.length) / est;
            audit.rows.push_back({pt.t, side == 0 ? "G" : "L", sc.curve.str(), sc.length, D, K, est, ratio, false});
            audit.band = std::max({audit.band, ratio, 1.0 / ratio});
        }
    }
}

/// Origami surfaces: no hyperbolic lengths, so the rows carry the proxy
/// l = 1/max(D, log K) for every cylinder core and are flagged.
inline void add_proxy_rows(const RunConfig& cfg, ShortCurveAudit& audit) {
    const FlatSurface q0 = build_flat_surface(cfg.plus, cfg.minus);
    std::vector<CurveClass> cores;
    for (const auto* mc : {&cfg.plus, &cfg.minus})
        for (const auto& c : mc->components()) cores.push_back(c.curve);
    for (double t : cfg.grid()) {
        const FlatSurface q = flow(q0, t);
        for (const auto& a : cores) {
            const double D = estimate_D(q0, a, t, cfg.plus, cfg.minus);
            const double K = expanding_K(q, a);
            const double est = std::max(D, std::log(K));
            if (!(est > 1.0 / cfg.eps0)) continue;
            audit.rows.push_back({t, "G", to_string(a), 1.0 / est, D, K, est, 1.0, true});
        }
    }
}

inline Csv short_curve_csv(const ShortCurveAudit& a) {
    Csv csv({"t", "side", "curve", "length", "inv_length", "D", "K", "logK", "sqrtK", "estimate", "ratio", "proxy"});
    for (const auto& r : a.rows)
        csv.row() << r.t << r.side << r.curve << r.length << 1.0 / r.length << r.D << r.K << std::log(r.K)
                  << std::sqrt(r.K) << r.estimate << r.ratio << (r.proxy ? 1 : 0);
    return csv;
}

// ---------------------------------------------------------------------------
// Decay of K and the D/K crossing

struct DecayAudit {
    /// Smallest c with e^{−2(b−a)}K_b ≤ cK_a and K_a ≤ c e^{2(b−a)}K_b when K > M on [a, b].
    double two_sided_c = 1;
    /// Smallest c with K_w ≤ c K_v whenever v lies between t_α and w.
    double decay_c = 1;
    /// Smallest c with D_t ≤ c√K_t on [u, sup I_α] after a crossing at u.
    double crossing_c = 1;
    int crossings = 0;
    Csv table{{"curve", "t", "D", "K", "sqrtK", "length_G"}};
};

/// K, D and l_G of one curve along the sweep.
struct CurveTrack {
    Slope curve;
    BalanceTime t_alpha;
    std::vector<double> t, D, K, lG;
};

inline std::vector<CurveTrack> short_curve_tracks(const Sweep& s, double eps0) {
    std::vector<Slope> curves;
    for (const auto& pt : s.points)
        for (const auto* x : {&pt.g, &pt.L.point}) {
            const ShortCurve sc = systole(*x);
            if (sc.length < eps0 && std::find(curves.begin(), curves.end(), sc.curve) == curves.end())
                curves.push_back(sc.curve);
        }
    std::vector<CurveTrack> out;
    for (const auto& c : curves) {
        CurveTrack tr{c, balance_time(CurveClass{c}, s.plus, s.minus), {}, {}, {}, {}};
        for (const auto& pt : s.points) {
            tr.t.push_back(pt.t);
            tr.D.push_back(estimate_D(s.q0, CurveClass{c}, pt.t, s.plus, s.minus));
            tr.K.push_back(expanding_K(s.flat_at(pt.t), CurveClass{c}));
            tr.lG.push_back(curve_length(pt.g, CurveClass{c}));
        }
        out.push_back(std::move(tr));
    }
    return out;
}

inline void add_decay(const CurveTrack& tr, double M, double eps, DecayAudit& audit) {
    const std::size_t n = tr.t.size();
    for (std::size_t i = 0; i < n; ++i)
        audit.table.row() << tr.curve.str() << tr.t[i] << tr.D[i] << tr.K[i] << std::sqrt(tr.K[i]) << tr.lG[i];
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n && tr.K[j] > M; ++j) {
            if (!(tr.K[i] > M)) break;
            const double span = tr.t[j] - tr.t[i];
            audit.two_sided_c = std::max({audit.two_sided_c, std::exp(-2 * span) * tr.K[j] / tr.K[i],
                                    tr.K[i] / (std::exp(2 * span) * tr.K[j])});
        }
    }
    const double ta = tr.t_alpha.value;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (tr.t[i] > ta) audit.decay_c = std::max(audit.decay_c, tr.K[j] / tr.K[i]);  // t_α < v < w
            if (tr.t[j] < ta) audit.decay_c = std::max(audit.decay_c, tr.K[i] / tr.K[j]);  // w < v < t_α
        }
    // Sampled I_α(ε): the run of short samples nearest t_α.
    std::size_t centre = 0;
    if (std::isfinite(ta)) {
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(tr.t[i] - ta) < std::fabs(tr.t[centre] - ta)) centre = i;
    } else {
        centre = ta > 0 ? n - 1 : 0;
    }
    if (!(tr.lG[centre] < eps)) return;
    std::size_t lo = centre, hi = centre;
    while (lo > 0 && tr.lG[lo - 1] < eps) --lo;
    while (hi + 1 < n && tr.lG[hi + 1] < eps) ++hi;
    auto dominated = [&](std::size_t i) { return tr.D[i] >= std::sqrt(tr.K[i]); };
    for (std::size_t i = lo; i < hi; ++i) {
        if (dominated(i) == dominated(i + 1)) continue;
        // A crossing between samples i and i+1; dominance must flip to K away from t_α.
        if (tr.t[i] >= ta) {
            ++audit.crossings;
            for (std::size_t k = i + 1; k <= hi; ++k)
                audit.crossing_c = std::max(audit.crossing_c, tr.D[k] / std::sqrt(tr.K[k]));
        } else if (tr.t[i + 1] <= ta) {
            ++audit.crossings;
            for (std::size_t k = lo; k <= i; ++k)
                audit.crossing_c = std::max(audit.crossing_c, tr.D[k] / std::sqrt(tr.K[k]));
        }
    }
}

// ---------------------------------------------------------------------------
// Twists

/// Flat twist of ν around a on a marked torus: the offset along a of a
/// crossing segment, in units of the circumference and per crossing. Signed
/// to match the hyperbolic twist.
inline double flat_twist(const FlatSurface& q, const Slope& nu, const Slope& a) {
    const Vec2 ha = q.holonomy(a);
    Vec2 hv = q.holonomy(nu);
    const double k = static_cast<double>(std::llabs(cross(nu.homology(), a.homology())));
    if (k == 0) throw std::domain_error("flat_twist: lamination disjoint from the curve");
    if (cross(ha, hv) < 0) hv = Vec2{-hv.x, -hv.y};
    return -dot(hv, ha) / dot(ha, ha) / k;
}

struct TwistAudit {
    /// max |Tw·l| on G_t and L_t for short α, ν⁺ after t_α and ν⁻ before.
    double product_G = 0, product_L = 0;
    /// max |tw_σ − tw_q|·l on G_t for short α.
    double flat_gap = 0;
    int samples = 0;
};

inline void add_twists(const Sweep& s, double eps0, TwistAudit& audit) {
    const FlatSurface& q0 = s.q0;
    const Slope np = s.plus.torus_slope(), nm = s.minus.torus_slope();
    for (const auto& pt : s.points) {
        for (int side = 0; side < 2; ++side) {
            const FNPoint& x = side == 0 ? pt.g : pt.L.point;
            const ShortCurve sc = systole(x);
            if (!(sc.length < eps0)) continue;
            const CurveClass a{sc.curve};
            const BalanceTime ta = balance_time(a, s.plus, s.minus);
            const Slope& nu = pt.t > ta.value ? np : nm;
            if (intersection_number(a, pt.t > ta.value ? s.plus : s.minus) == Rational(0)) continue;
            const double tw = twist(x, nu, sc.curve);
            double& prod = side == 0 ? audit.product_G : audit.product_L;
            prod = std::max(prod, std::fabs(tw) * sc.length);
            ++audit.samples;
            if (side == 0) {
                const double twq = flat_twist(flow(q0, pt.t), nu, sc.curve);
                audit.flat_gap = std::max(audit.flat_gap, std::fabs(tw - twq) * sc.length);
            }
        }
    }
}

/// Two points differing only in the FN twist of α by Δs have
/// twists differing by Δs up to an additive constant. Returns the worst
/// discrepancy over `count` random pairs.
inline double twist_shift_discrepancy(int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ul(std::log(0.01), std::log(3.0)), us(-8, 8);
    std::uniform_int_distribution<std::int64_t> num(-5, 5), den(1, 5);
    const Slope a(0, 1);
    double worst = 0;
    for (int k = 0; k < count; ++k) {
        Slope nu = a;
        while (cross(nu.homology(), a.homology()) == 0) {
            const std::int64_t p = num(rng), q = den(rng);
            if (std::gcd(p, q) == 1) nu = Slope(p, q);
        }
        const double l = std::exp(ul(rng)), s1 = us(rng), s2 = us(rng);
        const double d = twist(FNPoint::torus(a, l, s1), nu, a) - twist(FNPoint::torus(a, l, s2), nu, a);
        worst = std::max(worst, std::fabs(d - (s1 - s2)));
    }
    return worst;
}


// ---------------------------------------------------------------------------
// Surgery

struct SurgeryAudit {
    std::string curve;
    /// max |K(cut) − K(q)| / K(q) over the sampled t.
    double k_deviation = 0;
    int k_samples = 0;
    bool flow_commutes = false;
    double area_error = 0;
    /// Distance on the collapsed cut surface against b − a: slope in [1−δ, 1+δ].
    double slope_delta = 0;
    /// Upper envelope d ≤ κ·log(b−a) + κ′ of the annulus term along the reglued family.
    double kappa = 0, kappa_prime = 0;
    Csv table{{"t", "K_original", "K_cut", "rel_dev", "area_cut", "proxy_length"}};
};

/// Slope and intercept of least squares through (x, y), then the intercept
/// raised until the line lies above every point.
inline std::pair<double, double> upper_envelope_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    const double k = den > 0 ? (n * sxy - sx * sy) / den : 0;
    double c = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) c = std::max(c, y[i] - k * x[i]);
    return {k, c};
}

inline SurgeryAudit surgery_audit(const FlatSurface& q0, const CurveClass& a, const std::vector<double>& grid) {
    SurgeryAudit r;
    r.curve = to_string(a);
    const FlatSurface cut0 = cut_and_reglue(q0, a);
    const auto lam = cylinder_laminations(q0);
    // Proxy length of a on the reglued family: its cylinder is gone, so only K remains.
    auto proxy_length = [&](double t) {
        const FlatSurface c = flow(cut0, t);
        const double D = estimate_D(cut0, a, t, lam.first, lam.second);
        return 1.0 / std::max(D, std::log(expanding_K(c, a)));
    };
    std::vector<double> ts, ls;
    for (double t : grid) {
        const FlatSurface q = flow(q0, t), c = cut_and_reglue(q, a);
        const double k0 = expanding_K(q, a), k1 = expanding_K(c, a);
        const double dev = std::fabs(k1 - k0) / k0;
        r.k_deviation = std::max(r.k_deviation, dev);
        r.area_error = std::max(r.area_error, std::fabs(c.area() - 1));
        ++r.k_samples;
        const double pl = proxy_length(t);
        r.table.row() << t << k0 << k1 << dev << c.area() << pl;
        if (pl > 0 && std::isfinite(pl)) { ts.push_back(t); ls.push_back(pl); }
    }
    r.flow_commutes = isometric(cut_and_reglue(flow(q0, 2.5), a), flow(cut0, 2.5));
    // The collapsed cut surface is one rectangle, a torus of period i·h/w.
    const FlatSurface small = collapse_degenerate(cut0);
    auto tau = [&](double t) {
        const FlatSurface s = flow(small, t);
        return cplx(0, s.height(0) / s.width(0));
    };
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double span = ts[j] - ts[i];
            const double d = 0.5 * hyperbolic_distance(tau(ts[i]), tau(ts[j]));
            r.slope_delta = std::max(r.slope_delta, std::fabs(d / span - 1));
            if (span >= 1) {
                lx.push_back(std::log(span));
                ly.push_back(0.5 * hyperbolic_distance(cplx(0, 1 / ls[i]), cplx(0, 1 / ls[j])));
            }
        }
    if (!lx.empty()) std::tie(r.kappa, r.kappa_prime) = upper_envelope_fit(lx, ly);
    return r;
}

// ---------------------------------------------------------------------------
// Dichotomy on short intervals

struct DichotomyRow {
    std::string curve;
    double v, w;
    TrichotomyTag tag;
    /// "D" (D ≥ √K throughout), "K" (√K ≥ D throughout) or "mixed".
    std::string dominance;
    bool straddles;
    double d_annulus;
    /// |d − (w−v)| for D-domination across t_α, d − (w−v)/2 for K-domination.
    double slack;
};

struct DichotomyAudit {
    std::vector<DichotomyRow> rows;
    double max_slack = 0;
    double max_tag_ratio = 0;
    int d_rows = 0, k_rows = 0;
};

/// Every pair of samples [v, w] inside the sampled I_α of each curve that is
/// short along L_t.
inline void add_dichotomy(const Sweep& s, double eps, double M, DichotomyAudit& audit) {
    for (const auto& tr : short_curve_tracks(s, eps)) {
        const std::size_t n = tr.t.size();
        std::vector<double> lL(n);
        for (std::size_t i = 0; i < n; ++i) lL[i] = curve_length(s.points[i].L.point, CurveClass{tr.curve});
        for (std::size_t i = 0; i < n; ++i) {
            if (!(lL[i] < eps)) continue;
            const AnnulusCoord ci = annulus_coord(s.points[i].L.point, tr.curve);
            std::vector<EstimateSample> samples;
            bool all_d = true, all_k = true;
            for (std::size_t j = i; j < n && lL[j] < eps; ++j) {
                samples.push_back({tr.t[j], tr.D[j], tr.K[j]});
                all_d = all_d && tr.D[j] >= std::sqrt(tr.K[j]);
                all_k = all_k && std::sqrt(tr.K[j]) >= tr.D[j];
                if (j == i) continue;
                DichotomyRow row;
                row.curve = tr.curve.str();
                row.v = tr.t[i];
                row.w = tr.t[j];
                row.tag = classify_interval(samples, M);
                row.straddles = row.v <= tr.t_alpha.value && tr.t_alpha.value <= row.w;
                row.d_annulus = d_annulus(ci, annulus_coord(s.points[j].L.point, tr.curve)).exact;
                const double span = row.w - row.v;
                row.dominance = all_d ? "D" : all_k ? "K" : "mixed";
                row.slack = 0;
                if (all_d && row.straddles) {
                    row.slack = std::fabs(row.d_annulus - span);
                    ++audit.d_rows;
                } else if (all_k) {
                    row.slack = std::max(0.0, row.d_annulus - span / 2);
                    ++audit.k_rows;
                }
                audit.max_slack = std::max(audit.max_slack, row.slack);
                if (row.tag.kind == TrichotomyCase::D_first || row.tag.kind == TrichotomyCase::D_last)
                    audit.max_tag_ratio = std::max(audit.max_tag_ratio, row.tag.ratio);
                audit.rows.push_back(std::move(row));
            }
        }
    }
}

inline Csv dichotomy_csv(const DichotomyAudit& a) {
    Csv csv({"curve", "v", "w", "case", "u", "tag_ratio", "dominance", "straddles", "d_annulus", "slack"});
    for (const auto& r : a.rows)
        csv.row() << r.curve << r.v << r.w << to_string(r.tag.kind) << r.tag.u << r.tag.ratio << r.dominance
                  << (r.straddles ? 1 : 0) << r.d_annulus << r.slack;
    return csv;
}

// ---------------------------------------------------------------------------
// Runs

struct Check {
    std::string name;
    double value;
    double limit;
    bool pass;
};

/// Output of one subcommand: tables to write, measured constants and the
/// checks that decide the exit code.
struct Report {
    std::map<std::string, Csv> tables;
    json constants = json::object();
    std::vector<Check> checks;

    void check(const std::string& name, double value, double limit, bool pass) {
        checks.push_back({name, value, limit, pass});
        constants["checks"][name] = {{"value", value}, {"limit", limit}, {"pass", pass}};
    }
    void at_most(const std::string& name, double value, double limit) {
        check(name, value, limit, value <= limit);
    }
    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
    void write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        for (const auto& [name, csv] : tables) csv.write(dir / (name + ".csv"));
        write_json(dir / "constants.json", constants);
    }
};

inline void require_torus(const RunConfig& cfg, const char* what) {
    if (!cfg.torus())
        throw std::domain_error(std::string(what) +
                                " needs hyperbolic minima, which are implemented for the punctured torus only");
}

/// The configured pair followed by the seeded random pairs.
inline std::vector<SlopePair> torus_pairs(const RunConfig& cfg) {
    std::vector<SlopePair> pairs{{cfg.name, cfg.plus, cfg.minus}};
    for (auto& p : random_slope_pairs(cfg.random_pairs, cfg.seed)) pairs.push_back(std::move(p));
    return pairs;
}

inline std::vector<Sweep> torus_sweeps(const RunConfig& cfg) {
    std::vector<Sweep> out;
    for (const auto& p : torus_pairs(cfg)) out.push_back(run_sweep(p.label, p.plus, p.minus, cfg.grid(), cfg.tol_grad));
    return out;
}

inline Report run_trace_minima(const RunConfig& cfg) {
    require_torus(cfg, "trace-minima");
    Report r;
    Csv csv({"t", "pants", "length", "twist", "objective", "gradient_norm", "iterations", "near_cusp", "systole",
             "systole_length", "tau_re", "tau_im"});
    MinimizeOptions opt;
    opt.tol_grad = cfg.tol_grad;
    double worst = 0;
    for (const auto& s : trace_line(cfg.plus, cfg.minus, cfg.grid(), opt)) {
        const ShortCurve sc = systole(s.point);
        const cplx tau = tau_from_fn(s.point);
        csv.row() << s.t << s.point.pants_curve().str() << s.point.length() << s.point.twist() << s.objective_value
                  << s.gradient_norm << s.solver_iterations << (s.near_cusp ? 1 : 0) << sc.curve.str() << sc.length
                  << tau.real() << tau.imag();
        worst = std::max(worst, s.gradient_norm);
    }
    r.tables.emplace("minima", std::move(csv));
    r.at_most("max_gradient_norm", worst, cfg.tol_grad);
    return r;
}

inline Report run_trace_geodesic(const RunConfig& cfg) {
    Report r;
    const FlatSurface q0 = build_flat_surface(cfg.plus, cfg.minus);
    if (cfg.torus()) {
        Csv csv({"t", "tau_re", "tau_im", "pants", "length", "twist", "systole", "systole_length"});
        double worst = 0;
        const auto grid = cfg.grid();
        for (double t : grid) {
            const FlatSurface q = flow(q0, t);
            const FNPoint x = rebase_to_systole(fn_from_flat(q));
            const ShortCurve sc = systole(x);
            csv.row() << t << q.period().real() << q.period().imag() << x.pants_curve().str() << x.length()
                      << x.twist() << sc.curve.str() << sc.length;
            worst = std::max(worst, std::fabs(exact_distance_T11(q0, q) - std::fabs(t)));
        }
        r.tables.emplace("geodesic", std::move(csv));
        r.at_most("unit_speed_error", worst, 1e-9);
    } else {
        Csv csv({"t", "curve", "q_length", "K", "area"});
        std::vector<CurveClass> cores;
        for (const auto* mc : {&cfg.plus, &cfg.minus})
            for (const auto& c : mc->components()) cores.push_back(c.curve);
        double area = 0;
        for (double t : cfg.grid()) {
            const FlatSurface q = flow(q0, t);
            area = std::max(area, std::fabs(q.area() - 1));
            for (const auto& a : cores) csv.row() << t << to_string(a) << q_length(q, a) << expanding_K(q, a) << q.area();
        }
        r.tables.emplace("geodesic", std::move(csv));
        r.at_most("area_error", area, 1e-12);
    }
    return r;
}

/// Short-curve bands, decay laws and twist audits over the configured and random pairs.
inline Report run_shortcurves(const RunConfig& cfg) {
    Report r;
    const auto& th = cfg.thresholds;
    ShortCurveAudit sc;
    if (!cfg.torus()) {
        add_proxy_rows(cfg, sc);
        r.tables.emplace("shortcurves", short_curve_csv(sc));
        r.constants["proxy_rows"] = sc.rows.size();
        return r;  // diagnostics only: no hyperbolic ground truth off the torus
    }
    DecayAudit decay;
    TwistAudit tw;
    for (const auto& s : torus_sweeps(cfg)) {
        add_short_rows(s, cfg.eps0, sc);
        for (const auto& tr : short_curve_tracks(s, cfg.eps0)) add_decay(tr, cfg.M, cfg.eps0, decay);
        add_twists(s, cfg.eps0, tw);
    }
    r.tables.emplace("shortcurves", short_curve_csv(sc));
    r.tables.emplace("decay", std::move(decay.table));
    r.constants["short_samples"] = sc.rows.size();
    r.constants["crossings"] = decay.crossings;
    r.constants["twist_samples"] = tw.samples;
    r.at_most("band_c2", sc.band, th.band_max);
    r.at_most("two_sided_c", decay.two_sided_c, th.decay_max);
    r.at_most("decay_c", decay.decay_c, th.decay_max);
    r.at_most("crossing_c", decay.crossing_c, th.decay_max);
    r.at_most("twist_shift_discrepancy", twist_shift_discrepancy(100, cfg.seed), th.twist_shift_max + 1e-6);
    r.at_most("twist_product_G", tw.product_G, th.twist_product_max);
    r.at_most("twist_product_L", tw.product_L, th.twist_product_max);
    r.at_most("flat_twist_gap", tw.flat_gap, th.flat_twist_max);
    return r;
}

inline Report run_qgeo_check(const RunConfig& cfg) {
    require_torus(cfg, "qgeo-check");
    Report r;
    const auto& th = cfg.thresholds;
    Csv pairs({"run", "a", "b", "d", "span"});
    Csv fits({"run", "c", "C", "violations", "monotone", "thick_distance", "gamma_a", "gamma_b", "gamma", "tags"});
    double c_max = 1, C_max = 0;
    int violations = 0;
    bool monotone = true;
    for (const auto& s : torus_sweeps(cfg)) {
        const QGReport q = qgeo_report(s, cfg);
        for (const auto& p : q.pairs) pairs.row() << s.label << p.a << p.b << p.d << p.b - p.a;
        std::string tags;
        for (const auto& t : q.gamma.tags) tags += std::string(tags.empty() ? "" : ";") + to_string(t.kind);
        fits.row() << s.label << q.c << q.C << q.violations << (q.monotone ? 1 : 0) << q.thick_distance
                   << static_cast<int>(q.gamma.gamma_a.size()) << static_cast<int>(q.gamma.gamma_b.size())
                   << static_cast<int>(q.gamma.gamma.size()) << tags;
        r.constants["fits"][s.label] = {{"c", q.c}, {"C", q.C}, {"thick_distance", q.thick_distance}};
        c_max = std::max(c_max, q.c);
        C_max = std::max(C_max, q.C);
        violations += q.violations;
        monotone = monotone && q.monotone;
    }
    r.tables.emplace("qgeo_pairs", std::move(pairs));
    r.tables.emplace("qgeo_fits", std::move(fits));
    r.at_most("qg_c", c_max, th.qg_c_max);
    r.at_most("qg_C", C_max, th.qg_C_max);
    r.check("qg_violations", violations, 0, violations == 0);
    r.check("qg_monotone", monotone ? 1 : 0, 1, monotone);
    return r;
}

inline Report run_surgery_check(const RunConfig& cfg) {
    if (cfg.torus()) throw std::domain_error("surgery-check needs an origami surface");
    Report r;
    const FlatSurface q0 = build_flat_surface(cfg.plus, cfg.minus);
    const CurveClass a = parse_curve(cfg.alpha.empty() ? "h0" : cfg.alpha, cfg.origami.get());
    if (flat_cylinder(q0, a).degenerate()) {
        r.constants["skipped"] = "degenerate cylinder for " + to_string(a);
        return r;
    }
    // Twenty evenly spaced times across the configured range.
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(cfg.t_min + (cfg.t_max - cfg.t_min) * k / 19.0);
    SurgeryAudit s = surgery_audit(q0, a, grid);
    r.tables.emplace("surgery", std::move(s.table));
    r.constants["kappa_prime"] = s.kappa_prime;
    r.constants["k_samples"] = s.k_samples;
    r.check("k_preserved", s.k_deviation, 0, s.k_deviation == 0);
    r.check("flow_commutes", s.flow_commutes ? 1 : 0, 1, s.flow_commutes);
    r.at_most("area_error", s.area_error, 1e-12);
    r.at_most("cut_slope_delta", s.slope_delta, 1e-9);
    r.at_most("kappa", s.kappa, cfg.thresholds.kappa_max);
    return r;
}

inline Report run_dichotomy_audit(const RunConfig& cfg) {
    require_torus(cfg, "dichotomy-audit");
    Report r;
    DichotomyAudit d;
    for (const auto& s : torus_sweeps(cfg)) add_dichotomy(s, cfg.eps0, cfg.M, d);
    r.tables.emplace("dichotomy", dichotomy_csv(d));
    r.constants["rows"] = d.rows.size();
    r.constants["d_dominated_rows"] = d.d_rows;
    r.constants["k_dominated_rows"] = d.k_rows;
    r.constants["max_tag_ratio"] = d.max_tag_ratio;
    r.at_most("annulus_slack", d.max_slack, cfg.thresholds.annulus_slack_max);
    return r;
}

}  // namespace teich
