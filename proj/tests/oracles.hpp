#pragma once

// Slow independent oracles shared by the unit tests and the acceptance run.
// They use only public quantities and brute force.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "teich/flat.hpp"
#include "teich/minima.hpp"

namespace teich::oracle {

// Counts transverse intersection points of two straight closed curves on the
// square torus by enumerating lifts: solve q1 s - q2 u = cx + kx,
// p1 s - p2 u = cy + ky for (s, u) in [0,1)^2 over a box of integer shifts.
inline std::int64_t crossing_count(const Slope& a, const Slope& b) {
    const double q1 = static_cast<double>(a.q), p1 = static_cast<double>(a.p);
    const double q2 = static_cast<double>(b.q), p2 = static_cast<double>(b.p);
    const double det = -q1 * p2 + q2 * p1;
    if (det == 0) return 0;
    const double cx = 0.271828, cy = 0.161803;
    const auto box = static_cast<std::int64_t>(std::fabs(q1) + std::fabs(q2) + std::fabs(p1) + std::fabs(p2) + 2);
    std::int64_t count = 0;
    for (std::int64_t kx = -box; kx <= box; ++kx) {
        for (std::int64_t ky = -box; ky <= box; ++ky) {
            const double rx = cx + static_cast<double>(kx), ry = cy + static_cast<double>(ky);
            const double s = (rx * -p2 - (-q2) * ry) / det;
            const double u = (q1 * ry - p1 * rx) / det;
            if (s >= 0 && s < 1 && u >= 0 && u < 1) ++count;
        }
    }
    return count;
}

// Geodesic length of an edge word by Dijkstra on grid nodes of the developed
// corridor. Consecutive rectangles share a full edge, so their union is a
// rectangle and every pair of nodes inside it is joined by a straight edge.
inline double mesh_word_length(const FlatSurface& q, const OrigamiCurve& c, int per_side) {
    const auto& o = q.origami();
    auto l = o.left(), b = o.bottom();
    struct Rect { double x0, y0, w, h; };
    std::vector<Rect> rects;
    int s = c.index;
    double x = 0, y = 0;
    Vec2 hol;
    const int reps = 3;
    rects.push_back({x, y, q.width(s), q.height(s)});
    for (int r = 0; r < reps; ++r) {
        for (char ch : c.word) {
            if (ch == 'r') { x += q.width(s); s = o.right[s]; }
            if (ch == 'u') { y += q.height(s); s = o.top[s]; }
            if (ch == 'l') { s = l[s]; x -= q.width(s); }
            if (ch == 'd') { s = b[s]; y -= q.height(s); }
            rects.push_back({x, y, q.width(s), q.height(s)});
        }
        if (r == 0) hol = {x, y};
    }
    std::vector<Vec2> nodes;
    std::vector<std::vector<int>> in_rect(rects.size());
    for (std::size_t k = 0; k < rects.size(); ++k) {
        for (int i = 0; i <= per_side; ++i)
            for (int j = 0; j <= per_side; ++j) {
                in_rect[k].push_back(static_cast<int>(nodes.size()));
                nodes.push_back({rects[k].x0 + rects[k].w * i / per_side, rects[k].y0 + rects[k].h * j / per_side});
            }
    }
    auto dijkstra = [&](int src) {
        std::vector<double> dist(nodes.size(), std::numeric_limits<double>::infinity());
        // Adjacency: nodes of rect k connect to nodes of rect k and k+1 (and k-1).
        std::vector<std::vector<int>> owner(nodes.size());
        for (std::size_t k = 0; k < rects.size(); ++k)
            for (int v : in_rect[k]) owner[v].push_back(static_cast<int>(k));
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[src] = 0;
        pq.push({0, src});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) continue;
            for (int k : owner[u]) {
                for (int kk : {k - 1, k, k + 1}) {
                    if (kk < 0 || kk >= static_cast<int>(rects.size())) continue;
                    for (int v : in_rect[kk]) {
                        double nd = d + (nodes[v] - nodes[u]).norm();
                        if (nd < dist[v] - 1e-15) { dist[v] = nd; pq.push({nd, v}); }
                    }
                }
            }
        }
        return dist;
    };
    // Start on the grid of the second period's first rectangle.
    const std::size_t mid = c.word.size();
    double best = std::numeric_limits<double>::infinity();
    for (int src : in_rect[mid]) {
        // Sources on the portal shared with the previous rectangle.
        bool on_portal = false;
        for (int v : in_rect[mid - 1]) on_portal = on_portal || (nodes[v] - nodes[src]).norm() < 1e-12;
        if (!on_portal) continue;
        auto dist = dijkstra(src);
        Vec2 target = nodes[src] + hol;
        for (int v : in_rect[2 * mid])
            if ((nodes[v] - target).norm() < 1e-9) best = std::min(best, dist[v]);
    }
    return best;
}

// Compass search over (log l, s̃) in a fixed chart, using only the public
// length function. Slow and derivative free.
inline double compass_minimum(const MeasuredMulticurve& p, const MeasuredMulticurve& m, double t, const Slope& chart,
                       double u0, double s0) {
    auto f = [&](double u, double s) {
        return objective(FNPoint::torus(chart, std::exp(u), s / std::exp(u)), p, m, t);
    };
    // Coarse grid first.
    double bu = u0, bs = s0, best = f(u0, s0);
    for (int i = -20; i <= 20; ++i)
        for (int j = -20; j <= 20; ++j) {
            const double u = u0 + 0.1 * i, s = s0 + 0.05 * j * std::exp(u0);
            const double v = f(u, s);
            if (v < best) { best = v; bu = u; bs = s; }
        }
    for (double h = 0.05; h > 1e-11;) {
        bool improved = false;
        for (auto [du, ds] : {std::pair{h, 0.0}, {-h, 0.0}, {0.0, h}, {0.0, -h}, {h, h}, {-h, -h}, {h, -h}, {-h, h}}) {
            const double v = f(bu + du, bs + ds * std::exp(bu));
            if (v < best) { best = v; bu += du; bs += ds * std::exp(bu - du); improved = true; }
        }
        if (!improved) h *= 0.5;
    }
    return best;
}

}  // namespace teich::oracle
