#pragma once

// Small dense helpers shared by the unit tests. Nothing here calls into the
// assembly code under test.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "fluxrec/mesh.hpp"
#include "fluxrec/types.hpp"

namespace oracle {

using fluxrec::Vec2;

struct Dense {
    std::size_t n = 0;
    std::vector<double> a;

    explicit Dense(std::size_t size) : n(size), a(size * size, 0.0) {}
    double &operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Gaussian elimination with partial pivoting.
inline std::vector<double> dense_solve(Dense m, std::vector<double> b) {
    const std::size_t n = m.n;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (m(p, k) == 0.0) throw std::runtime_error("singular dense system");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            std::swap(b[k], b[p]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= m(k, j) * x[j];
        x[k] = s / m(k, k);
    }
    return x;
}

inline double max_abs_diff(const std::vector<double> &x, const std::vector<double> &y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

inline double max_abs(const std::vector<double> &x) {
    double d = 0.0;
    for (double v : x) d = std::max(d, std::abs(v));
    return d;
}

inline double euclidean_norm_of(const std::vector<double> &x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double tri_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)); }

/// Gradient of the linear interpolant of (u0, u1, u2) at (p0, p1, p2), by
/// Cramer's rule on the two edge differences.
inline Vec2 linear_gradient(Vec2 p0, Vec2 p1, Vec2 p2, double u0, double u1, double u2) {
    const double a = p1.x - p0.x, b = p1.y - p0.y, c = p2.x - p0.x, d = p2.y - p0.y;
    const double det = a * d - b * c;
    const double r1 = u1 - u0, r2 = u2 - u0;
    return {(r1 * d - b * r2) / det, (a * r2 - r1 * c) / det};
}

/// Integral over a triangle of a function that is at most quadratic, by the
/// edge-midpoint rule.
template <class F>
double midpoint_rule(Vec2 p0, Vec2 p1, Vec2 p2, F f) {
    const double area = std::abs(tri_area(p0, p1, p2));
    return area / 3.0 * (f(fluxrec::midpoint(p0, p1)) + f(fluxrec::midpoint(p1, p2)) + f(fluxrec::midpoint(p2, p0)));
}

inline double alpha_K(double h, double eps, double beta) {
    double a = std::min(h / std::sqrt(eps), std::sqrt(h));
    if (beta > 0.0) a = std::min(a, 1.0 / std::sqrt(beta));
    return a;
}

inline double alpha_e(double h, double eps, double beta) {
    double a = std::min(std::sqrt(h) / std::sqrt(eps), 1.0);
    if (beta > 0.0) a = std::min(a, std::pow(eps * beta, -0.25));
    return a;
}

/// Longest side of triangle t, computed from its corners.
inline double diameter(const fluxrec::Mesh &mesh, int t) {
    const auto &tri = mesh.triangle(t);
    double h = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vec2 d = mesh.vertex(tri[static_cast<std::size_t>(i)]) - mesh.vertex(tri[static_cast<std::size_t>((i + 1) % 3)]);
        h = std::max(h, std::hypot(d.x, d.y));
    }
    return h;
}

inline std::vector<double> random_vector(std::size_t n, std::mt19937 &rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto &x : v) x = dist(rng);
    return v;
}

/// Refines towards `target` a few times to get a graded mesh.
inline fluxrec::Mesh graded_mesh(fluxrec::Mesh mesh, Vec2 target, int steps) {
    for (int s = 0; s < steps; ++s) {
        std::vector<int> marked;
        for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
            const Vec2 c = mesh.centroid(t) - target;
            if (std::hypot(c.x, c.y) < 0.45) marked.push_back(t);
        }
        mesh = fluxrec::longest_edge_refine(mesh, marked);
    }
    return mesh;
}

}  // namespace oracle
