#include "fluxrec/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fluxrec {

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre needs at least one point");
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess; nodes on [-1, 1].
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map to [0, 1], ascending order.
        nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (x + 1.0);
        weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
}

namespace {

QuadratureRule make_triangle_rule(int degree) {
    QuadratureRule rule;
    rule.degree = degree;
    if (degree == 1) {
        rule.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
        rule.weights = {0.5};
        return rule;
    }
    if (degree == 2) {
        const double a = 2.0 / 3.0, b = 1.0 / 6.0;
        rule.points = {{a, b, b}, {b, a, b}, {b, b, a}};
        rule.weights = {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
        return rule;
    }
    // x = u, y = v (1 - u), dx dy = (1 - u) du dv.
    const int nu = (degree + 3) / 2;
    const int nv = (degree + 2) / 2;
    std::vector<double> u, wu, v, wv;
    gauss_legendre(nu, u, wu);
    gauss_legendre(nv, v, wv);
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double x = u[static_cast<std::size_t>(i)];
            const double y = v[static_cast<std::size_t>(j)] * (1.0 - x);
            rule.points.push_back({1.0 - x - y, x, y});
            rule.weights.push_back(wu[static_cast<std::size_t>(i)] * wv[static_cast<std::size_t>(j)] * (1.0 - x));
        }
    }
    return rule;
}

EdgeRule make_edge_rule(int degree) {
    EdgeRule rule;
    rule.degree = degree;
    gauss_legendre((degree + 2) / 2, rule.points, rule.weights);
    return rule;
}

constexpr int kMaxEdgeDegree = 15;

}  // namespace

const QuadratureRule &quad_triangle(int degree) {
    static const std::array<QuadratureRule, kMaxQuadratureDegree> rules = [] {
        std::array<QuadratureRule, kMaxQuadratureDegree> r;
        for (int d = 1; d <= kMaxQuadratureDegree; ++d) r[static_cast<std::size_t>(d - 1)] = make_triangle_rule(d);
        return r;
    }();
    if (degree < 1 || degree > kMaxQuadratureDegree)
        throw std::invalid_argument("unsupported triangle quadrature degree " + std::to_string(degree));
    return rules[static_cast<std::size_t>(degree - 1)];
}

const EdgeRule &quad_edge(int degree) {
    static const std::array<EdgeRule, kMaxEdgeDegree> rules = [] {
        std::array<EdgeRule, kMaxEdgeDegree> r;
        for (int d = 1; d <= kMaxEdgeDegree; ++d) r[static_cast<std::size_t>(d - 1)] = make_edge_rule(d);
        return r;
    }();
    if (degree < 1 || degree > kMaxEdgeDegree)
        throw std::invalid_argument("unsupported edge quadrature degree " + std::to_string(degree));
    return rules[static_cast<std::size_t>(degree - 1)];
}

}  // namespace fluxrec
