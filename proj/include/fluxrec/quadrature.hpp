#pragma once

#include <vector>

#include "fluxrec/types.hpp"

namespace fluxrec {

/// Rule on the reference triangle {(x, y) : x, y >= 0, x + y <= 1}.
/// Points are barycentric (1 - x - y, x, y); weights sum to 1/2.
struct QuadratureRule {
    std::vector<Barycentric> points;
    std::vector<double> weights;
    int degree = 0;
};

/// Rule on [0, 1]; weights sum to 1.
struct EdgeRule {
    std::vector<double> points;
    std::vector<double> weights;
    int degree = 0;
};

inline constexpr int kMaxQuadratureDegree = 7;

/// Exact for polynomials up to `degree` (1..7). Degree 1 is the centroid rule,
/// degree 2 the three-point interior rule, higher degrees are collapsed
/// Gauss products with positive weights.
const QuadratureRule &quad_triangle(int degree);

/// Gauss-Legendre on [0, 1] exact up to `degree` (1..15).
const EdgeRule &quad_edge(int degree);

/// n-point Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

/// Physical point of barycentric coordinates `b` in the triangle `p`.
inline Vec2 map_point(const std::array<Vec2, 3> &p, const Barycentric &b) {
    return {b[0] * p[0].x + b[1] * p[1].x + b[2] * p[2].x, b[0] * p[0].y + b[1] * p[1].y + b[2] * p[2].y};
}

}  // namespace fluxrec
