#include "fluxrec/problem.hpp"

#include <cmath>
#include <sstream>

#include "fluxrec/quadrature.hpp"

namespace fluxrec {

void validate_problem(const ProblemSpec &prob, const Mesh &mesh) {
    if (!(prob.epsilon > 0.0)) throw ProblemError("epsilon must be positive");
    if (prob.beta < 0.0 || prob.c_b < 0.0) throw ProblemError("beta and c_b must be nonnegative");
    if (prob.assembly_degree < 1 || prob.assembly_degree > kMaxQuadratureDegree)
        throw ProblemError("assembly quadrature degree out of range");
    constexpr double tol = 1e-10;
    const auto &rule = quad_triangle(prob.assembly_degree);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        for (const auto &b : rule.points) {
            const Vec2 x = map_point(p, b);
            const double r = prob.reaction(x);
            const double coercive = r - 0.5 * prob.velocity_divergence(x);
            if (coercive < prob.beta - tol || std::abs(r) > prob.c_b * prob.beta + tol) {
                std::ostringstream msg;
                msg << "coefficient assumption violated at (" << x.x << ", " << x.y << "): b - div(a)/2 = " << coercive
                    << ", |b| = " << std::abs(r) << ", beta = " << prob.beta << ", c_b = " << prob.c_b;
                throw ProblemError(msg.str());
            }
        }
    }
}

}  // namespace fluxrec
