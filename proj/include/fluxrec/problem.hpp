#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "fluxrec/mesh.hpp"
#include "fluxrec/types.hpp"

namespace fluxrec {

using ScalarField = std::function<double(Vec2)>;
using VectorField = std::function<Vec2(Vec2)>;

class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data of  -eps Lap u + a.grad u + b u = f  in Omega,
///          u = u_D on Gamma_D,  eps du/dn = g on Gamma_N.
struct ProblemSpec {
    double epsilon = 1.0;
    VectorField velocity = [](Vec2) { return Vec2{}; };
    /// Divergence of the velocity, used only for the coercivity check.
    ScalarField velocity_divergence = [](Vec2) { return 0.0; };
    ScalarField reaction = [](Vec2) { return 0.0; };
    ScalarField source = [](Vec2) { return 0.0; };
    ScalarField neumann_data = [](Vec2) { return 0.0; };
    ScalarField dirichlet_data = [](Vec2) { return 0.0; };
    /// b - div(a)/2 >= beta  and  sup|b| <= c_b beta.
    double beta = 0.0;
    double c_b = 0.0;

    std::optional<ScalarField> exact_solution;
    std::optional<VectorField> exact_gradient;

    /// Quadrature degree for assembly and residuals (2 suffices for affine data).
    int assembly_degree = 4;

    bool has_exact() const { return exact_solution.has_value() && exact_gradient.has_value(); }
};

/// Samples the coefficient assumptions at assembly quadrature points of every
/// element. Throws `ProblemError` on violation.
void validate_problem(const ProblemSpec &prob, const Mesh &mesh);

}  // namespace fluxrec
