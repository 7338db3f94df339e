#pragma once

#include <memory>
#include <vector>

#include "fluxrec/mesh.hpp"
#include "fluxrec/problem.hpp"
#include "fluxrec/sparse.hpp"

namespace fluxrec {

using MeshPtr = std::shared_ptr<const Mesh>;

/// Continuous piecewise-linear field given by its vertex values.
class P1Function {
public:
    P1Function(MeshPtr mesh, std::vector<double> values);

    const Mesh &mesh() const { return *mesh_; }
    const MeshPtr &mesh_ptr() const { return mesh_; }
    const std::vector<double> &values() const { return values_; }

    double value(int t, const Barycentric &b) const;
    /// Value at a physical point inside triangle `t`.
    double value(int t, Vec2 x) const;
    /// Constant gradient on triangle `t`.
    Vec2 gradient(int t) const;

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

/// Gradients of the three barycentric coordinates of triangle `t`.
std::array<Vec2, 3> barycentric_gradients(const Mesh &mesh, int t);
/// Barycentric coordinates of `x` with respect to triangle `t`.
Barycentric barycentric_coordinates(const Mesh &mesh, int t, Vec2 x);

Vec2 gradient(const P1Function &u, int t);

/// Nodal interpolant of `f`.
P1Function interpolate(MeshPtr mesh, const ScalarField &f);

/// delta_K = c_delta h_K; c_delta = 0 is plain Galerkin.
struct DeltaRule {
    double c_delta = 0.0;
    double delta(double h_K) const { return c_delta * h_K; }
};

/// max over quadrature points of |a| on triangle `t`.
double velocity_sup(const Mesh &mesh, int t, const ProblemSpec &prob, int degree);

struct DirichletLift {
    /// Unknown index of each vertex, -1 for Dirichlet vertices.
    std::vector<int> dof;
    /// Prescribed value per vertex; meaningful where dof == -1.
    std::vector<double> value;
    std::vector<int> free_vertices;
    /// Vertices whose incident Dirichlet edges disagree in the limit and got the average.
    std::vector<int> averaged_corners;
};

/// Dirichlet vertex values from the edge-wise limits of the boundary data. A
/// vertex whose incident Dirichlet edges see different limits receives their
/// average.
DirichletLift dirichlet_lift(const Mesh &mesh, const ProblemSpec &prob);

struct SupgSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    DirichletLift lift;
    /// max_K delta_K ||a||_{L^inf(K)} / h_K
    double max_delta_ratio = 0.0;
};

SupgSystem assemble_supg(const MeshPtr &mesh, const ProblemSpec &prob, const DeltaRule &delta);

struct SupgSolveInfo {
    SolveStats stats;
    std::vector<int> averaged_corners;
    double max_delta_ratio = 0.0;
};

inline constexpr double kSupgTolerance = 1e-10;

P1Function solve(const MeshPtr &mesh, const ProblemSpec &prob, const DeltaRule &delta,
                 SupgSolveInfo *info = nullptr, double rel_tol = kSupgTolerance);

/// B_delta(u_h, phi_i) - l_delta(phi_i) for every free vertex i (in dof order).
std::vector<double> supg_residual(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta);
/// l_delta(phi_i) for every free vertex i (in dof order).
std::vector<double> supg_load(const MeshPtr &mesh, const ProblemSpec &prob, const DeltaRule &delta);

inline constexpr int kErrorQuadratureDegree = 7;

/// ||v||_eps = (eps |v|_1^2 + beta ||v||^2)^1/2
double norm_energy(const P1Function &v, const ProblemSpec &prob, int degree = kErrorQuadratureDegree);

struct ErrorNorms {
    double l2 = 0.0;
    double h1_semi = 0.0;
    /// ||u - u_h||_eps
    double energy = 0.0;
    /// (||e||_eps^2 + sum_K delta_K ||a.grad e||_K^2)^1/2
    double supg = 0.0;
    /// ||e||_eps + ||h^1/2 grad e||
    double eps_triple = 0.0;
};

/// Norms of u - u_h against the attached exact solution.
ErrorNorms error_norms(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta,
                       int degree = kErrorQuadratureDegree);
double norm_supg(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta,
                 int degree = kErrorQuadratureDegree);
double norm_eps_triple(const P1Function &u_h, const ProblemSpec &prob, int degree = kErrorQuadratureDegree);

}  // namespace fluxrec
