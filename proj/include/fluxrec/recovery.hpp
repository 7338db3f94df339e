#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fluxrec/fem.hpp"

namespace fluxrec {

enum class FluxSpace { RT0, BDM1 };

/// Vector field c + J (x - origin) on one triangle.
struct AffineField {
    Vec2 origin;
    Vec2 c;
    Mat2 jacobian;

    Vec2 operator()(Vec2 x) const { return c + jacobian * (x - origin); }
    double divergence() const { return jacobian.trace(); }
};

/// A local basis function together with its global coefficient index.
struct LocalBasisFunction {
    int dof = 0;
    AffineField field;
};

/// Degrees of freedom per edge: 1 (RT0) or 2 (BDM1).
int dofs_per_edge(FluxSpace space);

/// Parameters (along the stored edge orientation v[0] -> v[1]) of the two
/// normal-component functionals of a BDM1 edge.
std::array<double, 2> bdm1_edge_points();

/// RT0: phi_e = s |e| / (2|K|) (x - a_e^K), s = +1 on the plus triangle.
/// BDM1: P1 vector fields dual to the normal components at the two Gauss
/// points of each edge. Normal components are taken w.r.t. the global edge
/// normal, so coefficients are single-valued on shared edges.
std::vector<LocalBasisFunction> local_basis(const Mesh &mesh, int t, FluxSpace space);

/// H(div)-conforming field in RT0 or BDM1 with edge-based coefficients.
class FluxField {
public:
    FluxField(MeshPtr mesh, FluxSpace space, std::vector<double> coefficients);

    const Mesh &mesh() const { return *mesh_; }
    const MeshPtr &mesh_ptr() const { return mesh_; }
    FluxSpace space() const { return space_; }
    const std::vector<double> &coefficients() const { return coeffs_; }

    /// Affine representation on triangle `t`.
    const AffineField &on(int t) const { return local_[static_cast<std::size_t>(t)]; }
    /// Value at a point of triangle `t`; no containment check.
    Vec2 at(int t, Vec2 x) const { return on(t)(x); }
    double divergence(int t) const { return on(t).divergence(); }

private:
    MeshPtr mesh_;
    FluxSpace space_;
    std::vector<double> coeffs_;
    std::vector<AffineField> local_;
};

/// Value of `field` at `x`, which must lie in triangle `t`.
Vec2 eval_flux(const FluxField &field, int t, Vec2 x);

/// div(field) on triangle `t` as c0 + cx x + cy y.
struct DivergencePolynomial {
    double c0 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
};
DivergencePolynomial div_flux(const FluxField &field, int t);

/// Coefficients interpolating a vector field through the edge functionals.
FluxField interpolate_flux(const MeshPtr &mesh, FluxSpace space, const VectorField &field);

/// gamma_K = scale * h_K * min{1/||a||_K, 1/sqrt(beta eps), alpha_K / (8 C^2 sqrt(eps))};
/// a term with zero denominator drops out of the min.
struct GammaRule {
    double c_stab = 1.0;
    double scale = 1.0;
    double gamma(double h_K, double a_sup, double epsilon, double beta) const;
};

/// gamma_e = 1 - alpha_e eps^1/2 h_e^-1/2.
double explicit_edge_weight(double h_e, double epsilon, double beta);
/// 1 - gamma_e = alpha_e eps^1/2 h_e^-1/2, evaluated directly (no cancellation when gamma_e is near 1).
double explicit_edge_complement(double h_e, double epsilon, double beta);

/// Local averaging of tau = -eps grad u_h in RT0.
FluxField recover_explicit_rt0(const P1Function &u_h, const ProblemSpec &prob);

inline constexpr double kRecoveryTolerance = 1e-12;

struct RecoverySystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
};

/// (eps^-1 sigma, tau) + sum_K gamma_K (div sigma, div tau)_K
///   = -(grad u_h, tau) + sum_K gamma_K (f - a.grad u_h - b u_h, div tau)_K.
/// A null `gamma` assembles the plain weighted L2 projection.
RecoverySystem assemble_recovery(const P1Function &u_h, const ProblemSpec &prob, FluxSpace space,
                                 const GammaRule *gamma);

/// Weighted L2 projection of -eps grad u_h onto the space.
FluxField recover_l2(const P1Function &u_h, const ProblemSpec &prob, FluxSpace space, SolveStats *stats = nullptr);

/// Stabilized H(div) recovery.
FluxField recover_hdiv_stab(const P1Function &u_h, const ProblemSpec &prob, const GammaRule &gamma, FluxSpace space,
                            SolveStats *stats = nullptr);

enum class RecoveryKind { Explicit, L2RT0, L2BDM1, HdivRT0, HdivBDM1 };

/// Accepts explicit, l2-rt0, l2-bdm1, hdiv (= hdiv-rt0), hdiv-rt0, hdiv-bdm1.
RecoveryKind parse_recovery_kind(std::string_view name);
std::string to_string(RecoveryKind kind);
bool is_implicit(RecoveryKind kind);

FluxField recover(RecoveryKind kind, const P1Function &u_h, const ProblemSpec &prob, const GammaRule &gamma = {},
                  SolveStats *stats = nullptr);

/// ||eps^-1/2 sigma + eps^1/2 grad u_h|| over the whole mesh.
double recovery_objective(const FluxField &sigma, const P1Function &u_h, double epsilon);

}  // namespace fluxrec
