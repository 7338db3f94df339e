#include "fluxrec/recovery.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxrec/quadrature.hpp"
#include "fluxrec/weights.hpp"

namespace fluxrec {

int dofs_per_edge(FluxSpace space) { return space == FluxSpace::RT0 ? 1 : 2; }

std::array<double, 2> bdm1_edge_points() {
    const double d = std::sqrt(3.0) / 6.0;
    return {0.5 - d, 0.5 + d};
}

namespace {

// Re-expresses an affine field around a new origin.
AffineField recentre(const AffineField &f, Vec2 origin) {
    return {origin, f(origin), f.jacobian};
}

std::vector<LocalBasisFunction> rt0_basis(const Mesh &mesh, int t) {
    std::vector<LocalBasisFunction> out;
    out.reserve(3);
    const double area = mesh.area(t);
    const auto &tri = mesh.triangle(t);
    for (std::size_t i = 0; i < 3; ++i) {
        const int e = mesh.triangle_edge(t, static_cast<int>(i));
        const double k = mesh.orientation(e, t) * edge_length(mesh, e) / (2.0 * area);
        const Vec2 a = mesh.vertex(tri[i]);
        out.push_back({e, AffineField{a, Vec2{}, Mat2{k, 0.0, 0.0, k}}});
    }
    return out;
}

std::vector<LocalBasisFunction> bdm1_basis(const Mesh &mesh, int t) {
    const Vec2 c = mesh.centroid(t);
    const double h = element_diameter(mesh, t);
    const auto tp = bdm1_edge_points();
    Eigen::Matrix<double, 6, 6> d;
    std::array<int, 6> dof{};
    for (int i = 0; i < 3; ++i) {
        const int e = mesh.triangle_edge(t, i);
        const Edge &ed = mesh.edge(e);
        const Vec2 n = mesh.normal(e);
        const Vec2 v0 = mesh.vertex(ed.v[0]), v1 = mesh.vertex(ed.v[1]);
        for (int j = 0; j < 2; ++j) {
            const int k = 2 * i + j;
            dof[static_cast<std::size_t>(k)] = 2 * e + j;
            const Vec2 x = v0 + tp[static_cast<std::size_t>(j)] * (v1 - v0);
            const Vec2 xi = (1.0 / h) * (x - c);
            d(k, 0) = n.x;
            d(k, 1) = n.y;
            d(k, 2) = xi.x * n.x;
            d(k, 3) = xi.y * n.x;
            d(k, 4) = xi.x * n.y;
            d(k, 5) = xi.y * n.y;
        }
    }
    const Eigen::Matrix<double, 6, 6> coef = d.partialPivLu().inverse();
    std::vector<LocalBasisFunction> out;
    out.reserve(6);
    for (int k = 0; k < 6; ++k) {
        AffineField f{c, Vec2{coef(0, k), coef(1, k)},
                      Mat2{coef(2, k) / h, coef(3, k) / h, coef(4, k) / h, coef(5, k) / h}};
        out.push_back({dof[static_cast<std::size_t>(k)], f});
    }
    return out;
}

}  // namespace

std::vector<LocalBasisFunction> local_basis(const Mesh &mesh, int t, FluxSpace space) {
    return space == FluxSpace::RT0 ? rt0_basis(mesh, t) : bdm1_basis(mesh, t);
}

FluxField::FluxField(MeshPtr mesh, FluxSpace space, std::vector<double> coefficients)
    : mesh_(std::move(mesh)), space_(space), coeffs_(std::move(coefficients)) {
    if (!mesh_) throw std::invalid_argument("FluxField needs a mesh");
    if (coeffs_.size() != mesh_->num_edges() * static_cast<std::size_t>(dofs_per_edge(space_)))
        throw std::invalid_argument("FluxField: wrong number of coefficients");
    local_.reserve(mesh_->num_triangles());
    for (int t = 0; t < static_cast<int>(mesh_->num_triangles()); ++t) {
        const Vec2 c = mesh_->centroid(t);
        AffineField sum{c, Vec2{}, Mat2{}};
        for (const auto &b : local_basis(*mesh_, t, space_)) {
            const double w = coeffs_[static_cast<std::size_t>(b.dof)];
            const AffineField f = recentre(b.field, c);
            sum.c += w * f.c;
            sum.jacobian += w * f.jacobian;
        }
        local_.push_back(sum);
    }
}

Vec2 eval_flux(const FluxField &field, int t, Vec2 x) {
    const auto b = barycentric_coordinates(field.mesh(), t, x);
    constexpr double tol = 1e-12;
    if (b[0] < -tol || b[1] < -tol || b[2] < -tol) throw std::out_of_range("eval_flux: point outside triangle");
    return field.at(t, x);
}

DivergencePolynomial div_flux(const FluxField &field, int t) { return {field.divergence(t), 0.0, 0.0}; }

FluxField interpolate_flux(const MeshPtr &mesh, FluxSpace space, const VectorField &field) {
    const int per = dofs_per_edge(space);
    std::vector<double> coeffs(mesh->num_edges() * static_cast<std::size_t>(per), 0.0);
    const auto tp = bdm1_edge_points();
    for (int e = 0; e < static_cast<int>(mesh->num_edges()); ++e) {
        const Edge &ed = mesh->edge(e);
        const Vec2 n = mesh->normal(e);
        const Vec2 v0 = mesh->vertex(ed.v[0]), v1 = mesh->vertex(ed.v[1]);
        const double s0 = dot(field(v0 + tp[0] * (v1 - v0)), n);
        const double s1 = dot(field(v0 + tp[1] * (v1 - v0)), n);
        if (space == FluxSpace::RT0) {
            coeffs[static_cast<std::size_t>(e)] = 0.5 * (s0 + s1);
        } else {
            coeffs[static_cast<std::size_t>(2 * e)] = s0;
            coeffs[static_cast<std::size_t>(2 * e + 1)] = s1;
        }
    }
    return FluxField(mesh, space, std::move(coeffs));
}

double GammaRule::gamma(double h_K, double a_sup, double epsilon, double beta) const {
    double m = alpha_K(h_K, epsilon, beta) / (8.0 * c_stab * c_stab * std::sqrt(epsilon));
    if (a_sup > 0.0) m = std::min(m, 1.0 / a_sup);
    if (beta > 0.0) m = std::min(m, 1.0 / std::sqrt(beta * epsilon));
    return scale * h_K * m;
}

double explicit_edge_complement(double h_e, double epsilon, double beta) {
    // alpha_e <= (h_e / eps)^1/2, so the product is at most 1 up to rounding.
    return std::min(1.0, alpha_e(h_e, epsilon, beta) * std::sqrt(epsilon / h_e));
}

double explicit_edge_weight(double h_e, double epsilon, double beta) {
    return 1.0 - explicit_edge_complement(h_e, epsilon, beta);
}

FluxField recover_explicit_rt0(const P1Function &u_h, const ProblemSpec &prob) {
    const Mesh &mesh = u_h.mesh();
    const double eps = prob.epsilon;
    std::vector<double> coeffs(mesh.num_edges(), 0.0);
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const Edge &ed = mesh.edge(e);
        const Vec2 n = mesh.normal(e);
        const double plus = dot(-eps * u_h.gradient(ed.tri[0]), n);
        if (ed.is_boundary()) {
            coeffs[static_cast<std::size_t>(e)] = plus;
            continue;
        }
        const double minus = dot(-eps * u_h.gradient(ed.tri[1]), n);
        const double w = explicit_edge_complement(edge_length(mesh, e), eps, prob.beta);
        coeffs[static_cast<std::size_t>(e)] = plus + w * (minus - plus);
    }
    return FluxField(u_h.mesh_ptr(), FluxSpace::RT0, std::move(coeffs));
}

RecoverySystem assemble_recovery(const P1Function &u_h, const ProblemSpec &prob, FluxSpace space,
                                 const GammaRule *gamma) {
    const Mesh &mesh = u_h.mesh();
    const double inv_eps = 1.0 / prob.epsilon;
    const std::size_t n = mesh.num_edges() * static_cast<std::size_t>(dofs_per_edge(space));
    RecoverySystem sys{SparseMatrix(n, n), std::vector<double>(n, 0.0)};
    const auto &mass_rule = quad_triangle(2);
    const auto &data_rule = quad_triangle(prob.assembly_degree);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto basis = local_basis(mesh, t, space);
        const auto p = mesh.corners(t);
        const double area = mesh.area(t);
        const Vec2 c = mesh.centroid(t);
        const Vec2 gh = u_h.gradient(t);

        double gamma_k = 0.0, residual_integral = 0.0;
        if (gamma) {
            const double h = element_diameter(mesh, t);
            double a_sup = 0.0;
            for (std::size_t q = 0; q < data_rule.points.size(); ++q) {
                const Barycentric &b = data_rule.points[q];
                const Vec2 x = map_point(p, b);
                const Vec2 a = prob.velocity(x);
                a_sup = std::max(a_sup, norm(a));
                residual_integral += data_rule.weights[q] * 2.0 * area *
                                     (prob.source(x) - dot(a, gh) - prob.reaction(x) * u_h.value(t, b));
            }
            gamma_k = gamma->gamma(h, a_sup, prob.epsilon, prob.beta);
        }

        std::vector<std::array<Vec2, 3>> at_points(basis.size());
        for (std::size_t i = 0; i < basis.size(); ++i)
            for (std::size_t q = 0; q < 3; ++q) at_points[i][q] = basis[i].field(map_point(p, mass_rule.points[q]));

        for (std::size_t i = 0; i < basis.size(); ++i) {
            const auto row = static_cast<std::size_t>(basis[i].dof);
            const double div_i = basis[i].field.divergence();
            sys.rhs[row] += -dot(gh, basis[i].field(c)) * area + gamma_k * div_i * residual_integral;
            for (std::size_t j = 0; j < basis.size(); ++j) {
                double m = 0.0;
                for (std::size_t q = 0; q < 3; ++q) m += mass_rule.weights[q] * dot(at_points[i][q], at_points[j][q]);
                m *= 2.0 * area;
                const double value = inv_eps * m + gamma_k * div_i * basis[j].field.divergence() * area;
                sys.matrix.add(row, static_cast<std::size_t>(basis[j].dof), value);
            }
        }
    }
    sys.matrix.finalize();
    return sys;
}

FluxField recover_l2(const P1Function &u_h, const ProblemSpec &prob, FluxSpace space, SolveStats *stats) {
    const auto sys = assemble_recovery(u_h, prob, space, nullptr);
    auto x = solve_spd(sys.matrix, sys.rhs, kRecoveryTolerance, stats);
    return FluxField(u_h.mesh_ptr(), space, std::move(x));
}

FluxField recover_hdiv_stab(const P1Function &u_h, const ProblemSpec &prob, const GammaRule &gamma, FluxSpace space,
                            SolveStats *stats) {
    const auto sys = assemble_recovery(u_h, prob, space, &gamma);
    auto x = solve_spd(sys.matrix, sys.rhs, kRecoveryTolerance, stats);
    return FluxField(u_h.mesh_ptr(), space, std::move(x));
}

RecoveryKind parse_recovery_kind(std::string_view name) {
    if (name == "explicit") return RecoveryKind::Explicit;
    if (name == "l2-rt0") return RecoveryKind::L2RT0;
    if (name == "l2-bdm1") return RecoveryKind::L2BDM1;
    if (name == "hdiv" || name == "hdiv-rt0") return RecoveryKind::HdivRT0;
    if (name == "hdiv-bdm1") return RecoveryKind::HdivBDM1;
    throw std::invalid_argument("unknown recovery kind '" + std::string(name) + "'");
}

std::string to_string(RecoveryKind kind) {
    switch (kind) {
        case RecoveryKind::Explicit: return "explicit";
        case RecoveryKind::L2RT0: return "l2-rt0";
        case RecoveryKind::L2BDM1: return "l2-bdm1";
        case RecoveryKind::HdivRT0: return "hdiv-rt0";
        case RecoveryKind::HdivBDM1: return "hdiv-bdm1";
    }
    return "unknown";
}

bool is_implicit(RecoveryKind kind) { return kind != RecoveryKind::Explicit; }

FluxField recover(RecoveryKind kind, const P1Function &u_h, const ProblemSpec &prob, const GammaRule &gamma,
                  SolveStats *stats) {
    switch (kind) {
        case RecoveryKind::Explicit: return recover_explicit_rt0(u_h, prob);
        case RecoveryKind::L2RT0: return recover_l2(u_h, prob, FluxSpace::RT0, stats);
        case RecoveryKind::L2BDM1: return recover_l2(u_h, prob, FluxSpace::BDM1, stats);
        case RecoveryKind::HdivRT0: return recover_hdiv_stab(u_h, prob, gamma, FluxSpace::RT0, stats);
        case RecoveryKind::HdivBDM1: return recover_hdiv_stab(u_h, prob, gamma, FluxSpace::BDM1, stats);
    }
    throw std::invalid_argument("unknown recovery kind");
}

double recovery_objective(const FluxField &sigma, const P1Function &u_h, double epsilon) {
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_triangle(2);
    const double se = std::sqrt(epsilon);
    double s = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        const double area = mesh.area(t);
        const Vec2 g = se * u_h.gradient(t);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 v = (1.0 / se) * sigma.at(t, map_point(p, rule.points[q])) + g;
            s += rule.weights[q] * 2.0 * area * dot(v, v);
        }
    }
    return std::sqrt(s);
}

}  // namespace fluxrec
