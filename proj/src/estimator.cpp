#include "fluxrec/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "fluxrec/quadrature.hpp"

namespace fluxrec {

namespace {

double residual_at(const P1Function &u_h, const ProblemSpec &prob, int t, const Barycentric &b, Vec2 x) {
    // Lap u_h vanishes on each element for P1.
    constexpr double laplacian = 0.0;
    return prob.source(x) + prob.epsilon * laplacian - dot(prob.velocity(x), u_h.gradient(t)) -
           prob.reaction(x) * u_h.value(t, b);
}

// Edge endpoints in stored orientation.
std::array<Vec2, 2> edge_points(const Mesh &mesh, int e) {
    const auto &ed = mesh.edge(e);
    return {mesh.vertex(ed.v[0]), mesh.vertex(ed.v[1])};
}

Vec2 lerp(const std::array<Vec2, 2> &p, double s) { return p[0] + (p[1] - p[0]) * s; }

// ||R - Pi_k R||^2 over a triangle, R sampled at the rule's points.
double triangle_projection_defect(const std::vector<double> &r, const QuadratureRule &rule, double area, int k) {
    const std::size_t n = r.size();
    std::vector<double> proj(n, 0.0);
    if (k == 0) {
        double mean = 0.0;
        for (std::size_t q = 0; q < n; ++q) mean += 2.0 * rule.weights[q] * r[q];
        std::fill(proj.begin(), proj.end(), mean);
    } else {
        Eigen::Matrix3d mass;
        mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
        mass *= area / 12.0;
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (std::size_t q = 0; q < n; ++q)
            for (int i = 0; i < 3; ++i) rhs(i) += 2.0 * area * rule.weights[q] * r[q] * rule.points[q][i];
        const Eigen::Vector3d c = mass.ldlt().solve(rhs);
        for (std::size_t q = 0; q < n; ++q)
            proj[q] = c(0) * rule.points[q][0] + c(1) * rule.points[q][1] + c(2) * rule.points[q][2];
    }
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q) s += 2.0 * area * rule.weights[q] * (r[q] - proj[q]) * (r[q] - proj[q]);
    return s;
}

double edge_projection_defect(const std::vector<double> &r, const EdgeRule &rule, double length, int k) {
    const std::size_t n = r.size();
    std::vector<double> proj(n, 0.0);
    if (k == 0) {
        double mean = 0.0;
        for (std::size_t q = 0; q < n; ++q) mean += rule.weights[q] * r[q];
        std::fill(proj.begin(), proj.end(), mean);
    } else {
        Eigen::Matrix2d mass;
        mass << 2, 1, 1, 2;
        mass /= 6.0;
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        for (std::size_t q = 0; q < n; ++q) {
            rhs(0) += rule.weights[q] * r[q] * (1.0 - rule.points[q]);
            rhs(1) += rule.weights[q] * r[q] * rule.points[q];
        }
        const Eigen::Vector2d c = mass.ldlt().solve(rhs);
        for (std::size_t q = 0; q < n; ++q) proj[q] = c(0) * (1.0 - rule.points[q]) + c(1) * rule.points[q];
    }
    double s = 0.0;
    for (std::size_t q = 0; q < n; ++q) s += length * rule.weights[q] * (r[q] - proj[q]) * (r[q] - proj[q]);
    return s;
}

}  // namespace

std::vector<CellResidual> cell_residuals(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob) {
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_triangle(prob.assembly_degree);
    std::vector<CellResidual> out(mesh.num_triangles());
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        const double area = mesh.area(t);
        const double div = sigma.divergence(t);
        double strong = 0.0;
        double recovered = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = map_point(p, rule.points[q]);
            const double r = residual_at(u_h, prob, t, rule.points[q], x);
            const double w = 2.0 * area * rule.weights[q];
            strong += w * r * r;
            recovered += w * (r - div) * (r - div);
        }
        out[static_cast<std::size_t>(t)] = {std::sqrt(strong), std::sqrt(recovered)};
    }
    return out;
}

std::vector<double> flux_mismatch(const P1Function &u_h, const FluxField &sigma, double epsilon) {
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_triangle(2);
    const double scale = 1.0 / std::sqrt(epsilon);
    std::vector<double> out(mesh.num_triangles());
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        const double area = mesh.area(t);
        const Vec2 eg = u_h.gradient(t) * epsilon;
        double s = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 w = (sigma.at(t, map_point(p, rule.points[q])) + eg) * scale;
            s += 2.0 * area * rule.weights[q] * dot(w, w);
        }
        out[static_cast<std::size_t>(t)] = std::sqrt(s);
    }
    return out;
}

std::vector<NeumannTerm> neumann_terms(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob,
                                       bool implicit_recovery) {
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_edge(prob.assembly_degree);
    std::vector<NeumannTerm> out;
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const auto &ed = mesh.edge(e);
        if (ed.kind != EdgeKind::Neumann) continue;
        const int t = ed.tri[0];
        const double len = edge_length(mesh, e);
        const Vec2 n = mesh.normal(e);
        const auto ends = edge_points(mesh, e);
        const double flux_h = prob.epsilon * dot(u_h.gradient(t), n);
        double data = 0.0;
        double rec = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = lerp(ends, rule.points[q]);
            const double d = prob.neumann_data(x) - flux_h;
            data += len * rule.weights[q] * d * d;
            if (implicit_recovery) {
                const double m = dot(sigma.at(t, x), n) + flux_h;
                rec += len * rule.weights[q] * m * m;
            }
        }
        NeumannTerm term;
        term.edge = e;
        term.triangle = t;
        term.alpha = alpha_e(len, prob.epsilon, prob.beta);
        term.data = term.alpha * std::sqrt(data);
        term.recovery = term.alpha * std::sqrt(rec);
        out.push_back(term);
    }
    return out;
}

std::vector<double> edge_residual_jump(const P1Function &u_h, const ProblemSpec &prob) {
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_edge(prob.assembly_degree);
    std::vector<double> out(mesh.num_edges(), 0.0);
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const auto &ed = mesh.edge(e);
        const double len = edge_length(mesh, e);
        const Vec2 n = mesh.normal(e);
        const Vec2 tau_plus = u_h.gradient(ed.tri[0]) * (-prob.epsilon);
        if (ed.kind == EdgeKind::Interior) {
            const Vec2 tau_minus = u_h.gradient(ed.tri[1]) * (-prob.epsilon);
            out[static_cast<std::size_t>(e)] = std::abs(dot(tau_plus - tau_minus, n)) * std::sqrt(len);
        } else if (ed.kind == EdgeKind::Neumann) {
            const auto ends = edge_points(mesh, e);
            double s = 0.0;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                const double r = prob.neumann_data(lerp(ends, rule.points[q])) + dot(tau_plus, n);
                s += len * rule.weights[q] * r * r;
            }
            out[static_cast<std::size_t>(e)] = std::sqrt(s);
        }
    }
    return out;
}

double oscillation(const P1Function &u_h, const ProblemSpec &prob, int k) {
    if (k != 0 && k != 1) throw std::invalid_argument("oscillation degree must be 0 or 1");
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_triangle(prob.assembly_degree);
    double total = 0.0;
    std::vector<double> r;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        r.assign(rule.points.size(), 0.0);
        for (std::size_t q = 0; q < rule.points.size(); ++q)
            r[q] = residual_at(u_h, prob, t, rule.points[q], map_point(p, rule.points[q]));
        const double a = alpha_K(element_diameter(mesh, t), prob.epsilon, prob.beta);
        total += a * a * triangle_projection_defect(r, rule, mesh.area(t), k);
    }
    const auto &erule = quad_edge(prob.assembly_degree);
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const auto &ed = mesh.edge(e);
        if (ed.kind != EdgeKind::Neumann) continue;
        const double len = edge_length(mesh, e);
        const Vec2 n = mesh.normal(e);
        const double flux_h = prob.epsilon * dot(u_h.gradient(ed.tri[0]), n);
        const auto ends = edge_points(mesh, e);
        r.assign(erule.points.size(), 0.0);
        for (std::size_t q = 0; q < erule.points.size(); ++q)
            r[q] = prob.neumann_data(lerp(ends, erule.points[q])) - flux_h;
        const double a = alpha_e(len, prob.epsilon, prob.beta);
        total += a * a * edge_projection_defect(r, erule, len, k);
    }
    return std::sqrt(total);
}

std::vector<double> EstimatorReport::indicators() const {
    std::vector<double> out(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) out[i] = elements[i].eta;
    return out;
}

EstimatorReport assemble_report(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob,
                                RecoveryKind kind, int oscillation_degree) {
    const Mesh &mesh = u_h.mesh();
    if (&sigma.mesh() != &mesh) throw std::invalid_argument("flux and u_h live on different meshes");
    const std::size_t nt = mesh.num_triangles();
    const double eps = prob.epsilon;

    EstimatorReport rep;
    const auto residuals = cell_residuals(u_h, sigma, prob);
    const auto mismatch = flux_mismatch(u_h, sigma, eps);
    rep.neumann = neumann_terms(u_h, sigma, prob, is_implicit(kind));

    rep.elements.resize(nt);
    double phi2 = 0.0;
    double mismatch2 = 0.0;
    double strong2 = 0.0;
    double recovered2 = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        auto &el = rep.elements[t];
        el.alpha = alpha_K(element_diameter(mesh, static_cast<int>(t)), eps, prob.beta);
        el.residual = residuals[t];
        el.mismatch = mismatch[t];
        const double a2 = el.alpha * el.alpha;
        const double s2 = a2 * el.residual.strong * el.residual.strong;
        const double r2 = a2 * el.residual.recovered * el.residual.recovered;
        const double m2 = el.mismatch * el.mismatch;
        el.cell = std::sqrt(s2 + r2 + m2);
        el.eta = el.cell;
        phi2 += s2 + r2 + m2;
        mismatch2 += m2;
        strong2 += s2;
        recovered2 += r2;
    }
    double neumann2 = 0.0;
    for (const auto &term : rep.neumann) {
        const double add = term.data * term.data + term.recovery * term.recovery;
        neumann2 += add;
        auto &el = rep.elements[static_cast<std::size_t>(term.triangle)];
        el.eta = std::sqrt(el.eta * el.eta + add);
    }
    rep.phi = std::sqrt(phi2);
    rep.neumann_total = std::sqrt(neumann2);
    rep.eta = std::sqrt(phi2 + neumann2);
    rep.mismatch_total = std::sqrt(mismatch2);
    rep.osc = oscillation(u_h, prob, oscillation_degree);

    const auto jumps = edge_residual_jump(u_h, prob);
    std::vector<double> weighted_jump2(mesh.num_edges());
    double jump2 = 0.0;
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const double a = alpha_e(edge_length(mesh, e), eps, prob.beta);
        const double v = a * a * jumps[static_cast<std::size_t>(e)] * jumps[static_cast<std::size_t>(e)];
        weighted_jump2[static_cast<std::size_t>(e)] = v;
        jump2 += v;
    }
    rep.jump_estimator = std::sqrt(jump2);

    // Observed constants. Elements whose denominators vanish carry no information.
    constexpr double tiny = std::numeric_limits<double>::min();
    std::vector<double> den(nt, 0.0);
    for (int t = 0; t < static_cast<int>(nt); ++t)
        for (int e : mesh.triangle_edges(t))
            if (mesh.edge(e).kind == EdgeKind::Interior)
                den[static_cast<std::size_t>(t)] += weighted_jump2[static_cast<std::size_t>(e)];
    // Jumps below 1e-8 of the largest are rounding noise in the gradient difference.
    const double den_floor = std::max(tiny, kJumpNoiseFloor * *std::max_element(den.begin(), den.end()));
    double explicit_ratio = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        const double num = mismatch[t] * mismatch[t];
        if (den[t] > den_floor) explicit_ratio = std::max(explicit_ratio, num / den[t]);
    }
    rep.constants.explicit_flux = explicit_ratio;

    const auto &erule = quad_edge(2);
    double trace2 = 0.0;
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const auto &ed = mesh.edge(e);
        if (!ed.is_boundary()) continue;
        const int t = ed.tri[0];
        const double len = edge_length(mesh, e);
        const Vec2 n = mesh.normal(e);
        const auto ends = edge_points(mesh, e);
        const double flux_h = eps * dot(u_h.gradient(t), n);
        double s = 0.0;
        for (std::size_t q = 0; q < erule.points.size(); ++q) {
            const double m = dot(sigma.at(t, lerp(ends, erule.points[q])), n) + flux_h;
            s += len * erule.weights[q] * m * m;
        }
        const double a = alpha_e(len, eps, prob.beta);
        trace2 += a * a * s;
    }
    rep.constants.boundary_trace = mismatch2 > tiny ? std::sqrt(trace2 / mismatch2) : 0.0;
    const double rhs = std::sqrt(strong2) + rep.mismatch_total;
    rep.constants.residual = rhs > tiny ? std::sqrt(recovered2) / rhs : 0.0;
    return rep;
}

}  // namespace fluxrec
