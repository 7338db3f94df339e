#include "fluxrec/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxrec/quadrature.hpp"

namespace fluxrec {

P1Function::P1Function(MeshPtr mesh, std::vector<double> values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw std::invalid_argument("P1Function needs a mesh");
    if (values_.size() != mesh_->num_vertices()) throw std::invalid_argument("P1Function: one value per vertex");
}

double P1Function::value(int t, const Barycentric &b) const {
    const auto &tri = mesh_->triangle(t);
    return b[0] * values_[static_cast<std::size_t>(tri[0])] + b[1] * values_[static_cast<std::size_t>(tri[1])] +
           b[2] * values_[static_cast<std::size_t>(tri[2])];
}

double P1Function::value(int t, Vec2 x) const { return value(t, barycentric_coordinates(*mesh_, t, x)); }

Vec2 P1Function::gradient(int t) const {
    const auto g = barycentric_gradients(*mesh_, t);
    const auto &tri = mesh_->triangle(t);
    Vec2 out{};
    for (std::size_t i = 0; i < 3; ++i) out += values_[static_cast<std::size_t>(tri[i])] * g[i];
    return out;
}

std::array<Vec2, 3> barycentric_gradients(const Mesh &mesh, int t) {
    const auto p = mesh.corners(t);
    const double two_area = cross(p[1] - p[0], p[2] - p[0]);
    std::array<Vec2, 3> g;
    for (std::size_t i = 0; i < 3; ++i) {
        const Vec2 d = p[(i + 2) % 3] - p[(i + 1) % 3];
        g[i] = Vec2{-d.y / two_area, d.x / two_area};
    }
    return g;
}

Barycentric barycentric_coordinates(const Mesh &mesh, int t, Vec2 x) {
    const auto p = mesh.corners(t);
    const double two_area = cross(p[1] - p[0], p[2] - p[0]);
    Barycentric b;
    for (std::size_t i = 0; i < 3; ++i) b[i] = cross(p[(i + 2) % 3] - p[(i + 1) % 3], x - p[(i + 1) % 3]) / two_area;
    return b;
}

Vec2 gradient(const P1Function &u, int t) { return u.gradient(t); }

P1Function interpolate(MeshPtr mesh, const ScalarField &f) {
    std::vector<double> v(mesh->num_vertices());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(mesh->vertices()[i]);
    return P1Function(std::move(mesh), std::move(v));
}

double velocity_sup(const Mesh &mesh, int t, const ProblemSpec &prob, int degree) {
    const auto &rule = quad_triangle(degree);
    const auto p = mesh.corners(t);
    double s = 0.0;
    for (const auto &b : rule.points) s = std::max(s, norm(prob.velocity(map_point(p, b))));
    return s;
}

DirichletLift dirichlet_lift(const Mesh &mesh, const ProblemSpec &prob) {
    const std::size_t nv = mesh.num_vertices();
    std::vector<std::vector<double>> limits(nv);
    // Evaluate just inside the edge so that piecewise data is read from the correct side.
    auto limit = [&](Vec2 v, Vec2 toward) {
        Vec2 x = v;
        for (double t = 1e-12; t < 1.0 && x == v; t *= 10.0) x = v + t * (toward - v);
        return prob.dirichlet_data(x);
    };
    for (const auto &e : mesh.edges()) {
        if (e.kind != EdgeKind::Dirichlet) continue;
        const Vec2 a = mesh.vertex(e.v[0]), b = mesh.vertex(e.v[1]);
        const Vec2 m = midpoint(a, b);
        limits[static_cast<std::size_t>(e.v[0])].push_back(limit(a, m));
        limits[static_cast<std::size_t>(e.v[1])].push_back(limit(b, m));
    }
    DirichletLift lift;
    lift.dof.assign(nv, -1);
    lift.value.assign(nv, 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
        const auto &lim = limits[v];
        if (lim.empty()) {
            lift.dof[v] = static_cast<int>(lift.free_vertices.size());
            lift.free_vertices.push_back(static_cast<int>(v));
            continue;
        }
        const auto [lo, hi] = std::minmax_element(lim.begin(), lim.end());
        const double scale = 1.0 + std::max(std::abs(*lo), std::abs(*hi));
        if (*hi - *lo <= 1e-8 * scale) {
            lift.value[v] = prob.dirichlet_data(mesh.vertices()[v]);
        } else {
            double s = 0.0;
            for (double l : lim) s += l;
            lift.value[v] = s / static_cast<double>(lim.size());
            lift.averaged_corners.push_back(static_cast<int>(v));
        }
    }
    if (lift.free_vertices.size() == nv) throw ProblemError("empty Dirichlet vertex set");
    return lift;
}

namespace {

struct ElementSystem {
    std::array<std::array<double, 3>, 3> a{};
    std::array<double, 3> f{};
    double delta = 0.0;
    double a_sup = 0.0;
    double h = 0.0;
};

ElementSystem element_system(const Mesh &mesh, int t, const ProblemSpec &prob, const DeltaRule &delta) {
    ElementSystem es;
    const auto p = mesh.corners(t);
    const double area = mesh.area(t);
    const auto g = barycentric_gradients(mesh, t);
    es.h = element_diameter(mesh, t);
    es.delta = delta.delta(es.h);
    const double eps = prob.epsilon;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) es.a[i][j] = eps * dot(g[j], g[i]) * area;

    const auto &rule = quad_triangle(prob.assembly_degree);
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
        const Barycentric &phi = rule.points[q];
        const Vec2 x = map_point(p, phi);
        const double w = rule.weights[q] * 2.0 * area;
        const Vec2 a = prob.velocity(x);
        const double b = prob.reaction(x);
        const double f = prob.source(x);
        es.a_sup = std::max(es.a_sup, norm(a));
        std::array<double, 3> a_grad{};
        for (std::size_t i = 0; i < 3; ++i) a_grad[i] = dot(a, g[i]);
        // -eps Lap of a P1 function vanishes on each element.
        constexpr double laplacian = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                const double strong = -eps * laplacian + a_grad[j] + b * phi[j];
                es.a[i][j] += w * (a_grad[j] * phi[i] + b * phi[j] * phi[i] + es.delta * strong * a_grad[i]);
            }
            es.f[i] += w * (f * phi[i] + es.delta * f * a_grad[i]);
        }
    }
    return es;
}

// <g, phi_i>_e on Neumann edges, accumulated per vertex.
std::vector<double> neumann_load(const Mesh &mesh, const ProblemSpec &prob) {
    std::vector<double> load(mesh.num_vertices(), 0.0);
    const auto &rule = quad_edge(prob.assembly_degree);
    for (int e = 0; e < static_cast<int>(mesh.num_edges()); ++e) {
        const Edge &ed = mesh.edge(e);
        if (ed.kind != EdgeKind::Neumann) continue;
        const Vec2 a = mesh.vertex(ed.v[0]), b = mesh.vertex(ed.v[1]);
        const double len = edge_length(mesh, e);
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double s = rule.points[q];
            const double gv = prob.neumann_data(a + s * (b - a)) * rule.weights[q] * len;
            load[static_cast<std::size_t>(ed.v[0])] += gv * (1.0 - s);
            load[static_cast<std::size_t>(ed.v[1])] += gv * s;
        }
    }
    return load;
}

}  // namespace

SupgSystem assemble_supg(const MeshPtr &mesh_ptr, const ProblemSpec &prob, const DeltaRule &delta) {
    const Mesh &mesh = *mesh_ptr;
    if (!(prob.epsilon > 0.0)) throw ProblemError("epsilon must be positive");
    if (!mesh.has_kind(EdgeKind::Dirichlet)) throw ProblemError("empty Dirichlet set");
    SupgSystem sys;
    sys.lift = dirichlet_lift(mesh, prob);
    const auto &dof = sys.lift.dof;
    const std::size_t n = sys.lift.free_vertices.size();
    sys.matrix = SparseMatrix(n, n);
    sys.rhs.assign(n, 0.0);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto es = element_system(mesh, t, prob, delta);
        if (es.h > 0.0) sys.max_delta_ratio = std::max(sys.max_delta_ratio, es.delta * es.a_sup / es.h);
        const auto &tri = mesh.triangle(t);
        for (std::size_t i = 0; i < 3; ++i) {
            const int row = dof[static_cast<std::size_t>(tri[i])];
            if (row < 0) continue;
            sys.rhs[static_cast<std::size_t>(row)] += es.f[i];
            for (std::size_t j = 0; j < 3; ++j) {
                const int col = dof[static_cast<std::size_t>(tri[j])];
                if (col >= 0) {
                    sys.matrix.add(static_cast<std::size_t>(row), static_cast<std::size_t>(col), es.a[i][j]);
                } else {
                    sys.rhs[static_cast<std::size_t>(row)] -= es.a[i][j] * sys.lift.value[static_cast<std::size_t>(tri[j])];
                }
            }
        }
    }
    const auto gload = neumann_load(mesh, prob);
    for (std::size_t v = 0; v < gload.size(); ++v)
        if (dof[v] >= 0) sys.rhs[static_cast<std::size_t>(dof[v])] += gload[v];
    sys.matrix.finalize();
    return sys;
}

P1Function solve(const MeshPtr &mesh, const ProblemSpec &prob, const DeltaRule &delta, SupgSolveInfo *info,
                 double rel_tol) {
    auto sys = assemble_supg(mesh, prob, delta);
    SolveStats stats;
    const auto x = solve_general(sys.matrix, sys.rhs, rel_tol, &stats);
    std::vector<double> values = sys.lift.value;
    for (std::size_t k = 0; k < sys.lift.free_vertices.size(); ++k)
        values[static_cast<std::size_t>(sys.lift.free_vertices[k])] = x[k];
    if (info) {
        info->stats = stats;
        info->averaged_corners = sys.lift.averaged_corners;
        info->max_delta_ratio = sys.max_delta_ratio;
    }
    return P1Function(mesh, std::move(values));
}

std::vector<double> supg_residual(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta) {
    const Mesh &mesh = u_h.mesh();
    const auto lift = dirichlet_lift(mesh, prob);
    std::vector<double> r(lift.free_vertices.size(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto es = element_system(mesh, t, prob, delta);
        const auto &tri = mesh.triangle(t);
        for (std::size_t i = 0; i < 3; ++i) {
            const int row = lift.dof[static_cast<std::size_t>(tri[i])];
            if (row < 0) continue;
            double s = -es.f[i];
            for (std::size_t j = 0; j < 3; ++j) s += es.a[i][j] * u_h.values()[static_cast<std::size_t>(tri[j])];
            r[static_cast<std::size_t>(row)] += s;
        }
    }
    const auto gload = neumann_load(mesh, prob);
    for (std::size_t v = 0; v < gload.size(); ++v)
        if (lift.dof[v] >= 0) r[static_cast<std::size_t>(lift.dof[v])] -= gload[v];
    return r;
}

std::vector<double> supg_load(const MeshPtr &mesh_ptr, const ProblemSpec &prob, const DeltaRule &delta) {
    const Mesh &mesh = *mesh_ptr;
    const auto lift = dirichlet_lift(mesh, prob);
    std::vector<double> l(lift.free_vertices.size(), 0.0);
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto es = element_system(mesh, t, prob, delta);
        const auto &tri = mesh.triangle(t);
        for (std::size_t i = 0; i < 3; ++i) {
            const int row = lift.dof[static_cast<std::size_t>(tri[i])];
            if (row >= 0) l[static_cast<std::size_t>(row)] += es.f[i];
        }
    }
    const auto gload = neumann_load(mesh, prob);
    for (std::size_t v = 0; v < gload.size(); ++v)
        if (lift.dof[v] >= 0) l[static_cast<std::size_t>(lift.dof[v])] += gload[v];
    return l;
}

double norm_energy(const P1Function &v, const ProblemSpec &prob, int degree) {
    const Mesh &mesh = v.mesh();
    const auto &rule = quad_triangle(degree);
    double grad2 = 0.0, l2 = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const double area = mesh.area(t);
        const Vec2 g = v.gradient(t);
        grad2 += dot(g, g) * area;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const double val = v.value(t, rule.points[q]);
            l2 += rule.weights[q] * 2.0 * area * val * val;
        }
    }
    return std::sqrt(prob.epsilon * grad2 + prob.beta * l2);
}

ErrorNorms error_norms(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta, int degree) {
    if (!prob.has_exact()) throw ProblemError("exact solution required for error norms");
    const Mesh &mesh = u_h.mesh();
    const auto &rule = quad_triangle(degree);
    const auto &u = *prob.exact_solution;
    const auto &du = *prob.exact_gradient;
    double l2 = 0.0, grad2 = 0.0, streamline = 0.0, h_grad2 = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
        const auto p = mesh.corners(t);
        const double area = mesh.area(t);
        const double h = element_diameter(mesh, t);
        const double dk = delta.delta(h);
        const Vec2 gh = u_h.gradient(t);
        double l2_k = 0.0, grad2_k = 0.0, stream_k = 0.0;
        for (std::size_t q = 0; q < rule.points.size(); ++q) {
            const Vec2 x = map_point(p, rule.points[q]);
            const double w = rule.weights[q] * 2.0 * area;
            const double e = u(x) - u_h.value(t, rule.points[q]);
            const Vec2 ge = du(x) - gh;
            const double ag = dot(prob.velocity(x), ge);
            l2_k += w * e * e;
            grad2_k += w * dot(ge, ge);
            stream_k += w * ag * ag;
        }
        l2 += l2_k;
        grad2 += grad2_k;
        streamline += dk * stream_k;
        h_grad2 += h * grad2_k;
    }
    ErrorNorms out;
    out.l2 = std::sqrt(l2);
    out.h1_semi = std::sqrt(grad2);
    const double energy2 = prob.epsilon * grad2 + prob.beta * l2;
    out.energy = std::sqrt(energy2);
    out.supg = std::sqrt(energy2 + streamline);
    out.eps_triple = out.energy + std::sqrt(h_grad2);
    return out;
}

double norm_supg(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta, int degree) {
    return error_norms(u_h, prob, delta, degree).supg;
}

double norm_eps_triple(const P1Function &u_h, const ProblemSpec &prob, int degree) {
    return error_norms(u_h, prob, DeltaRule{}, degree).eps_triple;
}

}  // namespace fluxrec
