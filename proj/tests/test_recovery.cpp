#include <doctest.h>

#include <memory>
#include <random>

#include "fluxrec/problems.hpp"
#include "fluxrec/quadrature.hpp"
#include "fluxrec/recovery.hpp"
#include "dense_oracles.hpp"

using namespace fluxrec;

namespace {

MeshPtr square(int n, Vec2 lo = {0, 0}, Vec2 hi = {1, 1}, SideKinds sides = {}) {
    return std::make_shared<const Mesh>(build_initial_square_mesh(lo, hi, n, sides));
}

P1Function random_p1(const MeshPtr &mesh, std::mt19937 &rng) {
    return P1Function(mesh, oracle::random_vector(mesh->num_vertices(), rng));
}

FluxField with_coefficients(const FluxField &f, std::vector<double> c) {
    return FluxField(f.mesh_ptr(), f.space(), std::move(c));
}

double weighted_distance(const FluxField &a, const FluxField &b, double eps) {
    std::vector<double> d(a.coefficients().size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a.coefficients()[i] - b.coefficients()[i];
    const P1Function zero(a.mesh_ptr(), std::vector<double>(a.mesh().num_vertices(), 0.0));
    return recovery_objective(with_coefficients(a, d), zero, eps);
}

// Largest normal-component jump across interior edges at Gauss points.
double normal_jump(const FluxField &f) {
    const Mesh &m = f.mesh();
    double worst = 0.0;
    for (int e = 0; e < static_cast<int>(m.num_edges()); ++e) {
        const Edge &ed = m.edge(e);
        if (ed.is_boundary()) continue;
        const Vec2 n = oracle::edge_normal(m, e);
        const Vec2 a = m.vertex(ed.v[0]), b = m.vertex(ed.v[1]);
        for (double s : {0.1, 0.5, 0.9}) {
            const Vec2 x = a + s * (b - a);
            worst = std::max(worst, std::abs(dot(f.at(ed.tri[0], x) - f.at(ed.tri[1], x), n)));
        }
    }
    return worst;
}

const std::array<RecoveryKind, 5> kAllKinds = {RecoveryKind::Explicit, RecoveryKind::L2RT0, RecoveryKind::L2BDM1,
                                               RecoveryKind::HdivRT0, RecoveryKind::HdivBDM1};

}  // namespace

TEST_CASE("RT0 basis") {
    const auto mesh = std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({0, 0}, {1, 1}, 2), {0.3, 0.2}, 2));
    for (int t = 0; t < static_cast<int>(mesh->num_triangles()); ++t) {
        const auto basis = local_basis(*mesh, t, FluxSpace::RT0);
        REQUIRE(basis.size() == 3);
        for (int i = 0; i < 3; ++i) {
            const auto &phi = basis[static_cast<std::size_t>(i)];
            const int own = phi.dof;
            CHECK(own == mesh->triangle_edge(t, i));
            const Edge &ed = mesh->edge(own);
            const double len = edge_length(*mesh, own);
            const double s = ed.tri[0] == t ? 1.0 : -1.0;
            CHECK(phi.field.divergence() == doctest::Approx(s * len / mesh->area(t)).epsilon(1e-13));
            for (int j = 0; j < 3; ++j) {
                const int e = mesh->triangle_edge(t, j);
                const Edge &ej = mesh->edge(e);
                const Vec2 n = oracle::edge_normal(*mesh, e);
                for (double u : {0.0, 0.3, 1.0}) {
                    const Vec2 x = mesh->vertex(ej.v[0]) + u * (mesh->vertex(ej.v[1]) - mesh->vertex(ej.v[0]));
                    CHECK(dot(phi.field(x), n) == doctest::Approx(e == own ? 1.0 : 0.0).epsilon(1e-13).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("BDM1 basis is dual to the edge functionals") {
    const auto mesh = square(2);
    const auto pts = bdm1_edge_points();
    for (int t = 0; t < static_cast<int>(mesh->num_triangles()); ++t) {
        const auto basis = local_basis(*mesh, t, FluxSpace::BDM1);
        REQUIRE(basis.size() == 6);
        for (const auto &phi : basis)
            for (int i = 0; i < 3; ++i) {
                const int e = mesh->triangle_edge(t, i);
                const Edge &ed = mesh->edge(e);
                const Vec2 n = oracle::edge_normal(*mesh, e);
                for (int k = 0; k < 2; ++k) {
                    const Vec2 a = mesh->vertex(ed.v[0]), b = mesh->vertex(ed.v[1]);
                    const Vec2 x = a + pts[static_cast<std::size_t>(k)] * (b - a);
                    const double expected = phi.dof == 2 * e + k ? 1.0 : 0.0;
                    CHECK(dot(phi.field(x), n) == doctest::Approx(expected).scale(1.0).epsilon(1e-12));
                }
            }
    }
}

TEST_CASE("constant field is represented exactly") {
    const auto mesh = std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({0, 0}, {1, 1}, 3), {1, 1}, 2));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto space : {FluxSpace::RT0, FluxSpace::BDM1}) {
        const auto f = interpolate_flux(mesh, space, [](Vec2) { return Vec2{1.0, 0.0}; });
        for (int k = 0; k < 10; ++k) {
            const int t = static_cast<int>(rng() % mesh->num_triangles());
            double l1 = u(rng), l2 = u(rng);
            if (l1 + l2 > 1.0) {
                l1 = 1.0 - l1;
                l2 = 1.0 - l2;
            }
            const Vec2 x = map_point(mesh->corners(t), {1.0 - l1 - l2, l1, l2});
            const Vec2 v = eval_flux(f, t, x);
            CHECK(v.x == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(v.y) < 1e-13);
        }
    }
    // An affine field lies in BDM1 but not RT0.
    const auto g = interpolate_flux(mesh, FluxSpace::BDM1, [](Vec2 x) { return Vec2{x.y, 2.0 * x.x - 1.0}; });
    const Vec2 v = eval_flux(g, 0, mesh->centroid(0));
    CHECK(v.x == doctest::Approx(mesh->centroid(0).y));
    CHECK(v.y == doctest::Approx(2.0 * mesh->centroid(0).x - 1.0));
    CHECK_THROWS(eval_flux(g, 0, Vec2{5.0, 5.0}));
    const auto d = div_flux(g, 0);
    CHECK(std::abs(d.c0) < 1e-12);
}

TEST_CASE("affine u_h is recovered exactly") {
    const auto mesh = std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({0, 0}, {1, 1}, 3), {0.5, 0.5}, 2));
    auto prob = example1(1e-2).spec;
    const auto u = interpolate(mesh, [](Vec2 x) { return 0.3 * x.x - 2.0 * x.y + 1.0; });
    for (auto kind : kAllKinds) {
        if (kind == RecoveryKind::HdivRT0 || kind == RecoveryKind::HdivBDM1) continue;
        const auto s = recover(kind, u, prob);
        CHECK(recovery_objective(s, u, prob.epsilon) < 1e-12);
        const Vec2 v = s.at(3, mesh->centroid(3));
        CHECK(v.x == doctest::Approx(-0.3e-2).epsilon(1e-12));
        CHECK(v.y == doctest::Approx(2e-2).epsilon(1e-12));
    }
}

TEST_CASE("explicit recovery matches the per-edge formula") {
    const auto mesh = square(2);
    std::mt19937 rng(21);
    auto prob = example1(1e-2).spec;
    prob.beta = 1.0;
    const auto u = random_p1(mesh, rng);
    const auto s = recover_explicit_rt0(u, prob);
    const auto expected = oracle::explicit_rt0_coefficients(u, prob);
    for (std::size_t e = 0; e < expected.size(); ++e)
        CHECK(s.coefficients()[e] == doctest::Approx(expected[e]).epsilon(1e-13).scale(1e-13));
}

TEST_CASE("edge weight formula") {
    for (double eps : {1.0, 1e-3, 1e-8}) CHECK(std::abs(explicit_edge_weight(eps, eps, 1.0)) < 1e-15);
    for (double h : {1e-4, 1e-2, 0.5})
        for (double eps : {1.0, 1e-4, 1e-10})
            for (double beta : {0.0, 1.0}) {
                const double g = explicit_edge_weight(h, eps, beta);
                CHECK(g >= 0.0);
                CHECK(g < 1.0);
            }
}

TEST_CASE("explicit boundary identity") {
    SideKinds sides;
    sides.top = EdgeKind::Neumann;
    sides.right = EdgeKind::Neumann;
    std::mt19937 rng(2);
    for (const auto &mesh : {square(2), square(4, {0, 0}, {1, 1}, sides),
                             std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({-1, -1}, {1, 1}, 3, sides), {1, 0}, 4))}) {
        const auto u = random_p1(mesh, rng);
        for (double eps : {1.0, 1e-6}) {
            auto prob = example1(eps).spec;
            const auto s = recover_explicit_rt0(u, prob);
            for (int e = 0; e < static_cast<int>(mesh->num_edges()); ++e) {
                const Edge &ed = mesh->edge(e);
                if (!ed.is_boundary()) continue;
                const Vec2 n = oracle::edge_normal(*mesh, e);
                const Vec2 x = midpoint(mesh->vertex(ed.v[0]), mesh->vertex(ed.v[1]));
                CHECK(std::abs(dot(s.at(ed.tri[0], x), n) + eps * dot(oracle::grad_on(u, ed.tri[0]), n)) < 1e-13);
            }
        }
    }
}

TEST_CASE("recovered fields are H(div) conforming") {
    const auto mesh = std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({0, 0}, {1, 1}, 3), {1, 1}, 3));
    std::mt19937 rng(9);
    const auto u = random_p1(mesh, rng);
    const auto prob = example1(1e-2).spec;
    for (auto kind : kAllKinds) {
        const auto s = recover(kind, u, prob);
        double scale = 0.0;
        for (double c : s.coefficients()) scale = std::max(scale, std::abs(c));
        CHECK(normal_jump(s) <= 1e-12 * std::max(scale, 1.0));
        for (int t = 0; t < static_cast<int>(mesh->num_triangles()); ++t) {
            const auto d = div_flux(s, t);
            if (s.space() == FluxSpace::RT0) {
                CHECK(std::abs(d.cx) < 1e-12 * std::max(scale, 1.0));
                CHECK(std::abs(d.cy) < 1e-12 * std::max(scale, 1.0));
            }
        }
    }
}

TEST_CASE("dense oracles for the implicit recoveries") {
    std::mt19937 rng(13);
    for (const auto &mesh : {square(2), square(4), std::make_shared<const Mesh>(oracle::graded_mesh(build_initial_square_mesh({0, 0}, {1, 1}, 2), {1, 1}, 3))}) {
        REQUIRE(mesh->num_edges() * 2 <= 400);
        const auto prob = example1(1e-2).spec;
        const auto u = solve(mesh, prob, DeltaRule{4.0});
        const auto noise = random_p1(mesh, rng);
        for (const auto &field : {u, noise}) {
            const auto l2 = recover_l2(field, prob, FluxSpace::RT0);
            CHECK(oracle::max_abs_diff(l2.coefficients(), oracle::dense_rt0_recovery(field, prob, 0.0)) < 1e-8);
            const GammaRule gamma;
            const auto hd = recover_hdiv_stab(field, prob, gamma, FluxSpace::RT0);
            const auto hd_dense = oracle::dense_rt0_recovery(field, prob, 1.0);
            CHECK(oracle::max_abs_diff(hd.coefficients(), hd_dense) < 1e-8);
            // Per-element divergence against the oracle.
            const FluxField hd_oracle(mesh, FluxSpace::RT0, hd_dense);
            for (int t = 0; t < static_cast<int>(mesh->num_triangles()); ++t)
                CHECK(hd.divergence(t) == doctest::Approx(hd_oracle.divergence(t)).epsilon(1e-10).scale(1e-10));

            const auto b1 = recover_l2(field, prob, FluxSpace::BDM1);
            CHECK(oracle::max_abs_diff(b1.coefficients(), oracle::dense_basis_recovery(field, prob, FluxSpace::BDM1, nullptr)) < 1e-8);
            const auto hb1 = recover_hdiv_stab(field, prob, gamma, FluxSpace::BDM1);
            CHECK(oracle::max_abs_diff(hb1.coefficients(), oracle::dense_basis_recovery(field, prob, FluxSpace::BDM1, &gamma)) < 1e-8);
        }
    }
}

TEST_CASE("L2 recovery is the minimizer") {
    const auto mesh = square(4);
    REQUIRE(mesh->num_triangles() == 32);
    std::mt19937 rng(17);
    for (double eps : {1.0, 1e-2, 1e-6}) {
        auto prob = example1(eps).spec;
        const auto u = random_p1(mesh, rng);
        for (auto space : {FluxSpace::RT0, FluxSpace::BDM1}) {
            const auto s = recover_l2(u, prob, space);
            const double best = recovery_objective(s, u, eps);
            if (space == FluxSpace::RT0) CHECK(best <= recovery_objective(recover_explicit_rt0(u, prob), u, eps) + 1e-12);
            for (int k = 0; k < 20; ++k) {
                auto c = s.coefficients();
                const auto tau = oracle::random_vector(c.size(), rng, -eps, eps);
                for (std::size_t i = 0; i < c.size(); ++i) c[i] += tau[i];
                CHECK(best <= recovery_objective(with_coefficients(s, c), u, eps) + 1e-12);
            }
            // Orthogonality: the Gram residual vanishes to solver tolerance.
            const auto sys = assemble_recovery(u, prob, space, nullptr);
            CHECK(relative_residual(sys.matrix, s.coefficients(), sys.rhs) <= 1e-12);
        }
        CHECK(recovery_objective(recover_l2(u, prob, FluxSpace::BDM1), u, eps) <=
              recovery_objective(recover_l2(u, prob, FluxSpace::RT0), u, eps) + 1e-12);
    }
}

TEST_CASE("stabilized recovery tends to the L2 projection") {
    const auto mesh = square(4);
    const auto prob = example1(1e-2).spec;
    const auto u = solve(mesh, prob, DeltaRule{4.0});
    for (auto space : {FluxSpace::RT0, FluxSpace::BDM1}) {
        const auto l2 = recover_l2(u, prob, space);
        const auto zero = recover_hdiv_stab(u, prob, GammaRule{1.0, 0.0}, space);
        CHECK(weighted_distance(zero, l2, prob.epsilon) <= 1e-10 * recovery_objective(l2, u, prob.epsilon));
        std::vector<double> dist;
        for (double t : {1.0, 0.5, 0.25, 0.125})
            dist.push_back(weighted_distance(recover_hdiv_stab(u, prob, GammaRule{1.0, t}, space), l2, prob.epsilon));
        for (std::size_t i = 1; i < dist.size(); ++i) CHECK(dist[i] < dist[i - 1]);
        const double order = std::log(dist[2] / dist[3]) / std::log(2.0);
        CHECK(order == doctest::Approx(1.0).epsilon(0.1));
    }
}

TEST_CASE("recovery kinds") {
    CHECK(parse_recovery_kind("explicit") == RecoveryKind::Explicit);
    CHECK(parse_recovery_kind("l2-rt0") == RecoveryKind::L2RT0);
    CHECK(parse_recovery_kind("l2-bdm1") == RecoveryKind::L2BDM1);
    CHECK(parse_recovery_kind("hdiv") == RecoveryKind::HdivRT0);
    CHECK(parse_recovery_kind("hdiv-bdm1") == RecoveryKind::HdivBDM1);
    CHECK_THROWS(parse_recovery_kind("rt1"));
    for (auto kind : kAllKinds) CHECK(parse_recovery_kind(to_string(kind)) == kind);
    CHECK_FALSE(is_implicit(RecoveryKind::Explicit));
    CHECK(is_implicit(RecoveryKind::L2BDM1));
}

TEST_CASE("gamma rule") {
    const GammaRule rule{1.0, 1.0};
    // h = 0.25, eps = 1e-4, beta = 1, |a| = sqrt(2): alpha_K = min(25, 1, 0.5) = 0.5.
    const double expected = 0.25 * std::min({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(1e-4), 0.5 / (8.0 * 1e-2)});
    CHECK(rule.gamma(0.25, std::sqrt(2.0), 1e-4, 1.0) == doctest::Approx(expected));
    // Zero velocity and beta drop out of the min.
    CHECK(rule.gamma(0.25, 0.0, 1e-4, 0.0) == doctest::Approx(0.25 * std::sqrt(0.25) / (8.0 * 1e-2)));
    CHECK(rule.gamma(1e-3, 1.0, 1e-12, 1.0) > 0.0);
}
