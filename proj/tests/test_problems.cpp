#include <doctest.h>

#include <numbers>
#include <random>
#include <sstream>

#include "fluxrec/problems.hpp"
#include "oracle.hpp"

using namespace fluxrec;

namespace {

// Hand-differentiated 1D factor, written with plain exponentials.
struct Factor {
    double v, d1, d2;
};

Factor factor(double x, double eps) {
    const double e = std::exp((x - 1.0) / eps);
    const double c = 1.0 - std::exp(-1.0 / eps);
    return {(1.0 - e) / c + x - 1.0, -e / (eps * c) + 1.0, -e / (eps * eps * c)};
}

}  // namespace

TEST_CASE("example 1 boundary values") {
    for (double eps : {1.0, 1e-2, 1e-6}) {
        const auto p = example1(eps);
        for (double s : {0.0, 0.25, 0.5, 0.9, 1.0}) {
            CHECK(std::abs((*p.spec.exact_solution)({1.0, s})) < 1e-15);
            CHECK(std::abs((*p.spec.exact_solution)({s, 1.0})) < 1e-15);
            CHECK(std::abs((*p.spec.exact_solution)({0.0, s})) < 1e-12);
            CHECK(std::abs((*p.spec.exact_solution)({s, 0.0})) < 1e-12);
        }
    }
    CHECK((*example1(1e-2).spec.exact_solution)({0.5, 0.5}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("example 1 data satisfy the equation") {
    std::mt19937 rng(50);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double eps : {1.0, 1e-2, 1e-4}) {
        const auto p = example1(eps).spec;
        for (int k = 0; k < 50; ++k) {
            const Vec2 x{u(rng), u(rng)};
            const auto fx = factor(x.x, eps), fy = factor(x.y, eps);
            const double lap = fx.d2 * fy.v + fx.v * fy.d2;
            const double conv = fx.d1 * fy.v + fx.v * fy.d1;
            const double value = fx.v * fy.v;
            const double f = -eps * lap + conv + value;
            CHECK(p.source(x) == doctest::Approx(f).epsilon(1e-6));
            CHECK((*p.exact_solution)(x) == doctest::Approx(value).epsilon(1e-12));
            const Vec2 g = (*p.exact_gradient)(x);
            CHECK(g.x == doctest::Approx(fx.d1 * fy.v).epsilon(1e-12));
            CHECK(g.y == doctest::Approx(fx.v * fy.d1).epsilon(1e-12));
        }
    }
}

TEST_CASE("example 1 gradient against finite differences") {
    const auto p = example1(1.0).spec;
    const double h = 1e-6;
    for (Vec2 x : {Vec2{0.3, 0.4}, Vec2{0.8, 0.1}, Vec2{0.5, 0.95}}) {
        const auto &u = *p.exact_solution;
        const double dx = (u(x + Vec2{h, 0}) - u(x - Vec2{h, 0})) / (2 * h);
        const double dy = (u(x + Vec2{0, h}) - u(x - Vec2{0, h})) / (2 * h);
        CHECK((*p.exact_gradient)(x).x == doctest::Approx(dx).epsilon(1e-8));
        CHECK((*p.exact_gradient)(x).y == doctest::Approx(dy).epsilon(1e-8));
    }
}

TEST_CASE("example 1 stays finite for tiny eps") {
    for (double eps : {1.0, 1e-8, 1e-12, 1e-16}) {
        const auto p = example1(eps).spec;
        for (int i = 0; i <= 20; ++i)
            for (int j = 0; j <= 20; ++j) {
                const Vec2 x{i / 20.0, j / 20.0};
                CHECK(std::isfinite(p.source(x)));
                CHECK(std::isfinite((*p.exact_solution)(x)));
                CHECK(std::isfinite((*p.exact_gradient)(x).x));
                CHECK(std::isfinite((*p.exact_gradient)(x).y));
            }
        const auto f = layer_factor(1.0 - 1e-17, eps);
        CHECK(std::isfinite(f.d2));
    }
    CHECK_THROWS_AS(example1(0.0), ProblemError);
    CHECK_THROWS_AS(example1(-1.0), ProblemError);
}

TEST_CASE("layer factor") {
    for (double eps : {1.0, 0.1, 1e-3})
        for (double x : {0.0, 0.2, 0.7, 0.999, 1.0}) {
            const auto a = layer_factor(x, eps);
            const auto b = factor(x, eps);
            CHECK(a.value == doctest::Approx(b.v).epsilon(1e-13).scale(1e-13));
            CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-13));
            CHECK(a.d2 == doctest::Approx(b.d2).epsilon(1e-13));
        }
}

TEST_CASE("example 2") {
    const auto p = example2(1e-3);
    CHECK(p.spec.beta == 0.0);
    CHECK_FALSE(p.spec.has_exact());
    const Mesh mesh = p.initial_mesh();
    CHECK(mesh.total_area() == doctest::Approx(4.0));
    validate_problem(p.spec, mesh);
    for (Vec2 x : {Vec2{0.3, -0.2}, Vec2{-0.9, 0.9}}) {
        CHECK(p.spec.reaction(x) - 0.5 * p.spec.velocity_divergence(x) == 0.0);
        CHECK(p.spec.velocity(x) == Vec2{2.0, 1.0});
        CHECK(p.spec.source(x) == 0.0);
    }
    CHECK(p.spec.dirichlet_data({1.0, 0.5}) == 100.0);
    CHECK(p.spec.dirichlet_data({0.3, -1.0}) == 100.0);
    CHECK(p.spec.dirichlet_data({-1.0, 0.5}) == 0.0);
    CHECK(p.spec.dirichlet_data({0.3, 1.0}) == 0.0);
    const auto lift = dirichlet_lift(mesh, p.spec);
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        const Vec2 x = mesh.vertices()[v];
        if (x.x == 1.0 && x.y == 1.0) CHECK(lift.value[v] == 50.0);
        if (x.x == -1.0 && x.y == -1.0) CHECK(lift.value[v] == 50.0);
        if (x.x == 1.0 && x.y == -1.0) CHECK(lift.value[v] == 100.0);
        if (x.x == -1.0 && x.y == 1.0) CHECK(lift.value[v] == 0.0);
    }
    const auto u = solve(std::make_shared<const Mesh>(mesh), p.spec, DeltaRule{16.0});
    CHECK_THROWS_AS(exact_errors(u, p.spec, DeltaRule{16.0}), ProblemError);
}

TEST_CASE("manufactured problem") {
    const auto p = manufactured_smooth().spec;
    constexpr double pi = std::numbers::pi;
    CHECK(p.source({0.5, 0.5}) == doctest::Approx(2.0 * pi * pi + 1.0));
    for (double s : {0.0, 0.3, 1.0}) {
        CHECK(std::abs((*p.exact_solution)({s, 0.0})) < 1e-15);
        CHECK(std::abs((*p.exact_solution)({1.0, s})) < 1e-15);
    }
}

TEST_CASE("problem lookup") {
    CHECK(problem_names() == std::vector<std::string>{"example1", "example2", "manufactured"});
    CHECK(problem_by_name("example1", 1e-3).spec.epsilon == 1e-3);
    CHECK(problem_by_name("example2", 1e-4).name == "example2");
    CHECK(problem_by_name("manufactured", 1e-4).spec.epsilon == 1.0);
    CHECK_THROWS_AS(problem_by_name("example3", 1.0), ProblemError);
}

TEST_CASE("coefficient assumptions are checked") {
    auto p = example1(1e-2).spec;
    const Mesh mesh = build_initial_square_mesh({0, 0}, {1, 1}, 2);
    validate_problem(p, mesh);
    p.reaction = [](Vec2) { return 0.5; };
    CHECK_THROWS_AS(validate_problem(p, mesh), ProblemError);
    p = example1(1e-2).spec;
    p.c_b = 0.5;
    CHECK_THROWS_AS(validate_problem(p, mesh), ProblemError);
    p = example1(1e-2).spec;
    p.epsilon = 0.0;
    CHECK_THROWS_AS(validate_problem(p, mesh), ProblemError);
}

TEST_CASE("exact errors") {
    ProblemSpec p;
    p.epsilon = 1e-2;
    p.velocity = [](Vec2) { return Vec2{1.0, 1.0}; };
    p.reaction = [](Vec2) { return 1.0; };
    p.beta = 1.0;
    p.c_b = 1.0;
    p.exact_solution = [](Vec2 x) { return 1.0 + x.x - 2.0 * x.y; };
    p.exact_gradient = [](Vec2) { return Vec2{1.0, -2.0}; };
    const auto mesh = std::make_shared<const Mesh>(build_initial_square_mesh({0, 0}, {1, 1}, 3));
    const auto e = exact_errors(interpolate(mesh, *p.exact_solution), p, DeltaRule{4.0});
    CHECK(e.norms.supg < 1e-13);
    CHECK(e.norms.eps_triple < 1e-13);
    CHECK_FALSE(e.quadrature_sensitive);

    // Negating both u and u_h leaves every norm unchanged.
    const auto q = manufactured_smooth().spec;
    auto neg = q;
    neg.exact_solution = [q](Vec2 x) { return -(*q.exact_solution)(x); };
    neg.exact_gradient = [q](Vec2 x) { return -(*q.exact_gradient)(x); };
    const auto u = solve(mesh, q, DeltaRule{1.0});
    std::vector<double> minus = u.values();
    for (auto &v : minus) v = -v;
    const auto a = exact_errors(u, q, DeltaRule{1.0});
    const auto b = exact_errors(P1Function(mesh, minus), neg, DeltaRule{1.0});
    CHECK(a.norms.supg == doctest::Approx(b.norms.supg).epsilon(1e-14));
    CHECK(a.norms.eps_triple == doctest::Approx(b.norms.eps_triple).epsilon(1e-14));
    CHECK(a.norms.supg > 0.0);
    // err_SUPG^2 = ||e||_eps^2 + sum delta ||a.grad e||^2 >= ||e||_eps^2.
    CHECK(a.norms.supg >= a.norms.energy);
}

TEST_CASE("interpolation error decays with order one") {
    const auto p = manufactured_smooth().spec;
    Mesh m = build_initial_square_mesh({0, 0}, {1, 1}, 2);
    std::vector<double> err;
    for (int level = 0; level < 4; ++level) {
        m = uniform_refine(m);
        const auto u = interpolate(std::make_shared<const Mesh>(m), *p.exact_solution);
        err.push_back(exact_errors(u, p, DeltaRule{}).norms.energy);
    }
    CHECK(std::log2(err[2] / err[3]) == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("problem config files") {
    std::istringstream in(R"(# channel
name = channel
domain = 0 0 2 1
mesh_n = 3
epsilon = 0.01
velocity = 1 0.5
reaction = 2
source = 1.5
right = neumann: 0.25
top = dirichlet: 3   # fixed
)");
    const auto p = load_problem_config(in);
    CHECK(p.name == "channel");
    CHECK(p.corner_hi == Vec2{2.0, 1.0});
    CHECK(p.mesh_n == 3);
    CHECK(p.spec.epsilon == 0.01);
    CHECK(p.spec.velocity({0, 0}) == Vec2{1.0, 0.5});
    CHECK(p.spec.reaction({0.3, 0.3}) == 2.0);
    CHECK(p.spec.beta == 2.0);
    CHECK(p.spec.c_b == 1.0);
    CHECK(p.spec.source({0.1, 0.2}) == 1.5);
    CHECK(p.sides.right == EdgeKind::Neumann);
    CHECK(p.sides.left == EdgeKind::Dirichlet);
    CHECK(p.spec.neumann_data({2.0, 0.5}) == 0.25);
    CHECK(p.spec.dirichlet_data({1.0, 1.0}) == 3.0);
    CHECK(p.spec.dirichlet_data({0.0, 0.5}) == 0.0);
    const Mesh mesh = p.initial_mesh();
    CHECK(mesh.num_triangles() == 18);
    validate_problem(p.spec, mesh);

    std::istringstream again("source = example1\nepsilon = 0.5\n");
    const auto q = load_problem_config(again, 1e-3);
    CHECK(q.spec.epsilon == 1e-3);
    CHECK(q.spec.source({0.4, 0.6}) == example1(1e-3).spec.source({0.4, 0.6}));

    for (const char *bad : {"velocity = 1\n", "colour = red\n", "left = robin: 1\n", "left = 1\n", "mesh_n = 0\n",
                            "epsilon = -1\n", "domain = 0 0 0 1\n", "just text\n", "source = sin(x)\n"}) {
        std::istringstream s(bad);
        CHECK_THROWS_AS(load_problem_config(s), ProblemError);
    }
    CHECK_THROWS_AS(load_problem_file("/nonexistent/problem.cfg"), ProblemError);
}
