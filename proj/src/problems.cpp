#include "fluxrec/problems.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fluxrec {

Mesh BenchmarkProblem::initial_mesh() const { return build_initial_square_mesh(corner_lo, corner_hi, mesh_n, sides); }

LayerFactor layer_factor(double x, double epsilon) {
    const double e = std::exp((x - 1.0) / epsilon);
    const double denom = -std::expm1(-1.0 / epsilon);
    LayerFactor f;
    f.value = -std::expm1((x - 1.0) / epsilon) / denom + x - 1.0;
    f.d1 = 1.0 - e / (epsilon * denom);
    f.d2 = -e / (epsilon * epsilon * denom);
    return f;
}

BenchmarkProblem example1(double epsilon) {
    if (!(epsilon > 0.0)) throw ProblemError("example1 needs epsilon > 0");
    BenchmarkProblem p;
    p.name = "example1";
    p.reference = "boundary layers at x = 1 and y = 1; effectivity study";
    auto &s = p.spec;
    s.epsilon = epsilon;
    s.velocity = [](Vec2) { return Vec2{1.0, 1.0}; };
    s.reaction = [](Vec2) { return 1.0; };
    s.beta = 1.0;
    s.c_b = 1.0;
    // -eps X'' + X' = 1 for the layer factor, so f = X + Y + XY.
    s.source = [epsilon](Vec2 x) {
        const double X = layer_factor(x.x, epsilon).value;
        const double Y = layer_factor(x.y, epsilon).value;
        return X + Y + X * Y;
    };
    s.exact_solution = [epsilon](Vec2 x) { return layer_factor(x.x, epsilon).value * layer_factor(x.y, epsilon).value; };
    s.exact_gradient = [epsilon](Vec2 x) {
        const auto X = layer_factor(x.x, epsilon);
        const auto Y = layer_factor(x.y, epsilon);
        return Vec2{X.d1 * Y.value, X.value * Y.d1};
    };
    s.assembly_degree = 4;
    return p;
}

BenchmarkProblem example2(double epsilon) {
    if (!(epsilon > 0.0)) throw ProblemError("example2 needs epsilon > 0");
    BenchmarkProblem p;
    p.name = "example2";
    p.reference = "exponential layer at x = 1 and interior layer; layer capture";
    p.corner_lo = {-1.0, -1.0};
    p.corner_hi = {1.0, 1.0};
    auto &s = p.spec;
    s.epsilon = epsilon;
    s.velocity = [](Vec2) { return Vec2{2.0, 1.0}; };
    s.beta = 0.0;
    s.c_b = 0.0;
    s.dirichlet_data = [](Vec2 x) { return (x.x >= 1.0 || x.y <= -1.0) ? 100.0 : 0.0; };
    s.assembly_degree = 2;
    return p;
}

BenchmarkProblem manufactured_smooth() {
    BenchmarkProblem p;
    p.name = "manufactured";
    p.reference = "smooth solution for convergence-order checks";
    auto &s = p.spec;
    constexpr double pi = std::numbers::pi;
    s.epsilon = 1.0;
    s.velocity = [](Vec2) { return Vec2{1.0, 1.0}; };
    s.reaction = [](Vec2) { return 1.0; };
    s.beta = 1.0;
    s.c_b = 1.0;
    s.source = [](Vec2 x) {
        const double sx = std::sin(pi * x.x), sy = std::sin(pi * x.y);
        const double cx = std::cos(pi * x.x), cy = std::cos(pi * x.y);
        return 2.0 * pi * pi * sx * sy + pi * cx * sy + pi * sx * cy + sx * sy;
    };
    s.exact_solution = [](Vec2 x) { return std::sin(pi * x.x) * std::sin(pi * x.y); };
    s.exact_gradient = [](Vec2 x) {
        return Vec2{pi * std::cos(pi * x.x) * std::sin(pi * x.y), pi * std::sin(pi * x.x) * std::cos(pi * x.y)};
    };
    s.assembly_degree = 4;
    return p;
}

std::vector<std::string> problem_names() { return {"example1", "example2", "manufactured"}; }

BenchmarkProblem problem_by_name(const std::string &name, double epsilon) {
    if (name == "example1") return example1(epsilon);
    if (name == "example2") return example2(epsilon);
    if (name == "manufactured") return manufactured_smooth();
    throw ProblemError("unknown problem '" + name + "'");
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string &key, const std::string &value, std::size_t count) {
    std::istringstream in(value);
    std::vector<double> out;
    double v = 0.0;
    while (in >> v) out.push_back(v);
    if (!in.eof() || out.size() != count)
        throw ProblemError("key '" + key + "' expects " + std::to_string(count) + " number(s), got '" + value + "'");
    return out;
}

struct SideData {
    EdgeKind kind = EdgeKind::Dirichlet;
    double value = 0.0;
};

SideData parse_side(const std::string &key, const std::string &value) {
    const auto colon = value.find(':');
    if (colon == std::string::npos) throw ProblemError("key '" + key + "' expects dirichlet:<v> or neumann:<v>");
    const std::string kind = trim(value.substr(0, colon));
    SideData d;
    if (kind == "dirichlet") {
        d.kind = EdgeKind::Dirichlet;
    } else if (kind == "neumann") {
        d.kind = EdgeKind::Neumann;
    } else {
        throw ProblemError("key '" + key + "': unknown boundary kind '" + kind + "'");
    }
    d.value = numbers(key, value.substr(colon + 1), 1)[0];
    return d;
}

}  // namespace

BenchmarkProblem load_problem_config(std::istream &in, std::optional<double> epsilon) {
    BenchmarkProblem p;
    p.name = "custom";
    p.reference = "user configuration";
    auto &s = p.spec;
    std::string source = "0";
    double ax = 0.0, ay = 0.0, b = 0.0;
    // left, right, bottom, top
    std::array<SideData, 4> sides;
    bool beta_set = false, cb_set = false;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ProblemError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "name") {
            p.name = value;
        } else if (key == "domain") {
            const auto v = numbers(key, value, 4);
            p.corner_lo = {v[0], v[1]};
            p.corner_hi = {v[2], v[3]};
        } else if (key == "mesh_n") {
            p.mesh_n = static_cast<int>(numbers(key, value, 1)[0]);
        } else if (key == "epsilon") {
            s.epsilon = numbers(key, value, 1)[0];
        } else if (key == "velocity") {
            const auto v = numbers(key, value, 2);
            ax = v[0];
            ay = v[1];
        } else if (key == "reaction") {
            b = numbers(key, value, 1)[0];
        } else if (key == "beta") {
            s.beta = numbers(key, value, 1)[0];
            beta_set = true;
        } else if (key == "c_b") {
            s.c_b = numbers(key, value, 1)[0];
            cb_set = true;
        } else if (key == "source") {
            source = value;
        } else if (key == "left" || key == "right" || key == "bottom" || key == "top") {
            const int i = key == "left" ? 0 : key == "right" ? 1 : key == "bottom" ? 2 : 3;
            sides[static_cast<std::size_t>(i)] = parse_side(key, value);
        } else {
            throw ProblemError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (epsilon) s.epsilon = *epsilon;
    if (p.mesh_n < 1) throw ProblemError("mesh_n must be positive");
    if (!(p.corner_hi.x > p.corner_lo.x && p.corner_hi.y > p.corner_lo.y)) throw ProblemError("empty domain");
    if (!(s.epsilon > 0.0)) throw ProblemError("epsilon must be positive");

    s.velocity = [ax, ay](Vec2) { return Vec2{ax, ay}; };
    s.reaction = [b](Vec2) { return b; };
    if (!beta_set) s.beta = b;
    if (!cb_set) s.c_b = s.beta > 0.0 ? std::abs(b) / s.beta : 0.0;

    if (source == "example1") {
        s.source = example1(s.epsilon).spec.source;
        s.assembly_degree = 4;
    } else if (source == "manufactured") {
        s.source = manufactured_smooth().spec.source;
        s.assembly_degree = 4;
    } else {
        const double f = numbers("source", source, 1)[0];
        s.source = [f](Vec2) { return f; };
        s.assembly_degree = 2;
    }

    p.sides = {sides[0].kind, sides[1].kind, sides[2].kind, sides[3].kind};
    const Vec2 lo = p.corner_lo, hi = p.corner_hi;
    auto side_value = [lo, hi, sides](Vec2 x, EdgeKind kind) {
        const std::array<bool, 4> on = {x.x <= lo.x, x.x >= hi.x, x.y <= lo.y, x.y >= hi.y};
        for (std::size_t i = 0; i < 4; ++i)
            if (on[i] && sides[i].kind == kind) return sides[i].value;
        return 0.0;
    };
    s.dirichlet_data = [side_value](Vec2 x) { return side_value(x, EdgeKind::Dirichlet); };
    s.neumann_data = [side_value](Vec2 x) { return side_value(x, EdgeKind::Neumann); };
    return p;
}

BenchmarkProblem load_problem_file(const std::string &path, std::optional<double> epsilon) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file '" + path + "'");
    return load_problem_config(in, epsilon);
}

ExactErrors exact_errors(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta) {
    if (!prob.has_exact()) throw ProblemError("no exact solution attached");
    ExactErrors out;
    out.norms = error_norms(u_h, prob, delta, kErrorQuadratureDegree);
    out.coarse = error_norms(u_h, prob, delta, 5);
    auto differs = [](double fine, double coarse) {
        return std::abs(fine - coarse) > kQuadratureSensitivity * std::max(std::abs(fine), std::abs(coarse));
    };
    out.quadrature_sensitive =
        differs(out.norms.supg, out.coarse.supg) || differs(out.norms.eps_triple, out.coarse.eps_triple);
    return out;
}

}  // namespace fluxrec
