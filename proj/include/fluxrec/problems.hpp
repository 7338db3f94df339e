#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fluxrec/fem.hpp"

namespace fluxrec {

struct BenchmarkProblem {
    ProblemSpec spec;
    std::string name;
    /// What the problem reproduces, free text.
    std::string reference;
    Vec2 corner_lo{0.0, 0.0};
    Vec2 corner_hi{1.0, 1.0};
    int mesh_n = 2;
    SideKinds sides;

    Mesh initial_mesh() const;
};

/// The 1D factor (1 - e^{(x-1)/eps}) / (1 - e^{-1/eps}) + x - 1 and its
/// first two derivatives. Both exponentials stay in [0, 1] on [0, 1].
struct LayerFactor {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};
LayerFactor layer_factor(double x, double epsilon);

/// (0,1)^2, a = (1,1), b = 1, u = X(x) X(y) with boundary layers at x = 1 and y = 1.
BenchmarkProblem example1(double epsilon);

/// (-1,1)^2, a = (2,1), b = 0, f = 0, u = 0 on x = -1 and y = 1, u = 100 on x = 1 and y = -1.
BenchmarkProblem example2(double epsilon);

/// eps = 1, a = (1,1), b = 1, u = sin(pi x) sin(pi y) on (0,1)^2.
BenchmarkProblem manufactured_smooth();

/// Names accepted by `problem_by_name`.
std::vector<std::string> problem_names();

/// example1 and example2 use `epsilon`; manufactured ignores it. Throws
/// ProblemError on an unknown name.
BenchmarkProblem problem_by_name(const std::string &name, double epsilon);

/// Key = value problem description; '#' starts a comment. Keys:
///   name, domain (x0 y0 x1 y1), mesh_n, epsilon, velocity (ax ay), reaction,
///   beta, c_b, source (a number, or a built-in: example1, manufactured),
///   left/right/bottom/top (dirichlet:<value> or neumann:<value>).
/// Unset sides are homogeneous Dirichlet. A given `epsilon` overrides the file's value.
BenchmarkProblem load_problem_config(std::istream &in, std::optional<double> epsilon = std::nullopt);
BenchmarkProblem load_problem_file(const std::string &path, std::optional<double> epsilon = std::nullopt);

struct ExactErrors {
    /// At the error quadrature degree.
    ErrorNorms norms;
    /// The same norms at degree 5.
    ErrorNorms coarse;
    /// Degree 5 and degree 7 disagree by more than 1% in err_SUPG or the triple norm.
    bool quadrature_sensitive = false;
};

inline constexpr double kQuadratureSensitivity = 0.01;

/// Throws ProblemError when no exact solution is attached.
ExactErrors exact_errors(const P1Function &u_h, const ProblemSpec &prob, const DeltaRule &delta);

}  // namespace fluxrec
