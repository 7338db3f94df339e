#pragma once

#include <vector>

#include "fluxrec/fem.hpp"
#include "fluxrec/recovery.hpp"
#include "fluxrec/weights.hpp"

namespace fluxrec {

struct CellResidual {
    /// ||f + eps Lap u_h - a.grad u_h - b u_h||_K
    double strong = 0.0;
    /// ||f - div sigma_h - a.grad u_h - b u_h||_K
    double recovered = 0.0;
};

std::vector<CellResidual> cell_residuals(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob);

/// ||eps^1/2 grad u_h + eps^-1/2 sigma_h||_K per element.
std::vector<double> flux_mismatch(const P1Function &u_h, const FluxField &sigma, double epsilon);

struct NeumannTerm {
    int edge = 0;
    int triangle = 0;
    double alpha = 0.0;
    /// alpha_e ||g - eps grad u_h . n||_e
    double data = 0.0;
    /// alpha_e ||(sigma_h + eps grad u_h) . n||_e; zero for the explicit recovery.
    double recovery = 0.0;
};

std::vector<NeumannTerm> neumann_terms(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob,
                                       bool implicit_recovery);

/// ||R_e||_e per edge: the normal jump of tau = -eps grad u_h on interior
/// edges, g + tau.n on Neumann edges, 0 on Dirichlet edges.
std::vector<double> edge_residual_jump(const P1Function &u_h, const ProblemSpec &prob);

/// Data oscillation with elementwise (edgewise) L2 projection onto P_k, k in {0, 1}.
double oscillation(const P1Function &u_h, const ProblemSpec &prob, int k = 1);

struct ElementIndicator {
    double alpha = 0.0;
    CellResidual residual;
    double mismatch = 0.0;
    /// alpha^2 (|R_K|^2 + |R~_K|^2) + mismatch^2, square-rooted.
    double cell = 0.0;
    /// `cell` plus the Neumann edge terms of edges on this element.
    double eta = 0.0;
};

/// Elements whose weighted squared jumps fall below this fraction of the
/// largest are skipped by `RobustnessConstants::explicit_flux`.
inline constexpr double kJumpNoiseFloor = 1e-16;

/// Observed hidden constants of the reliability bounds: ratio of the left side to
/// the right side of each inequality for the current fields.
struct RobustnessConstants {
    /// max over K of ||eps^-1/2 sigma + eps^1/2 grad u_h||_K^2 / sum_{e in dK interior} alpha_e^2 ||R_e||_e^2
    double explicit_flux = 0.0;
    /// (sum over boundary edges alpha_e^2 ||(sigma + eps grad u_h).n||_e^2)^1/2 / ||eps^-1/2 sigma + eps^1/2 grad u_h||
    double boundary_trace = 0.0;
    /// (sum alpha_K^2 ||R~_K||^2)^1/2 / ((sum alpha_K^2 ||R_K||^2)^1/2 + ||eps^-1/2 sigma + eps^1/2 grad u_h||)
    double residual = 0.0;
};

struct EstimatorReport {
    std::vector<ElementIndicator> elements;
    std::vector<NeumannTerm> neumann;
    double phi = 0.0;
    /// (sum over Neumann edges of data^2 + recovery^2)^1/2
    double neumann_total = 0.0;
    /// (phi^2 + neumann_total^2)^1/2
    double eta = 0.0;
    double mismatch_total = 0.0;
    double osc = 0.0;
    /// (sum_e alpha_e^2 ||R_e||_e^2)^1/2, reporting only.
    double jump_estimator = 0.0;
    RobustnessConstants constants;

    std::vector<double> indicators() const;
};

EstimatorReport assemble_report(const P1Function &u_h, const FluxField &sigma, const ProblemSpec &prob,
                                RecoveryKind kind, int oscillation_degree = 1);

}  // namespace fluxrec
