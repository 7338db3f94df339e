#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fluxrec/estimator.hpp"
#include "fluxrec/problems.hpp"

namespace fluxrec {

/// Minimal: smallest greedy set with sum eta_K^2 >= theta^2 sum eta^2.
/// Cumulative: greedy prefix whose running sum of eta_K^2 stays below
/// theta * sum eta^2, always at least one element.
enum class MarkingRule { Minimal, Cumulative };
/// Bisect: each marked triangle loses its longest edge. FourT: all three
/// sides of each marked triangle are bisected.
enum class RefineRule { Bisect, FourT };

MarkingRule parse_marking_rule(std::string_view name);
RefineRule parse_refine_rule(std::string_view name);
std::string to_string(MarkingRule rule);
std::string to_string(RefineRule rule);

struct AdaptConfig {
    double theta = 0.5;
    MarkingRule marking = MarkingRule::Minimal;
    RefineRule refinement = RefineRule::Bisect;
    double c_delta = 4.0;
    RecoveryKind recovery = RecoveryKind::L2RT0;
    double c_stab = 1.0;
    /// Stop once eta <= tol.
    double tol = 0.0;
    int max_iterations = 8;
    std::size_t max_elements = 2'000'000;
    int oscillation_degree = 1;
    /// Keep every iteration's mesh in the history.
    bool keep_meshes = false;

    /// Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

/// Smallest set reaching sum_{K in M} eta_K^2 >= theta^2 sum_K eta_K^2, chosen
/// greedily by descending indicator with ties to the lower index. All-zero
/// indicators give an empty set.
std::vector<int> dorfler_mark(const std::vector<double> &indicators, double theta);

/// Greedy prefix (descending, ties to the lower index) with running sum of
/// eta_K^2 strictly below theta * sum eta_K^2; the largest element is always
/// included. All-zero indicators give an empty set.
std::vector<int> cumulative_mark(const std::vector<double> &indicators, double theta);

std::vector<int> mark(const std::vector<double> &indicators, double theta, MarkingRule rule);

struct IterationRecord {
    int iter = 0;
    std::size_t n_elements = 0;
    /// Non-Dirichlet vertices.
    std::size_t dof = 0;
    double h_max = 0.0;
    double h_min = 0.0;
    double eta = 0.0;
    double phi = 0.0;
    double osc = 0.0;
    double jump_estimator = 0.0;
    std::optional<ExactErrors> exact;
    RobustnessConstants constants;
    std::size_t averaged_corners = 0;
    double max_delta_ratio = 0.0;
    /// Elements of this iteration's mesh marked for refinement (empty on the last row).
    std::vector<int> marked;
    /// Centroids of the marked elements.
    std::vector<Vec2> marked_centroids;

    double err_supg() const;
    double err_eps_triple() const;
    /// eta / err_SUPG and eta / err_eps_triple; NaN without an exact solution.
    double eff1() const;
    double eff2() const;
    /// '|'-separated diagnostics, empty when nothing to report.
    std::string flags() const;
};

enum class StopReason { Tolerance, MaxIterations, MaxElements, EmptyMarking };
std::string to_string(StopReason reason);

struct RunHistory {
    std::vector<IterationRecord> rows;
    StopReason stop = StopReason::MaxIterations;
    MeshPtr final_mesh;
    std::optional<P1Function> final_solution;
    std::vector<MeshPtr> meshes;
    double wall_seconds = 0.0;
};

/// Thrown when a solve fails mid-run; carries the rows completed so far.
class AdaptError : public std::runtime_error {
public:
    AdaptError(const std::string &what, RunHistory partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}
    const RunHistory &partial() const { return partial_; }

private:
    RunHistory partial_;
};

/// solve -> recover -> estimate -> mark -> refine until eta <= tol, the
/// iteration or element budget is reached, or nothing is marked.
RunHistory adaptive_solve(const BenchmarkProblem &problem, const AdaptConfig &config);
RunHistory adaptive_solve(const ProblemSpec &prob, const Mesh &initial, const AdaptConfig &config);

}  // namespace fluxrec
