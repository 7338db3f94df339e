#include "fluxrec/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace fluxrec {

void AdaptConfig::validate() const {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
    if (!(c_delta >= 0.0)) throw std::invalid_argument("c_delta must be nonnegative");
    if (!(c_stab > 0.0)) throw std::invalid_argument("c_stab must be positive");
    if (!(tol >= 0.0)) throw std::invalid_argument("tol must be nonnegative");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (max_elements < 1) throw std::invalid_argument("max_elements must be positive");
    if (oscillation_degree != 0 && oscillation_degree != 1)
        throw std::invalid_argument("oscillation degree must be 0 or 1");
}

namespace {

// Indices by descending indicator, ties to the lower index.
std::vector<int> descending_order(const std::vector<double> &indicators, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
    for (double v : indicators)
        if (!(v >= 0.0)) throw std::invalid_argument("indicators must be nonnegative");
    std::vector<int> order(indicators.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return indicators[static_cast<std::size_t>(a)] > indicators[static_cast<std::size_t>(b)];
    });
    return order;
}

double sum_of_squares(const std::vector<double> &indicators, const std::vector<int> &order) {
    double total = 0.0;
    for (int i : order) total += indicators[static_cast<std::size_t>(i)] * indicators[static_cast<std::size_t>(i)];
    return total;
}

}  // namespace

MarkingRule parse_marking_rule(std::string_view name) {
    if (name == "minimal") return MarkingRule::Minimal;
    if (name == "cumulative") return MarkingRule::Cumulative;
    throw std::invalid_argument("unknown marking rule '" + std::string(name) + "'");
}

RefineRule parse_refine_rule(std::string_view name) {
    if (name == "bisect") return RefineRule::Bisect;
    if (name == "four-t") return RefineRule::FourT;
    throw std::invalid_argument("unknown refinement rule '" + std::string(name) + "'");
}

std::string to_string(MarkingRule rule) { return rule == MarkingRule::Minimal ? "minimal" : "cumulative"; }
std::string to_string(RefineRule rule) { return rule == RefineRule::Bisect ? "bisect" : "four-t"; }

std::vector<int> dorfler_mark(const std::vector<double> &indicators, double theta) {
    const auto order = descending_order(indicators, theta);
    // Summing in the same order as the greedy pass keeps theta = 1 exact.
    const double total = sum_of_squares(indicators, order);
    std::vector<int> marked;
    if (total <= 0.0) return marked;
    const double target = theta * theta * total;
    double sum = 0.0;
    for (int i : order) {
        const double v = indicators[static_cast<std::size_t>(i)];
        if (sum >= target || v <= 0.0) break;
        marked.push_back(i);
        sum += v * v;
    }
    return marked;
}

std::vector<int> cumulative_mark(const std::vector<double> &indicators, double theta) {
    const auto order = descending_order(indicators, theta);
    const double total = sum_of_squares(indicators, order);
    std::vector<int> marked;
    if (total <= 0.0) return marked;
    double sum = 0.0;
    for (int i : order) {
        const double v = indicators[static_cast<std::size_t>(i)];
        sum += v * v;
        if (!marked.empty() && !(sum < theta * total)) break;
        marked.push_back(i);
    }
    return marked;
}

std::vector<int> mark(const std::vector<double> &indicators, double theta, MarkingRule rule) {
    return rule == MarkingRule::Minimal ? dorfler_mark(indicators, theta) : cumulative_mark(indicators, theta);
}

double IterationRecord::err_supg() const {
    return exact ? exact->norms.supg : std::numeric_limits<double>::quiet_NaN();
}
double IterationRecord::err_eps_triple() const {
    return exact ? exact->norms.eps_triple : std::numeric_limits<double>::quiet_NaN();
}
double IterationRecord::eff1() const { return eta / err_supg(); }
double IterationRecord::eff2() const { return eta / err_eps_triple(); }

std::string IterationRecord::flags() const {
    std::string out;
    auto add = [&](const char *f) {
        if (!out.empty()) out += '|';
        out += f;
    };
    if (exact && exact->quadrature_sensitive) add("quadrature-sensitive");
    if (averaged_corners > 0) add("corner-averaged");
    return out;
}

std::string to_string(StopReason reason) {
    switch (reason) {
    case StopReason::Tolerance: return "tolerance";
    case StopReason::MaxIterations: return "max-iterations";
    case StopReason::MaxElements: return "max-elements";
    case StopReason::EmptyMarking: return "empty-marking";
    }
    return "unknown";
}

RunHistory adaptive_solve(const BenchmarkProblem &problem, const AdaptConfig &config) {
    return adaptive_solve(problem.spec, problem.initial_mesh(), config);
}

RunHistory adaptive_solve(const ProblemSpec &prob, const Mesh &initial, const AdaptConfig &config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const DeltaRule delta{config.c_delta};
    const GammaRule gamma{config.c_stab, 1.0};

    RunHistory hist;
    auto mesh = std::make_shared<const Mesh>(initial);
    for (int iter = 1;; ++iter) {
        validate_problem(prob, *mesh);
        IterationRecord row;
        row.iter = iter;
        row.n_elements = mesh->num_triangles();
        row.h_max = max_diameter(*mesh);
        row.h_min = min_diameter(*mesh);
        if (config.keep_meshes) hist.meshes.push_back(mesh);

        SupgSolveInfo info;
        std::optional<P1Function> u_h;
        std::optional<FluxField> sigma;
        try {
            u_h.emplace(solve(mesh, prob, delta, &info));
            sigma.emplace(recover(config.recovery, *u_h, prob, gamma));
        } catch (const SolverError &e) {
            hist.final_mesh = mesh;
            hist.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            throw AdaptError("iteration " + std::to_string(iter) + ": " + e.what(), std::move(hist));
        }
        row.dof = dirichlet_lift(*mesh, prob).free_vertices.size();
        row.averaged_corners = info.averaged_corners.size();
        row.max_delta_ratio = info.max_delta_ratio;

        const auto rep = assemble_report(*u_h, *sigma, prob, config.recovery, config.oscillation_degree);
        row.eta = rep.eta;
        row.phi = rep.phi;
        row.osc = rep.osc;
        row.jump_estimator = rep.jump_estimator;
        row.constants = rep.constants;
        if (prob.has_exact()) row.exact = exact_errors(*u_h, prob, delta);

        hist.final_mesh = mesh;
        hist.final_solution = std::move(u_h);

        bool stop = true;
        if (rep.eta <= config.tol) {
            hist.stop = StopReason::Tolerance;
        } else if (iter >= config.max_iterations) {
            hist.stop = StopReason::MaxIterations;
        } else {
            row.marked = mark(rep.indicators(), config.theta, config.marking);
            if (row.marked.empty()) {
                hist.stop = StopReason::EmptyMarking;
            } else {
                stop = false;
            }
        }
        for (int t : row.marked) row.marked_centroids.push_back(mesh->centroid(t));
        hist.rows.push_back(std::move(row));
        if (stop) break;

        auto refined = std::make_shared<const Mesh>(longest_edge_refine(*mesh, hist.rows.back().marked, config.refinement == RefineRule::FourT));
        if (refined->num_triangles() > config.max_elements) {
            hist.stop = StopReason::MaxElements;
            break;
        }
        mesh = std::move(refined);
    }
    hist.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return hist;
}

}  // namespace fluxrec
