#include "fluxrec/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace fluxrec {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

void write_file(const fs::path &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RunError("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw RunError("write failed for '" + path.string() + "'");
}

struct CaseResult {
    RunHistory history;
    bool failed = false;
    std::string error;
};

CaseResult run_case(const BenchmarkProblem &problem, const RunConfig &config) {
    AdaptConfig adapt = config.adapt;
    adapt.keep_meshes = config.dump_meshes;
    CaseResult res;
    try {
        res.history = adaptive_solve(problem, adapt);
    } catch (const AdaptError &e) {
        res.history = e.partial();
        res.failed = true;
        res.error = e.what();
    }
    return res;
}

void write_case(const fs::path &dir, const RunConfig &config, const BenchmarkProblem &problem, const CaseResult &res) {
    fs::create_directories(dir);
    std::ostringstream csv;
    write_history_csv(csv, res.history);
    write_file(dir / "history.csv", csv.str());
    write_file(dir / "meta.json", run_metadata(config, problem, res.history));
    if (config.dump_meshes) {
        for (std::size_t i = 0; i < res.history.meshes.size(); ++i) {
            std::ostringstream mesh;
            write_mesh_text(mesh, *res.history.meshes[i]);
            char name[32];
            std::snprintf(name, sizeof name, "mesh_%03zu.txt", i + 1);
            write_file(dir / name, mesh.str());
        }
    }
}

}  // namespace

const std::vector<std::string> &history_columns() {
    static const std::vector<std::string> cols = {
        "iter",    "n_elements", "dof",           "h_max", "h_min", "eta",   "phi", "osc",
        "jump_estimator", "err_supg", "err_eps_triple", "eff1", "eff2", "flags", "c52", "c54", "c55"};
    return cols;
}

BenchmarkProblem resolve_problem(const RunConfig &config, std::optional<double> epsilon) {
    if (!config.problem_file.empty()) return load_problem_file(config.problem_file, epsilon);
    if (config.problem.empty()) throw RunError("no problem given (use --problem or --config)");
    const auto names = problem_names();
    if (std::find(names.begin(), names.end(), config.problem) == names.end())
        throw RunError("unknown problem '" + config.problem + "'");
    if (config.problem == "manufactured") return manufactured_smooth();
    if (!epsilon) throw RunError("problem '" + config.problem + "' needs --epsilon or --sweep-epsilon");
    return problem_by_name(config.problem, *epsilon);
}

void write_history_csv(std::ostream &out, const RunHistory &history) {
    out << kHistorySchema << '\n';
    const auto &cols = history_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto &r : history.rows) {
        out << r.iter << ',' << r.n_elements << ',' << r.dof << ',' << fmt(r.h_max) << ',' << fmt(r.h_min) << ','
            << fmt(r.eta) << ',' << fmt(r.phi) << ',' << fmt(r.osc) << ',' << fmt(r.jump_estimator) << ','
            << fmt(r.err_supg()) << ',' << fmt(r.err_eps_triple()) << ',' << fmt(r.eff1()) << ',' << fmt(r.eff2())
            << ',' << r.flags() << ',' << fmt(r.constants.explicit_flux) << ',' << fmt(r.constants.boundary_trace)
            << ',' << fmt(r.constants.residual) << '\n';
    }
}

std::string run_metadata(const RunConfig &config, const BenchmarkProblem &problem, const RunHistory &history) {
    using json = nlohmann::ordered_json;
    const auto &a = config.adapt;
    json meta;
    meta["schema"] = "fluxrec-meta/1";
    meta["problem"] = {{"name", problem.name},
                       {"reference", problem.reference},
                       {"source", config.problem_file.empty() ? "builtin" : config.problem_file},
                       {"epsilon", problem.spec.epsilon},
                       {"beta", problem.spec.beta},
                       {"c_b", problem.spec.c_b},
                       {"domain", {problem.corner_lo.x, problem.corner_lo.y, problem.corner_hi.x, problem.corner_hi.y}},
                       {"initial_subdivisions", problem.mesh_n},
                       {"has_exact_solution", problem.spec.has_exact()}};
    meta["config"] = {{"theta", a.theta},
                      {"c_delta", a.c_delta},
                      {"recovery", to_string(a.recovery)},
                      {"c_stab", a.c_stab},
                      {"tol", a.tol},
                      {"max_iterations", a.max_iterations},
                      {"max_elements", a.max_elements},
                      {"marking", to_string(a.marking)},
                      {"refinement", to_string(a.refinement)},
                      {"oscillation_degree", a.oscillation_degree}};
    meta["decisions"] = {
        {"delta", "delta_K = c_delta * h_K, h_K = longest side"},
        {"marking", a.marking == MarkingRule::Minimal
                        ? "minimal greedy set with sum eta_K^2 >= theta^2 sum eta^2, ties to lower index"
                        : "greedy prefix with running sum eta_K^2 < theta sum eta^2, largest always marked"},
        {"refinement", a.refinement == RefineRule::Bisect
                           ? "longest-edge bisection of marked triangles, Rivara closure"
                           : "all sides of marked triangles bisected, longest-edge closure"},
        {"dof", "non-Dirichlet vertices"},
        {"dirichlet_corners", "disagreeing one-sided edge limits are averaged"},
        {"eta", "sqrt(phi^2 + sum of Neumann edge terms squared)"},
        {"gamma_K", "scale * h_K * min{1/|a|_K, 1/sqrt(beta eps), alpha_K/(8 C^2 sqrt(eps))}"},
        {"supg_tolerance", kSupgTolerance},
        {"recovery_tolerance", kRecoveryTolerance},
        {"assembly_quadrature_degree", problem.spec.assembly_degree},
        {"error_quadrature_degree", kErrorQuadratureDegree},
        {"quadrature_sensitivity_threshold", kQuadratureSensitivity}};
    meta["result"] = {{"iterations", history.rows.size()},
                      {"stop_reason", to_string(history.stop)},
                      {"final_elements", history.rows.empty() ? 0 : history.rows.back().n_elements},
                      {"final_eta", history.rows.empty() ? 0.0 : history.rows.back().eta}};
    return meta.dump(2) + "\n";
}

std::string sweep_directory(double epsilon) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "eps_%g", epsilon);
    return buf;
}

int run(const RunConfig &config, std::ostream &log) {
    config.adapt.validate();
    struct Case {
        fs::path dir;
        BenchmarkProblem problem;
    };
    // Resolve everything before writing so that bad input leaves no files behind.
    std::vector<Case> cases;
    const fs::path root(config.out_dir);
    if (config.sweep_epsilon.empty()) {
        cases.push_back({root, resolve_problem(config, config.epsilon)});
    } else {
        for (double eps : config.sweep_epsilon)
            cases.push_back({root / sweep_directory(eps), resolve_problem(config, eps)});
    }
    for (const auto &c : cases) validate_problem(c.problem.spec, c.problem.initial_mesh());

    int status = 0;
    for (const auto &c : cases) {
        const auto res = run_case(c.problem, config);
        write_case(c.dir, config, c.problem, res);
        const auto &rows = res.history.rows;
        log << c.problem.name << " eps=" << c.problem.spec.epsilon << ": " << rows.size() << " iterations, ";
        if (!rows.empty()) log << rows.back().n_elements << " elements, eta=" << rows.back().eta << ", ";
        log << "stop=" << (res.failed ? "solver-failure" : to_string(res.history.stop)) << " -> "
            << (c.dir / "history.csv").string() << '\n';
        if (res.failed) {
            log << "error: " << res.error << '\n';
            status = 2;
        }
    }
    return status;
}

std::size_t HistoryTable::column(const std::string &name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw HistoryFormatError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

HistoryTable read_history_csv(std::istream &in) {
    HistoryTable table;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size())
            throw HistoryFormatError("line " + std::to_string(lineno) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw HistoryFormatError("empty history");
    for (const char *c : {"iter", "n_elements", "dof", "h_min", "eta"}) table.column(c);
    if (table.rows.empty()) throw HistoryFormatError("history has a header but no rows");
    return table;
}

void print_report(const std::vector<std::string> &paths, std::ostream &out) {
    if (paths.empty()) throw HistoryFormatError("no history files given");
    struct Line {
        std::string file;
        std::vector<std::string> cells;
    };
    std::vector<Line> lines;
    auto number = [](const std::string &s, const std::string &what) {
        if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception &) {
            pos = 0;
        }
        if (pos != s.size()) throw HistoryFormatError("malformed number '" + s + "' in column " + what);
        return v;
    };
    for (const auto &path : paths) {
        std::ifstream in(path);
        if (!in) throw HistoryFormatError("cannot open '" + path + "'");
        HistoryTable t;
        try {
            t = read_history_csv(in);
        } catch (const HistoryFormatError &e) {
            throw HistoryFormatError(path + ": " + e.what());
        }
        const auto &last = t.rows.back();
        auto last_value = [&](const std::string &col) -> std::string {
            const auto it = std::find(t.header.begin(), t.header.end(), col);
            if (it == t.header.end()) return "-";
            const double v = number(last[static_cast<std::size_t>(it - t.header.begin())], col);
            return std::isfinite(v) ? fmt(v) : "-";
        };
        auto extremes = [&](const std::string &col) -> std::string {
            const auto it = std::find(t.header.begin(), t.header.end(), col);
            if (it == t.header.end()) return "-";
            const auto idx = static_cast<std::size_t>(it - t.header.begin());
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto &row : t.rows) {
                const double v = number(row[idx], col);
                if (!std::isfinite(v)) continue;
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (!(lo <= hi)) return "-";
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3g..%.3g", lo, hi);
            return buf;
        };
        for (const auto &row : t.rows)
            for (const char *c : {"iter", "n_elements", "dof", "h_min", "eta"}) number(row[t.column(c)], c);
        lines.push_back({path,
                         {std::to_string(t.rows.size()), last_value("eta"), last_value("dof"), last_value("h_max"),
                          last_value("h_min"), last_value("eff1"), last_value("eff2"), extremes("c52"),
                          extremes("c54"), extremes("c55")}});
    }
    const std::vector<std::string> head = {"file", "iters", "eta", "dof", "h_max", "h_min",
                                           "eff1", "eff2", "c52", "c54", "c55"};
    std::vector<std::size_t> width(head.size());
    for (std::size_t i = 0; i < head.size(); ++i) width[i] = head[i].size();
    for (const auto &l : lines) {
        width[0] = std::max(width[0], l.file.size());
        for (std::size_t i = 0; i < l.cells.size(); ++i) width[i + 1] = std::max(width[i + 1], l.cells[i].size());
    }
    auto emit = [&](const std::string &first, const std::vector<std::string> &rest) {
        out << std::left << std::setw(static_cast<int>(width[0])) << first;
        for (std::size_t i = 0; i < rest.size(); ++i)
            out << "  " << std::right << std::setw(static_cast<int>(width[i + 1])) << rest[i];
        out << '\n';
    };
    emit(head[0], std::vector<std::string>(head.begin() + 1, head.end()));
    for (const auto &l : lines) emit(l.file, l.cells);
}

}  // namespace fluxrec
