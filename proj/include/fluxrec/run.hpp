#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxrec/adapt.hpp"

namespace fluxrec {

inline constexpr const char *kHistorySchema = "# schema: fluxrec-history/1";

/// Column names of history.csv, in order.
const std::vector<std::string> &history_columns();

struct RunConfig {
    /// Built-in problem name; ignored when `problem_file` is set.
    std::string problem;
    std::string problem_file;
    std::optional<double> epsilon;
    AdaptConfig adapt;
    std::string out_dir = "out";
    /// One run per value, each in its own subdirectory of `out_dir`.
    std::vector<double> sweep_epsilon;
    bool dump_meshes = false;
};

class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resolves the problem for one epsilon. Throws RunError or ProblemError.
BenchmarkProblem resolve_problem(const RunConfig &config, std::optional<double> epsilon);

void write_history_csv(std::ostream &out, const RunHistory &history);
/// Run metadata as JSON: configuration, problem, decisions, stop reason.
std::string run_metadata(const RunConfig &config, const BenchmarkProblem &problem, const RunHistory &history);

/// Subdirectory name for one sweep value, e.g. eps_1e-06.
std::string sweep_directory(double epsilon);

/// Runs every configured case and writes history.csv, meta.json and, on
/// request, mesh_NNN.txt. Returns 0 on success, 2 when a solve failed (the
/// partial history is still written). Configuration errors throw before
/// anything is written.
int run(const RunConfig &config, std::ostream &log);

class HistoryFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HistoryTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index, throws HistoryFormatError when absent.
    std::size_t column(const std::string &name) const;
};

/// Parses a history CSV written by `write_history_csv`.
HistoryTable read_history_csv(std::istream &in);

/// One summary line per history file with a fixed column order.
void print_report(const std::vector<std::string> &paths, std::ostream &out);

}  // namespace fluxrec
