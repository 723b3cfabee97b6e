#pragma once

// File formats used by the `tfp` command-line tool.
//
//   problem file   JSON; matrices are nested row arrays whose entries are
//                  [re, im] pairs or bare reals.
//   trace file     CSV  k,thompson_gap,error_bound,residual1,residual2,dist_to_identity
//   solution file  JSON with the final iterate and run metadata
//   check report   JSON with per-condition pass counts and worst witnesses

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tfp/matrix_solver.hpp"
#include "tfp/psi.hpp"

namespace tfp::io {

using nlohmann::json;

// Schema or syntax error in an input file. `where` names the key path
// (e.g. "A[0][2]") or "line L, column C" for JSON syntax errors.
class FormatError : public Error {
 public:
  FormatError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, const std::string& key);
PDMatrix pd_matrix_from_json(const json& j, const std::string& key);

json psi_to_json(const PsiSpec& psi);
PsiSpec psi_from_json(const json& j, const std::string& key);

json function_to_json(const MatrixFunctionSpec& f);
MatrixFunctionSpec function_from_json(const json& j, const std::string& key);

struct FileOptions {
  double gap_tol = 1e-12;
  double residual_tol = 1e-10;
  std::size_t max_iter = 500;
  std::uint64_t seed = 20240601;
  std::size_t samples = 200;
  bool force = false;

  friend bool operator==(const FileOptions&, const FileOptions&) = default;
};

struct ProblemFile {
  ProblemSpec problem;
  std::optional<PDMatrix> x0;  // empty means the identity
  FileOptions options;
  std::optional<PsiSpec> psi;  // optional extra contraction diagnostic

  PDMatrix initial_point() const;
  SolveOptions solve_options() const;
  CheckOptions check_options(unsigned threads = 1) const;

  friend bool operator==(const ProblemFile&, const ProblemFile&) = default;
};

json problem_to_json(const ProblemFile& file);
ProblemFile problem_from_json(const json& j);

// Parses text; syntax errors are reported with line and column.
json parse_json_text(const std::string& text);
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);

json report_to_json(const ConditionReport& report);
std::string report_summary(const ConditionReport& report);

struct TraceRow {
  std::size_t k = 0;
  double thompson_gap = 0.0;
  double error_bound = 0.0;
  double residual1 = 0.0;
  double residual2 = 0.0;
  double dist_to_identity = 0.0;
};

inline constexpr const char* kTraceHeader = "k,thompson_gap,error_bound,residual1,residual2,dist_to_identity";

std::vector<TraceRow> trace_rows(const SolveResult& result);
std::string trace_to_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> trace_from_csv(const std::string& text);  // throws FormatError("row N", ...)

json solution_to_json(const SolveResult& result, bool converged, std::uint64_t seed);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// Formats a double so that it parses back to the same value.
std::string format_double(double v);

}  // namespace tfp::io
