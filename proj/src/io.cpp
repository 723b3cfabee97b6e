#include "tfp/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tfp::io {

namespace {

std::string index_key(const std::string& key, std::size_t i) { return key + "[" + std::to_string(i) + "]"; }

double number_at(const json& j, const std::string& key) {
  if (!j.is_number()) throw FormatError(key, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(key, "number is not finite");
  return v;
}

const json& required(const json& obj, const char* name, const std::string& prefix = "") {
  const std::string key = prefix.empty() ? name : prefix + "." + name;
  auto it = obj.find(name);
  if (it == obj.end()) throw FormatError(key, "missing required key");
  return *it;
}

std::string key_of(const std::string& prefix, const char* name) {
  return prefix.empty() ? std::string(name) : prefix + "." + name;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- Matrices ---------------------------------------------------------------

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const Complex z = m(i, j);
      if (z.imag() == 0.0)
        row.push_back(z.real());
      else
        row.push_back(json::array({z.real(), z.imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw FormatError(key, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    const std::string rkey = index_key(key, i);
    if (!row.is_array() || row.size() != n)
      throw FormatError(rkey, "expected a row of " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      const json& e = row[c];
      const std::string ekey = index_key(rkey, c);
      if (e.is_number()) {
        m(i, c) = number_at(e, ekey);
      } else if (e.is_array() && e.size() == 2) {
        m(i, c) = Complex(number_at(e[0], ekey + "[0]"), number_at(e[1], ekey + "[1]"));
      } else {
        throw FormatError(ekey, "expected a number or an [re, im] pair");
      }
    }
  }
  return m;
}

PDMatrix pd_matrix_from_json(const json& j, const std::string& key) {
  const Matrix m = matrix_from_json(j, key);
  try {
    return PDMatrix(HermitianMatrix(m));
  } catch (const Error& e) {
    throw FormatError(key, e.what());
  }
}

// --- Psi / matrix functions -------------------------------------------------

json psi_to_json(const PsiSpec& psi) { return {{"kind", to_string(psi.kind())}, {"params", psi.params()}}; }

PsiSpec psi_from_json(const json& j, const std::string& key) {
  if (!j.is_object()) throw FormatError(key, "expected an object");
  const json& kind = required(j, "kind", key);
  if (!kind.is_string()) throw FormatError(key + ".kind", "expected a string");
  const json& params = required(j, "params", key);
  if (!params.is_array()) throw FormatError(key + ".params", "expected an array");
  std::vector<double> values;
  for (std::size_t i = 0; i < params.size(); ++i) values.push_back(number_at(params[i], index_key(key + ".params", i)));
  try {
    return PsiSpec::make(psi_kind_from_string(kind.get<std::string>()), std::move(values));
  } catch (const Error& e) {
    throw FormatError(key, e.what());
  }
}

json function_to_json(const MatrixFunctionSpec& f) {
  if (f.kind == MatrixFunctionSpec::Kind::power) return {{"kind", "power"}, {"exponent", f.exponent}};
  return {{"kind", "constant"}, {"value", matrix_to_json(f.value->matrix())}};
}

MatrixFunctionSpec function_from_json(const json& j, const std::string& key) {
  if (!j.is_object()) throw FormatError(key, "expected an object");
  const json& kind = required(j, "kind", key);
  if (!kind.is_string()) throw FormatError(key + ".kind", "expected a string");
  const auto k = kind.get<std::string>();
  if (k == "power") {
    const double e = number_at(required(j, "exponent", key), key + ".exponent");
    try {
      return MatrixFunctionSpec::power(e);
    } catch (const Error& err) {
      throw FormatError(key + ".exponent", err.what());
    }
  }
  if (k == "constant") return MatrixFunctionSpec::constant(pd_matrix_from_json(required(j, "value", key), key + ".value"));
  throw FormatError(key + ".kind", "expected \"power\" or \"constant\"");
}

// --- Problem files ----------------------------------------------------------

PDMatrix ProblemFile::initial_point() const { return x0 ? *x0 : PDMatrix::identity(problem.n()); }

SolveOptions ProblemFile::solve_options() const {
  SolveOptions o;
  o.gap_tol = options.gap_tol;
  o.residual_tol = options.residual_tol;
  o.max_iter = options.max_iter;
  o.force = options.force;
  o.check = check_options();
  return o;
}

CheckOptions ProblemFile::check_options(unsigned threads) const {
  CheckOptions c;
  c.samples = options.samples;
  c.seed = options.seed;
  c.threads = threads;
  return c;
}

json problem_to_json(const ProblemFile& file) {
  const ProblemSpec& p = file.problem;
  json j;
  j["kind"] = to_string(p.kind);
  j["n"] = p.n();
  j["m"] = p.m();
  j["s"] = p.s;
  if (p.r) j["r"] = *p.r;
  json a = json::array();
  for (const auto& ai : p.A) a.push_back(matrix_to_json(ai));
  j["A"] = std::move(a);
  if (p.Q1) j["Q1"] = matrix_to_json(p.Q1->matrix());
  if (p.Q2) j["Q2"] = matrix_to_json(p.Q2->matrix());
  j["F"] = function_to_json(p.F);
  j["G"] = function_to_json(p.G);
  j["a"] = p.a;
  j["l"] = p.l;
  j["ball"] = to_string(p.ball);
  j["x0"] = file.x0 ? matrix_to_json(file.x0->matrix()) : json("identity");
  if (file.psi) j["psi"] = psi_to_json(*file.psi);
  j["options"] = {{"gap_tol", file.options.gap_tol},   {"residual_tol", file.options.residual_tol},
                  {"max_iter", file.options.max_iter}, {"seed", file.options.seed},
                  {"samples", file.options.samples},   {"force", file.options.force}};
  return j;
}

ProblemFile problem_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("<root>", "expected a JSON object");
  ProblemFile file;
  ProblemSpec& p = file.problem;

  const json& kind = required(j, "kind");
  if (kind == "type1")
    p.kind = ProblemKind::type1;
  else if (kind == "type2")
    p.kind = ProblemKind::type2;
  else
    throw FormatError("kind", "expected \"type1\" or \"type2\"");

  const json& a = required(j, "A");
  if (!a.is_array() || a.empty()) throw FormatError("A", "expected a non-empty array of matrices");
  for (std::size_t i = 0; i < a.size(); ++i) p.A.push_back(matrix_from_json(a[i], index_key("A", i)));

  if (auto it = j.find("n"); it != j.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() != p.n())
      throw FormatError("n", "does not match the dimension of A (" + std::to_string(p.n()) + ")");
  }
  if (auto it = j.find("m"); it != j.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() != p.m())
      throw FormatError("m", "does not match the number of matrices in A (" + std::to_string(p.m()) + ")");
  }

  p.s = number_at(required(j, "s"), "s");
  if (auto it = j.find("r"); it != j.end()) p.r = number_at(*it, "r");
  if (auto it = j.find("Q1"); it != j.end()) p.Q1 = pd_matrix_from_json(*it, "Q1");
  if (auto it = j.find("Q2"); it != j.end()) p.Q2 = pd_matrix_from_json(*it, "Q2");
  p.F = function_from_json(required(j, "F"), "F");
  p.G = function_from_json(required(j, "G"), "G");
  p.a = number_at(required(j, "a"), "a");
  p.l = number_at(required(j, "l"), "l");
  if (auto it = j.find("ball"); it != j.end()) {
    if (*it == "proof")
      p.ball = BallConvention::proof;
    else if (*it == "exponential")
      p.ball = BallConvention::exponential;
    else
      throw FormatError("ball", "expected \"proof\" or \"exponential\"");
  }

  if (auto it = j.find("x0"); it != j.end()) {
    if (it->is_string()) {
      if (*it != "identity") throw FormatError("x0", "expected \"identity\" or a matrix");
    } else {
      file.x0 = pd_matrix_from_json(*it, "x0");
    }
  }
  if (auto it = j.find("psi"); it != j.end()) file.psi = psi_from_json(*it, "psi");

  if (auto it = j.find("options"); it != j.end()) {
    const json& o = *it;
    if (!o.is_object()) throw FormatError("options", "expected an object");
    auto& fo = file.options;
    auto count = [&](const char* name, auto& field) {
      if (auto f = o.find(name); f != o.end()) {
        if (!f->is_number_unsigned()) throw FormatError(key_of("options", name), "expected a nonnegative integer");
        field = f->get<std::remove_reference_t<decltype(field)>>();
      }
    };
    if (auto f = o.find("gap_tol"); f != o.end()) fo.gap_tol = number_at(*f, "options.gap_tol");
    if (auto f = o.find("residual_tol"); f != o.end()) fo.residual_tol = number_at(*f, "options.residual_tol");
    count("max_iter", fo.max_iter);
    count("seed", fo.seed);
    count("samples", fo.samples);
    if (auto f = o.find("force"); f != o.end()) {
      if (!f->is_boolean()) throw FormatError("options.force", "expected true or false");
      fo.force = f->get<bool>();
    }
    if (fo.max_iter < 1) throw FormatError("options.max_iter", "must be >= 1");
    if (fo.samples < 1) throw FormatError("options.samples", "must be >= 1");
  }

  try {
    validate(p);
  } catch (const InvalidProblem& e) {
    throw FormatError(e.key(), std::string(e.what()).substr(e.key().size() + 2));
  }
  if (file.x0 && file.x0->dim() != p.n()) throw FormatError("x0", "dimension differs from A");
  return file;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw FormatError("line " + std::to_string(line) + ", column " + std::to_string(column), msg);
  }
}

ProblemFile parse_problem(const std::string& text) { return problem_from_json(parse_json_text(text)); }

ProblemFile load_problem(const std::string& path) { return parse_problem(read_file(path)); }

// --- Reports ----------------------------------------------------------------

namespace {

json condition_to_json(const ConditionResult& c) {
  json j = {{"name", c.name},
            {"checked", c.checked},
            {"passed", c.passed},
            {"pass_ratio", c.checked ? static_cast<double>(c.passed) / static_cast<double>(c.checked) : 0.0},
            {"worst_margin", c.worst_margin}};
  if (c.witness) {
    const auto& w = *c.witness;
    j["witness"] = {{"sample", w.sample}, {"inequality", w.inequality}, {"lhs", w.lhs},
                    {"rhs", w.rhs},       {"X", matrix_to_json(w.x.matrix())}, {"Y", matrix_to_json(w.y.matrix())}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

}  // namespace

json report_to_json(const ConditionReport& report) {
  json conditions = json::array(), diagnostics = json::array();
  for (const auto& c : report.conditions) conditions.push_back(condition_to_json(c));
  for (const auto& c : report.diagnostics) diagnostics.push_back(condition_to_json(c));
  return {{"kind", to_string(report.kind)},
          {"seed", report.seed},
          {"samples", report.samples},
          {"radius", report.radius},
          {"all_passed", report.all_passed()},
          {"conditions", std::move(conditions)},
          {"diagnostics", std::move(diagnostics)}};
}

std::string report_summary(const ConditionReport& report) {
  std::ostringstream out;
  out << to_string(report.kind) << " sufficiency check: " << report.samples << " samples, seed " << report.seed
      << ", ball radius " << format_double(report.radius) << "\n";
  auto line = [&](const ConditionResult& c, const char* tag) {
    out << "  " << tag << " " << c.name << ": " << c.passed << "/" << c.checked
        << (c.ok() ? " ok" : " FAIL") << "  worst margin " << format_double(c.worst_margin) << "\n";
    if (c.witness) {
      out << "      witness sample " << c.witness->sample << ": " << c.witness->inequality << "  lhs "
          << format_double(c.witness->lhs) << " > rhs " << format_double(c.witness->rhs) << "\n";
    }
  };
  for (const auto& c : report.conditions) line(c, "[condition] ");
  for (const auto& c : report.diagnostics) line(c, "[diagnostic]");
  out << (report.all_passed() ? "all conditions passed" : "conditions FAILED") << "\n";
  return out.str();
}

// --- Traces -----------------------------------------------------------------

std::vector<TraceRow> trace_rows(const SolveResult& result) {
  std::vector<TraceRow> rows;
  const auto& t = result.trace;
  for (std::size_t k = 1; k <= t.iterations(); ++k) {
    const auto& s = result.steps[k - 1];
    rows.push_back({k, t.gaps[k - 1], t.bounds[k - 1], s.residual1, s.residual2, s.dist_to_identity});
  }
  return rows;
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.k);
    for (double v : {r.thompson_gap, r.error_bound, r.residual1, r.residual2, r.dist_to_identity}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("row 0", "empty trace file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw FormatError("row 0", "unexpected header '" + line + "'");

  std::vector<TraceRow> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "row " + std::to_string(row_no);
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw FormatError(where, "expected 6 columns, got " + std::to_string(cells.size()));

    auto parse = [&](const std::string& s, const char* column) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty() || !std::isfinite(v))
        throw FormatError(where, std::string("column ") + column + " is not a finite number: '" + s + "'");
      return v;
    };
    TraceRow r;
    const double k = parse(cells[0], "k");
    if (k < 0 || k != std::floor(k)) throw FormatError(where, "column k is not a nonnegative integer");
    r.k = static_cast<std::size_t>(k);
    r.thompson_gap = parse(cells[1], "thompson_gap");
    r.error_bound = parse(cells[2], "error_bound");
    r.residual1 = parse(cells[3], "residual1");
    r.residual2 = parse(cells[4], "residual2");
    r.dist_to_identity = parse(cells[5], "dist_to_identity");
    rows.push_back(r);
  }
  return rows;
}

json solution_to_json(const SolveResult& result, bool converged, std::uint64_t seed) {
  return {{"converged", converged},
          {"solution", matrix_to_json(result.solution.matrix())},
          {"alpha_used", result.alpha_used},
          {"stop_reason", to_string(result.trace.stop_reason)},
          {"iterations", result.trace.iterations()},
          {"residual1", result.residual1},
          {"residual2", result.residual2},
          {"dist_to_identity", result.dist_to_identity},
          {"seed", seed}};
}

// --- Files ------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << contents;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace tfp::io
