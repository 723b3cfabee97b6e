#include "tfp/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "tfp/io.hpp"
#include "tfp/plot.hpp"

namespace tfp::cli {

namespace {

using io::json;

std::string companion_json_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".json");
  return p.string();
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("TFP_SEED");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (*end != '\0') throw io::FormatError("TFP_SEED", "not an unsigned integer");
  return s;
}

void print_matrix(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.dim(); ++i) {
    out << "  ";
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const Complex z = m(i, j);
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(6) << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
           << "i";
      out << std::setw(24) << cell.str();
    }
    out << "\n";
  }
}

void apply_seed_override(io::ProblemFile& file, std::optional<std::uint64_t> flag_seed) {
  if (auto s = env_seed()) file.options.seed = *s;
  if (flag_seed) file.options.seed = *flag_seed;
}

// Re-evaluates the psi contraction hypothesis on the checker's sample pairs.
json psi_contraction(const io::ProblemFile& file, const CheckOptions& opt, std::ostream& out) {
  const auto& p = file.problem;
  const double radius = ball_radius(p);
  std::vector<std::pair<PDMatrix, PDMatrix>> pairs;
  for (std::size_t i = 0; i < opt.samples; ++i)
    pairs.emplace_back(random_pd_in_ball(p.n(), radius, derive_seed(opt.seed, 2 * i)),
                       random_pd_in_ball(p.n(), radius, derive_seed(opt.seed, 2 * i + 1)));
  const auto [t1, t2] = build_maps(p);
  const auto rep = verify_contraction(ThompsonSpace{}, t1, t2, *file.psi, pairs);
  out << "  [diagnostic] psi contraction (" << to_string(file.psi->kind()) << "): " << rep.passed << "/"
      << rep.samples.size() << "  worst margin " << io::format_double(rep.worst_margin) << "\n";
  return {{"psi", io::psi_to_json(*file.psi)},
          {"checked", rep.samples.size()},
          {"passed", rep.passed},
          {"worst_sample", rep.worst ? json(*rep.worst) : json(nullptr)},
          {"worst_margin", rep.worst_margin}};
}

int cmd_check(const std::string& path, std::optional<std::size_t> samples, std::optional<std::uint64_t> seed,
              unsigned threads, const std::string& report_path, std::ostream& out) {
  io::ProblemFile file = io::load_problem(path);
  apply_seed_override(file, seed);
  if (samples) file.options.samples = *samples;
  const CheckOptions opt = file.check_options(threads);

  const ConditionReport report = check_conditions(file.problem, opt);
  out << io::report_summary(report);
  json j = io::report_to_json(report);
  if (file.psi) j["psi_contraction"] = psi_contraction(file, opt, out);
  io::write_file(report_path, j.dump(2) + "\n");
  out << "report written to " << report_path << "\n";
  return report.all_passed() ? kOk : kConditionsFailed;
}

void write_outputs(const SolveResult& r, bool converged, std::uint64_t seed, const std::string& trace_path,
                   const std::string& solution_path) {
  io::write_file(trace_path, io::trace_to_csv(io::trace_rows(r)));
  io::write_file(solution_path, io::solution_to_json(r, converged, seed).dump(2) + "\n");
}

int cmd_solve(const std::string& path, const std::string& trace_path, std::string solution_path,
              const std::string& x0_arg, bool force, std::ostream& out, std::ostream& err) {
  io::ProblemFile file = io::load_problem(path);
  apply_seed_override(file, std::nullopt);
  if (!x0_arg.empty()) {
    if (x0_arg == "identity")
      file.x0.reset();
    else
      file.x0 = io::pd_matrix_from_json(io::parse_json_text(io::read_file(x0_arg)), "x0");
    if (file.x0 && file.x0->dim() != file.problem.n()) throw io::FormatError("x0", "dimension differs from A");
  }
  if (force) file.options.force = true;
  if (solution_path.empty()) solution_path = companion_json_path(trace_path);

  try {
    const SolveResult r = solve(file.problem, file.initial_point(), file.solve_options());
    write_outputs(r, true, file.options.seed, trace_path, solution_path);
    out << "converged after " << r.trace.iterations() << " iterations (" << to_string(r.trace.stop_reason)
        << ")\n"
        << "  alpha " << io::format_double(r.alpha_used) << "\n"
        << "  residuals " << io::format_double(r.residual1) << ", " << io::format_double(r.residual2) << "\n"
        << "  d(X, I) " << io::format_double(r.dist_to_identity) << "\n"
        << "solution:\n";
    print_matrix(out, r.solution.matrix());
    out << "trace written to " << trace_path << ", solution to " << solution_path << "\n";
    return kOk;
  } catch (const X0DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kX0OutsideBall;
  } catch (const ConditionsNotVerified& e) {
    out << io::report_summary(e.report());
    err << "error: " << e.what() << "\n";
    return kConditionsFailed;
  } catch (const SolveIncomplete& e) {
    const SolveResult& r = e.partial();
    write_outputs(r, false, file.options.seed, trace_path, solution_path);
    err << "error: " << e.what() << "\n"
        << "  last gap " << io::format_double(r.trace.gaps.empty() ? 0.0 : r.trace.gaps.back()) << ", residuals "
        << io::format_double(r.residual1) << ", " << io::format_double(r.residual2) << "\n"
        << "partial trace written to " << trace_path << "\n";
    return kNotConverged;
  }
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out_path,
             const std::vector<std::string>& series_names, std::ostream& out) {
  std::vector<plot::LabeledTrace> loaded;
  for (const auto& path : traces) {
    try {
      loaded.push_back({std::filesystem::path(path).stem().string(), io::trace_from_csv(io::read_file(path))});
    } catch (const io::FormatError& e) {
      throw io::FormatError(path + " " + e.where(), std::string(e.what()).substr(e.where().size() + 2));
    }
  }
  std::vector<plot::Series> series;
  for (const auto& s : series_names) {
    try {
      series.push_back(plot::series_from_string(s));
    } catch (const InvalidArgument& e) {
      throw io::FormatError("--series", e.what());
    }
  }
  if (series.empty()) series.push_back(plot::Series::gap);
  io::write_file(out_path, plot::render_svg(loaded, series));
  out << "plot written to " << out_path << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common positive definite solutions of paired nonlinear matrix equations", "tfp"};
  app.require_subcommand(1);

  std::string check_file, report_path = "check_report.json";
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  auto* check = app.add_subcommand("check", "Sample the sufficiency conditions on the Thompson ball");
  check->add_option("file", check_file, "Problem file (JSON)")->required();
  check->add_option("--samples", samples, "Number of sampled (X, Y) pairs");
  check->add_option("--seed", seed, "Sampling seed");
  check->add_option("--threads", threads, "Worker threads (reports are identical for any value)");
  check->add_option("--report", report_path, "Where to write the JSON report");

  std::string solve_file, trace_path = "trace.csv", solution_path, x0_arg;
  bool force = false;
  auto* solve_cmd = app.add_subcommand("solve", "Run the alternating iteration and write the trace");
  solve_cmd->add_option("file", solve_file, "Problem file (JSON)")->required();
  solve_cmd->add_option("--out", trace_path, "Trace CSV path");
  solve_cmd->add_option("--solution", solution_path, "Solution JSON path (default: trace path with .json)");
  solve_cmd->add_option("--x0", x0_arg, "Initial point: a JSON matrix file or 'identity'");
  solve_cmd->add_flag("--force", force, "Solve even if the sampled conditions fail");

  std::vector<std::string> traces, series_names;
  std::string plot_out = "convergence.svg";
  auto* plot_cmd = app.add_subcommand("plot", "Render trace CSVs as a semilog SVG");
  plot_cmd->add_option("traces", traces, "Trace CSV files")->required();
  plot_cmd->add_option("--out", plot_out, "SVG output path");
  plot_cmd->add_option("--series", series_names, "gap, residual and/or bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  try {
    if (*check) return cmd_check(check_file, samples, seed, threads, report_path, out);
    if (*solve_cmd) return cmd_solve(solve_file, trace_path, solution_path, x0_arg, force, out, err);
    return cmd_plot(traces, plot_out, series_names, out);
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace tfp::cli
