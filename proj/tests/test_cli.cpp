#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "tfp/cli.hpp"
#include "tfp/io.hpp"

namespace fs = std::filesystem;
using namespace tfp;

namespace {

std::string fixture(const std::string& name) { return std::string(TFP_FIXTURE_DIR) + "/" + name; }

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("tfp_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

// Runs the binary with stdout/stderr captured into the work directory.
int tfp_exit(const Workdir& w, const std::string& args, const std::string& env = "") {
  const std::string cmd = "cd '" + w.dir.string() + "' && " + env + " '" + TFP_BINARY + "' " + args + " >'" +
                          (w / "stdout.txt") + "' 2>'" + (w / "stderr.txt") + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) { return io::read_file(path); }

}  // namespace

TEST_CASE("exit codes match the library enum") {
  CHECK(cli::kOk == 0);
  CHECK(cli::kInternalError == 1);
  CHECK(cli::kParseError == 2);
  CHECK(cli::kConditionsFailed == 3);
  CHECK(cli::kNotConverged == 4);
  CHECK(cli::kX0OutsideBall == 5);
}

TEST_CASE("check: passing and failing fixtures") {
  Workdir w;
  CHECK(tfp_exit(w, "check " + fixture("constant_pass.json")) == 0);
  const auto report = io::parse_json_text(slurp(w / "check_report.json"));
  CHECK(report["all_passed"] == true);
  CHECK(slurp(w / "stdout.txt").find("all conditions passed") != std::string::npos);

  CHECK(tfp_exit(w, "check " + fixture("power_fail.json") + " --report fail.json") == 3);
  const std::string out = slurp(w / "stdout.txt");
  CHECK(out.find("witness sample") != std::string::npos);
  CHECK(io::parse_json_text(slurp(w / "fail.json"))["all_passed"] == false);
}

TEST_CASE("check: psi diagnostic is reported when the file carries one") {
  Workdir w;
  CHECK(tfp_exit(w, "check " + fixture("contraction_pass.json")) == 0);
  const auto report = io::parse_json_text(slurp(w / "check_report.json"));
  REQUIRE(report.contains("psi_contraction"));
  CHECK(report["psi_contraction"]["passed"] == report["psi_contraction"]["checked"]);
}

TEST_CASE("check: seeds, samples and threads") {
  Workdir w;
  const std::string file = fixture("power_fail.json");
  tfp_exit(w, "check " + file + " --samples 30 --report a.json");
  tfp_exit(w, "check " + file + " --samples 30 --threads 4 --report b.json");
  CHECK(slurp(w / "a.json") == slurp(w / "b.json"));
  CHECK(io::parse_json_text(slurp(w / "a.json"))["samples"] == 30);

  tfp_exit(w, "check " + file + " --report env.json", "TFP_SEED=5");
  CHECK(io::parse_json_text(slurp(w / "env.json"))["seed"] == 5);
  tfp_exit(w, "check " + file + " --seed 9 --report flag.json", "TFP_SEED=5");
  CHECK(io::parse_json_text(slurp(w / "flag.json"))["seed"] == 9);

  CHECK(tfp_exit(w, "check " + file, "TFP_SEED=abc") == 2);
}

TEST_CASE("parse errors exit 2 with a location") {
  Workdir w;
  io::write_file(w / "bad.json", "{\n  \"kind\": \"type1\",\n  oops\n}\n");
  CHECK(tfp_exit(w, "check bad.json") == 2);
  CHECK(slurp(w / "stderr.txt").find("line 3") != std::string::npos);

  io::write_file(w / "schema.json", R"({"kind": "type1", "A": [[[1, 0], [0, 1]]], "s": 2})");
  CHECK(tfp_exit(w, "solve schema.json") == 2);
  CHECK(slurp(w / "stderr.txt").find("F: missing") != std::string::npos);

  CHECK(tfp_exit(w, "check missing.json") == 2);
  CHECK(tfp_exit(w, "frobnicate") == 2);
  CHECK(tfp_exit(w, "") == 2);
}

TEST_CASE("solve: converged run writes trace and solution") {
  Workdir w;
  CHECK(tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out run/trace.csv") == 0);
  const auto rows = io::trace_from_csv(slurp(w / "run/trace.csv"));
  REQUIRE_FALSE(rows.empty());
  CHECK(rows.front().k == 1);
  CHECK(rows.back().residual1 <= 1e-12);
  const auto sol = io::parse_json_text(slurp(w / "run/trace.json"));
  CHECK(sol["converged"] == true);
  CHECK(sol["stop_reason"] == "gap_tol");
  CHECK(sol["iterations"] == rows.size());
  CHECK(sol["alpha_used"].get<double>() == doctest::Approx(0.75));

  CHECK(tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out t.csv --solution s.json --x0 identity") == 0);
  CHECK(fs::exists(w / "s.json"));
}

TEST_CASE("solve: traces are byte-identical across runs") {
  Workdir w;
  tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out a.csv");
  tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out b.csv");
  CHECK(slurp(w / "a.csv") == slurp(w / "b.csv"));
  CHECK(slurp(w / "a.json") == slurp(w / "b.json"));
}

TEST_CASE("solve: failing conditions, force and X0 outside the ball") {
  Workdir w;
  CHECK(tfp_exit(w, "solve " + fixture("power_fail.json")) == 3);
  CHECK_FALSE(fs::exists(w / "trace.csv"));
  CHECK(tfp_exit(w, "solve " + fixture("power_fail.json") + " --force") == 0);

  io::write_file(w / "far.json", "[[100, 0, 0], [0, 1, 0], [0, 0, 1]]");
  CHECK(tfp_exit(w, "solve " + fixture("example_4_2.json") + " --x0 far.json") == 5);
  CHECK(slurp(w / "stderr.txt").find("outside") != std::string::npos);

  io::write_file(w / "small.json", "[[1, 0], [0, 1]]");
  CHECK(tfp_exit(w, "solve " + fixture("example_4_2.json") + " --x0 small.json") == 2);
}

TEST_CASE("solve: non-convergence exits 4 and keeps the partial trace") {
  Workdir w;
  io::json j = io::parse_json_text(slurp(fixture("example_4_2.json")));
  j["options"]["max_iter"] = 3;
  io::write_file(w / "short.json", j.dump());
  CHECK(tfp_exit(w, "solve short.json --out p.csv") == 4);
  CHECK(io::trace_from_csv(slurp(w / "p.csv")).size() == 3);
  CHECK(io::parse_json_text(slurp(w / "p.json"))["converged"] == false);
}

TEST_CASE("plot") {
  Workdir w;
  tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out a.csv");
  tfp_exit(w, "solve " + fixture("example_4_2.json") + " --out b.csv --x0 identity");
  CHECK(tfp_exit(w, "plot a.csv b.csv --out both.svg --series gap --series bound") == 0);
  const std::string svg = slurp(w / "both.svg");
  CHECK(svg.find("a gap") != std::string::npos);
  CHECK(svg.find("b bound") != std::string::npos);
  CHECK(tfp_exit(w, "plot a.csv b.csv --out again.svg --series gap --series bound") == 0);
  CHECK(slurp(w / "again.svg") == svg);

  CHECK(tfp_exit(w, "plot a.csv") == 0);
  CHECK(fs::exists(w / "convergence.svg"));

  io::write_file(w / "broken.csv", std::string(io::kTraceHeader) + "\n1,0.5,1,0,0,0\n2,x,1,0,0,0\n");
  CHECK(tfp_exit(w, "plot broken.csv") == 2);
  CHECK(slurp(w / "stderr.txt").find("row 2") != std::string::npos);

  CHECK(tfp_exit(w, "plot a.csv --series loss") == 2);
}
