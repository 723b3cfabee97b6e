#pragma once

#include <ostream>

namespace tfp::cli {

// Exit codes of the `tfp` tool.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kParseError = 2,
  kConditionsFailed = 3,
  kNotConverged = 4,
  kX0OutsideBall = 5,
};

//   tfp check <file> [--samples N] [--seed S] [--threads T] [--report PATH]
//   tfp solve <file> [--out PATH] [--solution PATH] [--x0 PATH|identity] [--force]
//   tfp plot <trace...> [--out PATH] [--series gap|residual|bound ...]
//
// TFP_SEED in the environment overrides the seed stored in the problem file;
// --seed overrides both.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfp::cli
