#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lockshift::cli {

enum class Mode { Analyze, Transform, Check, Full };

struct RunConfig {
  std::string input;
  Mode mode = Mode::Full;
  std::optional<std::string> output;
  std::optional<std::string> emit_summary;
  std::optional<std::string> use_summary;
  std::optional<std::string> dump_cfg;
  std::optional<std::string> dump_callgraph;
  std::optional<std::string> dump_flow;
  bool timings = false;
  int iteration_budget = 1000;
};

enum ExitCode : int { kOk = 0, kDiagnostics = 1, kRejected = 2 };

/// Runs one invocation. Results go to files or `out`; diagnostics to `err`.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// Parses the command line. Returns nothing (after printing help or an
/// error to `err`) when the process should exit with `exit_code`.
std::optional<RunConfig> parse_command_line(int argc, const char *const *argv, std::ostream &out,
                                            std::ostream &err, int &exit_code);

}  // namespace lockshift::cli
