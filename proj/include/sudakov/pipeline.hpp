#pragma once

#include <map>
#include <optional>
#include <string>

#include "sudakov/io.hpp"

namespace sudakov {

enum class Command { Solve, Decompose, Refine, ExtractMap, Verify, Render };

Command parse_command(std::string_view name);  // InputError on an unknown name
std::string to_string(Command c);

/// Command-line values that replace the problem file's.
struct Overrides {
  std::optional<Mode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> resolution;
  std::optional<double> slack;
  std::optional<std::string> witness_radius;
};

void apply_overrides(ProblemSpec& spec, const Overrides& o);

enum ExitCode : int { kExitOk = 0, kExitInvariant = 1, kExitInput = 2 };

/// Output file name -> contents. Every report is a pure function of the
/// problem spec, so reruns are byte-identical.
struct RunResult {
  int status = kExitOk;
  std::map<std::string, std::string> files;
  std::string summary;  // one line per stage, for the terminal
};

/// Runs the stages the command needs. `extract-map`, `verify` and `render`
/// also run refinement when the problem's `refine` flag is on; `verify` and
/// `render` include the map when `extract-map` is on. Throws InputError.
RunResult run_pipeline(Command cmd, const ProblemSpec& spec);

/// Writes every file into spec.out, creating the directory.
void write_outputs(const RunResult& result, const std::string& out_dir);

}  // namespace sudakov
