#pragma once

// Command-line front end. Each command writes to the given streams and
// returns the process exit code: 0 success, 1 parse/scope/usage error,
// 2 run ended in a failed (inconsistent) store.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tccp/ast.hpp"
#include "tccp/interpreter.hpp"

namespace tccp::cli {

enum class Format { Text, Jsonl };

struct RunOptions {
  std::string program_path;
  std::string entry = "skip";
  std::size_t steps = 30;
  ChoicePolicy policy;
  Format format = Format::Text;
  std::size_t dump_every = 0;  // 0 = final store only
};

struct StatsOptions {
  std::string program_path;
  std::string entry = "skip";
  std::vector<std::size_t> steps{30, 100, 500};
  ChoicePolicy policy;
};

struct StatsRow {
  std::size_t steps = 0;
  std::size_t clock = 0;
  Status status = Status::Running;
  std::size_t nodes = 0;
  std::size_t registers = 0;
  std::size_t dims = 0;
  double parse_ms = 0;
  double simulate_ms = 0;
};

std::string read_file(const std::string& path);

/// Parses `text`, parses `entry` and attaches it.
ast::Program load(const std::string& text, const std::string& entry);

/// Parses and simulates without recording a trace; times exclude printing.
StatsRow measure(const std::string& text, const std::string& entry, std::size_t steps, ChoicePolicy policy);

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& program_path, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line, e.g. {"tccp", "run", "--program", "f.tccp", ...}.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tccp::cli
