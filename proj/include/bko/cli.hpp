#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bko/analysis.hpp"

namespace bko::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_config_error = 1,
  exit_numerical_failure = 2,
  exit_bound_violation = 3,
};

// `key = value` lines; `#` starts a comment, blank lines are skipped.
// Keys and values are trimmed; a repeated key keeps the last value.
std::map<std::string, std::string> read_config(std::istream& in);
std::map<std::string, std::string> read_config_file(const std::string& path);

// "x_min:x_max:points" or "x_min:x_max:points:log"
GridSpec parse_grid(const std::string& text);

std::vector<long> parse_long_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);
std::vector<std::string> parse_string_list(const std::string& text);

// args excludes the program name: {"eval", "--f", "sin", ...}. The report
// goes to `out` unless --out names a file; diagnostics go to `err`.
// With --config, `function.*` keys extend the catalog and every other key
// acts as the flag of the same name ('_' read as '-') unless the command
// line sets it too.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bko::cli
