#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace plc::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_io = 2,
  exit_solver = 3,
  exit_config = 4,
  exit_check_failed = 5,
};

/// Evaluates an arithmetic expression over decimals with + - * / ( ) and
/// sqrt(...), e.g. "1/sqrt(2)" or "sqrt(2)/sqrt(3)". Throws ConfigError.
double evaluate_expression(std::string_view text);

/// Splits a comma-separated list, ignoring commas inside parentheses.
std::vector<std::string> split_list(std::string_view text);

/// A kappa entry: an expression, or "bar" for the global threshold
/// (which must then be supplied).
double parse_kappa(std::string_view text, std::optional<double> kappa_bar);

/// Entry point of the `plc` tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plc::cli
