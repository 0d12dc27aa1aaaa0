#pragma once

#include <stdexcept>
#include <string>

namespace hobn {

// Exit codes used by the CLI; library code throws, the driver maps.
enum exit_code : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_syntax = 2,
  exit_type = 3,
  exit_fuel = 4,
  exit_zero_evidence = 5,
};

struct syntax_error : std::runtime_error {
  int line;
  int col;
  syntax_error(int line, int col, const std::string& msg)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg),
        line(line), col(col) {}
};

struct type_error : std::runtime_error {
  // Path from the root of the term to the offending node, as child indices.
  std::string path;
  explicit type_error(const std::string& msg, std::string path = "")
      : std::runtime_error("type error: " + msg +
                           (path.empty() ? "" : " (at " + path + ")")),
        path(std::move(path)) {}
};

struct fuel_exhausted : std::runtime_error {
  long long steps;
  explicit fuel_exhausted(long long steps)
      : std::runtime_error("reduction did not terminate within " +
                           std::to_string(steps) + " steps"),
        steps(steps) {}
};

struct zero_evidence : std::runtime_error {
  zero_evidence() : std::runtime_error("observed evidence has probability zero") {}
};

struct domain_mismatch : std::runtime_error {
  explicit domain_mismatch(const std::string& msg)
      : std::runtime_error("domain mismatch: " + msg) {}
};

struct internal_error : std::logic_error {
  explicit internal_error(const std::string& msg)
      : std::logic_error("internal error: " + msg) {}
};

}  // namespace hobn
