#pragma once

#include <stdexcept>
#include <string>

namespace ple {

// All failures surface as typed exceptions rooted here; the CLI maps any
// of them to exit code 3 (input error) unless noted otherwise.
struct Error : std::runtime_error {
  explicit Error(const std::string& m) : std::runtime_error(m) {}
};

struct SortError : Error {
  explicit SortError(const std::string& m) : Error("sort error: " + m) {}
};

struct ParseError : Error {
  ParseError(const std::string& m, int line, int col)
      : Error("parse error at " + std::to_string(line) + ":" +
              std::to_string(col) + ": " + m),
        line(line), col(col) {}
  // Position-free form for non-source inputs (scripts, model files).
  explicit ParseError(const std::string& m)
      : Error("parse error: " + m), line(0), col(0) {}
  int line, col;
};

struct ReflectError : Error {
  explicit ReflectError(const std::string& m) : Error("reflect error: " + m) {}
};

// Solver misuse or backend plumbing failure (spawn/IO); distinct from an
// Unknown verdict, which is a normal result value.
struct SolverError : Error {
  explicit SolverError(const std::string& m) : Error("solver error: " + m) {}
};

struct EvalError : Error {
  explicit EvalError(const std::string& m) : Error("eval error: " + m) {}
};

struct InputError : Error {
  explicit InputError(const std::string& m) : Error("input error: " + m) {}
};

}  // namespace ple
