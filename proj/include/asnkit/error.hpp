#pragma once

#include <stdexcept>
#include <string>

namespace asnkit {

/// Malformed input text (edge lists, cover files, registry rows).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A value outside its documented domain.
struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation precondition.
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Benchmark generation could not satisfy its constraints.
struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem / process failures.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad pipeline configuration (maps to CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace asnkit
