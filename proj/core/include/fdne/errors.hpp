#pragma once

#include <stdexcept>
#include <string>

namespace fdne {

/// Input outside the mathematical domain of an operation (pole, support, ...).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Adaptive refinement exhausted its budget before reaching the tolerance.
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (bad sweep, bad train settings, bad JSON).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Network class specification cannot be expanded (e.g. Star with k < 2).
struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Hellinger operation requires a truncation level and none was given.
struct MissingTruncation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rate fit impossible: fewer than two points or a zero error value.
struct DegenerateFit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fdne
