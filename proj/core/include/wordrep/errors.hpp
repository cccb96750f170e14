#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wordrep {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// onto a distinct exit code (see tools/).

// Bad invocation: unknown method name, malformed flag combinations.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input data. line is 1-based; 0 means "not line-addressable".
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what, std::size_t line_no = 0)
      : std::runtime_error(line_no > 0 ? what + " (line " + std::to_string(line_no) + ")"
                                       : what),
        line(line_no) {}
  std::size_t line;
};

// Input present but unusable: empty corpus, dataset shorter than required.
struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value outside an operation's domain (e.g. log of a non-positive count).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A multi-step procedure invoked out of order or with missing artifacts.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite intermediate detected during training or inference.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Corruption draw collided with the true centre word; caller should redraw.
struct ResampleNeeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wordrep
