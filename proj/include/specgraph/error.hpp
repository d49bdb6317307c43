#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specgraph {

// Every failure raised by the library carries the pipeline stage that produced
// it, so drivers (CLI, sweeps) can report "stage: message" without guessing.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error("parse", message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// Invalid mathematical input: zero polynomial, singular Bloch family, etc.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Iterative solver failures (QR non-convergence and friends).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace specgraph
