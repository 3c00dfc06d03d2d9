#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gadkit {

/// Bad argument: non-finite entries, shape mismatch, out-of-domain point,
/// inconsistent configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A column range reaches past the basis column budget.
class BudgetExceeded : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// The predicted signal disagrees with M (B theta_M + A theta_U) beyond tolerance.
class DecompositionMismatch : public std::runtime_error {
 public:
  DecompositionMismatch(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Iterative solver stopped before meeting its tolerance.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, double achieved_residual)
      : std::runtime_error(what), achieved_residual_(achieved_residual) {}
  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  double achieved_residual_;
};

/// Malformed dataset file. `offset` is the byte position where parsing failed.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace gadkit
