#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mars {

/// Stable error identifiers. The CLI reports these verbatim in its JSON errors.
enum class ErrorCode : std::uint8_t {
  invalid_config,
  domain,
  dimension,
  convergence,
  consistency,
  conjugate_pairing,
  fingerprint_mismatch,
  out_of_range,
  insufficient_data,
  normalization,
  io,
  format,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by iterative solvers; carries the state they stopped in.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, double residual, std::size_t iterations)
      : Error(ErrorCode::convergence, message), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

}  // namespace mars
