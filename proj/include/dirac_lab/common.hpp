#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dirac_lab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

/// Raised when a physical parameter set violates its invariants.
/// The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an identity check is called on operators that do not satisfy
/// its premises. Carries the offending deviation so callers can report it.
class PreconditionError : public std::runtime_error {
 public:
  PreconditionError(const std::string& what, double deviation)
      : std::runtime_error(what), deviation_(deviation) {}
  double deviation() const noexcept { return deviation_; }

 private:
  double deviation_;
};

}  // namespace dirac_lab
