#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gcurve {

enum class ErrorKind {
  NegativeSource,
  AubryWindMismatch,
  EmptyAubry,
  CFLViolation,
  Diverged,
  DomainError,
  InadmissibleTrajectory,
  GridTooCoarse,
  NotStabilized,
  InsufficientHorizon,
  WindNotZero,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Finite stand-in for +infinity. It survives min-reductions and sums clamp to it,
// so no NaN can appear from inf - inf.
inline constexpr double kInf = std::numeric_limits<double>::max() / 2;

inline bool is_inf(double x) { return x >= kInf; }

inline double sat_add(double a, double b) {
  if (is_inf(a) || is_inf(b)) return kInf;
  const double s = a + b;
  return s >= kInf ? kInf : s;
}

}  // namespace gcurve
