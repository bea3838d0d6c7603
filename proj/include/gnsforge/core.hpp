#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace gnsforge {

// Extended precision throughout: the tractor connection differentiates the
// splitting operator (third derivatives of sampled data) and the Obata-type
// identity goes to fourth order, where double rounding swamps the O(h^2)
// truncation error at the grid sizes we care about.
using Real = long double;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Errors carry a category so the CLI can map them onto exit codes.
enum class ErrorKind {
  parameter,     // invalid (n, m, k), grid size, ...
  domain,        // non-positive density, bad model/domain pairing, ...
  shape,         // fields living on different grids
  divergence,    // an integral failed the tail test
  nonconvergence,
  precondition,  // theorem hypotheses not met (e.g. Lv not parallel)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::domain: return "domain";
    case ErrorKind::shape: return "shape";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::nonconvergence: return "nonconvergence";
    case ErrorKind::precondition: return "precondition";
  }
  return "unknown";
}

}  // namespace gnsforge
