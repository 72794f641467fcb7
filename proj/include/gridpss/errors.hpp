#ifndef GRIDPSS_ERRORS_HPP
#define GRIDPSS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gridpss {

// Bad scenario/parameter input. CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (regime, pole collision, divergence, ...). Exit code 2.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested operating point is outside the oscillatory regime of the
// small-signal formulas (overdamped or past pull-out).
class RegimeError : public NumericError {
 public:
  explicit RegimeError(const std::string& msg) : NumericError(msg) {}
};

// |tau_r| >= xi: no stable rotor-angle equilibrium exists.
class SynchronismError : public NumericError {
 public:
  explicit SynchronismError(const std::string& msg) : NumericError(msg) {}
};

// A signal pole coincides with a cascade pole (or two cascade time
// constants collide), so the simple-pole closed forms do not apply.
class PoleCollisionError : public NumericError {
 public:
  explicit PoleCollisionError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace gridpss

#endif
