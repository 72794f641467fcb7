#include "gridpss/signal_trace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridpss/errors.hpp"

namespace gridpss {

double SignalTrace::peak() const {
  double p = 0.0;
  for (double v : samples) p = std::max(p, std::abs(v));
  return p;
}

double SignalTrace::interpolate(double t) const {
  if (samples.empty()) return 0.0;
  if (t <= t0) return samples.front();
  const double pos = (t - t0) / dt;
  const auto i = static_cast<std::size_t>(pos);
  if (i + 1 >= samples.size()) return samples.back();
  const double w = pos - static_cast<double>(i);
  return samples[i] * (1.0 - w) + samples[i + 1] * w;
}

SignalTrace SignalTrace::decimated(std::size_t stride) const {
  if (stride == 0) throw ConfigError("decimation stride must be positive");
  SignalTrace out;
  out.t0 = t0;
  out.dt = dt * static_cast<double>(stride);
  out.samples.reserve(samples.size() / stride + 1);
  for (std::size_t i = 0; i < samples.size(); i += stride) out.samples.push_back(samples[i]);
  return out;
}

SignalTrace SignalTrace::scaled(double a, double b) const {
  SignalTrace out = *this;
  for (double& v : out.samples) v = a * v + b;
  return out;
}

void SignalTrace::validate(const char* what) const {
  const std::string name = what;
  if (!(dt > 0.0)) throw ConfigError(name + ": dt must be > 0");
  if (samples.empty()) throw ConfigError(name + ": samples must be non-empty");
  for (double v : samples) {
    if (!std::isfinite(v)) throw ConfigError(name + ": samples must be finite");
  }
}

std::vector<double> uniform_grid(double t0, double horizon, double dt) {
  if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
  const auto n = static_cast<std::size_t>(std::floor(horizon / dt + 0.5)) + 1;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = t0 + dt * static_cast<double>(i);
  return grid;
}

}  // namespace gridpss
