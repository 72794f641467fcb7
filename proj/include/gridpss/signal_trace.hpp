#ifndef GRIDPSS_SIGNAL_TRACE_HPP
#define GRIDPSS_SIGNAL_TRACE_HPP

#include <cstddef>
#include <vector>

namespace gridpss {

// Uniformly sampled real-valued signal.
struct SignalTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> samples;

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double end_time() const { return samples.empty() ? t0 : time(samples.size() - 1); }

  double operator[](std::size_t i) const { return samples[i]; }

  // Largest |sample|.
  double peak() const;

  // Linear interpolation; clamps outside [t0, end_time()].
  double interpolate(double t) const;

  // Every n-th sample, keeping t0.
  SignalTrace decimated(std::size_t stride) const;

  // Pointwise a*this + b.
  SignalTrace scaled(double a, double b = 0.0) const;

  // Throws ConfigError unless dt > 0, samples non-empty and all finite.
  void validate(const char* what) const;
};

// Evenly spaced grid times t0, t0+dt, ..., covering [t0, t0+horizon].
std::vector<double> uniform_grid(double t0, double horizon, double dt);

}  // namespace gridpss

#endif
