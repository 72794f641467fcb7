// Wall-time comparison of the OpenMP kernels against their serial
// reference implementations. Build and run:
//   cmake --build build --target bench_kernels && ./build/bench/bench_kernels

#include <omp.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>

#include "gridpss/linear_response.hpp"
#include "gridpss/modal_response.hpp"
#include "gridpss/spectrum.hpp"

using namespace gridpss;
using complexd = std::complex<double>;

namespace {

double time_of(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up
  const double t0 = omp_get_wtime();
  for (int i = 0; i < repeats; ++i) fn();
  return (omp_get_wtime() - t0) / repeats;
}

void report(const char* name, double serial_s, double parallel_s, double max_diff) {
  std::printf("%-28s serial %8.2f ms   omp %8.2f ms   speedup %4.2fx   max|diff| %g\n", name,
              serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s, max_diff);
}

ModalSum swing_like_modes() {
  ModalSum modes;
  for (int k = 1; k <= 12; ++k) {
    const complexd lam(-0.15 * k, 2.214 * k);
    const complexd a(0.8 / (k * k), -0.3 / k);
    modes.terms.push_back({a, lam});
    modes.terms.push_back({std::conj(a), std::conj(lam)});
  }
  return modes;
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());
  const StabilizerParams params;
  const double horizon = 200.0, dt = 1e-3;

  {
    const ModalCascadeCoefficients coeffs = cascade_modal(swing_like_modes(), params);
    SignalTrace par, ser;
    const double tp = time_of(
        [&] { par = sample_modal(coeffs, StageName::v_out, 0.0, horizon, dt); }, 3);
    const double ts = time_of(
        [&] { ser = sample_modal_serial(coeffs, StageName::v_out, 0.0, horizon, dt); }, 3);
    double diff = 0.0;
    for (std::size_t i = 0; i < par.size(); ++i)
      diff = std::max(diff, std::abs(par.samples[i] - ser.samples[i]));
    report("sample_modal (24 modes)", ts, tp, diff);
  }
  {
    DampedOscillation osc;
    osc.a0 = 1.0;
    osc.b0 = 0.2;
    osc.lambda = 0.15;
    osc.omega0 = 0.887;
    const CascadeCoefficients coeffs = cascade_linear(osc, params);
    SignalTrace par, ser;
    const double tp = time_of(
        [&] { par = sample_linear(coeffs, StageName::v_out, 0.0, horizon, dt); }, 5);
    const double ts = time_of(
        [&] { ser = sample_linear_serial(coeffs, StageName::v_out, 0.0, horizon, dt); }, 5);
    double diff = 0.0;
    for (std::size_t i = 0; i < par.size(); ++i)
      diff = std::max(diff, std::abs(par.samples[i] - ser.samples[i]));
    report("sample_linear", ts, tp, diff);
  }
  {
    SignalTrace trace;
    trace.t0 = 0.0;
    trace.dt = 1e-3;
    trace.samples.resize(100001);
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
      const double t = trace.dt * static_cast<double>(i);
      trace.samples[i] = std::exp(-0.15 * t) * std::sin(2.214 * t);
    }
    const auto grid = linear_omega_grid(0.05, 20.0, 200);
    std::vector<SpectrumSample> par, ser;
    const double tp = time_of([&] { par = spectrum_numeric(trace, grid); }, 3);
    const double ts = time_of([&] { ser = spectrum_numeric_serial(trace, grid); }, 3);
    double diff = 0.0;
    for (std::size_t i = 0; i < par.size(); ++i)
      diff = std::max(diff, std::abs(par[i].value - ser[i].value));
    report("spectrum_numeric (200 w)", ts, tp, diff);
  }
  return 0;
}
