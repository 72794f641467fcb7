#ifndef GRIDPSS_SPECTRUM_HPP
#define GRIDPSS_SPECTRUM_HPP

#include <complex>
#include <vector>

#include "gridpss/linear_response.hpp"
#include "gridpss/modal_response.hpp"
#include "gridpss/signal_trace.hpp"

namespace gridpss {

// One-sided Fourier transform sample: value = integral_0^inf V(t) e^{-i w t} dt.
struct SpectrumSample {
  double omega;
  std::complex<double> value;
};

// A stage signal flattened to complex exponential terms a e^{p t}; the
// additive constant (v_inf, s_r or the DC mode) is kept separately since
// it only contributes a distributional part at omega = 0.
struct ExponentialSum {
  std::vector<std::complex<double>> amplitudes;
  std::vector<std::complex<double>> poles;
  double constant = 0.0;

  double value(double t) const;
  std::complex<double> transform(std::complex<double> s) const;  // constant excluded
};

ExponentialSum to_exponential_sum(const CascadeCoefficients& coeffs, StageName stage);
ExponentialSum to_exponential_sum(const ModalCascadeCoefficients& coeffs, StageName stage);

// Exact transform of the decaying-exponential part of the stage signal.
std::vector<SpectrumSample> spectrum_closed_form(const CascadeCoefficients& coeffs,
                                                 StageName stage,
                                                 const std::vector<double>& omega_grid);
std::vector<SpectrumSample> spectrum_closed_form(const ModalCascadeCoefficients& coeffs,
                                                 StageName stage,
                                                 const std::vector<double>& omega_grid);

// Trapezoidal quadrature of the transform definition over the trace span.
// The trace should have decayed by its end; see trace_decayed.
std::vector<SpectrumSample> spectrum_numeric(const SignalTrace& trace,
                                             const std::vector<double>& omega_grid);
std::vector<SpectrumSample> spectrum_numeric_serial(const SignalTrace& trace,
                                                    const std::vector<double>& omega_grid);

// True when the tail of the trace is below 1e-6 of its peak.
bool trace_decayed(const SignalTrace& trace);

// Linearly spaced omega grid.
std::vector<double> linear_omega_grid(double omega_min, double omega_max, int points);

}  // namespace gridpss

#endif
