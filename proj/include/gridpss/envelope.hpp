#ifndef GRIDPSS_ENVELOPE_HPP
#define GRIDPSS_ENVELOPE_HPP

#include <complex>
#include <vector>

#include "gridpss/spectrum.hpp"
#include "gridpss/stabilizer.hpp"

namespace gridpss {

// Sine-enveloped oscillation packet A sin(w_e t) sin(w_0 t) supported on
// [0, pi/w_e]; models a rapid succession of ROCOF events.
struct EnvelopeInput {
  double amplitude = 1.0;
  double omega_envelope = 0.3;  // rad/s
  double omega_carrier = 5.2;   // rad/s

  double support_end() const { return 3.14159265358979323846 / omega_envelope; }
  void validate() const;
};

// Packet value at t; identically 0 outside the support.
double envelope_value(const EnvelopeInput& input, double t);

// Closed-form Laplace image of the packet. Throws PoleCollisionError when
// s is a root of the denominator.
std::complex<double> envelope_laplace(const EnvelopeInput& input, std::complex<double> s);

struct EnvelopeResponse {
  SignalTrace v_in;
  SignalTrace v_pss;
  SignalTrace v_out;
  std::vector<SpectrumSample> spectrum_in;   // closed-form image of the packet
  std::vector<SpectrumSample> spectrum_pss;  // H_pss(iw) * image
  std::vector<SpectrumSample> spectrum_out;  // H_total(iw) * image
};

// Time-domain response through the cascade plus the frequency-domain
// product route on the supplied omega grid.
EnvelopeResponse envelope_response(const EnvelopeInput& input, const StabilizerParams& pss,
                                   double horizon, double dt,
                                   const std::vector<double>& omega_grid);

}  // namespace gridpss

#endif
