#include "gridpss/envelope.hpp"

#include <cmath>

#include "gridpss/errors.hpp"

namespace gridpss {

using complexd = std::complex<double>;

void EnvelopeInput::validate() const {
  if (!std::isfinite(amplitude)) throw ConfigError("envelope.amplitude: must be finite");
  if (!(omega_envelope > 0.0)) throw ConfigError("envelope.omega_envelope: must be > 0");
  if (!(omega_carrier > omega_envelope))
    throw ConfigError("envelope.omega_carrier: must exceed omega_envelope");
}

double envelope_value(const EnvelopeInput& input, double t) {
  if (t < 0.0 || t > input.support_end()) return 0.0;
  return input.amplitude * std::sin(input.omega_envelope * t) * std::sin(input.omega_carrier * t);
}

std::complex<double> envelope_laplace(const EnvelopeInput& input, std::complex<double> s) {
  input.validate();
  const double we = input.omega_envelope, w0 = input.omega_carrier;
  const complexd den =
      (s * s + (w0 - we) * (w0 - we)) * (s * s + (w0 + we) * (w0 + we));
  if (std::abs(den) < 1e-12 * std::pow(w0 + we, 4))
    throw PoleCollisionError("envelope_laplace: s is a root of the denominator");
  const double phase = 3.14159265358979323846 * w0 / we;  // omega_0 T with T = pi/omega_e
  const complexd tail = std::exp(-s * input.support_end());
  const complexd num = 2.0 * s * we * w0 * (1.0 + std::cos(phase) * tail) +
                       we * (s * s + we * we - w0 * w0) * std::sin(phase) * tail;
  return input.amplitude * num / den;
}

EnvelopeResponse envelope_response(const EnvelopeInput& input, const StabilizerParams& pss,
                                   double horizon, double dt,
                                   const std::vector<double>& omega_grid) {
  input.validate();
  pss.validate();
  if (!(horizon > input.support_end()))
    throw ConfigError("run.horizon: must extend past the envelope support pi/omega_e");

  SignalTrace v_in;
  v_in.t0 = 0.0;
  v_in.dt = dt;
  const auto grid = uniform_grid(0.0, horizon, dt);
  v_in.samples.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v_in.samples[i] = envelope_value(input, grid[i]);

  const BlockCascade full = BlockCascade::pss1a_with_avr(pss);
  const CascadeSimResult sim = simulate_cascade(full, v_in, 0.0);

  EnvelopeResponse out;
  out.v_in = std::move(v_in);
  out.v_pss = sim.stage(StageName::v_pss);
  out.v_out = sim.stage(StageName::v_out);

  const BlockCascade pss_only = BlockCascade::pss1a(pss);
  out.spectrum_in.reserve(omega_grid.size());
  out.spectrum_pss.reserve(omega_grid.size());
  out.spectrum_out.reserve(omega_grid.size());
  for (double w : omega_grid) {
    const complexd s(0.0, w);
    const complexd image = envelope_laplace(input, s);
    out.spectrum_in.push_back({w, image});
    out.spectrum_pss.push_back({w, transfer_at(pss_only, s) * image});
    out.spectrum_out.push_back({w, transfer_at(full, s) * image});
  }
  return out;
}

}  // namespace gridpss
