#include "gridpss/spectrum.hpp"

#include <cmath>

#include "gridpss/errors.hpp"

namespace gridpss {

using complexd = std::complex<double>;

double ExponentialSum::value(double t) const {
  complexd acc = constant;
  for (std::size_t k = 0; k < amplitudes.size(); ++k)
    acc += amplitudes[k] * std::exp(poles[k] * t);
  return acc.real();
}

complexd ExponentialSum::transform(complexd s) const {
  complexd acc = 0.0;
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    const complexd den = s - poles[k];
    if (std::abs(den) < 1e-12 * std::max(1.0, std::abs(poles[k])))
      throw PoleCollisionError("spectrum: evaluation point sits on a signal pole");
    acc += amplitudes[k] / den;
  }
  return acc;
}

namespace {

// The decaying sin/cos pair as two conjugate complex exponentials:
// (a sin(w t) + b cos(w t)) e^{-lam t} = Re[(b - i a) e^{(-lam + i w) t}].
void push_oscillation(ExponentialSum& sum, double a, double b, double lam, double w) {
  const complexd amp = 0.5 * complexd(b, -a);
  sum.amplitudes.push_back(amp);
  sum.poles.push_back(complexd(-lam, w));
  sum.amplitudes.push_back(std::conj(amp));
  sum.poles.push_back(complexd(-lam, -w));
}

void push_exponential(ExponentialSum& sum, double c, double t_const) {
  sum.amplitudes.push_back(c);
  sum.poles.push_back(complexd(-1.0 / t_const, 0.0));
}

}  // namespace

ExponentialSum to_exponential_sum(const CascadeCoefficients& c, StageName stage) {
  ExponentialSum sum;
  switch (stage) {
    case StageName::v_in:
      push_oscillation(sum, c.a0, c.b0, c.lambda, c.omega0);
      sum.constant = c.v_inf;
      return sum;
    case StageName::v1:
      push_oscillation(sum, c.a1, c.b1, c.lambda, c.omega0);
      push_exponential(sum, c.c1, c.t6);
      sum.constant = c.v_inf;
      return sum;
    case StageName::v2:
      push_oscillation(sum, c.a2, c.b2, c.lambda, c.omega0);
      push_exponential(sum, c.c2, c.t6);
      push_exponential(sum, c.d2, c.t5);
      return sum;
    case StageName::v3:
      push_oscillation(sum, c.a3, c.b3, c.lambda, c.omega0);
      push_exponential(sum, c.c3, c.t6);
      push_exponential(sum, c.d3, c.t5);
      push_exponential(sum, c.e3, c.t2);
      return sum;
    case StageName::v_pss:
      push_oscillation(sum, c.a4, c.b4, c.lambda, c.omega0);
      push_exponential(sum, c.c4, c.t6);
      push_exponential(sum, c.d4, c.t5);
      push_exponential(sum, c.e4, c.t2);
      push_exponential(sum, c.f4, c.t4);
      return sum;
    case StageName::v_r:
      push_oscillation(sum, c.a_r, c.b_r, c.lambda, c.omega0);
      push_exponential(sum, c.c_r, c.t6);
      push_exponential(sum, c.d_r, c.t5);
      push_exponential(sum, c.e_r, c.t2);
      push_exponential(sum, c.f_r, c.t4);
      sum.constant = c.s_r;
      return sum;
    case StageName::v_out:
      push_oscillation(sum, c.a_out, c.b_out, c.lambda, c.omega0);
      push_exponential(sum, c.c_out, c.t6);
      push_exponential(sum, c.d_out, c.t5);
      push_exponential(sum, c.e_out, c.t2);
      push_exponential(sum, c.f_out, c.t4);
      push_exponential(sum, c.g_out, c.t_s);
      sum.constant = c.s_r;
      return sum;
  }
  throw ConfigError("to_exponential_sum: unknown stage");
}

ExponentialSum to_exponential_sum(const ModalCascadeCoefficients& c, StageName stage) {
  ExponentialSum sum;
  const std::vector<complexd>* amps = nullptr;
  switch (stage) {
    case StageName::v_in: amps = &c.a0; break;
    case StageName::v1: amps = &c.a1; break;
    case StageName::v2: amps = &c.a2; break;
    case StageName::v3: amps = &c.a3; break;
    case StageName::v_pss: amps = &c.a4; break;
    case StageName::v_r: amps = &c.a_r; break;
    case StageName::v_out: amps = &c.a_out; break;
  }
  if (amps == nullptr) throw ConfigError("to_exponential_sum: unknown stage");
  sum.amplitudes = *amps;
  sum.poles = c.eigenvalues;
  switch (stage) {
    case StageName::v_in:
      sum.constant = c.dc;
      break;
    case StageName::v1:
      push_exponential(sum, c.c1, c.t6);
      sum.constant = c.dc;
      break;
    case StageName::v2:
      push_exponential(sum, c.c2, c.t6);
      push_exponential(sum, c.d2, c.t5);
      break;
    case StageName::v3:
      push_exponential(sum, c.c3, c.t6);
      push_exponential(sum, c.d3, c.t5);
      push_exponential(sum, c.e3, c.t2);
      break;
    case StageName::v_pss:
      push_exponential(sum, c.c4, c.t6);
      push_exponential(sum, c.d4, c.t5);
      push_exponential(sum, c.e4, c.t2);
      push_exponential(sum, c.f4, c.t4);
      break;
    case StageName::v_r:
      push_exponential(sum, c.c_r, c.t6);
      push_exponential(sum, c.d_r, c.t5);
      push_exponential(sum, c.e_r, c.t2);
      push_exponential(sum, c.f_r, c.t4);
      sum.constant = c.s_r;
      break;
    case StageName::v_out:
      push_exponential(sum, c.c_out, c.t6);
      push_exponential(sum, c.d_out, c.t5);
      push_exponential(sum, c.e_out, c.t2);
      push_exponential(sum, c.f_out, c.t4);
      push_exponential(sum, c.g_out, c.t_s);
      sum.constant = c.s_r;
      break;
  }
  return sum;
}

namespace {

std::vector<SpectrumSample> transform_on_grid(const ExponentialSum& sum,
                                              const std::vector<double>& omega_grid) {
  std::vector<SpectrumSample> out(omega_grid.size());
  const auto n = static_cast<std::ptrdiff_t>(omega_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = {omega_grid[k], sum.transform(complexd(0.0, omega_grid[k]))};
  }
  return out;
}

}  // namespace

std::vector<SpectrumSample> spectrum_closed_form(const CascadeCoefficients& coeffs,
                                                 StageName stage,
                                                 const std::vector<double>& omega_grid) {
  return transform_on_grid(to_exponential_sum(coeffs, stage), omega_grid);
}

std::vector<SpectrumSample> spectrum_closed_form(const ModalCascadeCoefficients& coeffs,
                                                 StageName stage,
                                                 const std::vector<double>& omega_grid) {
  return transform_on_grid(to_exponential_sum(coeffs, stage), omega_grid);
}

namespace {

complexd trapezoid_transform(const SignalTrace& trace, double omega) {
  // One serial pass per omega keeps results independent of thread count.
  const double dt = trace.dt;
  complexd acc = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.dt * static_cast<double>(k) + trace.t0;
    const double weight = (k == 0 || k + 1 == trace.size()) ? 0.5 : 1.0;
    acc += weight * trace.samples[k] * std::exp(complexd(0.0, -omega * t));
  }
  return acc * dt;
}

}  // namespace

std::vector<SpectrumSample> spectrum_numeric_serial(const SignalTrace& trace,
                                                    const std::vector<double>& omega_grid) {
  trace.validate("spectrum trace");
  std::vector<SpectrumSample> out(omega_grid.size());
  for (std::size_t i = 0; i < omega_grid.size(); ++i)
    out[i] = {omega_grid[i], trapezoid_transform(trace, omega_grid[i])};
  return out;
}

std::vector<SpectrumSample> spectrum_numeric(const SignalTrace& trace,
                                             const std::vector<double>& omega_grid) {
  trace.validate("spectrum trace");
  std::vector<SpectrumSample> out(omega_grid.size());
  const auto n = static_cast<std::ptrdiff_t>(omega_grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = {omega_grid[k], trapezoid_transform(trace, omega_grid[k])};
  }
  return out;
}

bool trace_decayed(const SignalTrace& trace) {
  if (trace.samples.empty()) return true;
  const double p = trace.peak();
  return std::abs(trace.samples.back()) <= 1e-6 * p;
}

std::vector<double> linear_omega_grid(double omega_min, double omega_max, int points) {
  if (points < 2) throw ConfigError("omega grid: needs at least 2 points");
  if (!(omega_min > 0.0) || !(omega_max > omega_min))
    throw ConfigError("omega grid: need 0 < omega_min < omega_max");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = omega_min + (omega_max - omega_min) * static_cast<double>(i) / (points - 1);
  return grid;
}

}  // namespace gridpss
