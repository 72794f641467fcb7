#include "gridpss/linear_response.hpp"

#include <cmath>
#include <string>

#include "gridpss/errors.hpp"

namespace gridpss {

double DampedOscillation::value(double t) const {
  return (a0 * std::sin(omega0 * t) + b0 * std::cos(omega0 * t)) * std::exp(-lambda * t) + v_inf;
}

void DampedOscillation::validate() const {
  if (lambda < 0.0) throw ConfigError("input.lambda: must be >= 0");
  if (!(omega0 > 0.0)) throw ConfigError("input.omega0: must be > 0");
  for (double v : {a0, b0, v_inf, lambda, omega0})
    if (!std::isfinite(v)) throw ConfigError("input oscillation fields must be finite");
}

LinearMode linear_mode(const ReducedParams& reduced, double delta_final) {
  reduced.validate();
  const double restoring = reduced.xi * std::cos(delta_final);
  const double disc = restoring - 0.25 * reduced.beta * reduced.beta;
  if (!(disc > 0.0))
    throw RegimeError("linear_mode: not underdamped (xi cos(delta_II) <= beta^2/4)");
  return {0.5 * reduced.beta, std::sqrt(disc)};
}

DampedOscillation input_rotor_speed_deviation(const ReducedParams& reduced,
                                              double delta_initial, double delta_final) {
  const LinearMode mode = linear_mode(reduced, delta_final);
  DampedOscillation osc;
  osc.lambda = mode.lambda;
  osc.omega0 = mode.omega0;
  osc.a0 = reduced.xi * (delta_initial - delta_final) * std::cos(delta_final) / mode.omega0;
  osc.b0 = 0.0;
  osc.v_inf = 0.0;
  return osc;
}

DampedOscillation input_frequency_deviation(const MachineParams& machine,
                                            const ReducedParams& reduced,
                                            double delta_initial, double delta_final) {
  DampedOscillation osc = input_rotor_speed_deviation(reduced, delta_initial, delta_final);
  const double scale = 0.5 * static_cast<double>(machine.poles);
  osc.a0 *= scale;
  osc.b0 *= scale;
  return osc;
}

DampedOscillation input_electrical_power(const MachineParams& machine,
                                         const ReducedParams& reduced,
                                         double delta_initial, double delta_final) {
  const LinearMode mode = linear_mode(reduced, delta_final);
  const double swing = machine.p_max * (delta_initial - delta_final) * std::cos(delta_final);
  DampedOscillation osc;
  osc.lambda = mode.lambda;
  osc.omega0 = mode.omega0;
  osc.a0 = swing * 0.5 * reduced.beta / mode.omega0;
  osc.b0 = swing;
  osc.v_inf = machine.p_max * std::sin(delta_final);
  return osc;
}

namespace {

// Rejects the (never resonant, but excluded by contract) case of the input
// pole sitting on a filter pole.
void check_input_pole(double lambda, double t_i, const char* name) {
  if (std::abs(lambda * t_i - 1.0) < 1e-9)
    throw PoleCollisionError(std::string("cascade_linear: input decay rate collides with 1/") +
                             name);
}

}  // namespace

CascadeCoefficients cascade_linear(const DampedOscillation& input, const StabilizerParams& p) {
  input.validate();
  p.validate();
  for (auto [t, name] : {std::pair{p.t2, "T2"}, {p.t4, "T4"}, {p.t5, "T5"}, {p.t6, "T6"},
                         {p.t_s, "TS"}, {p.t_n, "TN"}})
    check_input_pole(input.lambda, t, name);

  const double lam = input.lambda, w = input.omega0;
  CascadeCoefficients c;
  c.lambda = lam;
  c.omega0 = w;
  c.v_inf = input.v_inf;
  c.a0 = input.a0;
  c.b0 = input.b0;
  c.t1 = p.t1; c.t2 = p.t2; c.t3 = p.t3; c.t4 = p.t4; c.t5 = p.t5; c.t6 = p.t6;
  c.t_n = p.t_n; c.t_s = p.t_s;

  // Low-pass 1/(1 + s T6).
  {
    const double d = (1.0 - lam * p.t6) * (1.0 - lam * p.t6) + w * p.t6 * w * p.t6;
    c.a1 = ((1.0 - lam * p.t6) * c.a0 + w * p.t6 * c.b0) / d;
    c.b1 = (-w * p.t6 * c.a0 + (1.0 - lam * p.t6) * c.b0) / d;
    c.c1 = c.b0 - c.b1;
  }
  // Washout K_S s T5/(1 + s T5).
  {
    const double d = (1.0 - lam * p.t5) * (1.0 - lam * p.t5) + w * p.t5 * w * p.t5;
    const double q = w * w * p.t5 - lam * (1.0 - lam * p.t5);
    c.a2 = p.k_s * p.t5 * (q * c.a1 - w * c.b1) / d;
    c.b2 = p.k_s * p.t5 * (w * c.a1 + q * c.b1) / d;
    c.c2 = c.c1 * p.k_s * p.t5 / (p.t5 - p.t6);
    c.d2 = -c.b2 - c.c2;
  }
  // Lead-lag (1 + s T1)/(1 + s T2).
  {
    const double d = (1.0 - lam * p.t2) * (1.0 - lam * p.t2) + w * p.t2 * w * p.t2;
    const double q = (1.0 - lam * p.t2) * (1.0 - lam * p.t1) + w * w * p.t2 * p.t1;
    c.a3 = (q * c.a2 + w * (p.t2 - p.t1) * c.b2) / d;
    c.b3 = (w * (p.t1 - p.t2) * c.a2 + q * c.b2) / d;
    c.c3 = c.c2 * (p.t1 - p.t6) / (p.t2 - p.t6);
    c.d3 = c.d2 * (p.t1 - p.t5) / (p.t2 - p.t5);
    c.e3 = -c.b3 - c.c3 - c.d3;
  }
  // Lead-lag (1 + s T3)/(1 + s T4).
  {
    const double d = (1.0 - lam * p.t4) * (1.0 - lam * p.t4) + w * p.t4 * w * p.t4;
    const double q = (1.0 - lam * p.t4) * (1.0 - lam * p.t3) + w * w * p.t4 * p.t3;
    c.a4 = (q * c.a3 + w * (p.t4 - p.t3) * c.b3) / d;
    c.b4 = (w * (p.t3 - p.t4) * c.a3 + q * c.b3) / d;
    c.c4 = c.c3 * (p.t3 - p.t6) / (p.t4 - p.t6);
    c.d4 = c.d3 * (p.t3 - p.t5) / (p.t4 - p.t5);
    c.e4 = c.e3 * (p.t3 - p.t2) / (p.t4 - p.t2);
    c.f4 = -c.b4 - c.c4 - c.d4 - c.e4;
  }
  // PI K_PR (1 + s TN)/(s TN).
  {
    const double d = p.t_n * (lam * lam + w * w);
    const double q = w * w * p.t_n - lam * (1.0 - lam * p.t_n);
    c.a_r = p.k_pr * (q * c.a4 + w * c.b4) / d;
    c.b_r = p.k_pr * (-w * c.a4 + q * c.b4) / d;
    c.c_r = p.k_pr * (1.0 - p.t6 / p.t_n) * c.c4;
    c.d_r = p.k_pr * (1.0 - p.t5 / p.t_n) * c.d4;
    c.e_r = p.k_pr * (1.0 - p.t2 / p.t_n) * c.e4;
    c.f_r = p.k_pr * (1.0 - p.t4 / p.t_n) * c.f4;
    c.s_r = -c.b_r - c.c_r - c.d_r - c.e_r - c.f_r;
  }
  // Bridge K_PS/(1 + s TS).
  {
    const double d = (1.0 - lam * p.t_s) * (1.0 - lam * p.t_s) + w * p.t_s * w * p.t_s;
    c.a_out = p.k_ps * ((1.0 - lam * p.t_s) * c.a_r + w * p.t_s * c.b_r) / d;
    c.b_out = p.k_ps * ((1.0 - lam * p.t_s) * c.b_r - w * p.t_s * c.a_r) / d;
    c.c_out = p.k_ps * c.c_r * p.t6 / (p.t6 - p.t_s);
    c.d_out = p.k_ps * c.d_r * p.t5 / (p.t5 - p.t_s);
    c.e_out = p.k_ps * c.e_r * p.t2 / (p.t2 - p.t_s);
    c.f_out = p.k_ps * c.f_r * p.t4 / (p.t4 - p.t_s);
    c.g_out = -c.b_out - c.c_out - c.d_out - c.e_out - c.f_out - c.s_r;
  }
  return c;
}

double eval_linear(const CascadeCoefficients& c, StageName stage, double t) {
  const double osc = std::exp(-c.lambda * t);
  const double s = std::sin(c.omega0 * t), cs = std::cos(c.omega0 * t);
  auto e = [t](double T) { return std::exp(-t / T); };
  switch (stage) {
    case StageName::v_in:
      return (c.a0 * s + c.b0 * cs) * osc + c.v_inf;
    case StageName::v1:
      return (c.a1 * s + c.b1 * cs) * osc + c.c1 * e(c.t6) + c.v_inf;
    case StageName::v2:
      return (c.a2 * s + c.b2 * cs) * osc + c.c2 * e(c.t6) + c.d2 * e(c.t5);
    case StageName::v3:
      return (c.a3 * s + c.b3 * cs) * osc + c.c3 * e(c.t6) + c.d3 * e(c.t5) + c.e3 * e(c.t2);
    case StageName::v_pss:
      return (c.a4 * s + c.b4 * cs) * osc + c.c4 * e(c.t6) + c.d4 * e(c.t5) + c.e4 * e(c.t2) +
             c.f4 * e(c.t4);
    case StageName::v_r:
      return (c.a_r * s + c.b_r * cs) * osc + c.c_r * e(c.t6) + c.d_r * e(c.t5) +
             c.e_r * e(c.t2) + c.f_r * e(c.t4) + c.s_r;
    case StageName::v_out:
      return (c.a_out * s + c.b_out * cs) * osc + c.c_out * e(c.t6) + c.d_out * e(c.t5) +
             c.e_out * e(c.t2) + c.f_out * e(c.t4) + c.g_out * e(c.t_s) + c.s_r;
  }
  throw ConfigError("eval_linear: unknown stage");
}

SignalTrace sample_linear_serial(const CascadeCoefficients& coeffs, StageName stage, double t0,
                                 double horizon, double dt) {
  const auto grid = uniform_grid(t0, horizon, dt);
  SignalTrace out;
  out.t0 = t0;
  out.dt = dt;
  out.samples.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.samples[i] = eval_linear(coeffs, stage, grid[i] - t0);
  return out;
}

SignalTrace sample_linear(const CascadeCoefficients& coeffs, StageName stage, double t0,
                          double horizon, double dt) {
  const auto grid = uniform_grid(t0, horizon, dt);
  SignalTrace out;
  out.t0 = t0;
  out.dt = dt;
  out.samples.resize(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out.samples[static_cast<std::size_t>(i)] =
        eval_linear(coeffs, stage, grid[static_cast<std::size_t>(i)] - t0);
  return out;
}

}  // namespace gridpss
