#include "gridpss/grid_dynamics.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

#include "gridpss/errors.hpp"

namespace gridpss {

namespace {

namespace odeint = boost::numeric::odeint;

// Dense-output Dormand-Prince 4(5), evaluated at the requested times
// (ascending, all >= t_begin).
template <std::size_t N, class System, class Observer>
void integrate_at_times(System system, std::array<double, N> state, double t_begin,
                        const std::vector<double>& times, double dt_hint,
                        const IntegratorOptions& opts, Observer observe) {
  using state_type = std::array<double, N>;
  auto stepper = odeint::make_dense_output(opts.abs_tol, opts.rel_tol,
                                           odeint::runge_kutta_dopri5<state_type>());
  stepper.initialize(state, t_begin, dt_hint);
  for (double t : times) {
    if (t <= t_begin) {
      observe(state, t);
      continue;
    }
    while (stepper.current_time() < t) {
      stepper.do_step(system);
      for (double v : stepper.current_state()) {
        if (!std::isfinite(v)) throw NumericError("integration diverged (non-finite state)");
      }
    }
    state_type sampled;
    stepper.calc_state(t, sampled);
    observe(sampled, t);
  }
}

}  // namespace

const char* to_string(Model m) { return m == Model::cage ? "cage" : "kuramoto"; }

InertiaRatio InertiaRatio::finite(double x) {
  if (!(x > 0.0)) throw ConfigError("inertia ratio x must be > 0");
  return {x, false};
}

void MachineParams::validate() const {
  if (!(j_gen > 0.0)) throw ConfigError("machine.j_gen: must be > 0");
  if (!grid_inertia_infinite && !(j_grid > 0.0))
    throw ConfigError("machine.j_grid: must be > 0 or flagged infinite");
  if (!(tau_elmax > 0.0)) throw ConfigError("machine.tau_elmax: must be > 0");
  if (poles < 2 || poles % 2 != 0) throw ConfigError("machine.poles: must be even and >= 2");
  if (k_d && *k_d < 0.0) throw ConfigError("machine.k_d: must be >= 0");
  if (k_kuramoto_gen && *k_kuramoto_gen < 0.0)
    throw ConfigError("machine.k_kuramoto_gen: must be >= 0");
  if (k_kuramoto_grid && *k_kuramoto_grid < 0.0)
    throw ConfigError("machine.k_kuramoto_grid: must be >= 0");
}

void ReducedParams::validate() const {
  if (beta < 0.0) throw ConfigError("reduced.beta: must be >= 0");
  if (!(xi > 0.0)) throw ConfigError("reduced.xi: must be > 0");
  if (!std::isfinite(tau_r)) throw ConfigError("reduced.tau_r: must be finite");
}

double TransientEvent::consistent_tau_r() const {
  return xi_initial * std::sin(delta_initial);
}

void TransientEvent::validate() const {
  if (!(xi_initial > 0.0)) throw ConfigError("event.xi_initial: must be > 0");
  if (!(xi_final > 0.0)) throw ConfigError("event.xi_final: must be > 0");
  if (!(std::abs(consistent_tau_r()) < xi_final))
    throw SynchronismError("event: |tau_r| >= xi_final, synchronism lost after the step");
  if (event_time < 0.0) throw ConfigError("event.event_time: must be >= 0");
}

ReducedParams reduce_params(const MachineParams& machine, Model model) {
  machine.validate();
  double k_gen, k_grid;
  if (model == Model::cage) {
    if (!machine.k_d) throw ConfigError("machine.k_d: required by the cage model");
    k_gen = k_grid = *machine.k_d;
  } else {
    if (!machine.k_kuramoto_gen || !machine.k_kuramoto_grid)
      throw ConfigError("machine.k_kuramoto_gen/k_kuramoto_grid: required by the Kuramoto model");
    k_gen = *machine.k_kuramoto_gen;
    k_grid = *machine.k_kuramoto_grid;
  }

  ReducedParams r;
  r.beta_gen = k_gen / machine.j_gen;
  r.xi_gen = machine.tau_elmax / machine.j_gen;
  r.tau_bar_gen = machine.tau_gen / machine.j_gen;
  if (machine.grid_inertia_infinite) {
    r.x = InertiaRatio::inf();
    r.beta_grid = 0.0;
    r.xi_grid = 0.0;
    r.tau_bar_grid = 0.0;
  } else {
    r.x = InertiaRatio::finite(machine.j_grid / machine.j_gen);
    r.beta_grid = k_grid / machine.j_grid;
    r.xi_grid = machine.tau_elmax / machine.j_grid;
    r.tau_bar_grid = machine.tau_grid / machine.j_grid;
  }
  r.beta = r.beta_gen + r.beta_grid;
  r.xi = r.xi_gen + r.xi_grid;
  r.tau_r = r.tau_bar_grid - r.tau_bar_gen;
  r.validate();
  return r;
}

ReducedParams reduced_from_coefficients(double beta, double xi, double tau_r, InertiaRatio x) {
  ReducedParams r;
  r.beta = beta;
  r.xi = xi;
  r.tau_r = tau_r;
  r.x = x;
  const double f = x.reduction_factor();  // (x+1)/x
  r.xi_gen = xi / f;
  r.xi_grid = xi - r.xi_gen;
  r.beta_gen = beta / f;
  r.beta_grid = beta - r.beta_gen;
  // Zero-net-torque split: tau_bar_grid = tau_r/(x+1), tau_bar_gen picks up the rest.
  if (x.infinite) {
    r.tau_bar_grid = 0.0;
    r.tau_bar_gen = -tau_r;
  } else {
    r.tau_bar_grid = tau_r / (x.value + 1.0);
    r.tau_bar_gen = r.tau_bar_grid - tau_r;
  }
  r.validate();
  return r;
}

double equilibrium_angle(const ReducedParams& reduced) {
  reduced.validate();
  if (!(std::abs(reduced.tau_r) < reduced.xi))
    throw SynchronismError("|tau_r| >= xi: no stable equilibrium (loss of synchronism)");
  return std::asin(reduced.tau_r / reduced.xi);
}

double rotor_angle_rhs(double delta, double delta_dot, const ReducedParams& reduced) {
  return reduced.tau_r - reduced.beta * delta_dot - reduced.xi * std::sin(delta);
}

RotorTrace integrate_rotor(const TransientEvent& event, const ReducedParams& reduced,
                           double horizon, double dt, const IntegratorOptions& opts) {
  event.validate();
  reduced.validate();
  if (!(dt > 0.0)) throw ConfigError("run.dt: must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("run.horizon: must be > 0");
  const double tau_r = event.consistent_tau_r();
  if (std::abs(tau_r - reduced.tau_r) > 1e-8 * std::max(1.0, std::abs(tau_r)))
    throw ConfigError(
        "event.delta_initial is not the pre-event equilibrium under xi_initial "
        "(tau_r mismatch)");

  RotorTrace out;
  out.delta.t0 = out.delta_dot.t0 = 0.0;
  out.delta.dt = out.delta_dot.dt = dt;
  const auto grid = uniform_grid(0.0, horizon, dt);
  out.delta.samples.reserve(grid.size());
  out.delta_dot.samples.reserve(grid.size());

  // Hold the pre-event equilibrium on samples before the step.
  std::size_t start = 0;
  while (start < grid.size() && grid[start] < event.event_time) {
    out.delta.samples.push_back(event.delta_initial);
    out.delta_dot.samples.push_back(0.0);
    ++start;
  }
  if (start == grid.size()) return out;

  ReducedParams post = reduced;
  post.xi = event.xi_final;

  auto rhs = [&post](const std::array<double, 2>& y, std::array<double, 2>& dydt, double) {
    dydt[0] = y[1];
    dydt[1] = rotor_angle_rhs(y[0], y[1], post);
  };
  std::array<double, 2> y0{event.delta_initial, 0.0};
  const std::vector<double> times(grid.begin() + static_cast<std::ptrdiff_t>(start), grid.end());
  integrate_at_times<2>(rhs, y0, event.event_time, times, dt, opts,
                        [&](const std::array<double, 2>& y, double /*t*/) {
                          out.delta.samples.push_back(y[0]);
                          out.delta_dot.samples.push_back(y[1]);
                        });
  return out;
}

std::vector<TwoBodyState> integrate_two_body(const MachineParams& machine, Model model,
                                             const TwoBodyState& initial, double horizon,
                                             double dt, const IntegratorOptions& opts) {
  machine.validate();
  if (machine.grid_inertia_infinite)
    throw ConfigError("two-body integration requires finite inertias");
  if (model == Model::cage && !machine.k_d)
    throw ConfigError("machine.k_d: required by the cage model");
  if (model == Model::kuramoto && (!machine.k_kuramoto_gen || !machine.k_kuramoto_grid))
    throw ConfigError("machine.k_kuramoto_gen/k_kuramoto_grid: required by the Kuramoto model");
  for (double v : {initial.theta_gen, initial.theta_grid, initial.theta_gen_dot,
                   initial.theta_grid_dot})
    if (!std::isfinite(v)) throw ConfigError("initial two-body state must be finite");

  const double omega = machine.omega_base;
  const double j_gen = machine.j_gen, j_grid = machine.j_grid;
  const double tau_el = machine.tau_elmax;
  const double tau_gen = machine.tau_gen, tau_grid = machine.tau_grid;
  const bool cage = model == Model::cage;
  const double k_gen = cage ? *machine.k_d : *machine.k_kuramoto_gen;
  const double k_grid = cage ? *machine.k_d : *machine.k_kuramoto_grid;

  // Co-rotating frame: phi_i = theta_i - Omega t, psi_i = theta_i' - Omega.
  // Both damping laws and the coupling depend only on frame-invariant terms.
  auto rhs = [&](const std::array<double, 4>& y, std::array<double, 4>& dydt, double) {
    const double phi_grid = y[0], phi_gen = y[1], psi_grid = y[2], psi_gen = y[3];
    const double coupling = tau_el * std::sin(phi_grid - phi_gen);
    const double damp_grid = cage ? k_grid * (psi_grid - psi_gen) : k_grid * psi_grid;
    const double damp_gen = cage ? k_gen * (psi_gen - psi_grid) : k_gen * psi_gen;
    dydt[0] = psi_grid;
    dydt[1] = psi_gen;
    dydt[2] = (tau_grid - damp_grid - coupling) / j_grid;
    dydt[3] = (tau_gen - damp_gen + coupling) / j_gen;
  };

  std::array<double, 4> y0{initial.theta_grid - omega * initial.t,
                           initial.theta_gen - omega * initial.t,
                           initial.theta_grid_dot - omega, initial.theta_gen_dot - omega};
  std::vector<TwoBodyState> sequence;
  const auto times = uniform_grid(initial.t, horizon, dt);
  integrate_at_times<4>(rhs, y0, initial.t, times, dt, opts,
                        [&](const std::array<double, 4>& y, double t) {
                          TwoBodyState s;
                          s.t = t;
                          s.theta_grid = y[0] + omega * t;
                          s.theta_gen = y[1] + omega * t;
                          s.theta_grid_dot = y[2] + omega;
                          s.theta_gen_dot = y[3] + omega;
                          sequence.push_back(s);
                        });
  return sequence;
}

SignalTrace rotor_velocity(const SignalTrace& delta_dot, InertiaRatio x, double omega_base) {
  delta_dot.validate("delta_dot");
  return delta_dot.scaled(-x.weight(), omega_base);
}

SignalTrace bus_frequency_deviation(const SignalTrace& delta_dot, int poles, InertiaRatio x) {
  delta_dot.validate("delta_dot");
  if (poles < 2) throw ConfigError("poles: must be >= 2");
  return delta_dot.scaled(-0.5 * static_cast<double>(poles) * x.weight());
}

TwoBodyState two_body_equilibrium_state(const MachineParams& machine, double delta_initial) {
  TwoBodyState s;
  s.t = 0.0;
  s.theta_grid = delta_initial;
  s.theta_gen = 0.0;
  s.theta_grid_dot = machine.omega_base;
  s.theta_gen_dot = machine.omega_base;
  return s;
}

MachineParams machine_from_reduced(double xi, double beta, double tau_r, InertiaRatio x,
                                   Model model, bool beta_is_combined, double omega_base,
                                   int poles, double p_max) {
  if (!(xi > 0.0)) throw ConfigError("reduced.xi: must be > 0");
  if (beta < 0.0) throw ConfigError("reduced.beta: must be >= 0");
  MachineParams m;
  m.j_gen = 1.0;
  m.grid_inertia_infinite = x.infinite;
  m.j_grid = x.infinite ? 1.0 : x.value;
  m.omega_base = omega_base;
  m.poles = poles;
  m.p_max = p_max;
  // tau_elmax so the combined coupling equals xi: xi = tau_elmax (x+1)/x.
  m.tau_elmax = xi / x.reduction_factor();
  // Equal per-body damping constants; combined beta = (K/J_gen)(x+1)/x.
  const double k = beta_is_combined ? beta / x.reduction_factor() : beta;
  if (model == Model::cage) {
    m.k_d = k;
  } else {
    m.k_kuramoto_gen = k;
    m.k_kuramoto_grid = k;
  }
  // Zero-net-torque split reproducing tau_r and per-body equilibrium.
  if (x.infinite) {
    m.tau_gen = -tau_r * m.j_gen;
    m.tau_grid = 0.0;
  } else {
    m.tau_grid = tau_r * m.j_grid / (x.value + 1.0);
    m.tau_gen = -tau_r * m.j_gen * x.value / (x.value + 1.0);
  }
  m.validate();
  return m;
}

}  // namespace gridpss
