#ifndef GRIDPSS_GRID_DYNAMICS_HPP
#define GRIDPSS_GRID_DYNAMICS_HPP

#include <optional>
#include <vector>

#include "gridpss/signal_trace.hpp"

namespace gridpss {

enum class Model { cage, kuramoto };

const char* to_string(Model m);

// Grid-to-generator inertia ratio x = J_grid / J_gen. The infinite-grid
// limit is an explicit flag so (x+1)/x never suffers precision loss.
struct InertiaRatio {
  double value = 1.0;
  bool infinite = false;

  static InertiaRatio finite(double x);
  static InertiaRatio inf() { return {0.0, true}; }

  // x/(x+1); 1 in the infinite limit.
  double weight() const { return infinite ? 1.0 : value / (value + 1.0); }
  // (x+1)/x; 1 in the infinite limit.
  double reduction_factor() const { return infinite ? 1.0 : (value + 1.0) / value; }
};

// Physical two-body constants. Damping coefficients are model-specific:
// k_d for the cage model, k_kuramoto_* for the Kuramoto-like one.
struct MachineParams {
  double j_gen = 1.0;           // kg m^2
  double j_grid = 1.0;          // kg m^2, ignored when grid_inertia_infinite
  bool grid_inertia_infinite = false;
  std::optional<double> k_d;    // N m s
  std::optional<double> k_kuramoto_gen;
  std::optional<double> k_kuramoto_grid;
  double tau_elmax = 1.0;       // N m
  double tau_gen = 0.0;         // N m
  double tau_grid = 0.0;        // N m
  double omega_base = 2.0 * 3.14159265358979323846 * 50.0;  // rad/s
  int poles = 2;
  double p_max = 1.0;           // W

  void validate() const;  // throws ConfigError
};

// Coefficients of the reduced rotor-angle equation
//   dd(t)'' + beta dd(t)' + xi sin dd(t) = tau_r.
struct ReducedParams {
  double beta = 0.0;    // 1/s
  double xi = 1.0;      // 1/s^2
  double tau_r = 0.0;   // 1/s^2
  InertiaRatio x;
  double beta_gen = 0.0, beta_grid = 0.0;
  double xi_gen = 0.0, xi_grid = 0.0;
  double tau_bar_gen = 0.0, tau_bar_grid = 0.0;

  void validate() const;
};

struct TwoBodyState {
  double theta_gen = 0.0;
  double theta_grid = 0.0;
  double theta_gen_dot = 0.0;
  double theta_grid_dot = 0.0;
  double t = 0.0;
};

// Step change of the coupling coefficient xi_initial -> xi_final at
// event_time; delta_initial is the pre-event equilibrium angle.
struct TransientEvent {
  double xi_initial = 1.0;
  double xi_final = 1.0;
  double delta_initial = 0.0;
  double event_time = 0.0;

  // tau_r implied by the pre-event equilibrium.
  double consistent_tau_r() const;
  void validate() const;
};

struct RotorTrace {
  SignalTrace delta;
  SignalTrace delta_dot;
};

struct IntegratorOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

// Reduce the two-body constants to the rotor-angle equation coefficients.
ReducedParams reduce_params(const MachineParams& machine, Model model);

// Reduced parameters straight from (beta, xi, tau_r, x); per-body values
// are split with the zero-net-torque convention used by the fixtures.
ReducedParams reduced_from_coefficients(double beta, double xi, double tau_r, InertiaRatio x);

// Stable equilibrium asin(tau_r/xi) on the principal branch.
double equilibrium_angle(const ReducedParams& reduced);

// tau_r - beta*delta_dot - xi*sin(delta).
double rotor_angle_rhs(double delta, double delta_dot, const ReducedParams& reduced);

// Integrate the rotor-angle equation through the xi step, starting at rest
// at delta_initial, sampled on a uniform dt grid over [0, horizon].
RotorTrace integrate_rotor(const TransientEvent& event, const ReducedParams& reduced,
                           double horizon, double dt, const IntegratorOptions& opts = {});

// Integrate the coupled two-body model (finite inertias only).
std::vector<TwoBodyState> integrate_two_body(const MachineParams& machine, Model model,
                                             const TwoBodyState& initial, double horizon,
                                             double dt, const IntegratorOptions& opts = {});

// Rotor angular speed Omega - x/(x+1) * delta_dot.
SignalTrace rotor_velocity(const SignalTrace& delta_dot, InertiaRatio x, double omega_base);

// Bus frequency deviation -(p/2) * x/(x+1) * delta_dot.
SignalTrace bus_frequency_deviation(const SignalTrace& delta_dot, int poles, InertiaRatio x);

// Pre-event two-body equilibrium for the standard fixture: both bodies at
// omega_base with relative angle delta_initial (theta_grid - theta_gen).
TwoBodyState two_body_equilibrium_state(const MachineParams& machine, double delta_initial);

// Physical fixture realizing given reduced coefficients: J_gen = 1,
// J_grid = x, equal per-body damping constants, torques split so the net
// applied torque vanishes. beta_is_combined selects whether beta names the
// combined damping of the rotor-angle equation or the per-generator value.
MachineParams machine_from_reduced(double xi, double beta, double tau_r, InertiaRatio x,
                                   Model model, bool beta_is_combined, double omega_base,
                                   int poles, double p_max);

}  // namespace gridpss

#endif
