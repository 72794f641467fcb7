#ifndef GRIDPSS_LINEAR_RESPONSE_HPP
#define GRIDPSS_LINEAR_RESPONSE_HPP

#include <vector>

#include "gridpss/grid_dynamics.hpp"
#include "gridpss/stabilizer.hpp"

namespace gridpss {

// Input template a0 e^{-lambda t} sin(w0 t) + b0 e^{-lambda t} cos(w0 t) + v_inf.
struct DampedOscillation {
  double a0 = 0.0;
  double b0 = 0.0;
  double v_inf = 0.0;
  double lambda = 0.0;   // 1/s
  double omega0 = 1.0;   // rad/s

  double value(double t) const;
  // Signal level just before the event (and at t = 0+).
  double initial_level() const { return b0 + v_inf; }
  void validate() const;
};

struct LinearMode {
  double lambda;
  double omega0;
};

// Decay rate and frequency of small oscillations about delta_final.
// Throws RegimeError outside the underdamped regime.
LinearMode linear_mode(const ReducedParams& reduced, double delta_final);

// Rotor speed deviation -delta_dot as a damped oscillation.
DampedOscillation input_rotor_speed_deviation(const ReducedParams& reduced,
                                              double delta_initial, double delta_final);

// Bus frequency deviation: speed deviation scaled by p/2.
DampedOscillation input_frequency_deviation(const MachineParams& machine,
                                            const ReducedParams& reduced,
                                            double delta_initial, double delta_final);

// Electrical power output P_max sin(delta) linearized about delta_final.
DampedOscillation input_electrical_power(const MachineParams& machine,
                                         const ReducedParams& reduced,
                                         double delta_initial, double delta_final);

// Closed-form coefficients of every stage response to a DampedOscillation.
// Each stage is the sum of the decaying sin/cos pair, one exponential per
// upstream pole, and (V1 only) the v_inf constant / (AVR on) the s_r constant.
struct CascadeCoefficients {
  double lambda = 0.0;
  double omega0 = 1.0;
  double v_inf = 0.0;

  double a0 = 0.0, b0 = 0.0;
  double a1 = 0.0, b1 = 0.0, c1 = 0.0;
  double a2 = 0.0, b2 = 0.0, c2 = 0.0, d2 = 0.0;
  double a3 = 0.0, b3 = 0.0, c3 = 0.0, d3 = 0.0, e3 = 0.0;
  double a4 = 0.0, b4 = 0.0, c4 = 0.0, d4 = 0.0, e4 = 0.0, f4 = 0.0;
  double a_r = 0.0, b_r = 0.0, c_r = 0.0, d_r = 0.0, e_r = 0.0, f_r = 0.0, s_r = 0.0;
  double a_out = 0.0, b_out = 0.0, c_out = 0.0, d_out = 0.0, e_out = 0.0, f_out = 0.0,
         g_out = 0.0;

  // Time constants tying each exponential to its coefficient.
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0, t_n = 0.0, t_s = 0.0;
};

// Push the oscillation through the PSS1A + AVR cascade analytically.
CascadeCoefficients cascade_linear(const DampedOscillation& input, const StabilizerParams& pss);

// Closed-form value of the named stage at time t >= 0.
double eval_linear(const CascadeCoefficients& coeffs, StageName stage, double t);

// eval_linear mapped over the grid; the parallel kernel and its serial
// reference produce identical samples.
SignalTrace sample_linear(const CascadeCoefficients& coeffs, StageName stage, double t0,
                          double horizon, double dt);
SignalTrace sample_linear_serial(const CascadeCoefficients& coeffs, StageName stage, double t0,
                                 double horizon, double dt);

}  // namespace gridpss

#endif
