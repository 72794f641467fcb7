#ifndef GRIDPSS_STABILIZER_HPP
#define GRIDPSS_STABILIZER_HPP

#include <complex>
#include <string>
#include <vector>

#include "gridpss/signal_trace.hpp"

namespace gridpss {

// Stage output names used across closed-form and simulated paths.
enum class StageName { v_in, v1, v2, v3, v_pss, v_r, v_out };

const char* to_string(StageName s);
StageName stage_from_string(const std::string& name);

// PSS1A + AVR time constants and gains.
struct StabilizerParams {
  double t1 = 0.4;
  double t2 = 1.0;
  double t3 = 0.1;
  double t4 = 0.05;
  double t5 = 2.0;
  double t6 = 0.028;
  double k_s = 0.8;
  double t_n = 2.0;
  double t_s = 1.8e-3;
  double k_pr = 1.0;
  double k_ps = 1.0;

  // Closed forms assume simple poles; denominator time constants closer
  // than this are rejected.
  static constexpr double collision_tolerance = 1e-9;

  void validate() const;  // throws ConfigError / PoleCollisionError
};

enum class StageKind {
  low_pass,  // gain / (1 + s T_den)
  washout,   // gain s T_den / (1 + s T_den)
  lead_lag,  // (1 + s T_num) / (1 + s T_den)
  pi,        // gain (1 + s T_den) / (s T_den)
};

struct Stage {
  StageKind kind;
  double gain;
  double t_num;  // lead-lag numerator constant, 0 otherwise
  double t_den;
  StageName output;
};

// Ordered first-order stages; the transfer function is their product.
struct BlockCascade {
  std::vector<Stage> stages;

  static BlockCascade pss1a(const StabilizerParams& p);
  static BlockCascade avr(const StabilizerParams& p);
  static BlockCascade pss1a_with_avr(const StabilizerParams& p);
};

struct BodeSample {
  double omega;       // rad/s
  double magnitude_db;
  double phase_deg;   // unwrapped across the grid
};

std::complex<double> stage_transfer(const Stage& stage, std::complex<double> s);

// Product of stage gains at s; throws PoleCollisionError on a pole.
std::complex<double> transfer_at(const BlockCascade& cascade, std::complex<double> s);

// Magnitude/phase of transfer_at(i omega) with continuous phase unwrap.
std::vector<BodeSample> bode(const BlockCascade& cascade, const std::vector<double>& omega_grid);

// 400 log-spaced points over [1e-3, 1e3] rad/s.
std::vector<double> default_bode_grid();

struct CascadeSimResult {
  std::vector<StageName> order;
  std::vector<SignalTrace> traces;

  const SignalTrace& stage(StageName name) const;
};

// Time-domain reference: every stage integrated as a first-order state
// with the exact exponential update for piecewise-linear input. States
// start at the operating point for the supplied pre-event DC level, so a
// constant input produces V1 = const and zero everywhere downstream.
CascadeSimResult simulate_cascade(const BlockCascade& cascade, const SignalTrace& input,
                                  double initial_output_level);

}  // namespace gridpss

#endif
