#ifndef GRIDPSS_MODAL_RESPONSE_HPP
#define GRIDPSS_MODAL_RESPONSE_HPP

#include <complex>
#include <vector>

#include "gridpss/grid_dynamics.hpp"
#include "gridpss/linear_response.hpp"
#include "gridpss/stabilizer.hpp"

namespace gridpss {

// Signal as a sum of complex exponentials sum_j a_j e^{lambda_j t} plus an
// optional constant mode. Complex modes always appear in conjugate pairs.
struct ModalSum {
  struct Term {
    std::complex<double> amplitude;
    std::complex<double> eigenvalue;
  };
  std::vector<Term> terms;
  double dc_offset = 0.0;

  double value(double t) const;
  // Largest-|amplitude| non-DC term.
  const Term& dominant() const;
  // Checks conjugate pairing and real amplitudes on real eigenvalues.
  void validate() const;
};

struct ExtractionOptions {
  int max_order = 40;
  double sv_threshold = 1e-8;   // relative singular-value cutoff
  double fit_tolerance = 1e-4;  // relative L2 reconstruction target
};

struct ExtractionResult {
  ModalSum modes;
  double fit_error = 0.0;  // relative L2 over the supplied trace
  int order = 0;
};

// Matrix-pencil decomposition with least-squares amplitude refinement and
// automatic order selection up to max_order.
ExtractionResult extract_modes(const SignalTrace& trace, int max_order = 40,
                               double sv_threshold = 1e-8, double fit_tolerance = 1e-4);

// Per-stage modal amplitudes plus the real exponential constants that
// restore continuity at t = 0 for each stage.
struct ModalCascadeCoefficients {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<std::complex<double>> a0, a1, a2, a3, a4, a_r, a_out;
  double dc = 0.0;  // constant input mode, preserved by V1 only
  double c1 = 0.0;
  double c2 = 0.0, d2 = 0.0;
  double c3 = 0.0, d3 = 0.0, e3 = 0.0;
  double c4 = 0.0, d4 = 0.0, e4 = 0.0, f4 = 0.0;
  double c_r = 0.0, d_r = 0.0, e_r = 0.0, f_r = 0.0, s_r = 0.0;
  double c_out = 0.0, d_out = 0.0, e_out = 0.0, f_out = 0.0, g_out = 0.0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0, t5 = 0.0, t6 = 0.0, t_n = 0.0, t_s = 0.0;
};

// Push a modal sum through the cascade. The DC mode bypasses the washout
// (zero contribution downstream of V1). Throws PoleCollisionError when a
// mode sits on a cascade pole.
ModalCascadeCoefficients cascade_modal(const ModalSum& modes, const StabilizerParams& pss);

double eval_modal(const ModalCascadeCoefficients& coeffs, StageName stage, double t);

SignalTrace sample_modal(const ModalCascadeCoefficients& coeffs, StageName stage, double t0,
                         double horizon, double dt);
SignalTrace sample_modal_serial(const ModalCascadeCoefficients& coeffs, StageName stage,
                                double t0, double horizon, double dt);

enum class InputKind { speed, frequency, power, envelope };

const char* to_string(InputKind k);
InputKind input_kind_from_string(const std::string& name);

// Input-signal selection for the transient pipelines. p_max scales the
// power input, poles the frequency deviation.
struct InputSpec {
  InputKind kind = InputKind::speed;
  double p_max = 1.0;
  int poles = 2;
};

struct NonlinearResponse {
  ModalSum modes;
  double fit_error = 0.0;
  ModalCascadeCoefficients coeffs;
  SignalTrace v_in;        // from the integrated trajectory
  SignalTrace v_in_fit;    // modal reconstruction on the same grid
  CascadeSimResult oracle; // simulate_cascade on v_in_fit
  std::vector<StageName> stage_order;
  std::vector<SignalTrace> closed_form;  // eval_modal per stage

  const SignalTrace& stage(StageName name) const;
};

// Build the input signal of the chosen kind from integrated delta/delta_dot
// traces. Finite-inertia inputs carry the x/(x+1) weighting.
SignalTrace make_input_trace(const SignalTrace& delta, const SignalTrace& delta_dot,
                             const InputSpec& input, const ReducedParams& reduced,
                             double delta_final);

// Constant level of the input signal before the event.
double input_dc_level(const InputSpec& input, const ReducedParams& reduced, double delta_initial);

// Full nonlinear pipeline: integrate the rotor-angle equation, build the
// input, extract modes, run the modal cascade and the time-domain oracle.
NonlinearResponse nonlinear_response(const TransientEvent& event, const ReducedParams& reduced,
                                     const InputSpec& input, const StabilizerParams& pss,
                                     double horizon, double dt,
                                     const ExtractionOptions& extraction = {});

// Same pipeline from an externally integrated trajectory (used for the
// Kuramoto-like model, whose relative angle has no exact reduced equation
// at finite inertia ratio).
NonlinearResponse nonlinear_response_from_traces(const SignalTrace& delta,
                                                 const SignalTrace& delta_dot,
                                                 double delta_initial, double delta_final,
                                                 const ReducedParams& reduced,
                                                 const InputSpec& input,
                                                 const StabilizerParams& pss,
                                                 const ExtractionOptions& extraction = {});

}  // namespace gridpss

#endif
