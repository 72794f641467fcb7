#ifndef GRIDPSS_SCENARIO_HPP
#define GRIDPSS_SCENARIO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridpss/envelope.hpp"
#include "gridpss/grid_dynamics.hpp"
#include "gridpss/modal_response.hpp"
#include "gridpss/stabilizer.hpp"

namespace gridpss {

struct RunOptions {
  std::optional<double> horizon;  // default 40/beta
  double dt = 1e-3;
  double omega_min = 0.05;
  double omega_max = 20.0;
  int omega_points = 400;
};

enum class SpectrumComponent { imag, real, abs };

struct OutputOptions {
  std::vector<StageName> stages = {StageName::v_in, StageName::v_pss, StageName::v_out};
  SpectrumComponent spectrum = SpectrumComponent::imag;
};

// Damping given in reduced units; remembered so inertia-ratio sweeps can
// resynthesize the machine per x.
struct ReducedSpec {
  InertiaRatio x;
  double beta = 0.3;
  bool beta_is_combined = true;
  double omega_base = 0.0;
  int poles = 2;
  double p_max = 1.0;
};

// A fully parsed scenario file. Machine parameters may be given physically
// or synthesized from reduced coefficients plus the event block.
struct Scenario {
  Model model = Model::cage;
  std::optional<MachineParams> machine;
  std::optional<ReducedSpec> reduced_spec;
  std::optional<TransientEvent> event;
  StabilizerParams stabilizer;
  InputKind input_kind = InputKind::speed;
  std::optional<EnvelopeInput> envelope;
  RunOptions run;
  OutputOptions output;
  std::vector<InertiaRatio> x_sweep;  // nonlinear sweep; defaults to the machine's x

  const MachineParams& require_machine(const char* command) const;
  const TransientEvent& require_event(const char* command) const;
  double horizon_or_default() const;
  ReducedParams reduced(Model m) const;  // reduce_params of the machine
  InputSpec input_spec() const;
};

// Strict parser: unknown keys are rejected, messages name the field.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);

const char* to_string(SpectrumComponent c);
double spectrum_component_value(SpectrumComponent c, const std::complex<double>& v);

}  // namespace gridpss

#endif
