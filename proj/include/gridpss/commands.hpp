#ifndef GRIDPSS_COMMANDS_HPP
#define GRIDPSS_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridpss/scenario.hpp"

namespace gridpss {

// Parsed command line shared by the subcommands.
struct CommandOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path out_dir = ".";
  std::vector<StageName> stages;              // overrides output.stages when non-empty
  std::optional<double> tolerance;            // validate
  std::vector<Model> models;                  // nonlinear sweep override
  std::vector<InertiaRatio> x_values;         // nonlinear sweep override
};

struct Trajectory {
  SignalTrace delta;
  SignalTrace delta_dot;
};

// Reduced coefficients actually used downstream: damping and inertia ratio
// from the machine, coupling and torque from the event.
ReducedParams scenario_reduced_post_event(const Scenario& sc, Model model);

// delta/delta_dot through the event. The cage model uses the exact reduced
// equation; the Kuramoto-like model needs the coupled two-body system at
// finite inertia ratio.
Trajectory integrate_scenario_trajectory(const Scenario& sc, Model model, double horizon,
                                         double dt);

int run_simulate(const Scenario& sc, const CommandOptions& opts);
int run_linear(const Scenario& sc, const CommandOptions& opts);
int run_nonlinear(const Scenario& sc, const CommandOptions& opts);
int run_envelope(const Scenario& sc, const CommandOptions& opts);
int run_bode(const Scenario& sc, const CommandOptions& opts);
int run_validate(const Scenario& sc, const CommandOptions& opts);

// Full dispatch: args exclude the program name. Returns the process exit
// code (0 ok, 1 config error, 2 numerical error).
int run_command(const std::vector<std::string>& args);

}  // namespace gridpss

#endif
