#include "gridpss/commands.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <iostream>
#include <sstream>

#include "gridpss/csv.hpp"
#include "gridpss/envelope.hpp"
#include "gridpss/errors.hpp"
#include "gridpss/linear_response.hpp"
#include "gridpss/modal_response.hpp"
#include "gridpss/spectrum.hpp"

namespace gridpss {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<StageName> effective_stages(const Scenario& sc, const CommandOptions& opts) {
  return opts.stages.empty() ? sc.output.stages : opts.stages;
}

std::string x_label(InertiaRatio x) {
  return x.infinite ? "inf" : format_double_short(x.value);
}

bool machine_parameterizes(const MachineParams& m, Model model) {
  return model == Model::cage ? m.k_d.has_value()
                              : m.k_kuramoto_gen.has_value() && m.k_kuramoto_grid.has_value();
}

// Machine for a sweep point: reuse the reduced spec when the scenario was
// written in reduced units, otherwise carry over the machine's per-body
// damping (from whichever model it parameterizes) and its ratings.
MachineParams sweep_machine(const Scenario& sc, Model model, InertiaRatio x) {
  const TransientEvent& ev = sc.require_event("nonlinear");
  double beta;
  bool combined;
  double omega_base, p_max;
  int poles;
  if (sc.reduced_spec) {
    beta = sc.reduced_spec->beta;
    combined = sc.reduced_spec->beta_is_combined;
    omega_base = sc.reduced_spec->omega_base;
    poles = sc.reduced_spec->poles;
    p_max = sc.reduced_spec->p_max;
  } else {
    const MachineParams& m = sc.require_machine("nonlinear");
    const Model src = machine_parameterizes(m, model)
                          ? model
                          : (m.k_d ? Model::cage : Model::kuramoto);
    beta = reduce_params(m, src).beta_gen;
    combined = false;
    omega_base = m.omega_base;
    poles = m.poles;
    p_max = m.p_max;
  }
  return machine_from_reduced(ev.xi_final, beta, ev.consistent_tau_r(), x, model, combined,
                              omega_base, poles, p_max);
}

ReducedParams reduced_for_machine(const MachineParams& machine, Model model,
                                  const TransientEvent& event) {
  ReducedParams r = reduce_params(machine, model);
  r.xi = event.xi_final;
  r.tau_r = event.consistent_tau_r();
  return r;
}

Trajectory trajectory_for_machine(const MachineParams& machine, Model model,
                                  const TransientEvent& event, double horizon, double dt) {
  const ReducedParams reduced = reduced_for_machine(machine, model, event);
  if (model == Model::cage || machine.grid_inertia_infinite) {
    // Exact reduction to the rotor-angle equation.
    const RotorTrace rotor = integrate_rotor(event, reduced, horizon, dt);
    return {rotor.delta, rotor.delta_dot};
  }
  // Kuramoto-like at finite x: integrate both bodies.
  if (event.event_time != 0.0)
    throw ConfigError("event.event_time: must be 0 for the Kuramoto two-body path");
  const double xi_check = reduce_params(machine, model).xi;
  if (std::abs(xi_check - event.xi_final) > 1e-9 * event.xi_final)
    throw ConfigError("machine/event mismatch: reduced xi of the machine must equal xi_final");
  const TwoBodyState init = two_body_equilibrium_state(machine, event.delta_initial);
  const auto states = integrate_two_body(machine, model, init, horizon, dt);
  Trajectory traj;
  traj.delta.t0 = traj.delta_dot.t0 = 0.0;
  traj.delta.dt = traj.delta_dot.dt = dt;
  traj.delta.samples.reserve(states.size());
  traj.delta_dot.samples.reserve(states.size());
  for (const TwoBodyState& s : states) {
    traj.delta.samples.push_back(s.theta_grid - s.theta_gen);
    traj.delta_dot.samples.push_back(s.theta_grid_dot - s.theta_gen_dot);
  }
  return traj;
}

void warn_large_deviation(const Scenario& sc, double delta_initial, double delta_final) {
  if (std::abs(delta_initial - delta_final) > kPi / 20.0)
    std::cerr << "warning: |delta_I - delta_II| > pi/20; the damped-oscillation template is a "
                 "small-signal approximation\n";
  (void)sc;
}

DampedOscillation linear_input(const Scenario& sc, const ReducedParams& reduced,
                               double delta_initial, double delta_final) {
  switch (sc.input_kind) {
    case InputKind::speed:
      return input_rotor_speed_deviation(reduced, delta_initial, delta_final);
    case InputKind::frequency:
      return input_frequency_deviation(sc.require_machine("linear"), reduced, delta_initial,
                                       delta_final);
    case InputKind::power:
      return input_electrical_power(sc.require_machine("linear"), reduced, delta_initial,
                                    delta_final);
    case InputKind::envelope:
      break;
  }
  throw ConfigError("linear: input_kind must be speed, frequency or power");
}

std::vector<double> scenario_omega_grid(const Scenario& sc) {
  return linear_omega_grid(sc.run.omega_min, sc.run.omega_max, sc.run.omega_points);
}

void write_spectra_csv(const std::filesystem::path& path, SpectrumComponent comp,
                       const std::vector<std::string>& names,
                       const std::vector<std::vector<SpectrumSample>>& spectra) {
  std::vector<std::string> cols = {"omega"};
  for (const auto& n : names) cols.push_back(std::string(to_string(comp)) + "_" + n);
  CsvWriter csv(cols);
  const std::size_t rows = spectra.empty() ? 0 : spectra.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<double> row = {spectra.front()[i].omega};
    for (const auto& s : spectra) row.push_back(spectrum_component_value(comp, s[i].value));
    csv.add_row(row);
  }
  csv.write(path);
}

struct ValidateCheck {
  std::string check;
  std::string stage;
  double error;
  double tolerance;
  bool pass() const { return error <= tolerance; }
};

double rel_linf(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, peak = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    peak = std::max(peak, std::abs(b[i]));
  }
  return peak > 0.0 ? diff / peak : diff;
}

}  // namespace

ReducedParams scenario_reduced_post_event(const Scenario& sc, Model model) {
  return reduced_for_machine(sc.require_machine("scenario"), model,
                             sc.require_event("scenario"));
}

Trajectory integrate_scenario_trajectory(const Scenario& sc, Model model, double horizon,
                                         double dt) {
  return trajectory_for_machine(sc.require_machine("simulate"), model,
                                sc.require_event("simulate"), horizon, dt);
}

int run_simulate(const Scenario& sc, const CommandOptions& opts) {
  const MachineParams& machine = sc.require_machine("simulate");
  const double horizon = sc.horizon_or_default();
  const Trajectory traj = integrate_scenario_trajectory(sc, sc.model, horizon, sc.run.dt);
  const ReducedParams reduced = scenario_reduced_post_event(sc, sc.model);

  const SignalTrace speed = rotor_velocity(traj.delta_dot, reduced.x, machine.omega_base);
  const SignalTrace freq = bus_frequency_deviation(traj.delta_dot, machine.poles, reduced.x);

  CsvWriter csv({"t", "delta", "delta_dot", "rotor_speed", "freq_deviation"});
  for (std::size_t i = 0; i < traj.delta.size(); ++i)
    csv.add_row({traj.delta.time(i), traj.delta.samples[i], traj.delta_dot.samples[i],
                 speed.samples[i], freq.samples[i]});
  csv.write(opts.out_dir / "simulate_traces.csv");
  return 0;
}

int run_linear(const Scenario& sc, const CommandOptions& opts) {
  const TransientEvent& event = sc.require_event("linear");
  ReducedParams reduced = scenario_reduced_post_event(sc, sc.model);
  const double delta_final = equilibrium_angle(reduced);
  warn_large_deviation(sc, event.delta_initial, delta_final);

  const DampedOscillation input = linear_input(sc, reduced, event.delta_initial, delta_final);
  const CascadeCoefficients coeffs = cascade_linear(input, sc.stabilizer);

  const double horizon = sc.horizon_or_default();
  const auto stages = effective_stages(sc, opts);

  // Coefficient table.
  {
    CsvWriter csv({"name", "value"});
    const std::pair<const char*, double> rows[] = {
        {"lambda", coeffs.lambda}, {"omega0", coeffs.omega0}, {"v_inf", coeffs.v_inf},
        {"a0", coeffs.a0},         {"b0", coeffs.b0},         {"a1", coeffs.a1},
        {"b1", coeffs.b1},         {"c1", coeffs.c1},         {"a2", coeffs.a2},
        {"b2", coeffs.b2},         {"c2", coeffs.c2},         {"d2", coeffs.d2},
        {"a3", coeffs.a3},         {"b3", coeffs.b3},         {"c3", coeffs.c3},
        {"d3", coeffs.d3},         {"e3", coeffs.e3},         {"a4", coeffs.a4},
        {"b4", coeffs.b4},         {"c4", coeffs.c4},         {"d4", coeffs.d4},
        {"e4", coeffs.e4},         {"f4", coeffs.f4},         {"a_r", coeffs.a_r},
        {"b_r", coeffs.b_r},       {"c_r", coeffs.c_r},       {"d_r", coeffs.d_r},
        {"e_r", coeffs.e_r},       {"f_r", coeffs.f_r},       {"s_r", coeffs.s_r},
        {"a_out", coeffs.a_out},   {"b_out", coeffs.b_out},   {"c_out", coeffs.c_out},
        {"d_out", coeffs.d_out},   {"e_out", coeffs.e_out},   {"f_out", coeffs.f_out},
        {"g_out", coeffs.g_out}};
    for (const auto& [name, value] : rows) csv.add_text_row({name, format_double(value)});
    csv.write(opts.out_dir / "linear_coefficients.csv");
  }
  // Stage traces.
  {
    std::vector<std::string> cols = {"t"};
    std::vector<SignalTrace> traces;
    for (StageName s : stages) {
      cols.push_back(to_string(s));
      traces.push_back(sample_linear(coeffs, s, 0.0, horizon, sc.run.dt));
    }
    CsvWriter csv(cols);
    for (std::size_t i = 0; i < traces.front().size(); ++i) {
      std::vector<double> row = {traces.front().time(i)};
      for (const auto& tr : traces) row.push_back(tr.samples[i]);
      csv.add_row(row);
    }
    csv.write(opts.out_dir / "linear_traces.csv");
  }
  // Spectra.
  {
    const auto grid = scenario_omega_grid(sc);
    std::vector<std::string> names;
    std::vector<std::vector<SpectrumSample>> spectra;
    for (StageName s : stages) {
      names.push_back(to_string(s));
      spectra.push_back(spectrum_closed_form(coeffs, s, grid));
    }
    write_spectra_csv(opts.out_dir / "linear_spectra.csv", sc.output.spectrum, names, spectra);
  }
  return 0;
}

int run_nonlinear(const Scenario& sc, const CommandOptions& opts) {
  const TransientEvent& event = sc.require_event("nonlinear");
  std::vector<Model> models = opts.models;
  if (models.empty()) models = {sc.model};
  std::vector<InertiaRatio> xs = opts.x_values;
  if (xs.empty()) xs = sc.x_sweep;
  if (xs.empty()) xs = {scenario_reduced_post_event(sc, sc.model).x};

  const double horizon = sc.horizon_or_default();
  const auto stages = effective_stages(sc, opts);
  const auto grid = scenario_omega_grid(sc);

  for (Model model : models) {
    for (InertiaRatio x : xs) {
      const bool native =
          sc.machine && !sc.reduced_spec && machine_parameterizes(*sc.machine, model) &&
          (x.infinite ? sc.machine->grid_inertia_infinite
                      : !sc.machine->grid_inertia_infinite &&
                            std::abs(reduce_params(*sc.machine, model).x.value - x.value) <
                                1e-12 * x.value);
      const MachineParams machine =
          native ? *sc.machine : sweep_machine(sc, model, x);
      const ReducedParams reduced = reduced_for_machine(machine, model, event);
      const Trajectory traj = trajectory_for_machine(machine, model, event, horizon, sc.run.dt);
      ReducedParams post = reduced;
      post.xi = event.xi_final;
      const double delta_final = equilibrium_angle(post);
      InputSpec input;
      input.kind = sc.input_kind;
      input.p_max = machine.p_max;
      input.poles = machine.poles;
      const NonlinearResponse resp = nonlinear_response_from_traces(
          traj.delta, traj.delta_dot, event.delta_initial, delta_final, reduced, input,
          sc.stabilizer);

      const std::string tag = std::string(to_string(model)) + "_x" + x_label(x);
      // Traces: input, its modal fit, then the requested closed-form stages.
      {
        std::vector<std::string> cols = {"t", "v_in", "v_in_fit"};
        std::vector<const SignalTrace*> extra;
        for (StageName s : stages) {
          if (s == StageName::v_in) continue;
          cols.push_back(to_string(s));
          extra.push_back(&resp.stage(s));
        }
        CsvWriter csv(cols);
        for (std::size_t i = 0; i < resp.v_in.size(); ++i) {
          std::vector<double> row = {resp.v_in.time(i), resp.v_in.samples[i],
                                     resp.v_in_fit.samples[i]};
          for (const auto* tr : extra) row.push_back(tr->samples[i]);
          csv.add_row(row);
        }
        csv.write(opts.out_dir / ("nonlinear_" + tag + "_traces.csv"));
      }
      // Modes.
      {
        CsvWriter csv({"re_lambda", "im_lambda", "re_amplitude", "im_amplitude"});
        if (resp.modes.dc_offset != 0.0)
          csv.add_row({0.0, 0.0, resp.modes.dc_offset, 0.0});
        for (const auto& term : resp.modes.terms)
          csv.add_row({term.eigenvalue.real(), term.eigenvalue.imag(), term.amplitude.real(),
                       term.amplitude.imag()});
        csv.write(opts.out_dir / ("nonlinear_" + tag + "_modes.csv"));
      }
      // Spectra of the requested stages.
      {
        std::vector<std::string> names;
        std::vector<std::vector<SpectrumSample>> spectra;
        for (StageName s : stages) {
          names.push_back(to_string(s));
          spectra.push_back(spectrum_closed_form(resp.coeffs, s, grid));
        }
        write_spectra_csv(opts.out_dir / ("nonlinear_" + tag + "_spectra.csv"),
                          sc.output.spectrum, names, spectra);
      }
    }
  }
  return 0;
}

int run_envelope(const Scenario& sc, const CommandOptions& opts) {
  if (!sc.envelope) throw ConfigError("envelope: scenario needs an envelope block");
  const EnvelopeInput& input = *sc.envelope;
  const double horizon =
      sc.run.horizon ? *sc.run.horizon : input.support_end() + 15.0 * sc.stabilizer.t5;
  const auto grid = scenario_omega_grid(sc);
  const EnvelopeResponse resp = envelope_response(input, sc.stabilizer, horizon, sc.run.dt, grid);

  {
    CsvWriter csv({"t", "v_in", "v_pss", "v_out"});
    for (std::size_t i = 0; i < resp.v_in.size(); ++i)
      csv.add_row({resp.v_in.time(i), resp.v_in.samples[i], resp.v_pss.samples[i],
                   resp.v_out.samples[i]});
    csv.write(opts.out_dir / "envelope_traces.csv");
  }
  write_spectra_csv(opts.out_dir / "envelope_spectra.csv", sc.output.spectrum,
                    {"v_in", "v_pss", "v_out"},
                    {resp.spectrum_in, resp.spectrum_pss, resp.spectrum_out});
  return 0;
}

int run_bode(const Scenario& sc, const CommandOptions& opts) {
  std::vector<double> grid;
  if (sc.run.horizon || sc.run.omega_points != RunOptions{}.omega_points ||
      sc.run.omega_min != RunOptions{}.omega_min || sc.run.omega_max != RunOptions{}.omega_max) {
    // Log-spaced when the scenario overrides the grid.
    grid.resize(sc.run.omega_points);
    const double lo = std::log10(sc.run.omega_min), hi = std::log10(sc.run.omega_max);
    for (int i = 0; i < sc.run.omega_points; ++i)
      grid[static_cast<std::size_t>(i)] =
          std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) / (sc.run.omega_points - 1));
  } else {
    grid = default_bode_grid();
  }

  const struct {
    const char* file;
    BlockCascade cascade;
  } runs[] = {{"bode_pss1a.csv", BlockCascade::pss1a(sc.stabilizer)},
              {"bode_avr.csv", BlockCascade::avr(sc.stabilizer)},
              {"bode_cascade.csv", BlockCascade::pss1a_with_avr(sc.stabilizer)}};
  for (const auto& r : runs) {
    CsvWriter csv({"omega", "mag_db", "phase_deg"});
    for (const BodeSample& s : bode(r.cascade, grid))
      csv.add_row({s.omega, s.magnitude_db, s.phase_deg});
    csv.write(opts.out_dir / r.file);
  }
  return 0;
}

int run_validate(const Scenario& sc, const CommandOptions& opts) {
  std::vector<ValidateCheck> checks;
  const double dt = 1e-3;  // oracle grid, independent of the output dt

  if (sc.input_kind == InputKind::envelope) {
    if (!sc.envelope) throw ConfigError("validate: scenario needs an envelope block");
    const double tol = opts.tolerance.value_or(1e-3);
    const double horizon = sc.run.horizon
                               ? *sc.run.horizon
                               : sc.envelope->support_end() + 15.0 * sc.stabilizer.t5;
    const auto grid = scenario_omega_grid(sc);
    const EnvelopeResponse resp =
        envelope_response(*sc.envelope, sc.stabilizer, horizon, dt, grid);
    // Numeric transform of the simulated traces against the product route.
    const struct {
      const char* name;
      const SignalTrace* trace;
      const std::vector<SpectrumSample>* product;
    } pairs[] = {{"v_in", &resp.v_in, &resp.spectrum_in},
                 {"v_pss", &resp.v_pss, &resp.spectrum_pss},
                 {"v_out", &resp.v_out, &resp.spectrum_out}};
    for (const auto& p : pairs) {
      if (!trace_decayed(*p.trace))
        std::cerr << "warning: " << p.name << " has not decayed by the horizon; "
                  << "numeric spectrum may be truncated\n";
      const auto numeric = spectrum_numeric(*p.trace, grid);
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        diff = std::max(diff, std::abs(numeric[i].value - (*p.product)[i].value));
        scale = std::max(scale, std::abs((*p.product)[i].value));
      }
      checks.push_back({"envelope_spectrum", p.name, scale > 0 ? diff / scale : diff, tol});
    }
  } else {
    const TransientEvent& event = sc.require_event("validate");
    const ReducedParams reduced = scenario_reduced_post_event(sc, sc.model);
    ReducedParams post = reduced;
    post.xi = event.xi_final;
    const double delta_final = equilibrium_angle(post);
    const double horizon = std::min(sc.horizon_or_default(), 30.0 / std::max(0.1, reduced.beta));

    // Closed-form linear cascade against the time-domain oracle on the
    // synthesized damped-oscillation input.
    {
      const double tol = opts.tolerance.value_or(1e-5);
      const DampedOscillation input =
          linear_input(sc, reduced, event.delta_initial, delta_final);
      const CascadeCoefficients coeffs = cascade_linear(input, sc.stabilizer);
      SignalTrace vin;
      vin.t0 = 0.0;
      vin.dt = dt;
      const auto grid = uniform_grid(0.0, horizon, dt);
      vin.samples.resize(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) vin.samples[i] = input.value(grid[i]);
      const CascadeSimResult oracle =
          simulate_cascade(BlockCascade::pss1a_with_avr(sc.stabilizer), vin,
                           input.initial_level());
      for (StageName s : {StageName::v1, StageName::v2, StageName::v3, StageName::v_pss,
                          StageName::v_r, StageName::v_out}) {
        const SignalTrace closed = sample_linear(coeffs, s, 0.0, horizon, dt);
        checks.push_back({"linear_oracle", to_string(s),
                          rel_linf(closed.samples, oracle.stage(s).samples), tol});
      }
    }
    // Modal pipeline against the oracle run on the reconstructed input.
    {
      const Trajectory traj =
          trajectory_for_machine(sc.require_machine("validate"), sc.model, event, horizon, dt);
      InputSpec input = sc.input_spec();
      const NonlinearResponse resp = nonlinear_response_from_traces(
          traj.delta, traj.delta_dot, event.delta_initial, delta_final, reduced, input,
          sc.stabilizer);
      const double tol = opts.tolerance.value_or(std::max(1e-4, 3.0 * resp.fit_error));
      for (StageName s : {StageName::v1, StageName::v2, StageName::v3, StageName::v_pss,
                          StageName::v_r, StageName::v_out}) {
        checks.push_back({"modal_oracle", to_string(s),
                          rel_linf(resp.stage(s).samples, resp.oracle.stage(s).samples), tol});
      }
    }
  }

  CsvWriter csv({"check", "stage", "max_rel_error", "tolerance", "pass"});
  bool all_pass = true;
  for (const auto& c : checks) {
    const bool ok = c.pass();
    all_pass = all_pass && ok;
    std::cout << c.check << " " << c.stage << ": max_rel_err=" << format_double(c.error)
              << " tol=" << format_double(c.tolerance) << (ok ? " PASS" : " FAIL") << "\n";
    csv.add_text_row({c.check, c.stage, format_double(c.error), format_double(c.tolerance),
                      ok ? "1" : "0"});
  }
  csv.write(opts.out_dir / "validate_report.csv");
  return all_pass ? 0 : 2;
}

namespace {

std::vector<StageName> parse_stage_list(const std::string& list) {
  std::vector<StageName> stages;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) stages.push_back(stage_from_string(item));
  }
  return stages;
}

std::vector<Model> parse_model_list(const std::string& list) {
  std::vector<Model> models;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "cage") models.push_back(Model::cage);
    else if (item == "kuramoto") models.push_back(Model::kuramoto);
    else if (!item.empty()) throw ConfigError("--models: unknown model '" + item + "'");
  }
  return models;
}

std::vector<InertiaRatio> parse_x_list(const std::string& list) {
  std::vector<InertiaRatio> xs;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (item == "inf") {
      xs.push_back(InertiaRatio::inf());
      continue;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      xs.push_back(InertiaRatio::finite(v));
    } catch (const std::logic_error&) {
      throw ConfigError("--x-values: expected a number or 'inf', got '" + item + "'");
    }
  }
  return xs;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Synchronous generator + PSS1A/AVR transient response toolkit"};
  app.require_subcommand(1);

  struct Shared {
    std::string scenario;
    std::string out_dir = ".";
    std::string stages;
    double tolerance = -1.0;
    std::string models;
    std::string x_values;
  } shared;

  auto add_common = [&shared](CLI::App* cmd, bool scenario_required) {
    auto* opt = cmd->add_option("--scenario", shared.scenario, "Scenario JSON file");
    if (scenario_required) opt->required();
    cmd->add_option("--out-dir", shared.out_dir, "Output directory");
    cmd->add_option("--stages", shared.stages, "Comma-separated stage list");
    return cmd;
  };

  auto* simulate = add_common(app.add_subcommand("simulate", "Integrate the transient event"),
                              true);
  auto* linear = add_common(
      app.add_subcommand("linear", "Closed-form linear response (coefficients, traces, spectra)"),
      true);
  auto* nonlinear = add_common(
      app.add_subcommand("nonlinear", "Modal decomposition response for large events"), true);
  nonlinear->add_option("--models", shared.models, "Comma-separated models (cage,kuramoto)");
  nonlinear->add_option("--x-values", shared.x_values,
                        "Comma-separated inertia ratios (numbers or inf)");
  auto* envelope = add_common(
      app.add_subcommand("envelope", "Sine-envelope ROCOF packet response"), true);
  auto* bode_cmd = add_common(app.add_subcommand("bode", "Bode data for PSS1A, AVR and cascade"),
                              false);
  auto* validate = add_common(
      app.add_subcommand("validate", "Oracle-vs-closed-form error report"), true);
  validate->add_option("--tolerance", shared.tolerance, "Override the pass tolerance");

  std::vector<const char*> argv;
  argv.push_back("gridpss");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    CommandOptions opts;
    opts.out_dir = shared.out_dir;
    if (!shared.stages.empty()) opts.stages = parse_stage_list(shared.stages);
    if (shared.tolerance > 0.0) opts.tolerance = shared.tolerance;
    if (!shared.models.empty()) opts.models = parse_model_list(shared.models);
    if (!shared.x_values.empty()) opts.x_values = parse_x_list(shared.x_values);
    std::filesystem::create_directories(opts.out_dir);

    Scenario sc;
    if (!shared.scenario.empty()) {
      opts.scenario_path = shared.scenario;
      sc = load_scenario(opts.scenario_path);
    }

    if (simulate->parsed()) return run_simulate(sc, opts);
    if (linear->parsed()) return run_linear(sc, opts);
    if (nonlinear->parsed()) return run_nonlinear(sc, opts);
    if (envelope->parsed()) return run_envelope(sc, opts);
    if (bode_cmd->parsed()) return run_bode(sc, opts);
    if (validate->parsed()) return run_validate(sc, opts);
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gridpss
