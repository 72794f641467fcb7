#include "gridpss/scenario.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "gridpss/errors.hpp"

namespace gridpss {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double get_number(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError(where + "." + key + ": required field is missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": must be a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, where, key);
}

// Accepts a positive number or the string "inf".
InertiaRatio get_inertia_ratio(const json& v, const std::string& where) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return InertiaRatio::inf();
    throw ConfigError(where + ": expected a number or \"inf\"");
  }
  if (!v.is_number()) throw ConfigError(where + ": expected a number or \"inf\"");
  return InertiaRatio::finite(v.get<double>());
}

MachineParams parse_machine(const json& obj) {
  reject_unknown_keys(obj, "machine",
                      {"j_gen", "j_grid", "k_d", "k_kuramoto_gen", "k_kuramoto_grid",
                       "tau_elmax", "tau_gen", "tau_grid", "omega_base", "poles", "p_max"});
  MachineParams m;
  m.j_gen = get_number(obj, "machine", "j_gen");
  if (!obj.contains("j_grid"))
    throw ConfigError("machine.j_grid: required field is missing");
  const auto& jg = obj.at("j_grid");
  if (jg.is_string() && jg.get<std::string>() == "inf") {
    m.grid_inertia_infinite = true;
  } else if (jg.is_number()) {
    m.j_grid = jg.get<double>();
  } else {
    throw ConfigError("machine.j_grid: expected a number or \"inf\"");
  }
  if (obj.contains("k_d")) m.k_d = get_number(obj, "machine", "k_d");
  if (obj.contains("k_kuramoto_gen"))
    m.k_kuramoto_gen = get_number(obj, "machine", "k_kuramoto_gen");
  if (obj.contains("k_kuramoto_grid"))
    m.k_kuramoto_grid = get_number(obj, "machine", "k_kuramoto_grid");
  m.tau_elmax = get_number(obj, "machine", "tau_elmax");
  m.tau_gen = get_number_or(obj, "machine", "tau_gen", 0.0);
  m.tau_grid = get_number_or(obj, "machine", "tau_grid", 0.0);
  m.omega_base = get_number_or(obj, "machine", "omega_base", m.omega_base);
  if (obj.contains("poles")) {
    if (!obj.at("poles").is_number_integer())
      throw ConfigError("machine.poles: must be an integer");
    m.poles = obj.at("poles").get<int>();
  }
  m.p_max = get_number_or(obj, "machine", "p_max", 1.0);
  m.validate();
  return m;
}

TransientEvent parse_event(const json& obj) {
  reject_unknown_keys(obj, "event",
                      {"xi_initial", "xi_final", "delta_initial", "delta_deviation",
                       "event_time"});
  TransientEvent e;
  e.xi_final = get_number(obj, "event", "xi_final");
  e.delta_initial = get_number(obj, "event", "delta_initial");
  e.event_time = get_number_or(obj, "event", "event_time", 0.0);
  const bool has_xi = obj.contains("xi_initial");
  const bool has_dev = obj.contains("delta_deviation");
  if (has_xi == has_dev)
    throw ConfigError("event: give exactly one of xi_initial or delta_deviation");
  if (has_xi) {
    e.xi_initial = get_number(obj, "event", "xi_initial");
  } else {
    // delta_II = delta_I - deviation fixes tau_r, hence xi_initial.
    const double deviation = get_number(obj, "event", "delta_deviation");
    const double tau_r = e.xi_final * std::sin(e.delta_initial - deviation);
    const double sin_i = std::sin(e.delta_initial);
    if (std::abs(sin_i) < 1e-12)
      throw ConfigError("event.delta_deviation: needs sin(delta_initial) != 0");
    e.xi_initial = tau_r / sin_i;
    if (!(e.xi_initial > 0.0))
      throw ConfigError("event.delta_deviation: implied xi_initial is not positive");
  }
  e.validate();
  return e;
}

StabilizerParams parse_stabilizer(const json& obj) {
  reject_unknown_keys(obj, "stabilizer",
                      {"t1", "t2", "t3", "t4", "t5", "t6", "k_s", "t_n", "t_s", "k_pr", "k_ps"});
  StabilizerParams p;
  p.t1 = get_number_or(obj, "stabilizer", "t1", p.t1);
  p.t2 = get_number_or(obj, "stabilizer", "t2", p.t2);
  p.t3 = get_number_or(obj, "stabilizer", "t3", p.t3);
  p.t4 = get_number_or(obj, "stabilizer", "t4", p.t4);
  p.t5 = get_number_or(obj, "stabilizer", "t5", p.t5);
  p.t6 = get_number_or(obj, "stabilizer", "t6", p.t6);
  p.k_s = get_number_or(obj, "stabilizer", "k_s", p.k_s);
  p.t_n = get_number_or(obj, "stabilizer", "t_n", p.t_n);
  p.t_s = get_number_or(obj, "stabilizer", "t_s", p.t_s);
  p.k_pr = get_number_or(obj, "stabilizer", "k_pr", p.k_pr);
  p.k_ps = get_number_or(obj, "stabilizer", "k_ps", p.k_ps);
  p.validate();
  return p;
}

EnvelopeInput parse_envelope(const json& obj) {
  reject_unknown_keys(obj, "envelope", {"amplitude", "omega_envelope", "omega_carrier"});
  EnvelopeInput e;
  e.amplitude = get_number(obj, "envelope", "amplitude");
  e.omega_envelope = get_number(obj, "envelope", "omega_envelope");
  e.omega_carrier = get_number(obj, "envelope", "omega_carrier");
  e.validate();
  return e;
}

RunOptions parse_run(const json& obj) {
  reject_unknown_keys(obj, "run", {"horizon", "dt", "omega_min", "omega_max", "omega_points"});
  RunOptions r;
  if (obj.contains("horizon")) r.horizon = get_number(obj, "run", "horizon");
  r.dt = get_number_or(obj, "run", "dt", r.dt);
  if (!(r.dt > 0.0)) throw ConfigError("run.dt: must be > 0");
  if (r.horizon && !(*r.horizon > 0.0)) throw ConfigError("run.horizon: must be > 0");
  r.omega_min = get_number_or(obj, "run", "omega_min", r.omega_min);
  r.omega_max = get_number_or(obj, "run", "omega_max", r.omega_max);
  if (obj.contains("omega_points")) {
    if (!obj.at("omega_points").is_number_integer())
      throw ConfigError("run.omega_points: must be an integer");
    r.omega_points = obj.at("omega_points").get<int>();
  }
  if (!(r.omega_min > 0.0) || !(r.omega_max > r.omega_min) || r.omega_points < 2)
    throw ConfigError("run: need 0 < omega_min < omega_max and omega_points >= 2");
  return r;
}

OutputOptions parse_output(const json& obj) {
  reject_unknown_keys(obj, "output", {"stages", "spectrum"});
  OutputOptions o;
  if (obj.contains("stages")) {
    if (!obj.at("stages").is_array()) throw ConfigError("output.stages: must be an array");
    o.stages.clear();
    for (const auto& s : obj.at("stages")) {
      if (!s.is_string()) throw ConfigError("output.stages: entries must be strings");
      o.stages.push_back(stage_from_string(s.get<std::string>()));
    }
    if (o.stages.empty()) throw ConfigError("output.stages: must not be empty");
  }
  if (obj.contains("spectrum")) {
    const std::string c = obj.at("spectrum").get<std::string>();
    if (c == "imag") o.spectrum = SpectrumComponent::imag;
    else if (c == "real") o.spectrum = SpectrumComponent::real;
    else if (c == "abs") o.spectrum = SpectrumComponent::abs;
    else throw ConfigError("output.spectrum: must be one of imag, real, abs");
  }
  return o;
}

}  // namespace

namespace {

Scenario parse_scenario_root(const json& root);

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario: top level must be an object");
  try {
    return parse_scenario_root(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

namespace {

Scenario parse_scenario_root(const json& root) {
  reject_unknown_keys(root, "scenario",
                      {"model", "machine", "reduced", "event", "stabilizer", "input_kind",
                       "envelope", "run", "output", "x_values"});

  Scenario sc;
  if (root.contains("model")) {
    const std::string m = root.at("model").get<std::string>();
    if (m == "cage") sc.model = Model::cage;
    else if (m == "kuramoto") sc.model = Model::kuramoto;
    else throw ConfigError("model: must be 'cage' or 'kuramoto'");
  }
  if (root.contains("input_kind"))
    sc.input_kind = input_kind_from_string(root.at("input_kind").get<std::string>());
  if (root.contains("stabilizer")) sc.stabilizer = parse_stabilizer(root.at("stabilizer"));
  if (root.contains("envelope")) sc.envelope = parse_envelope(root.at("envelope"));
  if (root.contains("run")) sc.run = parse_run(root.at("run"));
  if (root.contains("output")) sc.output = parse_output(root.at("output"));
  if (root.contains("event")) sc.event = parse_event(root.at("event"));

  if (root.contains("machine") && root.contains("reduced"))
    throw ConfigError("scenario: give machine or reduced, not both");
  if (root.contains("machine")) sc.machine = parse_machine(root.at("machine"));
  if (root.contains("reduced")) {
    const json& obj = root.at("reduced");
    reject_unknown_keys(obj, "reduced",
                        {"x", "beta", "beta_gen", "omega_base", "poles", "p_max"});
    if (!sc.event)
      throw ConfigError("reduced: requires an event block (xi comes from the event)");
    if (!obj.contains("x")) throw ConfigError("reduced.x: required field is missing");
    const InertiaRatio x = get_inertia_ratio(obj.at("x"), "reduced.x");
    const bool combined = obj.contains("beta");
    if (combined == obj.contains("beta_gen"))
      throw ConfigError("reduced: give exactly one of beta or beta_gen");
    const double beta = combined ? get_number(obj, "reduced", "beta")
                                 : get_number(obj, "reduced", "beta_gen");
    const double omega_base =
        get_number_or(obj, "reduced", "omega_base", MachineParams{}.omega_base);
    int poles = 2;
    if (obj.contains("poles")) poles = obj.at("poles").get<int>();
    const double p_max = get_number_or(obj, "reduced", "p_max", 1.0);
    sc.reduced_spec = ReducedSpec{x, beta, combined, omega_base, poles, p_max};
    sc.machine = machine_from_reduced(sc.event->xi_final, beta, sc.event->consistent_tau_r(),
                                      x, sc.model, combined, omega_base, poles, p_max);
  }

  if (root.contains("x_values")) {
    if (!root.at("x_values").is_array()) throw ConfigError("x_values: must be an array");
    for (const auto& v : root.at("x_values"))
      sc.x_sweep.push_back(get_inertia_ratio(v, "x_values"));
    if (sc.x_sweep.empty()) throw ConfigError("x_values: must not be empty");
  }

  if (sc.input_kind == InputKind::envelope && !sc.envelope)
    throw ConfigError("envelope: block required when input_kind is 'envelope'");
  if (sc.input_kind != InputKind::envelope && sc.envelope)
    throw ConfigError("envelope: block only allowed when input_kind is 'envelope'");
  return sc;
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("scenario: cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

const MachineParams& Scenario::require_machine(const char* command) const {
  if (!machine)
    throw ConfigError(std::string(command) + ": scenario needs a machine or reduced block");
  return *machine;
}

const TransientEvent& Scenario::require_event(const char* command) const {
  if (!event) throw ConfigError(std::string(command) + ": scenario needs an event block");
  return *event;
}

double Scenario::horizon_or_default() const {
  if (run.horizon) return *run.horizon;
  const ReducedParams r = reduced(model);
  if (r.beta <= 0.0) throw ConfigError("run.horizon: required when beta = 0");
  return 40.0 / r.beta;
}

ReducedParams Scenario::reduced(Model m) const {
  return reduce_params(require_machine("scenario"), m);
}

InputSpec Scenario::input_spec() const {
  InputSpec spec;
  spec.kind = input_kind;
  if (machine) {
    spec.p_max = machine->p_max;
    spec.poles = machine->poles;
  }
  return spec;
}

const char* to_string(SpectrumComponent c) {
  switch (c) {
    case SpectrumComponent::imag: return "im";
    case SpectrumComponent::real: return "re";
    case SpectrumComponent::abs: return "abs";
  }
  return "?";
}

double spectrum_component_value(SpectrumComponent c, const std::complex<double>& v) {
  switch (c) {
    case SpectrumComponent::imag: return v.imag();
    case SpectrumComponent::real: return v.real();
    case SpectrumComponent::abs: return std::abs(v);
  }
  return 0.0;
}

}  // namespace gridpss
