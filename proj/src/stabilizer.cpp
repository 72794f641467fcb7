#include "gridpss/stabilizer.hpp"

#include <cmath>
#include <string>

#include "gridpss/errors.hpp"

namespace gridpss {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 1 - (T/h)(1 - e^{-h/T}), the first-order-hold weight of the input slope;
// series branch for small h/T where the direct form cancels.
double foh_slope_weight(double r) {  // r = h/T
  if (r < 1e-3) return r * (0.5 - r * (1.0 / 6.0 - r / 24.0));
  return 1.0 - (-std::expm1(-r)) / r;
}

}  // namespace

const char* to_string(StageName s) {
  switch (s) {
    case StageName::v_in: return "v_in";
    case StageName::v1: return "v1";
    case StageName::v2: return "v2";
    case StageName::v3: return "v3";
    case StageName::v_pss: return "v_pss";
    case StageName::v_r: return "v_r";
    case StageName::v_out: return "v_out";
  }
  return "?";
}

StageName stage_from_string(const std::string& name) {
  for (StageName s : {StageName::v_in, StageName::v1, StageName::v2, StageName::v3,
                      StageName::v_pss, StageName::v_r, StageName::v_out}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown stage name: " + name);
}

void StabilizerParams::validate() const {
  auto positive = [](double v, const char* field) {
    if (!(v > 0.0)) throw ConfigError(std::string("stabilizer.") + field + ": must be > 0");
  };
  positive(t1, "t1");
  positive(t2, "t2");
  positive(t3, "t3");
  positive(t4, "t4");
  positive(t5, "t5");
  positive(t6, "t6");
  positive(t_n, "t_n");
  positive(t_s, "t_s");
  positive(k_s, "k_s");
  positive(k_pr, "k_pr");
  positive(k_ps, "k_ps");
  // Simple-pole closed forms need the denominator constants separated.
  // t_n is exempt: the PI pole sits at the origin and t_n only ever enters
  // as (1 - T_i/T_N), so T_N = T5 (the shipped defaults) is regular.
  const struct { double v; const char* n; } poles[] = {
      {t2, "t2"}, {t4, "t4"}, {t5, "t5"}, {t6, "t6"}, {t_s, "t_s"}};
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) {
      if (std::abs(poles[i].v - poles[j].v) < collision_tolerance)
        throw PoleCollisionError(std::string("stabilizer: time constants ") + poles[i].n +
                                 " and " + poles[j].n + " collide");
    }
  }
}

BlockCascade BlockCascade::pss1a(const StabilizerParams& p) {
  p.validate();
  BlockCascade c;
  c.stages = {
      {StageKind::low_pass, 1.0, 0.0, p.t6, StageName::v1},
      {StageKind::washout, p.k_s, 0.0, p.t5, StageName::v2},
      {StageKind::lead_lag, 1.0, p.t1, p.t2, StageName::v3},
      {StageKind::lead_lag, 1.0, p.t3, p.t4, StageName::v_pss},
  };
  return c;
}

BlockCascade BlockCascade::avr(const StabilizerParams& p) {
  p.validate();
  BlockCascade c;
  c.stages = {
      {StageKind::pi, p.k_pr, 0.0, p.t_n, StageName::v_r},
      {StageKind::low_pass, p.k_ps, 0.0, p.t_s, StageName::v_out},
  };
  return c;
}

BlockCascade BlockCascade::pss1a_with_avr(const StabilizerParams& p) {
  BlockCascade c = pss1a(p);
  const BlockCascade tail = avr(p);
  c.stages.insert(c.stages.end(), tail.stages.begin(), tail.stages.end());
  return c;
}

std::complex<double> stage_transfer(const Stage& stage, std::complex<double> s) {
  const std::complex<double> sT = s * stage.t_den;
  switch (stage.kind) {
    case StageKind::low_pass: return stage.gain / (1.0 + sT);
    case StageKind::washout: return stage.gain * sT / (1.0 + sT);
    case StageKind::lead_lag: return (1.0 + s * stage.t_num) / (1.0 + sT);
    case StageKind::pi: return stage.gain * (1.0 + sT) / sT;
  }
  return {};
}

std::complex<double> transfer_at(const BlockCascade& cascade, std::complex<double> s) {
  std::complex<double> h = 1.0;
  for (const Stage& stage : cascade.stages) {
    if (stage.kind == StageKind::pi) {
      if (std::abs(s) * stage.t_den < 1e-12)
        throw PoleCollisionError("transfer_at: s = 0 is a pole of the PI stage");
    } else if (std::abs(1.0 + s * stage.t_den) < 1e-12) {
      throw PoleCollisionError(std::string("transfer_at: s is a pole of stage ") +
                               to_string(stage.output));
    }
    h *= stage_transfer(stage, s);
  }
  return h;
}

std::vector<BodeSample> bode(const BlockCascade& cascade, const std::vector<double>& omega_grid) {
  if (omega_grid.empty()) throw ConfigError("bode: omega grid must be non-empty");
  std::vector<BodeSample> out;
  out.reserve(omega_grid.size());
  double prev_phase = 0.0;
  bool first = true;
  for (double w : omega_grid) {
    if (!(w > 0.0)) throw ConfigError("bode: omega must be > 0");
    const std::complex<double> h = transfer_at(cascade, {0.0, w});
    double phase = std::arg(h) * 180.0 / kPi;
    if (!first) {
      // Continuous unwrap against the previous grid point.
      while (phase - prev_phase > 180.0) phase -= 360.0;
      while (phase - prev_phase < -180.0) phase += 360.0;
    }
    prev_phase = phase;
    first = false;
    out.push_back({w, 20.0 * std::log10(std::abs(h)), phase});
  }
  return out;
}

std::vector<double> default_bode_grid() {
  const int n = 400;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(i) / (n - 1));
  return grid;
}

const SignalTrace& CascadeSimResult::stage(StageName name) const {
  for (std::size_t i = 0; i < order.size(); ++i)
    if (order[i] == name) return traces[i];
  throw ConfigError(std::string("no such stage in simulation result: ") + to_string(name));
}

CascadeSimResult simulate_cascade(const BlockCascade& cascade, const SignalTrace& input,
                                  double initial_output_level) {
  input.validate("cascade input");
  if (cascade.stages.empty()) throw ConfigError("simulate_cascade: empty cascade");

  const std::size_t n = input.size();
  const double h = input.dt;

  CascadeSimResult result;
  result.order.push_back(StageName::v_in);
  result.traces.push_back(input);

  // Per-stage state and the DC level feeding the stage, so every state
  // starts at its pre-event operating point.
  std::vector<double> u = input.samples;
  double dc = initial_output_level;
  for (const Stage& stage : cascade.stages) {
    std::vector<double> y(n);
    const double T = stage.t_den;
    const double r = h / T;
    const double decay = std::exp(-r);
    const double w0 = -std::expm1(-r);         // weight of u_k
    const double w1 = foh_slope_weight(r);     // weight of (u_{k+1} - u_k)
    switch (stage.kind) {
      case StageKind::low_pass: {
        double x = stage.gain * dc;
        y[0] = x;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          const double uk = stage.gain * u[k];
          const double du = stage.gain * u[k + 1] - uk;
          x = decay * x + w0 * uk + w1 * du;
          y[k + 1] = x;
        }
        dc *= stage.gain;
        break;
      }
      case StageKind::washout: {
        double z = dc;  // internal low-pass state tracks the DC level
        y[0] = stage.gain * (u[0] - z);
        for (std::size_t k = 0; k + 1 < n; ++k) {
          z = decay * z + w0 * u[k] + w1 * (u[k + 1] - u[k]);
          y[k + 1] = stage.gain * (u[k + 1] - z);
        }
        dc = 0.0;
        break;
      }
      case StageKind::lead_lag: {
        const double direct = stage.t_num / stage.t_den;
        double z = dc;
        y[0] = direct * u[0] + (1.0 - direct) * z;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          z = decay * z + w0 * u[k] + w1 * (u[k + 1] - u[k]);
          y[k + 1] = direct * u[k + 1] + (1.0 - direct) * z;
        }
        break;
      }
      case StageKind::pi: {
        double w = 0.0;  // integrator starts empty at the event
        y[0] = stage.gain * (u[0] + w);
        for (std::size_t k = 0; k + 1 < n; ++k) {
          w += 0.5 * h * (u[k] + u[k + 1]) / T;
          y[k + 1] = stage.gain * (u[k + 1] + w);
        }
        dc *= stage.gain;
        break;
      }
    }
    SignalTrace trace;
    trace.t0 = input.t0;
    trace.dt = h;
    trace.samples = y;
    result.order.push_back(stage.output);
    result.traces.push_back(std::move(trace));
    u = std::move(y);
  }
  return result;
}

}  // namespace gridpss
