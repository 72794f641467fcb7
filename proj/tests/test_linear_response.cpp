#include <doctest.h>

#include <cmath>
#include <random>

#include "gridpss/errors.hpp"
#include "gridpss/linear_response.hpp"
#include "gridpss/spectrum.hpp"
#include "gridpss/stabilizer.hpp"

using namespace gridpss;

namespace {

constexpr double kPi = 3.14159265358979323846;

ReducedParams reduced(double beta, double xi, double tau_r) {
  return reduced_from_coefficients(beta, xi, tau_r, InertiaRatio::inf());
}

SignalTrace synthesize(const DampedOscillation& osc, double horizon, double dt) {
  SignalTrace tr;
  tr.t0 = 0.0;
  tr.dt = dt;
  const auto n = static_cast<std::size_t>(horizon / dt + 0.5) + 1;
  tr.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.samples[i] = osc.value(dt * static_cast<double>(i));
  return tr;
}

double stage_scale(const CascadeCoefficients& c, StageName s) {
  double m = 0.0;
  const ExponentialSum sum = to_exponential_sum(c, s);
  for (const auto& a : sum.amplitudes) m = std::max(m, std::abs(a));
  return std::max(m, 1e-30);
}

StabilizerParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> logt(std::log(0.005), std::log(5.0));
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  for (;;) {
    StabilizerParams p;
    p.t1 = std::exp(logt(rng));
    p.t2 = std::exp(logt(rng));
    p.t3 = std::exp(logt(rng));
    p.t4 = std::exp(logt(rng));
    p.t5 = std::exp(logt(rng));
    p.t6 = std::exp(logt(rng));
    p.t_n = std::exp(logt(rng));
    p.t_s = std::exp(logt(rng));
    p.k_s = gain(rng);
    p.k_pr = gain(rng);
    p.k_ps = gain(rng);
    const double d[] = {p.t2, p.t4, p.t5, p.t6, p.t_s};
    bool separated = true;
    for (int i = 0; i < 5 && separated; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (std::abs(d[i] - d[j]) < 1e-6) separated = false;
    if (separated) return p;
  }
}

DampedOscillation random_input(std::mt19937& rng) {
  std::uniform_real_distribution<double> amp(-2.0, 2.0), lam(0.0, 2.0), w(0.05, 10.0);
  DampedOscillation osc;
  osc.a0 = amp(rng);
  osc.b0 = amp(rng);
  osc.v_inf = 0.5 * amp(rng);
  osc.lambda = lam(rng);
  osc.omega0 = w(rng);
  return osc;
}

}  // namespace

TEST_CASE("linear_mode: formula and regime guard") {
  const LinearMode m = linear_mode(reduced(0.3, 1.0, 0.0), kPi / 4);
  CHECK(m.lambda == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(m.omega0 == doctest::Approx(0.82740968158859951).epsilon(1e-14));

  const LinearMode undamped = linear_mode(reduced(0.0, 1.0, 0.0), 0.0);
  CHECK(undamped.lambda == 0.0);
  CHECK(undamped.omega0 == doctest::Approx(1.0).epsilon(1e-15));

  // Large-step operating point (coupling 5, angle from torque sin(pi/3)).
  const double dII = std::asin(std::sin(kPi / 3) / 5.0);
  const LinearMode f5 = linear_mode(reduced(0.3, 5.0, std::sin(kPi / 3)), dII);
  CHECK(f5.omega0 == doctest::Approx(2.2140300135495119).epsilon(1e-14));

  // Overdamped: xi cos(dII) <= beta^2/4.
  CHECK_THROWS_AS(linear_mode(reduced(4.0, 1.0, 0.0), 0.0), RegimeError);
  CHECK_THROWS_AS(linear_mode(reduced(0.3, 1.0, 0.0), kPi / 2), RegimeError);
}

TEST_CASE("input builders") {
  const ReducedParams r = reduced(0.3, 1.0, 0.0);

  SUBCASE("null disturbance") {
    const DampedOscillation osc = input_rotor_speed_deviation(r, 0.3, 0.3);
    CHECK(osc.a0 == 0.0);
    CHECK(osc.b0 == 0.0);
    CHECK(osc.v_inf == 0.0);
  }
  SUBCASE("speed deviation sign and magnitude") {
    const double dI = kPi / 4, dII = kPi / 4 - kPi / 20;
    const ReducedParams r1 = reduced(0.3, 1.0, std::sin(dII));
    const DampedOscillation osc = input_rotor_speed_deviation(r1, dI, dII);
    CHECK(osc.a0 > 0.0);
    const LinearMode m = linear_mode(r1, dII);
    CHECK(osc.a0 ==
          doctest::Approx(1.0 * (dI - dII) * std::cos(dII) / m.omega0).epsilon(1e-14));
  }
  SUBCASE("frequency deviation scales by p/2") {
    MachineParams machine;
    machine.poles = 4;
    machine.k_d = 0.3;
    const double dI = 0.5, dII = 0.45;
    const ReducedParams r1 = reduced(0.3, 1.0, std::sin(dII));
    const DampedOscillation speed = input_rotor_speed_deviation(r1, dI, dII);
    const DampedOscillation freq = input_frequency_deviation(machine, r1, dI, dII);
    CHECK(freq.a0 == doctest::Approx(2.0 * speed.a0).epsilon(1e-15));
    machine.poles = 2;
    const DampedOscillation f2 = input_frequency_deviation(machine, r1, dI, dII);
    CHECK(f2.a0 == doctest::Approx(speed.a0).epsilon(1e-15));
  }
  SUBCASE("power input linearization structure") {
    MachineParams machine;
    machine.p_max = 1.5;
    machine.k_d = 0.3;
    const double dI = kPi / 4, dII = kPi / 4 - kPi / 20;
    const ReducedParams r1 = reduced(0.3, 1.0, std::sin(dII));
    const DampedOscillation osc = input_electrical_power(machine, r1, dI, dII);
    const LinearMode m = linear_mode(r1, dII);
    const double swing = machine.p_max * (dI - dII) * std::cos(dII);
    CHECK(osc.b0 == doctest::Approx(swing).epsilon(1e-14));
    CHECK(osc.a0 == doctest::Approx(swing * 0.15 / m.omega0).epsilon(1e-14));
    CHECK(osc.v_inf == doctest::Approx(machine.p_max * std::sin(dII)).epsilon(1e-14));

    // Null disturbance leaves the constant power level.
    const DampedOscillation flat = input_electrical_power(machine, r1, dII, dII);
    CHECK(flat.a0 == 0.0);
    CHECK(flat.b0 == 0.0);
    CHECK(flat.v_inf == doctest::Approx(machine.p_max * std::sin(dII)).epsilon(1e-14));

    // Zero damping kills the sine part only.
    const ReducedParams r0 = reduced(0.0, 1.0, std::sin(dII));
    const DampedOscillation nos = input_electrical_power(machine, r0, dI, dII);
    CHECK(nos.a0 == 0.0);
    CHECK(nos.b0 != 0.0);
  }
}

TEST_CASE("cascade_linear: transparent low-pass for tiny T6 and zero gain") {
  DampedOscillation osc;
  osc.a0 = 1.0;
  osc.b0 = 0.4;
  osc.lambda = 0.15;
  osc.omega0 = 0.8274;
  StabilizerParams p;
  p.t6 = 1e-7;
  const CascadeCoefficients c = cascade_linear(osc, p);
  CHECK(c.a1 == doctest::Approx(osc.a0).epsilon(1e-6));
  CHECK(c.b1 == doctest::Approx(osc.b0).epsilon(1e-6));
  CHECK(std::abs(c.c1) < 1e-6);

  StabilizerParams dead;
  dead.k_s = 1e-300;  // k_s must stay positive; effectively zero gain
  const CascadeCoefficients cz = cascade_linear(osc, dead);
  for (double v : {cz.a2, cz.b2, cz.c2, cz.d2, cz.a4, cz.b4, cz.c4, cz.d4, cz.e4, cz.f4,
                   cz.s_r, cz.g_out})
    CHECK(std::abs(v) < 1e-290);
}

TEST_CASE("cascade_linear: closure identities on random draws") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const StabilizerParams p = random_params(rng);
    const DampedOscillation osc = random_input(rng);
    const CascadeCoefficients c = cascade_linear(osc, p);

    CHECK(std::abs(c.c1 - (c.b0 - c.b1)) <= 1e-12 * stage_scale(c, StageName::v1));
    CHECK(std::abs(c.d2 + c.b2 + c.c2) <= 1e-12 * stage_scale(c, StageName::v2));
    CHECK(std::abs(c.e3 + c.b3 + c.c3 + c.d3) <= 1e-12 * stage_scale(c, StageName::v3));
    CHECK(std::abs(c.f4 + c.b4 + c.c4 + c.d4 + c.e4) <=
          1e-12 * stage_scale(c, StageName::v_pss));
    CHECK(std::abs(c.s_r + c.b_r + c.c_r + c.d_r + c.e_r + c.f_r) <=
          1e-12 * stage_scale(c, StageName::v_r));
    CHECK(std::abs(c.g_out + c.b_out + c.c_out + c.d_out + c.e_out + c.f_out + c.s_r) <=
          1e-12 * stage_scale(c, StageName::v_out));

    // Continuity at t = 0 by evaluation.
    CHECK(std::abs(eval_linear(c, StageName::v_pss, 0.0)) <=
          1e-12 * stage_scale(c, StageName::v_pss));
    CHECK(std::abs(eval_linear(c, StageName::v_out, 0.0)) <=
          1e-12 * stage_scale(c, StageName::v_out));
    CHECK(std::abs(eval_linear(c, StageName::v2, 0.0)) <=
          1e-12 * stage_scale(c, StageName::v2));
    CHECK(std::abs(eval_linear(c, StageName::v1, 0.0) - osc.initial_level()) <=
          1e-12 * std::max(stage_scale(c, StageName::v1), std::abs(osc.initial_level())));
  }
}

TEST_CASE("eval_linear: asymptotics") {
  DampedOscillation osc;
  osc.a0 = 1.0;
  osc.b0 = 0.3;
  osc.v_inf = 0.8;
  osc.lambda = 0.15;
  osc.omega0 = 0.887;
  const StabilizerParams p;
  const CascadeCoefficients c = cascade_linear(osc, p);
  const double t_late = 50.0 / std::min(osc.lambda, 1.0 / p.t5);
  double peak = 0.0;
  for (double t = 0; t < 30; t += 0.01)
    peak = std::max(peak, std::abs(eval_linear(c, StageName::v_pss, t)));
  CHECK(std::abs(eval_linear(c, StageName::v_pss, t_late)) < 1e-6 * peak);
  CHECK(std::abs(eval_linear(c, StageName::v2, t_late)) < 1e-6 * peak);
  CHECK(eval_linear(c, StageName::v1, t_late) == doctest::Approx(osc.v_inf).epsilon(1e-9));
  CHECK(eval_linear(c, StageName::v_r, t_late) == doctest::Approx(c.s_r).epsilon(1e-9));
  CHECK(eval_linear(c, StageName::v_out, t_late) == doctest::Approx(c.s_r).epsilon(1e-9));
}

TEST_CASE("oracle equivalence: closed form vs simulated cascade") {
  // Speed-deviation input on the small-step operating point plus a power
  // input with nonzero b0 and v_inf.
  const StabilizerParams p;
  const double dI = kPi / 4, dII = kPi / 4 - kPi / 20;
  const ReducedParams r1 = reduced(0.3, 1.0, std::sin(dII));

  MachineParams machine;
  machine.p_max = 1.0;
  machine.k_d = 0.3;

  const DampedOscillation inputs[] = {
      input_rotor_speed_deviation(r1, dI, dII),
      input_electrical_power(machine, r1, dI, dII),
  };
  for (const DampedOscillation& osc : inputs) {
    const CascadeCoefficients c = cascade_linear(osc, p);
    const SignalTrace vin = synthesize(osc, 30.0, 1e-3);
    const auto sim = simulate_cascade(BlockCascade::pss1a_with_avr(p), vin,
                                      osc.initial_level());
    for (StageName s : {StageName::v1, StageName::v2, StageName::v3, StageName::v_pss,
                        StageName::v_r, StageName::v_out}) {
      const SignalTrace closed = sample_linear(c, s, 0.0, 30.0, 1e-3);
      const SignalTrace& o = sim.stage(s);
      double err = 0.0, peak = 0.0;
      for (std::size_t i = 0; i < o.size(); ++i) {
        err = std::max(err, std::abs(closed.samples[i] - o.samples[i]));
        peak = std::max(peak, std::abs(o.samples[i]));
      }
      CAPTURE(to_string(s));
      CHECK(err <= 1e-5 * peak);
    }
  }
}

TEST_CASE("Laplace cross-check: transform of V_PSS equals H(iw) transform of V_in") {
  const StabilizerParams p;
  const double dI = kPi / 4, dII = kPi / 4 - kPi / 20;
  const ReducedParams r1 = reduced(0.3, 1.0, std::sin(dII));
  const DampedOscillation osc = input_rotor_speed_deviation(r1, dI, dII);  // v_inf = 0
  const CascadeCoefficients c = cascade_linear(osc, p);
  const BlockCascade pss = BlockCascade::pss1a(p);
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  for (double w : {0.1, 0.5, 0.8868, 2.0, 5.0, 20.0}) {
    const std::complex<double> s(0.0, w);
    const auto vin = to_exponential_sum(c, StageName::v_in).transform(s);
    const auto vpss = to_exponential_sum(c, StageName::v_pss).transform(s);
    const auto vout = to_exponential_sum(c, StageName::v_out).transform(s);
    CHECK(std::abs(vpss - transfer_at(pss, s) * vin) <= 1e-8 * std::abs(vpss));
    CHECK(std::abs(vout - transfer_at(full, s) * vin) <= 1e-8 * std::abs(vout));
  }
}

TEST_CASE("sample_linear: parallel kernel matches the serial reference") {
  DampedOscillation osc;
  osc.a0 = 0.7;
  osc.b0 = -0.2;
  osc.v_inf = 0.1;
  osc.lambda = 0.2;
  osc.omega0 = 1.4;
  const CascadeCoefficients c = cascade_linear(osc, StabilizerParams{});
  for (StageName s : {StageName::v_in, StageName::v_pss, StageName::v_out}) {
    const SignalTrace par = sample_linear(c, s, 0.0, 20.0, 1e-3);
    const SignalTrace ser = sample_linear_serial(c, s, 0.0, 20.0, 1e-3);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK(par.samples[i] == ser.samples[i]);
  }
}

TEST_CASE("cascade_linear: input validation") {
  DampedOscillation osc;
  osc.lambda = -0.1;
  CHECK_THROWS_AS(cascade_linear(osc, StabilizerParams{}), ConfigError);
  osc = DampedOscillation{};
  osc.omega0 = 0.0;
  CHECK_THROWS_AS(cascade_linear(osc, StabilizerParams{}), ConfigError);
  // Input decay rate exactly on a filter pole is rejected by contract.
  osc = DampedOscillation{};
  osc.lambda = 1.0 / StabilizerParams{}.t5;
  osc.omega0 = 1.0;
  CHECK_THROWS_AS(cascade_linear(osc, StabilizerParams{}), PoleCollisionError);
}
