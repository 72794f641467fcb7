#include <doctest.h>

#include <cmath>
#include <complex>

#include "gridpss/errors.hpp"
#include "gridpss/stabilizer.hpp"

using namespace gridpss;
using complexd = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

SignalTrace constant_trace(double level, double dt, double horizon) {
  SignalTrace tr;
  tr.t0 = 0.0;
  tr.dt = dt;
  tr.samples.assign(static_cast<std::size_t>(horizon / dt) + 1, level);
  return tr;
}

// Steady-state amplitude/phase of the tail of a simulated response at a
// known frequency: least squares on a*sin + b*cos + offset (the PI stage
// leaves a DC remnant in v_r and v_out).
std::pair<double, double> measure_gain_phase(const SignalTrace& trace, double omega,
                                             double from_t) {
  double m[3][3] = {};
  double rhs[3] = {};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = trace.time(i);
    if (t < from_t) continue;
    const double basis[3] = {std::sin(omega * t), std::cos(omega * t), 1.0};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
      rhs[r] += trace.samples[i] * basis[r];
    }
  }
  // Gaussian elimination on the 3x3 normal equations.
  double a[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a[r][c] = m[r][c];
    a[r][3] = rhs[r];
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    for (int c = 0; c < 4; ++c) std::swap(a[col][c], a[piv][c]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (int c = 0; c < 4; ++c) a[r][c] -= f * a[col][c];
    }
  }
  const double sin_coef = a[0][3] / a[0][0];
  const double cos_coef = a[1][3] / a[1][1];
  return {std::hypot(sin_coef, cos_coef), std::atan2(cos_coef, sin_coef)};
}

}  // namespace

TEST_CASE("stabilizer params validation") {
  StabilizerParams p;
  CHECK_NOTHROW(p.validate());
  p.t2 = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = StabilizerParams{};
  p.t4 = p.t6;  // pole collision
  CHECK_THROWS_AS(p.validate(), PoleCollisionError);
  p = StabilizerParams{};
  p.t2 = p.t5;
  CHECK_THROWS_AS(p.validate(), PoleCollisionError);
  // T_N = T5 is the shipped default and is regular (PI pole sits at 0).
  p = StabilizerParams{};
  CHECK(p.t_n == p.t5);
}

TEST_CASE("transfer_at: washout kills DC, low-pass preserves it") {
  const StabilizerParams p;
  const BlockCascade pss = BlockCascade::pss1a(p);
  CHECK(std::abs(transfer_at(pss, complexd(0.0, 0.0))) == 0.0);

  BlockCascade lp;
  lp.stages = {{StageKind::low_pass, 1.0, 0.0, p.t6, StageName::v1}};
  CHECK(transfer_at(lp, complexd(0.0, 0.0)).real() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("transfer_at: four-stage product at s = i") {
  const BlockCascade pss = BlockCascade::pss1a(StabilizerParams{});
  const complexd h = transfer_at(pss, complexd(0.0, 1.0));
  CHECK(h.real() == doctest::Approx(0.54499126051758962).epsilon(1e-14));
  CHECK(h.imag() == doctest::Approx(0.043952214780320416).epsilon(1e-12));

  const BlockCascade avr = BlockCascade::avr(StabilizerParams{});
  const complexd ha = transfer_at(avr, complexd(0.0, 1.0));
  CHECK(ha.real() == doctest::Approx(0.99909676292648808).epsilon(1e-14));
  CHECK(ha.imag() == doctest::Approx(-0.50179837417326767).epsilon(1e-14));
}

TEST_CASE("transfer_at: pole evaluation raises") {
  const StabilizerParams p;
  const BlockCascade pss = BlockCascade::pss1a(p);
  CHECK_THROWS_AS(transfer_at(pss, complexd(-1.0 / p.t6, 0.0)), PoleCollisionError);
  const BlockCascade avr = BlockCascade::avr(p);
  CHECK_THROWS_AS(transfer_at(avr, complexd(0.0, 0.0)), PoleCollisionError);
}

TEST_CASE("bode: washout zero drives magnitude to -inf dB at low omega") {
  const BlockCascade pss = BlockCascade::pss1a(StabilizerParams{});
  const auto grid = default_bode_grid();
  const auto samples = bode(pss, grid);
  // Strictly increasing magnitude well below the 1/T5 = 0.5 rad/s corner.
  for (std::size_t i = 1; i < samples.size() && samples[i].omega < 0.05; ++i)
    CHECK(samples[i].magnitude_db > samples[i - 1].magnitude_db);
  CHECK(samples.front().magnitude_db < -50.0);
}

TEST_CASE("bode: high-frequency asymptote of the PSS1A") {
  const StabilizerParams p;
  const BlockCascade pss = BlockCascade::pss1a(p);
  const double w = 1e3;
  const auto samples = bode(pss, {w});
  const double expected = p.k_s * (p.t1 / p.t2) * (p.t3 / p.t4) / (w * p.t6);
  CHECK(samples[0].magnitude_db ==
        doctest::Approx(20.0 * std::log10(expected)).epsilon(0.05));
  // Slope approaches -20 dB/decade from the low-pass rolloff.
  const auto two = bode(pss, {1e3, 1e4});
  CHECK(two[1].magnitude_db - two[0].magnitude_db == doctest::Approx(-20.0).epsilon(0.002));
}

TEST_CASE("bode: cascade equals the pointwise product of its parts") {
  const StabilizerParams p;
  const auto grid = default_bode_grid();
  const auto full = bode(BlockCascade::pss1a_with_avr(p), grid);
  const auto pss = bode(BlockCascade::pss1a(p), grid);
  const auto avr = bode(BlockCascade::avr(p), grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(full[i].magnitude_db - (pss[i].magnitude_db + avr[i].magnitude_db)) < 1e-10);
    const complexd h = transfer_at(BlockCascade::pss1a_with_avr(p), complexd(0.0, grid[i]));
    const complexd prod = transfer_at(BlockCascade::pss1a(p), complexd(0.0, grid[i])) *
                          transfer_at(BlockCascade::avr(p), complexd(0.0, grid[i]));
    CHECK(std::abs(h - prod) <= 1e-10 * std::abs(prod));
  }
  CHECK_THROWS_AS(bode(BlockCascade::pss1a(p), {}), ConfigError);
}

TEST_CASE("bode: AVR phase tends to -90 degrees at low omega") {
  // At omega = 1e-3 the PI zero still contributes ~0.11 degrees.
  const auto samples = bode(BlockCascade::avr(StabilizerParams{}), default_bode_grid());
  CHECK(samples.front().phase_deg == doctest::Approx(-89.885511726).epsilon(1e-6));
  CHECK(bode(BlockCascade::avr(StabilizerParams{}), {1e-6})[0].phase_deg ==
        doctest::Approx(-90.0).epsilon(1e-5));
}

TEST_CASE("simulate_cascade: constant input is preserved by V1 and killed downstream") {
  const StabilizerParams p;
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  const double c = 0.7;
  const auto sim = simulate_cascade(full, constant_trace(c, 0.01, 25.0), c);
  for (StageName s : {StageName::v2, StageName::v3, StageName::v_pss, StageName::v_r,
                      StageName::v_out}) {
    for (double v : sim.stage(s).samples) CHECK(std::abs(v) < 1e-9);
  }
  for (double v : sim.stage(StageName::v1).samples)
    CHECK(std::abs(v - c) < 1e-9);
}

TEST_CASE("simulate_cascade: zero input gives zero everywhere") {
  const auto sim = simulate_cascade(BlockCascade::pss1a_with_avr(StabilizerParams{}),
                                    constant_trace(0.0, 0.01, 5.0), 0.0);
  for (const auto& tr : sim.traces)
    for (double v : tr.samples) CHECK(v == 0.0);
}

TEST_CASE("simulate_cascade: DC convergence from a cold start") {
  const StabilizerParams p;
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  const double c = 1.3;
  // States at the zero operating point while the input is a nonzero
  // constant: V1 relaxes to c with T6, V2 decays with T5.
  const auto sim = simulate_cascade(full, constant_trace(c, 0.001, 40.0), 0.0);
  const auto& v1 = sim.stage(StageName::v1);
  const auto& v2 = sim.stage(StageName::v2);
  for (std::size_t i = 0; i < v1.size(); ++i) {
    const double t = v1.time(i);
    if (t > 15.0 * p.t5) {
      CHECK(std::abs(v1.samples[i] - c) < 1e-9);
      CHECK(std::abs(v2.samples[i]) < 1e-3 * p.k_s * c);
    }
  }
  // Half-life sanity: the V1 error decays by e over T6.
  const double e0 = std::abs(v1.interpolate(0.0) - c);
  const double e1 = std::abs(v1.interpolate(p.t6) - c);
  CHECK(e1 / e0 == doctest::Approx(std::exp(-1.0)).epsilon(1e-3));
}

TEST_CASE("simulate_cascade: linearity") {
  const StabilizerParams p;
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  SignalTrace u = constant_trace(0.0, 0.01, 20.0);
  SignalTrace v = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = u.time(i);
    u.samples[i] = std::exp(-0.2 * t) * std::sin(1.3 * t) + 0.4;
    v.samples[i] = std::exp(-0.1 * t) * std::cos(0.7 * t);
  }
  const double a = 1.7, b = -0.6;
  SignalTrace mix = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    mix.samples[i] = a * u.samples[i] + b * v.samples[i];
  const auto su = simulate_cascade(full, u, u.samples[0]);
  const auto sv = simulate_cascade(full, v, v.samples[0]);
  const auto sm = simulate_cascade(full, mix, mix.samples[0]);
  for (std::size_t k = 0; k < sm.traces.size(); ++k) {
    double peak = 0.0;
    for (double x : sm.traces[k].samples) peak = std::max(peak, std::abs(x));
    for (std::size_t i = 0; i < mix.size(); ++i) {
      const double combo = a * su.traces[k].samples[i] + b * sv.traces[k].samples[i];
      CHECK(std::abs(sm.traces[k].samples[i] - combo) <= 1e-9 * std::max(1.0, peak));
    }
  }
}

TEST_CASE("simulate_cascade: steady sinusoidal gain matches transfer_at") {
  const StabilizerParams p;
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  for (double omega : {0.5, 1.0, 3.0}) {
    const double dt = 1e-3;
    const double horizon = 80.0;
    SignalTrace u;
    u.t0 = 0.0;
    u.dt = dt;
    const auto n = static_cast<std::size_t>(horizon / dt) + 1;
    u.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      u.samples[i] = std::sin(omega * dt * static_cast<double>(i));
    const auto sim = simulate_cascade(full, u, 0.0);
    const auto [gain, phase] = measure_gain_phase(sim.stage(StageName::v_out), omega, 60.0);
    const complexd h = transfer_at(full, complexd(0.0, omega));
    CHECK(gain == doctest::Approx(std::abs(h)).epsilon(0.005));
    double dphase = phase - std::arg(h);
    while (dphase > kPi) dphase -= 2 * kPi;
    while (dphase < -kPi) dphase += 2 * kPi;
    CHECK(std::abs(dphase) * 180.0 / kPi < 0.5);
  }
}
