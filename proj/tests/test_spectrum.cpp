#include <doctest.h>

#include <cmath>
#include <complex>

#include "gridpss/envelope.hpp"
#include "gridpss/errors.hpp"
#include "gridpss/linear_response.hpp"
#include "gridpss/spectrum.hpp"

using namespace gridpss;
using complexd = std::complex<double>;

namespace {

SignalTrace sampled(double dt, double horizon, auto f) {
  SignalTrace tr;
  tr.t0 = 0.0;
  tr.dt = dt;
  const auto n = static_cast<std::size_t>(horizon / dt + 0.5) + 1;
  tr.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.samples[i] = f(dt * static_cast<double>(i));
  return tr;
}

}  // namespace

TEST_CASE("ExponentialSum: textbook transform of e^{-t}") {
  ExponentialSum sum;
  sum.amplitudes = {complexd(1.0, 0.0)};
  sum.poles = {complexd(-1.0, 0.0)};
  const complexd v = sum.transform(complexd(0.0, 1.0));
  CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(v.imag() == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("spectrum_closed_form: decaying sine formula") {
  // a0 e^{-lam t} sin(w0 t) has transform a0 w0 / ((s + lam)^2 + w0^2).
  DampedOscillation osc;
  osc.a0 = 1.0;
  osc.lambda = 0.15;
  osc.omega0 = 0.82740970561188456;
  const CascadeCoefficients c = cascade_linear(osc, StabilizerParams{});
  const auto samples = spectrum_closed_form(c, StageName::v_in, {2.0});
  CHECK(samples[0].value.real() == doctest::Approx(-0.24319703592586131).epsilon(1e-13));
  CHECK(samples[0].value.imag() == doctest::Approx(-0.044313074740312139).epsilon(1e-13));
}

TEST_CASE("spectrum_numeric: zero trace") {
  const auto tr = sampled(0.01, 10.0, [](double) { return 0.0; });
  for (const auto& s : spectrum_numeric(tr, {0.5, 1.0, 2.0}))
    CHECK(std::abs(s.value) == 0.0);
}

TEST_CASE("spectrum_numeric: matches the closed form for a decaying sine") {
  const double lam = 0.15, w0 = 0.82740970561188456;
  const auto tr =
      sampled(1e-3, 120.0, [&](double t) { return std::exp(-lam * t) * std::sin(w0 * t); });
  CHECK(trace_decayed(tr));
  const auto grid = linear_omega_grid(0.1, 5.0, 30);
  const auto numeric = spectrum_numeric(tr, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const complexd s(0.0, grid[i]);
    const complexd exact = w0 / ((s + lam) * (s + lam) + w0 * w0);
    worst = std::max(worst, std::abs(numeric[i].value - exact) / std::abs(exact));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("spectrum_numeric: envelope packet matches Laplace image") {
  EnvelopeInput e;
  e.amplitude = 1.0;
  e.omega_envelope = 0.3;
  e.omega_carrier = 5.2;
  const auto tr = sampled(5e-4, 11.0, [&](double t) { return envelope_value(e, t); });
  const auto grid = linear_omega_grid(0.2, 9.0, 20);
  const auto numeric = spectrum_numeric(tr, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const complexd image = envelope_laplace(e, complexd(0.0, grid[i]));
    CHECK(std::abs(numeric[i].value - image) <= 1e-6 * std::max(1.0, std::abs(image)));
  }
}

TEST_CASE("spectrum_numeric: linearity") {
  const auto u = sampled(0.01, 40.0, [](double t) { return std::exp(-0.3 * t) * std::sin(t); });
  const auto v =
      sampled(0.01, 40.0, [](double t) { return std::exp(-0.2 * t) * std::cos(2.0 * t); });
  SignalTrace mix = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    mix.samples[i] = 2.0 * u.samples[i] - 0.5 * v.samples[i];
  const std::vector<double> grid = {0.4, 1.0, 3.3};
  const auto su = spectrum_numeric(u, grid);
  const auto sv = spectrum_numeric(v, grid);
  const auto sm = spectrum_numeric(mix, grid);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(sm[i].value - (2.0 * su[i].value - 0.5 * sv[i].value)) <
          1e-12 * std::max(1.0, std::abs(sm[i].value)));
}

TEST_CASE("spectrum: conjugate symmetry for real signals") {
  // Numeric route.
  const auto tr = sampled(0.01, 60.0, [](double t) { return std::exp(-0.25 * t) * std::sin(t); });
  const auto pos = spectrum_numeric(tr, {1.3});
  const auto neg = spectrum_numeric(tr, {-1.3});
  CHECK(std::abs(neg[0].value - std::conj(pos[0].value)) < 1e-14);

  // Closed form route.
  DampedOscillation osc;
  osc.a0 = 0.7;
  osc.b0 = 0.2;
  osc.lambda = 0.3;
  osc.omega0 = 1.1;
  const CascadeCoefficients c = cascade_linear(osc, StabilizerParams{});
  const ExponentialSum sum = to_exponential_sum(c, StageName::v_pss);
  CHECK(std::abs(sum.transform(complexd(0.0, -2.0)) -
                 std::conj(sum.transform(complexd(0.0, 2.0)))) < 1e-15);
}

TEST_CASE("spectrum_closed_form: transfer identity with the modal cascade") {
  // Amplitudes summing to zero: the input starts at the pre-event DC, as
  // every trajectory-derived transient does, so the one-sided transform of
  // the deviation is exactly the modal-part transform.
  ModalSum modes;
  modes.terms.push_back({complexd(0.2, -0.5), complexd(-0.3, 1.9)});
  modes.terms.push_back({complexd(0.2, 0.5), complexd(-0.3, -1.9)});
  modes.terms.push_back({complexd(-0.4, 0.0), complexd(-0.8, 0.0)});
  modes.dc_offset = 0.9;
  const StabilizerParams p;
  const ModalCascadeCoefficients c = cascade_modal(modes, p);
  const BlockCascade pss = BlockCascade::pss1a(p);
  const BlockCascade full = BlockCascade::pss1a_with_avr(p);
  const auto grid = linear_omega_grid(0.1, 10.0, 17);
  const auto vin = spectrum_closed_form(c, StageName::v_in, grid);
  const auto vpss = spectrum_closed_form(c, StageName::v_pss, grid);
  const auto vout = spectrum_closed_form(c, StageName::v_out, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const complexd s(0.0, grid[i]);
    CHECK(std::abs(vpss[i].value - transfer_at(pss, s) * vin[i].value) <=
          1e-10 * std::max(1.0, std::abs(vpss[i].value)));
    CHECK(std::abs(vout[i].value - transfer_at(full, s) * vin[i].value) <=
          1e-10 * std::max(1.0, std::abs(vout[i].value)));
  }
}

TEST_CASE("spectrum_numeric: parallel kernel matches the serial reference") {
  const auto tr =
      sampled(1e-3, 50.0, [](double t) { return std::exp(-0.2 * t) * std::sin(1.7 * t); });
  const auto grid = linear_omega_grid(0.05, 12.0, 64);
  const auto par = spectrum_numeric(tr, grid);
  const auto ser = spectrum_numeric_serial(tr, grid);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].value.real() == ser[i].value.real());
    CHECK(par[i].value.imag() == ser[i].value.imag());
  }
}

TEST_CASE("spectrum: pole guard and decay check") {
  ExponentialSum sum;
  sum.amplitudes = {complexd(1.0, 0.0)};
  sum.poles = {complexd(0.0, 2.0)};  // undamped mode on the axis
  CHECK_THROWS_AS(sum.transform(complexd(0.0, 2.0)), PoleCollisionError);

  const auto slow = sampled(0.01, 5.0, [](double t) { return std::exp(-0.01 * t); });
  CHECK_FALSE(trace_decayed(slow));
}
