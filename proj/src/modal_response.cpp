#include "gridpss/modal_response.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "gridpss/errors.hpp"

namespace gridpss {

using complexd = std::complex<double>;

double ModalSum::value(double t) const {
  complexd acc = dc_offset;
  for (const Term& term : terms) acc += term.amplitude * std::exp(term.eigenvalue * t);
  return acc.real();
}

const ModalSum::Term& ModalSum::dominant() const {
  if (terms.empty()) throw NumericError("modal sum has no non-DC terms");
  const Term* best = &terms.front();
  for (const Term& term : terms)
    if (std::abs(term.amplitude) > std::abs(best->amplitude)) best = &term;
  return *best;
}

void ModalSum::validate() const {
  std::vector<bool> matched(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    if (std::abs(t.eigenvalue.imag()) < 1e-14) {
      if (std::abs(t.amplitude.imag()) > 1e-12 * (1.0 + std::abs(t.amplitude)))
        throw NumericError("modal sum: real eigenvalue with non-real amplitude");
      matched[i] = true;
      continue;
    }
    if (matched[i]) continue;
    bool found = false;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (matched[j]) continue;
      const double scale = 1.0 + std::abs(t.eigenvalue);
      if (std::abs(terms[j].eigenvalue - std::conj(t.eigenvalue)) < 1e-9 * scale &&
          std::abs(terms[j].amplitude - std::conj(t.amplitude)) <
              1e-9 * (1.0 + std::abs(t.amplitude))) {
        matched[i] = matched[j] = true;
        found = true;
        break;
      }
    }
    if (!found) throw NumericError("modal sum: complex mode without conjugate partner");
  }
}

const char* to_string(InputKind k) {
  switch (k) {
    case InputKind::speed: return "speed";
    case InputKind::frequency: return "frequency";
    case InputKind::power: return "power";
    case InputKind::envelope: return "envelope";
  }
  return "?";
}

InputKind input_kind_from_string(const std::string& name) {
  for (InputKind k :
       {InputKind::speed, InputKind::frequency, InputKind::power, InputKind::envelope})
    if (name == to_string(k)) return k;
  throw ConfigError("input_kind: unknown value '" + name + "'");
}

namespace {

// Least-squares amplitude refinement with the conjugate structure imposed:
// unknowns are the real/imaginary parts of one representative per pair.
struct AmplitudeFit {
  ModalSum modes;
  double rel_l2_error;
};

AmplitudeFit fit_amplitudes(const std::vector<complexd>& eigenvalues, bool with_dc,
                            const SignalTrace& trace) {
  const std::size_t n = trace.size();
  if (eigenvalues.empty() && !with_dc) {
    AmplitudeFit empty;
    empty.rel_l2_error = 1.0;
    return empty;
  }
  // Representatives: real eigenvalues and the Im > 0 member of each pair.
  std::vector<complexd> reals, pairs;
  for (const complexd& lam : eigenvalues) {
    if (std::abs(lam.imag()) < 1e-12 * (1.0 + std::abs(lam.real())))
      reals.push_back(complexd(lam.real(), 0.0));
    else if (lam.imag() > 0.0)
      pairs.push_back(lam);
  }
  const std::size_t cols = reals.size() + 2 * pairs.size() + (with_dc ? 1 : 0);
  Eigen::MatrixXd design(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.dt * static_cast<double>(i);
    std::size_t col = 0;
    for (const complexd& lam : reals) design(i, col++) = std::exp(lam.real() * t);
    for (const complexd& lam : pairs) {
      const double e = std::exp(lam.real() * t);
      design(i, col++) = 2.0 * e * std::cos(lam.imag() * t);
      design(i, col++) = -2.0 * e * std::sin(lam.imag() * t);
    }
    if (with_dc) design(i, col++) = 1.0;
  }
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs(i) = trace.samples[i];
  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(rhs);
  const double resid = (design * sol - rhs).norm();
  const double denom = std::max(rhs.norm(), 1e-300);

  AmplitudeFit fit;
  fit.rel_l2_error = resid / denom;
  std::size_t col = 0;
  for (const complexd& lam : reals)
    fit.modes.terms.push_back({complexd(sol(col++), 0.0), lam});
  for (const complexd& lam : pairs) {
    const complexd a(sol(col), sol(col + 1));
    col += 2;
    fit.modes.terms.push_back({a, lam});
    fit.modes.terms.push_back({std::conj(a), std::conj(lam)});
  }
  if (with_dc) fit.modes.dc_offset = sol(col);
  return fit;
}

// Discrete pencil eigenvalues z_j from the shifted right-singular-vector
// pencil of the data Hankel matrix, truncated to the given order.
std::vector<complexd> pencil_eigenvalues(const Eigen::MatrixXd& v_right, int order) {
  const auto l = v_right.rows() - 1;
  const Eigen::MatrixXd v1 = v_right.topRows(l).leftCols(order);
  const Eigen::MatrixXd v2 = v_right.bottomRows(l).leftCols(order);
  const Eigen::MatrixXd a = v1.colPivHouseholderQr().solve(v2);
  const Eigen::EigenSolver<Eigen::MatrixXd> eig(a);
  std::vector<complexd> z(eig.eigenvalues().data(),
                          eig.eigenvalues().data() + eig.eigenvalues().size());
  return z;
}

// Enforce exact conjugate symmetry on the eigenvalue set.
std::vector<complexd> symmetrize(const std::vector<complexd>& lams) {
  std::vector<complexd> out;
  std::vector<bool> used(lams.size(), false);
  for (std::size_t i = 0; i < lams.size(); ++i) {
    if (used[i]) continue;
    const complexd li = lams[i];
    if (std::abs(li.imag()) < 1e-12 * (1.0 + std::abs(li.real()))) {
      out.push_back(complexd(li.real(), 0.0));
      used[i] = true;
      continue;
    }
    std::size_t best = lams.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < lams.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(lams[j] - std::conj(li));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < lams.size() && best_dist < 1e-3 * (1.0 + std::abs(li))) {
      const complexd avg = 0.5 * (li + std::conj(lams[best]));
      out.push_back(complexd(avg.real(), std::abs(avg.imag())));
      out.push_back(std::conj(out.back()));
      used[i] = used[best] = true;
    } else {
      // Unpaired complex eigenvalue: keep its real part only.
      out.push_back(complexd(li.real(), 0.0));
      used[i] = true;
    }
  }
  return out;
}

}  // namespace

ExtractionResult extract_modes(const SignalTrace& trace, int max_order, double sv_threshold,
                               double fit_tolerance) {
  trace.validate("extract_modes trace");
  const auto n = static_cast<Eigen::Index>(trace.size());
  if (max_order < 1) throw ConfigError("extract_modes: max_order must be >= 1");
  if (n < 8) throw ConfigError("extract_modes: trace too short");
  if (max_order > static_cast<int>(trace.size() / 4))
    throw ConfigError("extract_modes: max_order must be <= samples/4");

  // Pencil parameter L ~ N/3 balances noise robustness and cost.
  const Eigen::Index l = n / 3;
  Eigen::MatrixXd hankel(n - l, l + 1);
  for (Eigen::Index i = 0; i < n - l; ++i)
    for (Eigen::Index j = 0; j <= l; ++j)
      hankel(i, j) = trace.samples[static_cast<std::size_t>(i + j)];

  Eigen::BDCSVD<Eigen::MatrixXd> svd(hankel, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(0) <= 0.0) {  // all-zero trace
    ExtractionResult res;
    res.modes.dc_offset = 0.0;
    return res;
  }
  int usable = 0;
  while (usable < sv.size() && sv(usable) >= sv_threshold * sv(0)) ++usable;
  usable = std::min(usable, std::min<int>(max_order, static_cast<int>(l)));
  if (usable == 0)
    throw NumericError("extract_modes: singular-value gap below threshold, pencil ill-conditioned");

  const Eigen::MatrixXd v_right = svd.matrixV();
  ExtractionResult best;
  best.fit_error = std::numeric_limits<double>::infinity();
  for (int order = 1; order <= usable; order = (order < 6 ? order + 1 : order + 2)) {
    const std::vector<complexd> z = pencil_eigenvalues(v_right, order);
    std::vector<complexd> lams;
    for (const complexd& zi : z) {
      if (std::abs(zi) < 1e-12) continue;  // spurious fast-decay artifacts
      lams.push_back(std::log(zi) / trace.dt);
    }
    lams = symmetrize(lams);
    // Near-zero eigenvalues are the constant mode; route them to the DC slot.
    const double span = trace.dt * static_cast<double>(n - 1);
    bool with_dc = false;
    std::vector<complexd> kept;
    for (const complexd& lam : lams) {
      if (std::abs(lam) * span < 1e-6)
        with_dc = true;
      else
        kept.push_back(lam);
    }
    AmplitudeFit fit = fit_amplitudes(kept, with_dc, trace);
    if (fit.rel_l2_error < best.fit_error) {
      best.modes = std::move(fit.modes);
      best.fit_error = fit.rel_l2_error;
      best.order = order;
    }
    if (best.fit_error <= fit_tolerance) break;
  }
  if (best.fit_error > fit_tolerance)
    throw NumericError("extract_modes: order exhausted without reaching fit tolerance (best " +
                       std::to_string(best.fit_error) + ")");
  best.modes.validate();
  return best;
}

namespace {

void check_mode_pole(const complexd& lam, double t_i, const char* name, std::size_t j) {
  if (std::abs(1.0 + lam * t_i) < 1e-9 * std::max(1.0, std::abs(lam) * t_i))
    throw PoleCollisionError("cascade_modal: mode " + std::to_string(j) +
                             " collides with the pole of " + name);
}

double real_checked(const complexd& v, const char* what) {
  if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
    throw NumericError(std::string("cascade_modal: ") + what +
                       " has a non-vanishing imaginary part (unpaired modes?)");
  return v.real();
}

}  // namespace

ModalCascadeCoefficients cascade_modal(const ModalSum& modes, const StabilizerParams& p) {
  p.validate();
  modes.validate();

  ModalCascadeCoefficients c;
  c.t1 = p.t1; c.t2 = p.t2; c.t3 = p.t3; c.t4 = p.t4; c.t5 = p.t5; c.t6 = p.t6;
  c.t_n = p.t_n; c.t_s = p.t_s;
  c.dc = modes.dc_offset;

  const std::size_t m = modes.terms.size();
  c.eigenvalues.resize(m);
  c.a0.resize(m); c.a1.resize(m); c.a2.resize(m); c.a3.resize(m); c.a4.resize(m);
  c.a_r.resize(m); c.a_out.resize(m);

  complexd sum0 = 0.0, sum1 = 0.0, sum2 = 0.0, sum3 = 0.0, sum4 = 0.0, sum_r = 0.0,
           sum_out = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const complexd lam = modes.terms[j].eigenvalue;
    const complexd a0 = modes.terms[j].amplitude;
    check_mode_pole(lam, p.t6, "T6", j);
    check_mode_pole(lam, p.t5, "T5", j);
    check_mode_pole(lam, p.t2, "T2", j);
    check_mode_pole(lam, p.t4, "T4", j);
    check_mode_pole(lam, p.t_s, "TS", j);
    if (std::abs(lam) * p.t_n < 1e-12)
      throw PoleCollisionError("cascade_modal: mode " + std::to_string(j) +
                               " sits on the PI pole at the origin; fold it into dc_offset");

    c.eigenvalues[j] = lam;
    c.a0[j] = a0;
    c.a1[j] = a0 / (1.0 + lam * p.t6);
    c.a2[j] = p.k_s * lam * p.t5 / (1.0 + lam * p.t5) * c.a1[j];
    c.a3[j] = (1.0 + lam * p.t1) / (1.0 + lam * p.t2) * c.a2[j];
    c.a4[j] = (1.0 + lam * p.t3) / (1.0 + lam * p.t4) * c.a3[j];
    c.a_r[j] = p.k_pr * (1.0 + lam * p.t_n) / (lam * p.t_n) * c.a4[j];
    c.a_out[j] = p.k_ps / (1.0 + lam * p.t_s) * c.a_r[j];
    sum0 += c.a0[j]; sum1 += c.a1[j]; sum2 += c.a2[j]; sum3 += c.a3[j]; sum4 += c.a4[j];
    sum_r += c.a_r[j]; sum_out += c.a_out[j];
  }

  c.c1 = real_checked(sum0 - sum1, "c1");
  c.c2 = -p.k_s * p.t5 / (p.t6 - p.t5) * c.c1;
  c.d2 = real_checked(-sum2, "d2") - c.c2;
  c.c3 = (p.t6 - p.t1) / (p.t6 - p.t2) * c.c2;
  c.d3 = (p.t5 - p.t1) / (p.t5 - p.t2) * c.d2;
  c.e3 = real_checked(-sum3, "e3") - c.c3 - c.d3;
  c.c4 = (p.t6 - p.t3) / (p.t6 - p.t4) * c.c3;
  c.d4 = (p.t5 - p.t3) / (p.t5 - p.t4) * c.d3;
  c.e4 = (p.t2 - p.t3) / (p.t2 - p.t4) * c.e3;
  c.f4 = real_checked(-sum4, "f4") - c.c4 - c.d4 - c.e4;
  c.c_r = p.k_pr * (p.t_n - p.t6) / p.t_n * c.c4;
  c.d_r = p.k_pr * (p.t_n - p.t5) / p.t_n * c.d4;
  c.e_r = p.k_pr * (p.t_n - p.t2) / p.t_n * c.e4;
  c.f_r = p.k_pr * (p.t_n - p.t4) / p.t_n * c.f4;
  c.s_r = real_checked(-sum_r, "s_r") - c.c_r - c.d_r - c.e_r - c.f_r;
  c.c_out = p.k_ps * p.t6 * c.c_r / (p.t6 - p.t_s);
  c.d_out = p.k_ps * p.t5 * c.d_r / (p.t5 - p.t_s);
  c.e_out = p.k_ps * p.t2 * c.e_r / (p.t2 - p.t_s);
  c.f_out = p.k_ps * p.t4 * c.f_r / (p.t4 - p.t_s);
  c.g_out = real_checked(-sum_out, "g_out") - c.c_out - c.d_out - c.e_out - c.f_out - c.s_r;
  return c;
}

double eval_modal(const ModalCascadeCoefficients& c, StageName stage, double t) {
  const std::vector<complexd>* amps = nullptr;
  switch (stage) {
    case StageName::v_in: amps = &c.a0; break;
    case StageName::v1: amps = &c.a1; break;
    case StageName::v2: amps = &c.a2; break;
    case StageName::v3: amps = &c.a3; break;
    case StageName::v_pss: amps = &c.a4; break;
    case StageName::v_r: amps = &c.a_r; break;
    case StageName::v_out: amps = &c.a_out; break;
  }
  complexd acc = 0.0;
  for (std::size_t j = 0; j < amps->size(); ++j)
    acc += (*amps)[j] * std::exp(c.eigenvalues[j] * t);
  double v = acc.real();
  auto e = [t](double T) { return std::exp(-t / T); };
  switch (stage) {
    case StageName::v_in: return v + c.dc;
    case StageName::v1: return v + c.c1 * e(c.t6) + c.dc;
    case StageName::v2: return v + c.c2 * e(c.t6) + c.d2 * e(c.t5);
    case StageName::v3: return v + c.c3 * e(c.t6) + c.d3 * e(c.t5) + c.e3 * e(c.t2);
    case StageName::v_pss:
      return v + c.c4 * e(c.t6) + c.d4 * e(c.t5) + c.e4 * e(c.t2) + c.f4 * e(c.t4);
    case StageName::v_r:
      return v + c.c_r * e(c.t6) + c.d_r * e(c.t5) + c.e_r * e(c.t2) + c.f_r * e(c.t4) + c.s_r;
    case StageName::v_out:
      return v + c.c_out * e(c.t6) + c.d_out * e(c.t5) + c.e_out * e(c.t2) + c.f_out * e(c.t4) +
             c.g_out * e(c.t_s) + c.s_r;
  }
  throw ConfigError("eval_modal: unknown stage");
}

SignalTrace sample_modal_serial(const ModalCascadeCoefficients& coeffs, StageName stage,
                                double t0, double horizon, double dt) {
  const auto grid = uniform_grid(t0, horizon, dt);
  SignalTrace out;
  out.t0 = t0;
  out.dt = dt;
  out.samples.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.samples[i] = eval_modal(coeffs, stage, grid[i] - t0);
  return out;
}

SignalTrace sample_modal(const ModalCascadeCoefficients& coeffs, StageName stage, double t0,
                         double horizon, double dt) {
  const auto grid = uniform_grid(t0, horizon, dt);
  SignalTrace out;
  out.t0 = t0;
  out.dt = dt;
  out.samples.resize(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out.samples[static_cast<std::size_t>(i)] =
        eval_modal(coeffs, stage, grid[static_cast<std::size_t>(i)] - t0);
  return out;
}

SignalTrace make_input_trace(const SignalTrace& delta, const SignalTrace& delta_dot,
                             const InputSpec& input, const ReducedParams& reduced,
                             double delta_final) {
  (void)delta_final;
  switch (input.kind) {
    case InputKind::speed:
      return delta_dot.scaled(-reduced.x.weight());
    case InputKind::frequency:
      return delta_dot.scaled(-0.5 * static_cast<double>(input.poles) * reduced.x.weight());
    case InputKind::power: {
      SignalTrace out = delta;
      for (double& v : out.samples) v = input.p_max * std::sin(v);
      return out;
    }
    case InputKind::envelope:
      break;
  }
  throw ConfigError("make_input_trace: envelope input is not a trajectory-derived signal");
}

double input_dc_level(const InputSpec& input, const ReducedParams& reduced,
                      double delta_initial) {
  // Speed and frequency deviations vanish before the event; the power
  // signal holds P_max sin(delta_I).
  if (input.kind == InputKind::power) return input.p_max * std::sin(delta_initial);
  (void)reduced;
  return 0.0;
}

namespace {

// The power input settles at P_max sin(delta_II) = P_max tau_r/xi; the
// deviation inputs decay to zero.
double input_final_level(const InputSpec& input, const ReducedParams& reduced,
                         double delta_final) {
  if (input.kind == InputKind::power) return input.p_max * std::sin(delta_final);
  (void)reduced;
  (void)delta_final;
  return 0.0;
}

// Decimate so the pencil sees O(2000) samples; mode content of the rotor
// swing sits far below the resulting Nyquist rate.
std::size_t extraction_stride(std::size_t n) {
  const std::size_t target = 2000;
  return (n + target - 1) / target;
}

}  // namespace

NonlinearResponse nonlinear_response_from_traces(const SignalTrace& delta,
                                                 const SignalTrace& delta_dot,
                                                 double delta_initial, double delta_final,
                                                 const ReducedParams& reduced,
                                                 const InputSpec& input,
                                                 const StabilizerParams& pss,
                                                 const ExtractionOptions& extraction) {
  NonlinearResponse out;
  out.v_in = make_input_trace(delta, delta_dot, input, reduced, delta_final);

  // Extract modes from the deviation about the known final level.
  const double v_final = input_final_level(input, reduced, delta_final);
  SignalTrace deviation = out.v_in.scaled(1.0, -v_final);
  deviation = deviation.decimated(extraction_stride(deviation.size()));

  ExtractionResult ext = extract_modes(deviation, extraction.max_order,
                                       extraction.sv_threshold, extraction.fit_tolerance);
  out.modes = std::move(ext.modes);
  out.modes.dc_offset += v_final;
  out.fit_error = ext.fit_error;

  out.coeffs = cascade_modal(out.modes, pss);

  out.v_in_fit = out.v_in;
  const auto n = static_cast<std::ptrdiff_t>(out.v_in_fit.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.v_in_fit.samples[k] = out.modes.value(out.v_in.dt * static_cast<double>(k));
  }

  const double dc0 = input_dc_level(input, reduced, delta_initial);
  out.oracle = simulate_cascade(BlockCascade::pss1a_with_avr(pss), out.v_in_fit, dc0);

  const double horizon = out.v_in.dt * static_cast<double>(out.v_in.size() - 1);
  for (StageName stage : {StageName::v_in, StageName::v1, StageName::v2, StageName::v3,
                          StageName::v_pss, StageName::v_r, StageName::v_out}) {
    out.stage_order.push_back(stage);
    out.closed_form.push_back(sample_modal(out.coeffs, stage, out.v_in.t0, horizon, out.v_in.dt));
  }
  return out;
}

NonlinearResponse nonlinear_response(const TransientEvent& event, const ReducedParams& reduced,
                                     const InputSpec& input, const StabilizerParams& pss,
                                     double horizon, double dt,
                                     const ExtractionOptions& extraction) {
  const RotorTrace rotor = integrate_rotor(event, reduced, horizon, dt);
  ReducedParams post = reduced;
  post.xi = event.xi_final;
  const double delta_final = equilibrium_angle(post);
  return nonlinear_response_from_traces(rotor.delta, rotor.delta_dot, event.delta_initial,
                                        delta_final, reduced, input, pss, extraction);
}

const SignalTrace& NonlinearResponse::stage(StageName name) const {
  for (std::size_t i = 0; i < stage_order.size(); ++i)
    if (stage_order[i] == name) return closed_form[i];
  throw ConfigError(std::string("no such closed-form stage: ") + to_string(name));
}

}  // namespace gridpss
