#include "gn/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gn {

HarmonicSpectrum harmonics(const RealVector& m) {
  const int L = static_cast<int>(m.size());
  if (L == 0 || L % 2 != 0) throw ConfigError("harmonics: field length must be even and nonzero");
  HarmonicSpectrum s;
  s.mhat.resize(L);
  const Real w = -2.0 * std::numbers::pi / L;
  for (int i = 0; i < L; ++i) {
    const int nu = i - L / 2;
    Complex acc(0, 0);
    for (int j = 0; j < L; ++j) {
      const Real phi = w * nu * j;
      acc += Complex(std::cos(phi), std::sin(phi)) * m(j);
    }
    s.mhat(i) = acc / static_cast<Real>(L);
  }
  return s;
}

Real folded_amplitude(const HarmonicSpectrum& s, int nu) {
  if (nu < 0 || nu > s.L() / 2) throw ConfigError("folded_amplitude: nu out of range");
  if (nu == 0) return std::abs(s.at(0));
  if (nu == s.L() / 2) return std::abs(s.at(-s.L() / 2));
  return std::abs(s.at(nu)) + std::abs(s.at(-nu));
}

DominantHarmonic dominant_harmonic(const HarmonicSpectrum& s) {
  DominantHarmonic d;
  for (int nu = 0; nu <= s.L() / 2; ++nu) {
    const Real a = folded_amplitude(s, nu);
    if (a > d.amplitude) { // strict: ties stay with the smaller nu
      d.amplitude = a;
      d.nu = nu;
    }
  }
  for (int nu = s.nu_min(); nu <= s.nu_max(); ++nu)
    d.max_abs = std::max(d.max_abs, std::abs(s.at(nu)));
  return d;
}

Real order_distance(const HarmonicSpectrum& at_t, const HarmonicSpectrum& eq) {
  if (at_t.L() != eq.L()) throw ConfigError("order_distance: spectra have different lengths");
  return std::sqrt((at_t.mhat - eq.mhat).squaredNorm());
}

Real order_distance(const HarmonicSpectrum& at_t, const HarmonicSpectrum& eq,
                    const HarmonicSpectrum& at0) {
  const Real denom = order_distance(at0, eq);
  if (denom == 0.0)
    throw ConfigError("order_distance: normalization requested but the initial spectrum "
                      "coincides with the target spectrum");
  return order_distance(at_t, eq) / denom;
}

Real euclidean_param_distance(const RealVector& a, const RealVector& b) {
  if (a.size() != b.size()) throw ConfigError("euclidean_param_distance: size mismatch");
  return (a - b).norm();
}

Real fidelity(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
    throw ConfigError("fidelity: arguments must be square and of equal size");
  const Eigen::Index L = a.rows();
  ComplexMatrix e = ComplexMatrix::Identity(L, L) - a - b;
  e.noalias() += 2.0 * a * b;
  const Complex det = Eigen::PartialPivLU<ComplexMatrix>(e).determinant();
  if (std::abs(det.imag()) > 1e-8)
    throw PhysicsError("fidelity: determinant has imaginary part " + std::to_string(det.imag()));
  const Real re = det.real();
  if (re < -1e-8 || re > 1.0 + 1e-8)
    throw PhysicsError("fidelity: value " + std::to_string(re) + " outside [0,1]");
  return std::clamp(re, 0.0, 1.0);
}

Real trace_distance(const CorrelationMatrix& a, const CorrelationMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("trace_distance: size mismatch");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a - b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw PhysicsError("trace_distance: eigensolver failed");
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DistanceSeries upper_envelope(const DistanceSeries& s) {
  DistanceSeries env;
  env.times = s.times;
  env.values.resize(s.values.size());
  Real running = -std::numeric_limits<Real>::infinity();
  for (Eigen::Index i = static_cast<Eigen::Index>(s.values.size()) - 1; i >= 0; --i) {
    running = std::max(running, s.values[i]);
    env.values[i] = running;
  }
  return env;
}

RelaxationTime relaxation_time(const DistanceSeries& env, Real threshold, Interp interp) {
  if (env.times.size() != env.values.size() || env.times.empty())
    throw ConfigError("relaxation_time: empty or inconsistent series");
  if (env.values.front() <= threshold) return {true, env.times.front()};
  for (size_t i = 1; i < env.values.size(); ++i) {
    if (env.values[i] <= threshold) {
      const Real t0 = env.times[i - 1], t1 = env.times[i];
      const Real v0 = env.values[i - 1], v1 = env.values[i];
      if (v0 == v1) return {true, t1};
      if (interp == Interp::SemiLog && v0 > 0 && v1 > 0 && threshold > 0) {
        const Real lv0 = std::log(v0), lv1 = std::log(v1), lth = std::log(threshold);
        return {true, t0 + (t1 - t0) * (lv0 - lth) / (lv0 - lv1)};
      }
      return {true, t0 + (t1 - t0) * (v0 - threshold) / (v0 - v1)};
    }
  }
  return {false, 0.0};
}

DptReport detect_dpt(const std::vector<Real>& times,
                     const std::vector<HarmonicSpectrum>& spectra,
                     const DistanceSeries* f_bw, const DptConfig& cfg) {
  if (times.size() != spectra.size() || times.size() < 3)
    throw ConfigError("detect_dpt: need at least 3 aligned samples");
  const size_t n = times.size();

  DptReport rep;
  const DominantHarmonic fin = dominant_harmonic(spectra.back());
  rep.dominant_nu_final = fin.nu;
  rep.final_amplitude = fin.max_abs;
  rep.final_ordered = fin.max_abs >= cfg.dp_threshold;
  if (!rep.final_ordered) return rep; // crossover / plain decay: no DPT by definition

  // Maximal contiguous run of samples with max |mhat| below the metastability gate.
  const Real gate = cfg.meta_fraction * fin.max_abs;
  std::vector<Real> amp(n);
  for (size_t i = 0; i < n; ++i) amp[i] = dominant_harmonic(spectra[i]).max_abs;
  size_t best_len = 0, best_begin = 0, cur_begin = 0, cur_len = 0;
  for (size_t i = 0; i <= n; ++i) {
    if (i < n && amp[i] < gate) {
      if (cur_len == 0) cur_begin = i;
      ++cur_len;
    } else {
      if (cur_len > best_len) { best_len = cur_len; best_begin = cur_begin; }
      cur_len = 0;
    }
  }
  if (best_len == 0) return rep;
  rep.window_found = true;
  rep.window_begin = times[best_begin];
  const size_t window_end_idx = best_begin + best_len - 1;
  rep.window_end = times[window_end_idx];

  // First time after the window where the final dominant harmonic has grown
  // past growth_fraction of its final value.
  const Real target = cfg.growth_fraction * folded_amplitude(spectra.back(), fin.nu);
  bool found = false;
  for (size_t i = window_end_idx + 1; i < n; ++i) {
    if (folded_amplitude(spectra[i], fin.nu) >= target) {
      rep.t_star = times[i];
      found = true;
      break;
    }
  }
  if (!found) return rep;
  rep.has_dpt = true;

  if (f_bw && f_bw->values.size() >= 2) {
    rep.fbw_checked = true;
    for (size_t i = 1; i < f_bw->values.size(); ++i) {
      const Real jump = std::abs(f_bw->values[i] - f_bw->values[i - 1]);
      if (jump > rep.fbw_jump_size) {
        rep.fbw_jump_size = jump;
        rep.fbw_jump_time = 0.5 * (f_bw->times[i] + f_bw->times[i - 1]);
      }
    }
    rep.ambiguous =
        !(rep.fbw_jump_time >= 0.5 * rep.t_star && rep.fbw_jump_time <= 1.5 * rep.t_star);
  } else {
    rep.ambiguous = true; // cannot cross-check without a backward-fidelity series
  }
  return rep;
}

} // namespace gn
