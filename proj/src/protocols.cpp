#include "gn/protocols.hpp"

#include "gn/model.hpp"
#include "gn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

namespace gn {

namespace {

std::string point_str(const ParamPoint& pt) {
  std::ostringstream os;
  os << "(mu = " << pt.mu << ", g = " << pt.g << ")";
  return os.str();
}

HarmonicSpectrum sigma_spectrum(const DisplacementField& sigma) {
  return harmonics(decompose_order_parameter(sigma).m);
}

} // namespace

// ---------------------------------------------------------------------------
// Harmonic series

HarmonicSeries harmonic_series(const std::vector<Real>& times,
                               const std::vector<DisplacementField>& sigma_series) {
  if (times.size() != sigma_series.size())
    throw ConfigError("harmonic_series: times and samples differ in length");
  HarmonicSeries out;
  out.times = times;
  out.spectra.reserve(sigma_series.size());
  for (const auto& sigma : sigma_series) out.spectra.push_back(sigma_spectrum(sigma));
  return out;
}

DistanceSeries order_distance_series(const HarmonicSeries& series, const HarmonicSpectrum& eq) {
  DistanceSeries out;
  out.times = series.times;
  out.values.reserve(series.spectra.size());
  for (const auto& s : series.spectra) out.values.push_back(order_distance(s, eq));
  return out;
}

DistanceSeries scale_series(DistanceSeries series, Real factor) {
  for (Real& v : series.values) v *= factor;
  return series;
}

// ---------------------------------------------------------------------------
// Phase classification

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::OP: return "OP";
    case Phase::CP: return "CP";
    case Phase::DP: return "DP";
  }
  return "?";
}

PhaseLabel classify_profile(const DisplacementField& sigma, Real dp_threshold) {
  const DominantHarmonic dom = dominant_harmonic(sigma_spectrum(sigma));
  PhaseLabel label;
  if (dom.max_abs < dp_threshold) {
    label.kind = Phase::DP;
    label.dominant_nu = 0;
    label.amplitude = dom.max_abs;
  } else if (dom.nu == 0) {
    label.kind = Phase::OP;
    label.dominant_nu = 0;
    label.amplitude = dom.amplitude;
  } else {
    label.kind = Phase::CP;
    label.dominant_nu = dom.nu;
    label.amplitude = dom.amplitude;
  }
  return label;
}

namespace {

// Two labels agree when the phase kind matches; for modulated phases the
// dominant harmonic must match too.
bool labels_agree(const PhaseLabel& a, const PhaseLabel& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == Phase::CP) return a.dominant_nu == b.dominant_nu;
  return true;
}

PhaseLabel steady_label(const ModelParams& p, const ClassifyOptions& opt, int vote) {
  SteadySolveOptions steady = opt.steady;
  steady.seed = derive_seed(opt.base_seed, static_cast<std::uint64_t>(vote));
  const SteadyStateResult res =
      opt.solver ? opt.solver(p, steady) : solve_steady_state(p, steady);
  if (!res.converged) {
    throw PhysicsError("steady state not reached at (mu = " + std::to_string(p.mu) +
                       ", g = " + std::to_string(p.g) + ") within the configured horizon");
  }
  return classify_profile(res.sigma, opt.dp_threshold);
}

} // namespace

PhaseLabel classify_steady_state(const ModelParams& p, const ClassifyOptions& opt) {
  p.validate();
  if (opt.initial_seeds < 1) throw ConfigError("classify_steady_state: initial_seeds must be >= 1");

  std::vector<PhaseLabel> votes;
  for (int k = 0; k < opt.initial_seeds; ++k) votes.push_back(steady_label(p, opt, k));

  bool agree = true;
  for (std::size_t k = 1; k < votes.size(); ++k) agree = agree && labels_agree(votes[0], votes[k]);
  if (agree) return votes[0];

  for (int k = 0; k < opt.extra_seeds; ++k)
    votes.push_back(steady_label(p, opt, opt.initial_seeds + k));

  // Majority over all votes; ties go to the group containing the earliest vote.
  std::size_t best = 0, best_count = 0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    std::size_t count = 0;
    for (const auto& v : votes) count += labels_agree(votes[i], v) ? 1 : 0;
    if (count > best_count) {
      best_count = count;
      best = i;
    }
  }
  PhaseLabel label = votes[best];
  label.frustrated = true;
  return label;
}

// ---------------------------------------------------------------------------
// Phase-diagram scan

ScanResult scan_phase_diagram(const ModelParams& base, const ScanConfig& cfg,
                              const PointClassifier& classifier) {
  base.validate();
  const std::size_t n_grid = cfg.mu_values.size() * cfg.g_values.size();
  const std::size_t n_total = n_grid + cfg.extra_points.size();
  if (n_total == 0) throw ConfigError("scan_phase_diagram: no points to classify");

  ScanResult result;
  result.mu_values = cfg.mu_values;
  result.g_values = cfg.g_values;
  result.points.resize(n_total);

  parallel_for_each(
      n_total,
      [&](std::size_t i) {
        ParamPoint pt;
        if (i < n_grid) {
          pt.mu = cfg.mu_values[i % cfg.mu_values.size()];
          pt.g = cfg.g_values[i / cfg.mu_values.size()];
        } else {
          pt = cfg.extra_points[i - n_grid];
        }
        ScanPointResult& slot = result.points[i];
        slot.point = pt;
        try {
          if (classifier) {
            slot.label = classifier(params_at(base, pt));
          } else {
            // Each point runs on its own seed stream, fixed by (master seed,
            // point index) so the outcome is independent of the worker count.
            ClassifyOptions opt = cfg.classify;
            opt.base_seed = derive_seed(cfg.classify.base_seed, i);
            slot.label = classify_steady_state(params_at(base, pt), opt);
          }
          slot.ok = true;
        } catch (const std::exception& e) {
          slot.ok = false;
          slot.error = e.what();
        }
      },
      cfg.workers);

  // Boundary estimates: midpoints of adjacent grid pairs with differing kind.
  const std::size_t n_mu = cfg.mu_values.size(), n_g = cfg.g_values.size();
  auto maybe_boundary = [&](std::size_t ia, std::size_t ib) {
    const ScanPointResult& a = result.points[ia];
    const ScanPointResult& b = result.points[ib];
    if (a.ok && b.ok && a.label.kind != b.label.kind) {
      BoundaryPoint bp;
      bp.a = a.point;
      bp.b = b.point;
      bp.midpoint = {0.5 * (a.point.mu + b.point.mu), 0.5 * (a.point.g + b.point.g)};
      result.boundaries.push_back(bp);
    }
  };
  for (std::size_t ig = 0; ig < n_g; ++ig) {
    for (std::size_t imu = 0; imu < n_mu; ++imu) {
      if (imu + 1 < n_mu) maybe_boundary(result.grid_index(imu, ig), result.grid_index(imu + 1, ig));
      if (ig + 1 < n_g) maybe_boundary(result.grid_index(imu, ig), result.grid_index(imu, ig + 1));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Quench

EvolutionConfig QuenchConfig::default_quench_evolution() {
  EvolutionConfig evo;
  evo.dt = 0.05;
  evo.t_max = 6000.0;
  evo.sample_stride = 20; // displacement sample every time unit
  evo.theta_stride = 20;  // correlation snapshot every 20 time units
  evo.steady_tol = 1e-8;
  // Metastable plateaus drift very slowly; a short window would mistake them
  // for the steady state, so quenches watch a longer one.
  evo.steady_window = 50.0;
  return evo;
}

namespace {

CorrelationMatrix prepared_state(const ModelParams& p, SteadySolveOptions opt,
                                 std::uint64_t seed, const char* what) {
  opt.seed = seed;
  const SteadyStateResult res = solve_steady_state(p, opt);
  if (!res.converged) {
    throw PhysicsError(std::string(what) + " preparation did not reach a steady state at (mu = " +
                       std::to_string(p.mu) + ", g = " + std::to_string(p.g) + ")");
  }
  return res.theta;
}

} // namespace

QuenchResult run_quench(const ModelParams& base, const QuenchConfig& cfg) {
  const ModelParams p_from = params_at(base, cfg.from);
  const ModelParams p_to = params_at(base, cfg.to);
  p_from.validate();
  p_to.validate();

  QuenchResult out;
  out.theta_in = cfg.start_theta_hint ? *cfg.start_theta_hint
                                      : prepared_state(p_from, cfg.prep, cfg.seed, "pre-quench");
  if (out.theta_in.rows() != base.L || out.theta_in.cols() != base.L)
    throw ConfigError("run_quench: initial state has the wrong dimension");
  out.sigma_in = self_consistent_sigma(out.theta_in, p_from);

  out.theta_eq = cfg.target_theta_hint
                     ? *cfg.target_theta_hint
                     : prepared_state(p_to, cfg.prep, derive_seed(cfg.seed, 0x7a), "target");
  if (out.theta_eq.rows() != base.L || out.theta_eq.cols() != base.L)
    throw ConfigError("run_quench: target state has the wrong dimension");
  out.sigma_eq = self_consistent_sigma(out.theta_eq, p_to);

  out.traj = evolve(out.theta_in, p_to, cfg.evo);
  out.harmonics = harmonic_series(out.traj.times, out.traj.sigma_series);
  out.m_hat = order_distance_series(out.harmonics, out.harmonics.spectra.back());

  out.f_fw.times = out.traj.theta_times;
  out.f_bw.times = out.traj.theta_times;
  out.d_t.times = out.traj.theta_times;
  for (const auto& theta : out.traj.theta_series) {
    out.f_fw.values.push_back(fidelity(theta, out.theta_in));
    out.f_bw.values.push_back(fidelity(theta, out.theta_eq));
    out.d_t.values.push_back(trace_distance(theta, out.theta_in));
  }

  out.dpt = detect_dpt(out.harmonics.times, out.harmonics.spectra,
                       out.f_bw.values.empty() ? nullptr : &out.f_bw, cfg.dpt);
  return out;
}

// ---------------------------------------------------------------------------
// Two-step (Pontus) Mpemba protocol

namespace {

struct LegRun {
  TrajectoryRecord traj;
  HarmonicSeries harmonics;
};

LegRun run_leg(const CorrelationMatrix& theta0, const ModelParams& p, EvolutionConfig evo) {
  LegRun leg;
  leg.traj = evolve(theta0, p, evo);
  leg.harmonics = harmonic_series(leg.traj.times, leg.traj.sigma_series);
  return leg;
}

// Package a relaxing leg: distance to its own asymptotic spectrum, normalized
// by `denom`, enveloped, with the threshold crossing.
PmeLeg finish_leg(const ParamPoint& at, LegRun run, Real denom, Real threshold, Interp interp) {
  PmeLeg leg;
  leg.run_at = at;
  leg.times = run.harmonics.times;
  leg.asymptote = run.harmonics.spectra.back();
  if (denom <= 0.0) throw PhysicsError("order-distance normalization vanished; degenerate protocol");
  leg.m_norm = scale_series(order_distance_series(run.harmonics, leg.asymptote), 1.0 / denom);
  leg.envelope = upper_envelope(leg.m_norm);
  leg.relax = relaxation_time(leg.envelope, threshold, interp);
  leg.traj = std::move(run.traj);
  return leg;
}

} // namespace

PmeOutcome run_pme(const ModelParams& base, const PmeConfig& cfg) {
  const ModelParams p_s = params_at(base, cfg.s);
  const ModelParams p_a = params_at(base, cfg.a);
  const ModelParams p_f = params_at(base, cfg.f);
  p_s.validate();
  p_a.validate();
  p_f.validate();
  if (cfg.threshold <= 0.0) throw ConfigError("run_pme: threshold must be positive");

  PmeOutcome out;
  out.threshold = cfg.threshold;
  if (cfg.s.mu == cfg.f.mu && cfg.s.g == cfg.f.g) {
    // Degenerate protocol: the start already is the final steady state.
    out.degenerate = true;
    out.t_sf = 0.0;
    out.t_si = 0.0;
    out.t_if = 0.0;
    out.pme_holds = false;
    return out;
  }
  if (cfg.policy == SwitchPolicy::FixedTime && cfg.fixed_switch_time <= 0.0)
    throw ConfigError("run_pme: fixed switch time must be positive");

  const CorrelationMatrix theta_s =
      cfg.s_theta_hint ? *cfg.s_theta_hint : prepared_state(p_s, cfg.prep, cfg.seed, "start");
  if (theta_s.rows() != base.L || theta_s.cols() != base.L)
    throw ConfigError("run_pme: start state has the wrong dimension");

  const Real unrelaxed = std::numeric_limits<Real>::infinity();

  // Leg 0: direct quench S -> F.
  LegRun direct = run_leg(theta_s, p_f, cfg.evo);
  // The protocol's t = 0 spectrum under the final parameters; both relaxing
  // legs are normalized by the distance from here to their own asymptote.
  const HarmonicSpectrum start_spectrum = direct.harmonics.spectra.front();
  const Real denom_direct = order_distance(start_spectrum, direct.harmonics.spectra.back());
  out.direct = finish_leg(cfg.f, std::move(direct), denom_direct, cfg.threshold, cfg.interp);
  out.t_sf = out.direct.relax.relaxed ? out.direct.relax.tau : unrelaxed;

  // Leg 1: S -> A.  Select the switch time, then make sure the run carries a
  // stored state exactly there.
  EvolutionConfig evo1 = cfg.evo;
  Real t_switch = cfg.fixed_switch_time;
  if (cfg.policy != SwitchPolicy::FixedTime) {
    // Policy pass: run the leg without checkpoints and pick the switch time
    // from the order distance measured against the direct leg's asymptote
    // (the best available final-state yardstick before leg 2 exists).
    LegRun probe = run_leg(theta_s, p_a, evo1);
    DistanceSeries to_f = order_distance_series(probe.harmonics, out.direct.asymptote);
    if (cfg.policy == SwitchPolicy::MinDistance) {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < to_f.values.size(); ++i)
        if (to_f.values[i] < to_f.values[arg]) arg = i;
      t_switch = to_f.times[arg];
    } else { // PlateauStart: first time the envelope slope flattens out
      const DistanceSeries env = upper_envelope(scale_series(to_f, 1.0 / denom_direct));
      t_switch = -1.0;
      for (std::size_t i = 0; i + 1 < env.values.size(); ++i) {
        const Real dt = env.times[i + 1] - env.times[i];
        if (dt <= 0.0) continue;
        if (std::abs(env.values[i + 1] - env.values[i]) / dt < cfg.plateau_slope) {
          t_switch = env.times[i];
          break;
        }
      }
      if (t_switch < 0.0)
        throw PhysicsError("run_pme: no plateau found within the leg-1 horizon");
    }
    if (t_switch <= 0.0) t_switch = evo1.dt; // switch at the very start: use one step
  }
  out.switch_requested = t_switch;
  evo1.checkpoint_times = {t_switch};
  evo1.t_max = std::max(evo1.t_max, t_switch);
  LegRun leg1 = run_leg(theta_s, p_a, evo1);
  if (leg1.traj.checkpoints.empty())
    throw PhysicsError("run_pme: leg-1 run did not store the switch state");
  const auto& [t_si_actual, theta_i] = *leg1.traj.checkpoints.begin();
  out.t_si = t_si_actual;
  out.leg1.run_at = cfg.a;
  out.leg1.times = leg1.harmonics.times;
  out.leg1.asymptote = leg1.harmonics.spectra.back();
  out.leg1.m_norm =
      scale_series(order_distance_series(leg1.harmonics, out.direct.asymptote), 1.0 / denom_direct);
  out.leg1.envelope = upper_envelope(out.leg1.m_norm);
  out.leg1.traj = std::move(leg1.traj);

  // Leg 2: restart from the stored state under the final parameters.
  EvolutionConfig evo2 = cfg.evo;
  LegRun leg2 = run_leg(theta_i, p_f, evo2);
  const Real denom_leg2 = order_distance(start_spectrum, leg2.harmonics.spectra.back());
  out.leg2 = finish_leg(cfg.f, std::move(leg2), denom_leg2, cfg.threshold, cfg.interp);
  out.t_if = out.leg2.relax.relaxed ? out.leg2.relax.tau : unrelaxed;

  out.all_relaxed = out.direct.relax.relaxed && out.leg2.relax.relaxed;
  out.pme_holds = out.t_si + out.t_if < out.t_sf;
  return out;
}

// ---------------------------------------------------------------------------
// Multi-copy (quantum) Mpemba comparison

const char* to_string(QmeKind kind) {
  switch (kind) {
    case QmeKind::None: return "none";
    case QmeKind::TypeI: return "type-I";
    case QmeKind::TypeII: return "type-II";
  }
  return "?";
}

QmePairVerdict compare_envelopes(const QmeCopyResult& closer, const QmeCopyResult& farther,
                                 Real noise_floor) {
  QmePairVerdict v;
  const auto& ec = closer.envelope;
  const auto& ef = farther.envelope;
  const std::size_t n = std::max(ec.values.size(), ef.values.size());
  // A run that stopped earlier (already steady) continues at its final
  // envelope value for comparison purposes.
  auto value = [](const DistanceSeries& s, std::size_t k) {
    return k < s.values.size() ? s.values[k] : s.values.back();
  };
  auto time_at = [&](std::size_t k) {
    if (k < ec.times.size()) return ec.times[k];
    return ef.times[std::min(k, ef.times.size() - 1)];
  };

  bool has_pos = false, has_neg = false;
  Real prev_d = 0.0;
  Real prev_t = 0.0;
  bool have_prev = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Real vc = value(ec, k);
    const Real vf = value(ef, k);
    if (std::max(vc, vf) < noise_floor) continue; // both relaxed below resolution
    const Real d = vc - vf;
    const Real t = time_at(k);
    if (have_prev && ((prev_d > 0.0 && d < 0.0) || (prev_d < 0.0 && d > 0.0))) {
      v.crossing_times.push_back(prev_t + (t - prev_t) * prev_d / (prev_d - d));
    }
    if (d > 0.0) has_pos = true;
    if (d < 0.0) has_neg = true;
    if (d != 0.0) {
      prev_d = d;
      prev_t = t;
      have_prev = true;
    }
  }

  if (!v.crossing_times.empty()) {
    v.kind = QmeKind::TypeII;
  } else if (has_pos && !has_neg) {
    v.kind = QmeKind::TypeI; // the farther copy stays strictly closer
  } else {
    v.kind = QmeKind::None;
  }
  v.partial = !closer.tau.relaxed || !farther.tau.relaxed;
  return v;
}

QmeOutcome run_qme(const ModelParams& base, const QmeConfig& cfg) {
  base.validate();
  if (cfg.points.size() < 2) throw ConfigError("run_qme: need at least two initial points");
  if (cfg.threshold <= 0.0) throw ConfigError("run_qme: threshold must be positive");

  const ModelParams p_target = params_at(base, cfg.target);
  p_target.validate();

  QmeOutcome out;
  if (cfg.target_spectrum_hint) {
    out.target_spectrum = *cfg.target_spectrum_hint;
  } else {
    const CorrelationMatrix theta_eq = prepared_state(
        p_target, cfg.prep, point_seed(cfg.master_seed, cfg.target.mu, cfg.target.g), "target");
    out.target_spectrum = sigma_spectrum(self_consistent_sigma(theta_eq, p_target));
  }
  if (out.target_spectrum.L() != base.L)
    throw ConfigError("run_qme: target spectrum has the wrong dimension");

  out.copies.resize(cfg.points.size());
  parallel_for_each(
      cfg.points.size(),
      [&](std::size_t i) {
        QmeCopyResult& copy = out.copies[i];
        copy.point = cfg.points[i];
        copy.d_e = euclidean_param_distance(
            (RealVector(2) << copy.point.mu, copy.point.g).finished(),
            (RealVector(2) << cfg.target.mu, cfg.target.g).finished());
        try {
          const ModelParams p_in = params_at(base, copy.point);
          p_in.validate();
          const std::uint64_t seed = point_seed(cfg.master_seed, copy.point.mu, copy.point.g);
          const CorrelationMatrix theta0 = prepared_state(p_in, cfg.prep, seed, "copy");
          const DominantHarmonic pre =
              dominant_harmonic(sigma_spectrum(self_consistent_sigma(theta0, p_in)));
          copy.pre_nu = pre.nu;
          copy.pre_amplitude = pre.amplitude;

          TrajectoryRecord traj = evolve(theta0, p_target, cfg.evo);
          const HarmonicSeries series = harmonic_series(traj.times, traj.sigma_series);
          copy.m_hat = order_distance_series(series, out.target_spectrum);
          copy.envelope = upper_envelope(copy.m_hat);
          copy.tau = relaxation_time(copy.envelope, cfg.threshold, cfg.interp);
          copy.traj = std::move(traj);
          copy.ok = true;
        } catch (const std::exception& e) {
          copy.ok = false;
          copy.error = e.what();
        }
      },
      cfg.workers);

  for (std::size_t i = 0; i < out.copies.size(); ++i) {
    for (std::size_t j = i + 1; j < out.copies.size(); ++j) {
      // Ties in parameter distance keep input order (identical points
      // compare as equal and classify as "none").
      const bool i_closer = out.copies[i].d_e <= out.copies[j].d_e;
      const std::size_t c = i_closer ? i : j;
      const std::size_t f = i_closer ? j : i;
      QmePairVerdict v;
      if (out.copies[c].ok && out.copies[f].ok) {
        v = compare_envelopes(out.copies[c], out.copies[f], cfg.noise_floor);
      } else {
        v.partial = true;
      }
      v.closer = c;
      v.farther = f;
      out.pairs.push_back(std::move(v));
      out.partial = out.partial || out.pairs.back().partial;
    }
  }
  return out;
}

} // namespace gn
