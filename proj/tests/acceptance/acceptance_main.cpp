// Full-scale acceptance suite.  Every criterion runs at the production scale
// (L = 100 where applicable), prints exactly one [PASS]/[FAIL] line, and the
// binary exits nonzero if any criterion fails.  Progress chatter goes to
// stderr; the verdict lines and summary go to stdout.
#include "context.hpp"

#include "gn/cli.hpp"
#include "gn/evolution.hpp"
#include "gn/initstate.hpp"
#include "gn/model.hpp"
#include "gn/observables.hpp"
#include "gn/oracle.hpp"
#include "gn/protocols.hpp"
#include "gn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace accept {
namespace {

// 1. Mean-field correlation-matrix evolution against the brute-force
//    many-body Lindblad reference: frozen random displacement field, L = 4,
//    max entrywise deviation < 1e-6 over t in [0, 50].
std::string criterion_evolution_equivalence(Context& ctx) {
  double worst = 0.0;
  for (const double mu : {0.0, 0.5}) {
    ModelParams p = ctx.base();
    p.L = 4;
    p.mu = mu;
    p.g = 1.1;

    std::mt19937_64 rng(derive_seed(ctx.master_seed(), mu == 0.0 ? 11 : 12));
    std::uniform_real_distribution<double> dist(-0.2, 0.2);
    DisplacementField sigma(p.L);
    for (int j = 0; j < p.L; ++j) sigma(j) = dist(rng);
    const CorrelationMatrix theta0 = random_half_filled_theta(p.L, rng());

    EvolutionConfig evo;
    evo.dt = 0.01;
    evo.t_max = 50.0;
    evo.sample_stride = 100; // snapshot every time unit
    evo.theta_stride = 1;
    evo.steady_tol = 0.0; // run the full horizon
    evo.frozen_sigma = sigma;
    const TrajectoryRecord mf = evolve(theta0, p, evo);

    const ManyBodyBasis basis = jordan_wigner_basis(p.L);
    const ComplexMatrix liou = build_liouvillian(basis, build_hamiltonian(sigma, p), p);
    const ManyBodyTrajectory mb = evolve_many_body(gaussian_density_matrix(basis, theta0),
                                                   liou, evo.dt, evo.t_max, evo.sample_stride);

    require(mf.theta_times.size() == mb.times.size(),
            "snapshot grids differ: " + std::to_string(mf.theta_times.size()) + " vs " +
                std::to_string(mb.times.size()));
    for (std::size_t i = 0; i < mb.times.size(); ++i) {
      require(std::abs(mf.theta_times[i] - mb.times[i]) < 1e-9, "snapshot times differ");
      worst = std::max(worst, (mf.theta_series[i] - mb.theta[i]).cwiseAbs().maxCoeff());
    }
  }
  require(worst < 1e-6, "max entrywise deviation " + fmt(worst) + " exceeds 1e-6");
  return "max entrywise deviation " + fmt(worst) + " < 1e-6 over t in [0, 50], mu in {0, 0.5}";
}

// 2. The dissipator written as the explicit double sum over eigenmodes and
//    sites equals -gamma (theta - theta_th) to 1e-12 relative accuracy.
std::string criterion_dissipator_forms(Context& ctx) {
  double worst = 0.0;
  for (const int L : {4, 6, 10}) {
    for (int k = 0; k < 100; ++k) {
      std::mt19937_64 rng(derive_seed(ctx.master_seed(), 1000 + 100 * L + k));
      std::uniform_real_distribution<double> sdist(-0.5, 0.5);
      std::uniform_real_distribution<double> mudist(0.0, 1.0);

      ModelParams p = ctx.base();
      p.L = L;
      p.mu = mudist(rng);
      p.g = 1.1;
      DisplacementField sigma(L);
      for (int j = 0; j < L; ++j) sigma(j) = sdist(rng);
      const CorrelationMatrix theta = random_half_filled_theta(L, rng());

      const SpectralDecomposition s = diagonalize(build_hamiltonian(sigma, p));
      const CorrelationMatrix theta_th = thermal_theta(s, p.kBT);
      const ComplexMatrix a = dissipator_rhs_matrix(theta, theta_th, p.gamma);
      const ComplexMatrix b = dissipator_rhs_explicit(theta, s, p.gamma, p.kBT);
      const double scale = a.cwiseAbs().maxCoeff();
      require(scale > 0.0, "degenerate instance: zero dissipator");
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff() / scale);
    }
  }
  require(worst < 1e-12, "worst relative deviation " + fmt(worst) + " exceeds 1e-12");
  return "worst relative deviation " + fmt(worst) + " < 1e-12 over 300 random instances";
}

// 3. Steady-state phase labels at the four reference points, each from two
//    independent random initial conditions that must agree.
std::string criterion_phase_labels(Context& ctx) {
  struct Want {
    ParamPoint pt;
    const char* name;
    Phase kind;
    int nu; // CP only
  };
  const Want wants[] = {
      {kP1, "P1", Phase::OP, 0},
      {kP2, "P2", Phase::CP, 4},
      {kP3, "P3", Phase::CP, 7},
      {kP4, "P4", Phase::DP, 0},
  };

  std::string seen;
  std::vector<std::string> problems;
  for (const Want& w : wants) {
    const PhaseLabel got =
        classify_steady_state(params_at(ctx.base(), w.pt), ctx.classify_options(w.pt));
    if (!seen.empty()) seen += ", ";
    seen += std::string(w.name) + "=" + label_text(got);

    const std::string want_text =
        w.kind == Phase::OP ? "OP" : (w.kind == Phase::CP ? "CP(" + std::to_string(w.nu) + ")" : "DP");
    if (got.frustrated)
      problems.push_back(std::string(w.name) + ": labels disagree across seeds");
    if (got.kind != w.kind)
      problems.push_back(std::string(w.name) + ": expected " + want_text + ", got " +
                         label_text(got));
    else if (w.kind == Phase::CP && got.dominant_nu != w.nu)
      problems.push_back(std::string(w.name) + ": expected " + want_text + ", got " +
                         label_text(got));
    else if (w.kind == Phase::DP && !(got.amplitude < 1e-3))
      problems.push_back(std::string(w.name) + ": residual order " + fmt(got.amplitude));
  }

  std::string summary = seen;
  if (!problems.empty()) {
    for (const std::string& problem : problems) summary += "; " + problem;
    require(false, summary);
  }
  return seen + "; both seeds agree at every point";
}

// 4. Magnitude of the uniform order parameter at the zero-chemical-potential
//    reference point, against the weak-coupling asymptotic estimate.
std::string criterion_uniform_order_magnitude(Context& ctx) {
  const SteadyStateResult& s = ctx.steady(kP1);
  const OrderParameterProfile prof = decompose_order_parameter(s.sigma);
  const HarmonicSpectrum spec = harmonics(prof.m);
  const double m_abs = folded_amplitude(spec, 0);
  const double estimate =
      M_PI * ctx.base().J * std::exp(-M_PI * ctx.base().J / (2.0 * kP1.g * kP1.g));
  const double lo = 0.75 * estimate, hi = 1.25 * estimate;
  require(m_abs > lo && m_abs < hi,
          "|m| = " + fmt(m_abs) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
  return "|m| = " + fmt(m_abs) + " within 25% of " + fmt(estimate);
}

// 5. Transition detection across the four benchmark quenches: timing of the
//    order-parameter rebuild and the backward-fidelity jump.
std::string criterion_transition_detection(Context& ctx) {
  auto quench = [&](const ParamPoint& from, const ParamPoint& to) {
    progress("quench (mu = " + fmt(from.mu) + ", g = " + fmt(from.g) + ") -> (mu = " +
             fmt(to.mu) + ", g = " + fmt(to.g) + ")");
    QuenchConfig qc;
    qc.from = from;
    qc.to = to;
    qc.evo = ctx.quench_evolution();
    qc.start_theta_hint = ctx.steady(from).theta;
    qc.target_theta_hint = ctx.steady(to).theta;
    return run_quench(ctx.base(), qc);
  };

  const QuenchResult q23 = quench(kP2, kP3);
  require(q23.dpt.has_dpt, "P2 -> P3: no transition detected");
  const double dur23 = q23.dpt.window_end - q23.dpt.window_begin;
  require(dur23 > 500.0, "P2 -> P3: metastable window lasts " + fmt(dur23) + " < 500");
  require(q23.dpt.t_star >= 800.0 && q23.dpt.t_star <= 1600.0,
          "P2 -> P3: t* = " + fmt(q23.dpt.t_star) + " outside [800, 1600]");
  require(q23.dpt.fbw_checked && !q23.dpt.ambiguous,
          "P2 -> P3: backward-fidelity jump at " + fmt(q23.dpt.fbw_jump_time) +
              " not within 50% of t* = " + fmt(q23.dpt.t_star));

  const QuenchResult q12 = quench(kP1, kP2);
  require(q12.dpt.has_dpt, "P1 -> P2: no transition detected");
  require(q12.dpt.t_star >= 500.0 && q12.dpt.t_star <= 1100.0,
          "P1 -> P2: t* = " + fmt(q12.dpt.t_star) + " outside [500, 1100]");
  require(q12.dpt.fbw_checked && !q12.dpt.ambiguous,
          "P1 -> P2: backward-fidelity jump at " + fmt(q12.dpt.fbw_jump_time) +
              " not within 50% of t* = " + fmt(q12.dpt.t_star));

  const QuenchResult q24 = quench(kP2, kP4);
  require(!q24.dpt.has_dpt, "P2 -> P4: spurious transition at t* = " + fmt(q24.dpt.t_star));
  const QuenchResult q14 = quench(kP1, kP4);
  require(!q14.dpt.has_dpt, "P1 -> P4: spurious transition at t* = " + fmt(q14.dpt.t_star));

  return "P2->P3 t* = " + fmt(q23.dpt.t_star) + ", window " + fmt(dur23) +
         "; P1->P2 t* = " + fmt(q12.dpt.t_star) + "; quenches into the disordered phase: none";
}

// 6. Two-step relaxation protocols beat the direct quench.
std::string criterion_two_step_protocols(Context& ctx) {
  auto run = [&](const ParamPoint& s, const ParamPoint& a, const ParamPoint& f,
                 double switch_time) {
    progress("two-step protocol: hold at (mu = " + fmt(a.mu) + ", g = " + fmt(a.g) +
             ") until t = " + fmt(switch_time));
    PmeConfig cfg;
    cfg.s = s;
    cfg.a = a;
    cfg.f = f;
    cfg.policy = SwitchPolicy::FixedTime;
    cfg.fixed_switch_time = switch_time;
    cfg.threshold = 1e-2;
    cfg.evo = ctx.quench_evolution();
    cfg.s_theta_hint = ctx.steady(s).theta;
    return run_pme(ctx.base(), cfg);
  };

  const PmeOutcome a = run(kP2, kP3, kP4, 960.0);
  require(a.all_relaxed, "crystal-to-disorder route: a leg never relaxed");
  require(a.pme_holds, "crystal-to-disorder route: " + fmt(a.t_si) + " + " + fmt(a.t_if) +
                           " is not faster than " + fmt(a.t_sf));

  const PmeOutcome b = run(kP1, kP4, kP2, 200.0);
  require(b.all_relaxed, "uniform-to-crystal route: a leg never relaxed");
  require(b.pme_holds, "uniform-to-crystal route: " + fmt(b.t_si) + " + " + fmt(b.t_if) +
                           " is not faster than " + fmt(b.t_sf));
  const double ratio = (b.t_si + b.t_if) / b.t_sf;
  require(ratio < 0.7, "uniform-to-crystal route: ratio " + fmt(ratio) + " not below 0.7");

  return "960 + " + fmt(a.t_if) + " < " + fmt(a.t_sf) + "; 200 + " + fmt(b.t_if) + " < " +
         fmt(b.t_sf) + " (ratio " + fmt(ratio) + ")";
}

// 7. Four copies quenched into the disordered phase: relaxation times invert
//    the parameter-distance ordering and the inversion is threshold-stable.
std::string criterion_multi_copy_ordering(Context& ctx) {
  QmeConfig cfg;
  cfg.target = kP4;
  cfg.points = {{0.5, 1.1}, {0.8, 1.1}, {0.5, 1.3}, {0.25, 1.1}};
  cfg.threshold = 1e-2;
  cfg.master_seed = ctx.master_seed();
  cfg.workers = 1;
  cfg.prep = ctx.solve_options();
  cfg.evo = ctx.quench_evolution();
  cfg.target_spectrum_hint = harmonics(decompose_order_parameter(ctx.steady(kP4).sigma).m);
  progress("multi-copy comparison: preparing 4 copies and quenching to (mu = 0.5, g = 0.9)");
  const QmeOutcome out = run_qme(ctx.base(), cfg);

  require(out.copies.size() == 4, "expected 4 copies");
  for (std::size_t i = 0; i < out.copies.size(); ++i) {
    require(out.copies[i].ok, "copy " + std::to_string(i + 1) + " failed: " + out.copies[i].error);
    require(out.copies[i].tau.relaxed, "copy " + std::to_string(i + 1) + " never relaxed");
  }

  // Parameter distances are pure arithmetic.
  const double expected_d[] = {0.2, std::sqrt(0.13), 0.4, std::sqrt(0.1025)};
  for (int i = 0; i < 4; ++i)
    require(std::abs(out.copies[i].d_e - expected_d[i]) < 1e-12,
            "copy " + std::to_string(i + 1) + ": distance " + fmt(out.copies[i].d_e) +
                " != " + fmt(expected_d[i]));
  require(out.copies[0].d_e < out.copies[3].d_e && out.copies[3].d_e < out.copies[1].d_e &&
              out.copies[1].d_e < out.copies[2].d_e,
          "distance ordering d1 < d4 < d2 < d3 violated");

  // Relaxation-time ordering, stable across a decade of thresholds.
  std::string taus;
  for (const double threshold : {3e-3, 1e-2, 3e-2}) {
    double tau[4];
    for (int i = 0; i < 4; ++i) {
      const RelaxationTime r = relaxation_time(out.copies[i].envelope, threshold);
      require(r.relaxed, "copy " + std::to_string(i + 1) + " does not reach threshold " +
                             fmt(threshold));
      tau[i] = r.tau;
    }
    require(tau[0] > tau[1] && tau[1] > tau[2] && tau[2] > tau[3],
            "ordering tau1 > tau2 > tau3 > tau4 fails at threshold " + fmt(threshold) + ": " +
                fmt(tau[0]) + ", " + fmt(tau[1]) + ", " + fmt(tau[2]) + ", " + fmt(tau[3]));
    if (threshold == 1e-2)
      taus = fmt(tau[0]) + " > " + fmt(tau[1]) + " > " + fmt(tau[2]) + " > " + fmt(tau[3]);
  }
  return "tau ordering " + taus + " stable across thresholds {3e-3, 1e-2, 3e-2}; distances exact";
}

// 8. The cross-module invariant suite stays green.
std::string criterion_invariant_suite(Context&) {
  int n = 0;
  std::vector<std::string> failures;
  for (const ValidationCheck& check : validation_checks()) {
    ++n;
    try {
      check.run();
    } catch (const std::exception& e) {
      failures.push_back(check.name + ": " + e.what());
    }
  }
  std::string joined;
  for (const std::string& f : failures) joined += (joined.empty() ? "" : "; ") + f;
  require(failures.empty(), joined);
  return "all " + std::to_string(n) + " invariant checks green";
}

} // namespace
} // namespace accept

int main() {
  using namespace accept;

  std::printf("acceptance suite: dissipative lattice fermion chain, L = 100, J = 1, "
              "gamma = 0.01, kBT = 0.05, master seed 1\n");
  std::fflush(stdout);

  Context ctx;
  int failed = 0;
  int total = 0;
  const auto run = [&](int number, const char* title, std::string (*body)(Context&)) {
    ++total;
    if (!run_criterion(number, title, [&] { return body(ctx); })) ++failed;
  };

  run(1, "mean-field evolution matches the many-body reference",
      criterion_evolution_equivalence);
  run(2, "dissipator double-sum form equals the thermal-relaxation form",
      criterion_dissipator_forms);
  run(3, "steady-state phase labels at the four reference points", criterion_phase_labels);
  run(4, "uniform order-parameter magnitude matches the asymptotic estimate",
      criterion_uniform_order_magnitude);
  run(5, "transition detection and timing across the benchmark quenches",
      criterion_transition_detection);
  run(6, "two-step relaxation beats the direct quench", criterion_two_step_protocols);
  run(7, "multi-copy relaxation ordering is inverted and threshold-stable",
      criterion_multi_copy_ordering);
  run(8, "cross-module invariant suite", criterion_invariant_suite);

  std::printf("%d/%d criteria passed%s\n", total - failed, total,
              failed ? "" : " — acceptance clean");
  return failed ? 1 : 0;
}
