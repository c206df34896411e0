#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gn/model.hpp"
#include "gn/protocols.hpp"

#include <cmath>
#include <cstring>

using namespace gn;

namespace {

// Shared small-system parameters: strong coupling, fast bath, L = 12 keeps
// every steady-state solve well under a second.
ModelParams small_chain() {
  ModelParams p;
  p.L = 12;
  p.g = 1.1;
  p.gamma = 0.05;
  return p;
}

DisplacementField modulated_sigma(int L, Real deltaJ, Real amp, int nu) {
  DisplacementField sigma(L);
  for (int j = 0; j < L; ++j) {
    const Real m = amp * std::cos(2.0 * M_PI * nu * j / L);
    sigma(j) = deltaJ + ((j % 2 == 0) ? m : -m);
  }
  return sigma;
}

} // namespace

TEST_CASE("profile classification: uniform, modulated, and disordered") {
  CHECK(classify_profile(modulated_sigma(12, 0.4, 0.2, 0)).kind == Phase::OP);
  const PhaseLabel cp = classify_profile(modulated_sigma(12, 0.4, 0.2, 3));
  CHECK(cp.kind == Phase::CP);
  CHECK(cp.dominant_nu == 3);
  CHECK(cp.amplitude == doctest::Approx(0.2).epsilon(1e-10));

  // everything below the threshold is disordered, regardless of structure
  const PhaseLabel dp = classify_profile(modulated_sigma(12, 0.4, 1e-5, 3));
  CHECK(dp.kind == Phase::DP);
  CHECK_FALSE(dp.frustrated);

  // threshold is on max |mhat|, not the folded sum
  CHECK(classify_profile(modulated_sigma(12, 0.4, 2.2e-3, 3), 1e-3).kind == Phase::CP);
  CHECK(classify_profile(modulated_sigma(12, 0.4, 1.8e-3, 3), 1e-3).kind == Phase::DP);
}

TEST_CASE("steady-state classification by seed voting") {
  ModelParams p = small_chain();

  SUBCASE("strong coupling at half filling votes OP unanimously") {
    p.mu = 0.0;
    ClassifyOptions opt;
    opt.steady.strategy = SteadyStrategy::FixedPoint;
    const PhaseLabel label = classify_steady_state(p, opt);
    CHECK(label.kind == Phase::OP);
    CHECK(label.dominant_nu == 0);
    CHECK(label.amplitude > 0.05);
    CHECK_FALSE(label.frustrated);
  }
  SUBCASE("free chain votes DP") {
    p.g = 0.0;
    ClassifyOptions opt;
    opt.steady.strategy = SteadyStrategy::FixedPoint;
    const PhaseLabel label = classify_steady_state(p, opt);
    CHECK(label.kind == Phase::DP);
    CHECK(label.amplitude < 1e-6);
  }
}

TEST_CASE("phase-diagram scan with an injected classifier") {
  ModelParams base = small_chain();
  ScanConfig cfg;
  cfg.mu_values = {0.0, 0.3, 0.6};
  cfg.g_values = {0.8, 1.0, 1.2};
  cfg.extra_points = {{0.45, 1.05}};

  // deterministic fake: DP below g = 1, CP(4) above, OP at mu = 0 & g >= 1
  int calls = 0;
  const PointClassifier fake = [&calls](const ModelParams& p) {
    ++calls;
    PhaseLabel label;
    if (p.g < 1.0) {
      label.kind = Phase::DP;
    } else if (p.mu == 0.0) {
      label.kind = Phase::OP;
      label.amplitude = 0.3;
    } else {
      label.kind = Phase::CP;
      label.dominant_nu = 4;
      label.amplitude = 0.2;
    }
    return label;
  };
  const ScanResult res = scan_phase_diagram(base, cfg, fake);

  CHECK(calls == 10); // 9 grid + 1 extra
  REQUIRE(res.points.size() == 10);
  for (const auto& pt : res.points) CHECK(pt.ok);

  // grid layout: index ig * n_mu + imu
  CHECK(res.points[res.grid_index(0, 0)].label.kind == Phase::DP);
  CHECK(res.points[res.grid_index(0, 1)].label.kind == Phase::OP);
  CHECK(res.points[res.grid_index(1, 1)].label.kind == Phase::CP);
  CHECK(res.points.back().point.mu == doctest::Approx(0.45)); // extra point appended
  CHECK(res.points.back().label.kind == Phase::CP);

  // boundaries: 3 vertical transitions DP->* between g=0.8 and g=1.0 rows,
  // plus 2 horizontal OP->CP transitions at mu 0->0.3 for g in {1.0, 1.2}
  CHECK(res.boundaries.size() == 5);
  for (const auto& b : res.boundaries) {
    CHECK(b.midpoint.mu == doctest::Approx(0.5 * (b.a.mu + b.b.mu)));
    CHECK(b.midpoint.g == doctest::Approx(0.5 * (b.a.g + b.b.g)));
  }
}

TEST_CASE("scan records classifier failures without aborting the sweep") {
  ModelParams base = small_chain();
  ScanConfig cfg;
  cfg.mu_values = {0.0, 0.5};
  cfg.g_values = {1.0};
  const PointClassifier fake = [](const ModelParams& p) -> PhaseLabel {
    if (p.mu > 0.2) throw PhysicsError("injected failure");
    PhaseLabel label;
    label.kind = Phase::OP;
    return label;
  };
  const ScanResult res = scan_phase_diagram(base, cfg, fake);
  REQUIRE(res.points.size() == 2);
  CHECK(res.points[0].ok);
  CHECK_FALSE(res.points[1].ok);
  CHECK(res.points[1].error.find("injected") != std::string::npos);
  CHECK(res.boundaries.empty()); // failed points contribute no boundaries
}

TEST_CASE("quench run populates every series consistently") {
  ModelParams base = small_chain();
  QuenchConfig cfg;
  cfg.from = {0.0, 1.1}; // ordered chain
  cfg.to = {0.3, 0.6};   // quench toward a weakly coupled (disordered) chain
  cfg.seed = 2;
  cfg.prep.strategy = SteadyStrategy::FixedPoint;
  cfg.evo.t_max = 400.0;
  cfg.evo.theta_stride = 5;
  const QuenchResult res = run_quench(base, cfg);

  REQUIRE(!res.traj.times.empty());
  CHECK(res.harmonics.times == res.traj.times);
  CHECK(res.m_hat.times == res.traj.times);
  REQUIRE(!res.traj.theta_times.empty());
  CHECK(res.f_fw.times == res.traj.theta_times);
  CHECK(res.f_bw.times == res.traj.theta_times);
  CHECK(res.d_t.times == res.traj.theta_times);

  // the prepared state is ordered, the target is not
  CHECK(decompose_order_parameter(res.sigma_in).m.cwiseAbs().maxCoeff() > 0.05);
  CHECK(decompose_order_parameter(res.sigma_eq).m.cwiseAbs().maxCoeff() < 1e-3);

  // forward fidelity starts at the self-overlap (the initial state's purity,
  // near 1 for this small cold chain) and decays as the state moves away
  CHECK(res.f_fw.values.front() == doctest::Approx(fidelity(res.theta_in, res.theta_in))
                                       .epsilon(1e-12));
  CHECK(res.f_fw.values.front() > 0.99);
  CHECK(res.f_fw.values.back() < 0.9);
  // trace distance starts at 0 and grows
  CHECK(res.d_t.values.front() == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(res.d_t.values.back() > 0.01);
  // m_hat measures distance to the run's own final spectrum: ends near zero
  CHECK(res.m_hat.values.back() < 1e-4);
  CHECK(res.m_hat.values.front() > 0.01);
  // order -> disorder without delayed reordering: no transition flagged
  CHECK_FALSE(res.dpt.has_dpt);
}

TEST_CASE("quench honors state hints and reuses them bit-for-bit") {
  ModelParams base = small_chain();
  QuenchConfig cfg;
  cfg.from = {0.0, 1.1};
  cfg.to = {0.2, 0.7};
  cfg.prep.strategy = SteadyStrategy::FixedPoint;
  cfg.evo.t_max = 50.0;
  cfg.evo.steady_tol = 0.0;

  const QuenchResult first = run_quench(base, cfg);
  QuenchConfig hinted = cfg;
  hinted.start_theta_hint = first.theta_in;
  hinted.target_theta_hint = first.theta_eq;
  const QuenchResult second = run_quench(base, hinted);

  CHECK(std::memcmp(first.traj.theta_final.data(), second.traj.theta_final.data(),
                    sizeof(Complex) * static_cast<std::size_t>(base.L * base.L)) == 0);
  CHECK(first.f_bw.values == second.f_bw.values);
}

TEST_CASE("two-step protocol: degenerate start/finish short-circuits") {
  ModelParams base = small_chain();
  PmeConfig cfg;
  cfg.s = {0.2, 0.9};
  cfg.f = {0.2, 0.9};
  cfg.a = {0.0, 1.1};
  const PmeOutcome res = run_pme(base, cfg);
  CHECK(res.degenerate);
  CHECK_FALSE(res.pme_holds);
  CHECK(res.direct.times.empty());
}

TEST_CASE("two-step protocol with a fixed switch restarts from the exact stored state") {
  ModelParams base = small_chain();
  PmeConfig cfg;
  cfg.s = {0.0, 1.1};
  cfg.a = {0.45, 1.25};
  cfg.f = {0.3, 0.6};
  cfg.policy = SwitchPolicy::FixedTime;
  cfg.fixed_switch_time = 8.0;
  cfg.threshold = 2e-2;
  cfg.prep.strategy = SteadyStrategy::FixedPoint;
  cfg.evo.t_max = 500.0;
  const PmeOutcome res = run_pme(base, cfg);

  CHECK_FALSE(res.degenerate);
  CHECK(res.switch_requested == doctest::Approx(8.0));
  CHECK(res.t_si == doctest::Approx(8.0));
  CHECK(res.threshold == doctest::Approx(2e-2));

  // leg 2's starting point equals an independent S -> A evolution stopped at
  // the switch time, reproduced bit-for-bit through the checkpoint machinery
  REQUIRE(!res.leg1.traj.checkpoints.empty());
  const auto& [t_cp, theta_cp] = *res.leg1.traj.checkpoints.begin();
  CHECK(t_cp == doctest::Approx(8.0));

  EvolutionConfig evo = cfg.evo;
  evo.t_max = 8.0;
  evo.steady_tol = 0.0;
  const ModelParams p_a = params_at(base, cfg.a);
  REQUIRE(res.direct.times.size() > 0);
  // reuse the exact prepared S state from the outcome's direct leg start
  const TrajectoryRecord ref = evolve(res.leg1.traj.theta_series.empty()
                                          ? theta_cp // placeholder, overwritten below
                                          : res.leg1.traj.theta_series.front(),
                                      p_a, evo);
  if (!res.leg1.traj.theta_series.empty()) {
    CHECK(std::memcmp(theta_cp.data(), ref.theta_final.data(),
                      sizeof(Complex) * static_cast<std::size_t>(theta_cp.size())) == 0);
  }

  // legs relaxed: timings are finite and the verdict matches the arithmetic
  if (res.all_relaxed) {
    CHECK(res.pme_holds == (res.t_si + res.t_if < res.t_sf));
  }
  // normalized distances start at 1 on the direct leg by construction
  CHECK(res.direct.m_norm.values.front() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("two-step protocol rejects a fixed policy without a positive time") {
  ModelParams base = small_chain();
  PmeConfig cfg;
  cfg.s = {0.0, 1.1};
  cfg.a = {0.4, 1.2};
  cfg.f = {0.3, 0.6};
  cfg.policy = SwitchPolicy::FixedTime;
  cfg.fixed_switch_time = 0.0;
  CHECK_THROWS_AS((void)run_pme(base, cfg), ConfigError);
}

TEST_CASE("multi-copy comparison: identical copies tie and verdicts stay stable") {
  ModelParams base = small_chain();
  QmeConfig cfg;
  cfg.target = {0.3, 0.6}; // disordered target
  cfg.points = {{0.0, 1.1}, {0.0, 1.1}};
  cfg.prep.strategy = SteadyStrategy::FixedPoint;
  cfg.evo.t_max = 600.0;
  const QmeOutcome res = run_qme(base, cfg);

  REQUIRE(res.copies.size() == 2);
  REQUIRE(res.pairs.size() == 1);
  for (const auto& c : res.copies) {
    REQUIRE(c.ok);
    CHECK(c.pre_nu == 0); // ordered phase at half filling
    CHECK(c.pre_amplitude > 0.05);
  }
  // identical parameter points get identical derived seeds: trajectories match
  CHECK(res.copies[0].m_hat.values == res.copies[1].m_hat.values);
  CHECK(res.copies[0].d_e == res.copies[1].d_e);
  const QmePairVerdict& v = res.pairs[0];
  CHECK(v.kind == QmeKind::None); // identical envelopes never strictly cross
  CHECK(v.crossing_times.empty());
}

TEST_CASE("envelope comparison classifies synthetic relaxation pairs") {
  auto mk = [](std::vector<Real> values, bool relaxed) {
    QmeCopyResult c;
    c.envelope.values = std::move(values);
    for (std::size_t i = 0; i < c.envelope.values.size(); ++i)
      c.envelope.times.push_back(static_cast<Real>(i));
    c.tau.relaxed = relaxed;
    c.tau.tau = 1.0;
    return c;
  };

  SUBCASE("closer copy faster everywhere: no anomaly") {
    const QmeCopyResult closer = mk({1.0, 0.5, 0.2, 0.05, 0.01}, true);
    const QmeCopyResult farther = mk({2.0, 1.2, 0.6, 0.3, 0.1}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.kind == QmeKind::None);
    CHECK(v.crossing_times.empty());
    CHECK_FALSE(v.partial);
  }
  SUBCASE("farther copy below at all times: type I") {
    const QmeCopyResult closer = mk({1.0, 0.8, 0.6, 0.4, 0.3}, true);
    const QmeCopyResult farther = mk({0.9, 0.4, 0.1, 0.05, 0.02}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.kind == QmeKind::TypeI);
    CHECK(v.crossing_times.empty());
  }
  SUBCASE("envelopes cross once: type II with an interpolated crossing") {
    const QmeCopyResult closer = mk({1.0, 0.6, 0.3, 0.1, 0.05}, true);
    const QmeCopyResult farther = mk({2.0, 1.0, 0.2, 0.02, 0.01}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.kind == QmeKind::TypeII);
    REQUIRE(v.crossing_times.size() == 1);
    // d = closer - farther flips between t = 1 (-0.4) and t = 2 (+0.1)
    CHECK(v.crossing_times[0] == doctest::Approx(1.0 + 0.4 / 0.5).epsilon(1e-12));
  }
  SUBCASE("noise floor suppresses spurious late crossings") {
    const QmeCopyResult closer = mk({1.0, 0.5, 0.1, 1e-5, 2e-6}, true);
    const QmeCopyResult farther = mk({2.0, 1.0, 0.3, 5e-6, 3e-6}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.kind == QmeKind::None);
  }
  SUBCASE("length mismatch extends the shorter run at its final value") {
    const QmeCopyResult closer = mk({1.0, 0.4}, true);
    const QmeCopyResult farther = mk({2.0, 1.0, 0.2, 0.1}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.kind == QmeKind::TypeII); // 0.4 vs 0.2 flips the sign at index 2
  }
  SUBCASE("unrelaxed copies mark the verdict partial") {
    const QmeCopyResult closer = mk({1.0, 0.9, 0.8}, false);
    const QmeCopyResult farther = mk({2.0, 1.5, 1.2}, true);
    const QmePairVerdict v = compare_envelopes(closer, farther, 1e-3);
    CHECK(v.partial);
  }
}

TEST_CASE("multi-copy comparison needs at least two points") {
  ModelParams base = small_chain();
  QmeConfig cfg;
  cfg.target = {0.3, 0.6};
  cfg.points = {{0.0, 1.1}};
  CHECK_THROWS_AS((void)run_qme(base, cfg), ConfigError);
}
