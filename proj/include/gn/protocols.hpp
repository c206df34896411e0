// Experiment orchestration: phase classification and the phase-diagram scan,
// parameter quenches with transition detection, the two-step (Pontus) Mpemba
// protocol, and the multi-copy (quantum) Mpemba comparison.
#pragma once

#include "gn/evolution.hpp"
#include "gn/initstate.hpp"
#include "gn/observables.hpp"
#include "gn/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gn {

struct ParamPoint {
  Real mu = 0.0;
  Real g = 0.0;
};

inline ModelParams params_at(ModelParams base, const ParamPoint& pt) {
  base.mu = pt.mu;
  base.g = pt.g;
  return base;
}

// ---------------------------------------------------------------------------
// Harmonic time series (shared by quench / PME / QME analysis)

struct HarmonicSeries {
  std::vector<Real> times;
  std::vector<HarmonicSpectrum> spectra;
};

// Spectrum of the staggered order parameter for every displacement sample.
HarmonicSeries harmonic_series(const std::vector<Real>& times,
                               const std::vector<DisplacementField>& sigma_series);

// Unnormalized order-parameter distance sqrt(sum_nu |m(nu,t) - m_eq(nu)|^2).
DistanceSeries order_distance_series(const HarmonicSeries& series, const HarmonicSpectrum& eq);

DistanceSeries scale_series(DistanceSeries series, Real factor);

// ---------------------------------------------------------------------------
// Phase classification

enum class Phase { OP, CP, DP };

const char* to_string(Phase phase);

struct PhaseLabel {
  Phase kind = Phase::DP;
  int dominant_nu = 0;   // 0 for OP, >= 1 for CP; not meaningful for DP
  Real amplitude = 0.0;  // folded dominant amplitude (DP: max |m_hat| over modes)
  bool frustrated = false; // seed disagreement during steady-state voting
};

// Label a displacement profile: DP when every harmonic of the staggered part
// is below dp_threshold; OP when the dominant folded harmonic sits at nu = 0;
// CP otherwise (dominant_nu = the dominant folded harmonic index).
PhaseLabel classify_profile(const DisplacementField& sigma, Real dp_threshold = 1e-3);

struct ClassifyOptions {
  std::uint64_t base_seed = 1;
  int initial_seeds = 2; // labels must agree, else...
  int extra_seeds = 2;   // ...this many more run and the majority wins (frustrated = true)
  Real dp_threshold = 1e-3;
  SteadySolveOptions steady{};
  // Replaceable steady-state backend (defaults to solve_steady_state). Lets
  // callers cache or memoize the expensive solves that classification shares
  // with downstream protocol runs.
  std::function<SteadyStateResult(const ModelParams&, const SteadySolveOptions&)> solver{};
};

// Steady-state phase label at the given parameters: solve the steady state
// for `initial_seeds` independent random initial conditions; if the labels
// disagree, run `extra_seeds` more and take the majority, flagging the point
// as frustrated.
PhaseLabel classify_steady_state(const ModelParams& p, const ClassifyOptions& opt = {});

// ---------------------------------------------------------------------------
// Phase-diagram scan

struct ScanPointResult {
  ParamPoint point;
  bool ok = false;
  std::string error; // set when !ok
  PhaseLabel label;  // valid when ok
};

struct BoundaryPoint {
  ParamPoint a, b;     // adjacent grid points with different phase kind
  ParamPoint midpoint; // boundary estimate
};

struct ScanConfig {
  std::vector<Real> mu_values; // grid axis (may be empty if extra_points given)
  std::vector<Real> g_values;  // grid axis
  std::vector<ParamPoint> extra_points; // classified alongside the grid
  ClassifyOptions classify{};
  int workers = 0; // 0 = auto
};

struct ScanResult {
  std::vector<Real> mu_values, g_values;
  // Grid results indexed ig * mu_values.size() + imu, followed by the extra
  // points in input order.
  std::vector<ScanPointResult> points;
  std::vector<BoundaryPoint> boundaries; // from the grid only

  std::size_t grid_index(std::size_t imu, std::size_t ig) const {
    return ig * mu_values.size() + imu;
  }
};

using PointClassifier = std::function<PhaseLabel(const ModelParams&)>;

// Classify every grid point (in parallel) and estimate phase boundaries as
// midpoints of adjacent grid pairs whose phase kind differs.  Individual
// point failures are recorded and the scan continues.  A custom `classifier`
// replaces classify_steady_state (used by tests; default runs the dynamics).
ScanResult scan_phase_diagram(const ModelParams& base, const ScanConfig& cfg,
                              const PointClassifier& classifier = {});

// ---------------------------------------------------------------------------
// Quench

struct QuenchConfig {
  ParamPoint from{}, to{};
  std::uint64_t seed = 1;
  SteadySolveOptions prep{};       // pre-quench steady-state preparation
  EvolutionConfig evo = default_quench_evolution();
  DptConfig dpt{};
  // Pre-quench state, if already available (skips the preparation run).
  std::optional<CorrelationMatrix> start_theta_hint;
  // Post-quench steady state for the backward fidelity, if already available
  // (otherwise it is computed separately with a seed derived from `seed`).
  std::optional<CorrelationMatrix> target_theta_hint;

  static EvolutionConfig default_quench_evolution();
};

struct QuenchResult {
  TrajectoryRecord traj;
  HarmonicSeries harmonics;      // on the displacement sample grid
  DistanceSeries m_hat;          // order distance vs the run's own final spectrum
  DistanceSeries f_fw;           // fidelity vs the pre-quench state (snapshot grid)
  DistanceSeries f_bw;           // fidelity vs the target steady state
  DistanceSeries d_t;            // correlation-matrix trace distance vs pre-quench state
  CorrelationMatrix theta_in;    // prepared pre-quench state
  CorrelationMatrix theta_eq;    // target steady state used for f_bw
  DisplacementField sigma_in, sigma_eq;
  DptReport dpt;
};

// Prepare the steady state at `from`, switch parameters to `to` at t = 0+,
// evolve, and attach harmonics, distances, fidelities, and the transition
// report.
QuenchResult run_quench(const ModelParams& base, const QuenchConfig& cfg);

// ---------------------------------------------------------------------------
// Two-step (Pontus) Mpemba protocol

enum class SwitchPolicy { FixedTime, MinDistance, PlateauStart };

struct PmeConfig {
  ParamPoint s{}, a{}, f{};
  SwitchPolicy policy = SwitchPolicy::FixedTime;
  Real fixed_switch_time = 960.0; // used by FixedTime
  Real threshold = 1e-2;        // on the normalized order-distance envelope
  Real plateau_slope = 1e-5;    // |d envelope/dt| below this starts the plateau
  std::uint64_t seed = 1;
  SteadySolveOptions prep{};
  EvolutionConfig evo = QuenchConfig::default_quench_evolution();
  Interp interp = Interp::Linear;
  std::optional<CorrelationMatrix> s_theta_hint; // prepared S state, if available
};

struct PmeLeg {
  ParamPoint run_at{};           // parameters the leg evolves under
  std::vector<Real> times;
  DistanceSeries m_norm;         // normalized order distance (see run_pme docs)
  DistanceSeries envelope;       // upper envelope of m_norm
  RelaxationTime relax{};
  HarmonicSpectrum asymptote;    // spectrum the distance is measured against
  TrajectoryRecord traj;
};

struct PmeOutcome {
  Real t_sf = 0.0;      // direct-leg relaxation time S -> F
  Real t_si = 0.0;      // switch time spent in leg S -> A
  Real t_if = 0.0;      // second-leg relaxation time I -> F
  bool pme_holds = false;
  bool all_relaxed = false;
  bool degenerate = false; // S == F
  Real threshold = 0.0;
  Real switch_requested = 0.0; // policy's choice before step-grid rounding
  PmeLeg direct, leg1, leg2;
};

// Protocol: leg 0 quenches S -> F directly and measures t_SF; leg 1 quenches
// S -> A, stores the state at the switch time t_SI chosen by `policy`; leg 2
// restarts from that state with parameters F and measures t_IF.  The verdict
// is pme_holds = (t_SI + t_IF < t_SF).
//
// Relaxation is measured on the upper envelope of the normalized order
// distance M.  Each relaxing leg measures against its own asymptotic
// spectrum (steady states with spatial modulation form a translation-
// degenerate family, so a separately prepared target would differ by mode
// phases and M could never reach zero); both legs are normalized by the
// distance from the protocol's starting S spectrum to that asymptote, so the
// direct and two-step routes are read off against commensurate yardsticks.
PmeOutcome run_pme(const ModelParams& base, const PmeConfig& cfg);

// ---------------------------------------------------------------------------
// Multi-copy (quantum) Mpemba comparison

enum class QmeKind { None, TypeI, TypeII };

const char* to_string(QmeKind kind);

struct QmeCopyResult {
  ParamPoint point{};
  bool ok = false;
  std::string error;
  Real d_e = 0.0;      // Euclidean parameter distance to the target
  int pre_nu = 0;      // dominant harmonic of the prepared (pre-quench) state
  Real pre_amplitude = 0.0;
  DistanceSeries m_hat;    // unnormalized order distance vs the target spectrum
  DistanceSeries envelope; // upper envelope of m_hat
  RelaxationTime tau{};    // envelope crossing of cfg.threshold
  TrajectoryRecord traj;
};

struct QmePairVerdict {
  std::size_t closer = 0, farther = 0; // indices into copies, by D_E (ties: input order)
  QmeKind kind = QmeKind::None;
  std::vector<Real> crossing_times; // envelope crossings (TypeII)
  bool partial = false;             // a copy failed or did not relax
};

struct QmeConfig {
  ParamPoint target{};
  std::vector<ParamPoint> points; // >= 2 copies
  Real threshold = 1e-2;
  Real noise_floor = 1e-3; // envelopes are only compared while one exceeds this
  std::uint64_t master_seed = 1;
  SteadySolveOptions prep{};
  EvolutionConfig evo = QuenchConfig::default_quench_evolution();
  Interp interp = Interp::Linear;
  int workers = 0;
  // Target steady-state spectrum, if already available (otherwise computed
  // separately from the master seed).
  std::optional<HarmonicSpectrum> target_spectrum_hint;
};

struct QmeOutcome {
  HarmonicSpectrum target_spectrum;
  std::vector<QmeCopyResult> copies;   // input order
  std::vector<QmePairVerdict> pairs;   // all unordered pairs
  bool partial = false;
};

// For every initial point: prepare the steady state there (with a seed
// derived from the master seed and the point's coordinates, so identical
// points evolve identically), quench to the target, record the unnormalized
// order distance to the target spectrum and its upper envelope, and read off
// the relaxation time at `threshold`.  Pairs are then classified: None when
// the copy closer in parameter distance relaxes faster at all compared
// times, TypeI when the farther copy's envelope stays below the closer one's
// throughout, TypeII when the envelopes cross at finite time.
QmeOutcome run_qme(const ModelParams& base, const QmeConfig& cfg);

// Envelope comparison for one (closer, farther) pair; only the `envelope` and
// `tau` members are read.  Samples are index-aligned (a run that stopped early
// continues at its final value), samples with both envelopes below
// `noise_floor` are ignored, and sign changes of (closer - farther) are
// located by linear interpolation.  Sets kind/crossing_times/partial; the
// caller fills the index members.
QmePairVerdict compare_envelopes(const QmeCopyResult& closer, const QmeCopyResult& farther,
                                 Real noise_floor);

} // namespace gn
