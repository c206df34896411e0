// Time evolution of the correlation matrix under the self-consistent
// mean-field master equation:
//
//   d theta / dt = i (h^T theta - theta h^T) - gamma (theta - theta_th(h))
//
// with h = h(sigma(theta)) recomputed from theta at every integrator stage
// (the feedback is part of the right-hand side, not an outer loop), and
// theta_th the bath-equilibrium correlation matrix of the instantaneous h.
// Both terms also exist in literal index form (explicit four-term hopping
// expression; explicit double sum over modes and sites) as validation paths.
#pragma once

#include "gn/observables.hpp"
#include "gn/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gn {

enum class RediagMode {
  PerStage, // rediagonalize h at every RK4 stage (correctness default)
  PerStep   // reuse the step-initial mode basis for the dissipator across stages
};

enum class DissipatorMode { Matrix, ExplicitSum };

struct EvolutionConfig {
  Real dt = 0.05;
  Real t_max = 1000.0;
  int sample_stride = 20; // record sigma every this many steps (20 * 0.05 = 1/J)
  int theta_stride = 0;   // keep a theta snapshot every this many samples (0 = off)

  // Steady-state detection: stop once max_j |sigma_j(t) - sigma_j(t - steady_window)|
  // < steady_tol, evaluated on the sample grid.  A window <= 0 disables it.
  Real steady_tol = 1e-8;
  Real steady_window = 10.0;
  Real steady_min_time = 0.0;

  RediagMode rediag = RediagMode::PerStage;
  DissipatorMode dissipator = DissipatorMode::Matrix;

  // When set, sigma is held at this profile instead of being recomputed from
  // theta (used for validation against the many-body solver).
  std::optional<DisplacementField> frozen_sigma;

  // Exact step-aligned times at which theta is stored in checkpoints (times
  // are rounded to the nearest step).  Steady-state stopping is deferred
  // until the last checkpoint has been taken.
  std::vector<Real> checkpoint_times;

  int bounds_check_stride = 100; // occupation-spectrum check cadence, in steps
  Real bounds_tol = 1e-6;

  void validate() const;
};

struct TrajectoryRecord {
  std::vector<Real> times;
  std::vector<DisplacementField> sigma_series;

  std::vector<Real> theta_times;
  std::vector<CorrelationMatrix> theta_series;
  std::map<Real, CorrelationMatrix> checkpoints;

  CorrelationMatrix theta_final;
  Real t_final = 0.0;
  bool steady_reached = false;

  // Derived series attached by protocol-level helpers ("M", "Mhat", "F_fw", ...).
  std::map<std::string, DistanceSeries> distances;
};

// Coherent part, matrix form: i (h theta - theta h) for symmetric real h.
ComplexMatrix coherent_rhs_matrix(const CorrelationMatrix& theta, const RealMatrix& h);
// Coherent part, literal four-term hopping expression (no mu term: the density
// coupling commutes with every theta entry's evolution and drops out).
ComplexMatrix coherent_rhs_explicit(const CorrelationMatrix& theta,
                                    const DisplacementField& sigma, Real J);

// Dissipative part, matrix form: -gamma (theta - theta_th).
ComplexMatrix dissipator_rhs_matrix(const CorrelationMatrix& theta,
                                    const CorrelationMatrix& theta_th, Real gamma);
// Dissipative part as the literal double sum over modes and sites with weights
// gamma/2, [1 - f(eps)] and f(eps).
ComplexMatrix dissipator_rhs_explicit(const CorrelationMatrix& theta,
                                      const SpectralDecomposition& s, Real gamma, Real kBT);

// Full right-hand side with self-consistent sigma (or the supplied override).
ComplexMatrix rhs(const CorrelationMatrix& theta, const ModelParams& p,
                  DissipatorMode mode = DissipatorMode::Matrix,
                  const DisplacementField* sigma_override = nullptr);

// One RK4 step followed by re-Hermitization.
CorrelationMatrix step(const CorrelationMatrix& theta, const ModelParams& p,
                       const EvolutionConfig& cfg);

// Called at every sample time after recording; return true to stop the run.
using StopCallback = std::function<bool(Real t, const DisplacementField& sigma,
                                        const CorrelationMatrix& theta)>;

TrajectoryRecord evolve(const CorrelationMatrix& theta0, const ModelParams& p,
                        const EvolutionConfig& cfg, const StopCallback& stop = {});

// Binary theta snapshot: magic "GNTH", u32 version, u32 L, f64 time, then
// row-major (re, im) f64 pairs, all little-endian.  Round-trips bit-exactly.
struct Checkpoint {
  CorrelationMatrix theta;
  Real time = 0.0;
};
void write_checkpoint(const std::string& path, const CorrelationMatrix& theta, Real time);
Checkpoint read_checkpoint(const std::string& path);

} // namespace gn
