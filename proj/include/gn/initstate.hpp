// Initial and stationary states: seeded random pure states at fixed filling,
// the bath-equilibrium (thermal) correlation matrix of a fixed Hamiltonian,
// and the self-consistent steady-state solvers.
#pragma once

#include "gn/evolution.hpp"
#include "gn/types.hpp"

#include <cstdint>

namespace gn {

struct RandomInitSpec {
  Real filling = 0.5;  // L * filling must be an integer
  Real epsilon = 0.05; // rotation strength; 0 gives the diagonal state exactly
};

// theta(0) = U^dag D U with D a seeded random 0/1 diagonal at the requested
// filling and U = exp(i epsilon A), A a seeded random Hermitian matrix scaled
// to unit spectral radius.  The spectrum of theta(0) is exactly {0,1} and
// Tr theta(0) = L * filling.
CorrelationMatrix random_half_filled_theta(int L, std::uint64_t seed,
                                           const RandomInitSpec& spec = {});

// theta_th(j,k) = sum_e f(eps_e) conj(u(e,j)) u(e,k); commutes with h.
CorrelationMatrix thermal_theta(const SpectralDecomposition& s, Real kBT);

enum class SteadyStrategy {
  Dynamics,  // canonical: evolve a random state until the sigma profile stops moving
  FixedPoint // accelerator: damped iteration of sigma -> sigma(theta_th(h(sigma)))
};

struct SteadySolveOptions {
  SteadyStrategy strategy = SteadyStrategy::Dynamics;
  std::uint64_t seed = 1;
  EvolutionConfig evo = default_steady_evolution();
  // The dynamics solver accepts only when, at a sigma-stationary sample, theta
  // is also at bath equilibrium: max |theta - theta_th(h(sigma))| below this.
  // sigma alone cannot witness convergence when the feedback is degenerate
  // (at g = 0 it is identically zero while theta is still relaxing).
  Real theta_residual_tol = 1e-6;
  Real fp_mixing = 0.3;
  int fp_max_iters = 20000;
  Real fp_tol = 1e-8;
  Real fp_init_scale = 0.3; // std-dev of the seeded random starting sigma

  static EvolutionConfig default_steady_evolution();
};

struct SteadyStateResult {
  CorrelationMatrix theta;
  DisplacementField sigma;
  bool converged = false;
  Real time_or_iters = 0.0; // evolution time (Dynamics) or iteration count (FixedPoint)
  SteadyStrategy method = SteadyStrategy::Dynamics;
};

// Dynamics requires gamma > 0 (the bath is what relaxes the state).  The
// fixed-point strategy may converge to metastable branches; the dynamics
// result is canonical and the two are cross-validated in the test suite by
// comparing harmonic moduli (modulated profiles are degenerate under lattice
// translation, so site-wise comparison is meaningless).
SteadyStateResult solve_steady_state(const ModelParams& p, const SteadySolveOptions& opt = {});

} // namespace gn
