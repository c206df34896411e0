#include "gn/initstate.hpp"

#include "gn/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace gn {

CorrelationMatrix random_half_filled_theta(int L, std::uint64_t seed, const RandomInitSpec& spec) {
  if (L < 2) throw ConfigError("random_half_filled_theta: L must be >= 2");
  const Real n_part = spec.filling * L;
  const int n = static_cast<int>(std::llround(n_part));
  if (std::abs(n_part - n) > 1e-9 || n < 0 || n > L)
    throw ConfigError("random_half_filled_theta: L * filling is not an integer in [0, L]");
  if (!(spec.epsilon >= 0)) throw ConfigError("random_half_filled_theta: epsilon must be >= 0");

  std::mt19937_64 rng(seed);

  // Random occupation pattern at the requested filling.
  std::vector<Real> occ(L, 0.0);
  std::fill(occ.begin(), occ.begin() + n, 1.0);
  std::shuffle(occ.begin(), occ.end(), rng);

  if (spec.epsilon == 0.0) {
    CorrelationMatrix d = CorrelationMatrix::Zero(L, L);
    for (int j = 0; j < L; ++j) d(j, j) = occ[j];
    return d;
  }

  // Random Hermitian generator, scaled to unit spectral radius.
  std::normal_distribution<Real> gauss(0.0, 1.0);
  ComplexMatrix b(L, L);
  for (int j = 0; j < L; ++j)
    for (int k = 0; k < L; ++k) b(j, k) = Complex(gauss(rng), gauss(rng));
  for (int j = 0; j < L; ++j) b(j, j) = Complex(gauss(rng), 0.0);
  ComplexMatrix a = 0.5 * (b + b.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  if (es.info() != Eigen::Success)
    throw PhysicsError("random_half_filled_theta: eigensolve of the generator failed");
  const Real scale = es.eigenvalues().cwiseAbs().maxCoeff();
  if (scale > 0) a /= scale;

  // U = exp(i epsilon A) through the eigenbasis of A.
  es.compute(a);
  ComplexVector phases(L);
  for (int k = 0; k < L; ++k) {
    const Real phi = spec.epsilon * es.eigenvalues()(k);
    phases(k) = Complex(std::cos(phi), std::sin(phi));
  }
  const ComplexMatrix U =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  RealVector d = Eigen::Map<RealVector>(occ.data(), L);
  CorrelationMatrix theta = U.adjoint() * d.asDiagonal() * U;
  return 0.5 * (theta + theta.adjoint()); // scrub rounding asymmetry
}

CorrelationMatrix thermal_theta(const SpectralDecomposition& s, Real kBT) {
  if (!(kBT > 0)) throw ConfigError("thermal_theta: kBT must be > 0");
  const Eigen::Index L = s.u.rows();
  if (s.eps.size() != L || s.u.cols() != L)
    throw ConfigError("thermal_theta: inconsistent spectral decomposition");
  const RealVector f = fermi(s.eps, kBT);
  ComplexMatrix out = s.u.adjoint() * f.asDiagonal() * s.u;
  return 0.5 * (out + out.adjoint());
}

EvolutionConfig SteadySolveOptions::default_steady_evolution() {
  EvolutionConfig evo;
  evo.t_max = 6000.0;
  evo.steady_tol = 1e-8;
  evo.steady_window = 10.0;
  return evo;
}

namespace {

SteadyStateResult solve_by_dynamics(const ModelParams& p, const SteadySolveOptions& opt) {
  if (!(p.gamma > 0))
    throw ConfigError("solve_steady_state: the dynamics strategy requires gamma > 0");
  const CorrelationMatrix theta0 = random_half_filled_theta(p.L, opt.seed);

  // Acceptance needs both tests: sigma stationary over the window (the cheap,
  // physically monitored signal) and theta at bath equilibrium (checked only
  // once sigma has settled; it is the part sigma can be blind to).
  EvolutionConfig evo = opt.evo;
  evo.steady_window = 0.0; // detection moves into the callback below
  const long window_samples =
      (opt.evo.steady_window > 0 && opt.evo.steady_tol > 0)
          ? std::llround(opt.evo.steady_window / (evo.dt * evo.sample_stride))
          : 0;

  std::vector<DisplacementField> sigmas;
  bool steady = false;
  const StopCallback stop = [&](Real t, const DisplacementField& sigma,
                                const CorrelationMatrix& theta) {
    sigmas.push_back(sigma);
    const long i = static_cast<long>(sigmas.size()) - 1;
    if (window_samples < 1 || i < window_samples || t < opt.evo.steady_min_time) return false;
    const Real drift =
        (sigmas[static_cast<std::size_t>(i)] - sigmas[static_cast<std::size_t>(i - window_samples)])
            .cwiseAbs()
            .maxCoeff();
    if (drift >= opt.evo.steady_tol) return false;
    const CorrelationMatrix eq = thermal_theta(diagonalize(build_hamiltonian(sigma, p)), p.kBT);
    if ((theta - eq).cwiseAbs().maxCoeff() >= opt.theta_residual_tol) return false;
    steady = true;
    return true;
  };

  const TrajectoryRecord rec = evolve(theta0, p, evo, stop);
  SteadyStateResult res;
  res.theta = rec.theta_final;
  res.sigma = self_consistent_sigma(rec.theta_final, p);
  res.converged = steady;
  res.time_or_iters = rec.t_final;
  res.method = SteadyStrategy::Dynamics;
  return res;
}

SteadyStateResult solve_by_fixed_point(const ModelParams& p, const SteadySolveOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<Real> gauss(0.0, opt.fp_init_scale);
  DisplacementField sigma(p.L);
  for (int j = 0; j < p.L; ++j) sigma(j) = gauss(rng);

  SteadyStateResult res;
  res.method = SteadyStrategy::FixedPoint;
  CorrelationMatrix theta;
  int it = 0;
  for (; it < opt.fp_max_iters; ++it) {
    theta = thermal_theta(diagonalize(build_hamiltonian(sigma, p)), p.kBT);
    const DisplacementField next = self_consistent_sigma(theta, p);
    const DisplacementField move = opt.fp_mixing * (next - sigma);
    sigma += move;
    if (move.cwiseAbs().maxCoeff() < opt.fp_tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  // Evaluate the map once more so theta corresponds to the final sigma.
  res.theta = thermal_theta(diagonalize(build_hamiltonian(sigma, p)), p.kBT);
  res.sigma = self_consistent_sigma(res.theta, p);
  res.time_or_iters = static_cast<Real>(it);
  return res;
}

} // namespace

SteadyStateResult solve_steady_state(const ModelParams& p, const SteadySolveOptions& opt) {
  p.validate();
  return opt.strategy == SteadyStrategy::Dynamics ? solve_by_dynamics(p, opt)
                                                  : solve_by_fixed_point(p, opt);
}

} // namespace gn
