#include "gn/model.hpp"

#include <cmath>

namespace gn {

Real fermi(Real eps, Real kBT) {
  const Real x = eps / kBT;
  // Evaluate via exp(-|x|) only, so no overflow for any argument.
  if (x >= 0) {
    const Real e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

RealVector fermi(const RealVector& eps, Real kBT) {
  RealVector f(eps.size());
  for (Eigen::Index i = 0; i < eps.size(); ++i) f(i) = fermi(eps(i), kBT);
  return f;
}

RealMatrix build_hamiltonian(const DisplacementField& sigma, const ModelParams& p) {
  p.validate();
  if (sigma.size() != p.L)
    throw ConfigError("build_hamiltonian: sigma has length " + std::to_string(sigma.size()) +
                      ", expected L = " + std::to_string(p.L));
  const int L = p.L;
  RealMatrix h = RealMatrix::Zero(L, L);
  for (int j = 0; j < L; ++j) {
    h(j, j) = -p.mu;
    const int k = (j + 1) % L;
    const Real t = -(p.J + sigma(j));
    h(j, k) = t;
    h(k, j) = t;
  }
  return h;
}

SpectralDecomposition diagonalize(const RealMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw PhysicsError("diagonalize: symmetric eigensolver did not converge");
  SpectralDecomposition s;
  s.eps = es.eigenvalues();
  // Columns of the eigenvector matrix become rows of u (mode index first).
  s.u = es.eigenvectors().transpose().cast<Complex>();
  return s;
}

DisplacementField self_consistent_sigma(const CorrelationMatrix& theta, const ModelParams& p) {
  if (theta.rows() != p.L || theta.cols() != p.L)
    throw ConfigError("self_consistent_sigma: theta is not L x L");
  const int L = p.L;
  DisplacementField sigma(L);
  const Real c = 2.0 * p.g * p.g;
  for (int j = 0; j < L; ++j) sigma(j) = c * theta(j, (j + 1) % L).real();
  return sigma;
}

OrderParameterProfile decompose_order_parameter(const DisplacementField& sigma) {
  if (sigma.size() == 0 || sigma.size() % 2 != 0)
    throw ConfigError("decompose_order_parameter: length must be even and nonzero");
  OrderParameterProfile prof;
  prof.deltaJ = sigma.mean();
  prof.m.resize(sigma.size());
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    const Real sgn = (j % 2 == 0) ? 1.0 : -1.0;
    prof.m(j) = sgn * (sigma(j) - prof.deltaJ);
  }
  return prof;
}

DisplacementField compose_order_parameter(const OrderParameterProfile& prof) {
  DisplacementField sigma(prof.m.size());
  for (Eigen::Index j = 0; j < prof.m.size(); ++j) {
    const Real sgn = (j % 2 == 0) ? 1.0 : -1.0;
    sigma(j) = prof.deltaJ + sgn * prof.m(j);
  }
  return sigma;
}

} // namespace gn
