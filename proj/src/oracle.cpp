#include "gn/oracle.hpp"

#include "gn/model.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>
#include <string>

namespace gn {

namespace {

constexpr int kMaxSites = 6; // 4^L liouvillian; keep it small enough to allocate

void check_size(int L) {
  if (L < 1 || L > kMaxSites) {
    throw ConfigError("many-body reference supports 1 <= L <= " + std::to_string(kMaxSites) +
                      ", got L = " + std::to_string(L));
  }
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// vec is column-major: vec(A rho B) = (B^T kron A) vec(rho).
ComplexMatrix left_mult(const ComplexMatrix& a, int dim) {
  return kron(ComplexMatrix::Identity(dim, dim), a);
}

ComplexMatrix right_mult(const ComplexMatrix& b, int dim) {
  return kron(b.transpose(), ComplexMatrix::Identity(dim, dim));
}

// D[A](rho) = A rho A^dag - 1/2 {A^dag A, rho} as a superoperator.
ComplexMatrix dissipator(const ComplexMatrix& a, int dim) {
  const ComplexMatrix adag_a = a.adjoint() * a;
  ComplexMatrix out = kron(a.conjugate(), a);
  out -= 0.5 * left_mult(adag_a, dim);
  out -= 0.5 * right_mult(adag_a, dim);
  return out;
}

} // namespace

ManyBodyBasis jordan_wigner_basis(int L) {
  check_size(L);
  ManyBodyBasis basis;
  basis.L = L;
  basis.dim = 1 << L;
  basis.c.reserve(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    ComplexMatrix cj = ComplexMatrix::Zero(basis.dim, basis.dim);
    const unsigned mask_below = (1u << j) - 1u;
    for (unsigned n = 0; n < static_cast<unsigned>(basis.dim); ++n) {
      if ((n >> j) & 1u) {
        const int parity = std::popcount(n & mask_below) & 1;
        cj(static_cast<Eigen::Index>(n ^ (1u << j)), static_cast<Eigen::Index>(n)) =
            parity ? Complex(-1.0, 0.0) : Complex(1.0, 0.0);
      }
    }
    basis.c.push_back(std::move(cj));
  }
  return basis;
}

ComplexMatrix many_body_hamiltonian(const ManyBodyBasis& basis, const RealMatrix& h) {
  const int L = basis.L;
  if (h.rows() != L || h.cols() != L) {
    throw ConfigError("single-particle matrix does not match basis size");
  }
  ComplexMatrix H = ComplexMatrix::Zero(basis.dim, basis.dim);
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      if (h(a, b) != 0.0) {
        H += h(a, b) * (basis.c[static_cast<std::size_t>(a)].adjoint() *
                        basis.c[static_cast<std::size_t>(b)]);
      }
    }
  }
  return H;
}

ComplexMatrix build_liouvillian(const ManyBodyBasis& basis, const RealMatrix& h,
                                const ModelParams& p) {
  p.validate();
  const int dim = basis.dim;
  const ComplexMatrix H = many_body_hamiltonian(basis, h);

  const Complex minus_i(0.0, -1.0);
  ComplexMatrix liou = minus_i * (left_mult(H, dim) - right_mult(H, dim));

  if (p.gamma > 0.0) {
    const SpectralDecomposition s = diagonalize(h);
    for (int e = 0; e < basis.L; ++e) {
      ComplexMatrix gamma_e = ComplexMatrix::Zero(dim, dim);
      for (int j = 0; j < basis.L; ++j) {
        gamma_e += std::conj(s.u(e, j)) * basis.c[static_cast<std::size_t>(j)];
      }
      const Real f = fermi(s.eps(e), p.kBT);
      liou += (p.gamma * (1.0 - f)) * dissipator(gamma_e, dim);
      liou += (p.gamma * f) * dissipator(gamma_e.adjoint(), dim);
    }
  }
  return liou;
}

ComplexMatrix gaussian_density_matrix(const ManyBodyBasis& basis, const CorrelationMatrix& theta) {
  const int L = basis.L;
  if (theta.rows() != L || theta.cols() != L) {
    throw ConfigError("correlation matrix does not match basis size");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(theta);
  if (es.info() != Eigen::Success) {
    throw PhysicsError("eigendecomposition of the correlation matrix failed");
  }
  const ComplexMatrix identity = ComplexMatrix::Identity(basis.dim, basis.dim);
  ComplexMatrix rho = identity;
  for (int k = 0; k < L; ++k) {
    Real n = es.eigenvalues()(k);
    if (n < -1e-9 || n > 1.0 + 1e-9) {
      throw PhysicsError("correlation matrix occupation " + std::to_string(n) +
                         " outside [0, 1]; not a fermionic state");
    }
    n = std::min(1.0, std::max(0.0, n));
    // With theta = W n W^dag, the mode operators d_k = sum_j W(j,k) c_j obey
    // <d_m^dag d_q> = n_m delta_mq (theta_jk = <c_j^dag c_k> rotates as theta^T).
    ComplexMatrix dk = ComplexMatrix::Zero(basis.dim, basis.dim);
    for (int j = 0; j < L; ++j) {
      dk += es.eigenvectors()(j, k) * basis.c[static_cast<std::size_t>(j)];
    }
    const ComplexMatrix number = dk.adjoint() * dk;
    rho = rho * (n * number + (1.0 - n) * (identity - number));
  }
  return 0.5 * (rho + rho.adjoint()); // mode factors commute; this only trims rounding
}

CorrelationMatrix extract_correlations(const ManyBodyBasis& basis, const ComplexMatrix& rho) {
  const int L = basis.L;
  CorrelationMatrix theta(L, L);
  for (int j = 0; j < L; ++j) {
    const ComplexMatrix cj_dag = basis.c[static_cast<std::size_t>(j)].adjoint();
    for (int k = 0; k < L; ++k) {
      theta(j, k) = (cj_dag * basis.c[static_cast<std::size_t>(k)] * rho).trace();
    }
  }
  return 0.5 * (theta + theta.adjoint().eval());
}

Real overlap(const ComplexMatrix& rho1, const ComplexMatrix& rho2) {
  const Complex tr = (rho1 * rho2).trace();
  if (std::abs(tr.imag()) > 1e-9) {
    throw PhysicsError("Tr[rho1 rho2] has a non-negligible imaginary part");
  }
  return tr.real();
}

ManyBodyTrajectory evolve_many_body(const ComplexMatrix& rho0, const ComplexMatrix& liouvillian,
                                    Real dt, Real t_max, int sample_stride, Real trace_tol) {
  if (dt <= 0.0 || t_max <= 0.0 || sample_stride < 1) {
    throw ConfigError("many-body evolution needs dt > 0, t_max > 0, sample_stride >= 1");
  }
  const Eigen::Index dim = rho0.rows();
  if (rho0.cols() != dim || liouvillian.rows() != dim * dim || liouvillian.cols() != dim * dim) {
    throw ConfigError("density matrix / liouvillian dimensions are inconsistent");
  }
  const int L = static_cast<int>(std::lround(std::log2(static_cast<double>(dim))));

  ManyBodyBasis basis = jordan_wigner_basis(L);
  ComplexVector v = Eigen::Map<const ComplexVector>(rho0.data(), dim * dim);
  const Real trace0 = rho0.trace().real();

  const long n_steps = static_cast<long>(std::ceil(t_max / dt - 1e-9));
  ManyBodyTrajectory traj;

  const auto sample = [&](Real t) {
    ComplexMatrix rho = Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
    const Real trace = rho.trace().real();
    if (std::abs(trace - trace0) > trace_tol) {
      throw PhysicsError("many-body trace drifted by " + std::to_string(trace - trace0) +
                         " at t = " + std::to_string(t) + "; reduce dt");
    }
    traj.times.push_back(t);
    traj.theta.push_back(extract_correlations(basis, rho));
    traj.rho.push_back(std::move(rho));
  };

  sample(0.0);
  ComplexVector k1(dim * dim), k2(dim * dim), k3(dim * dim), k4(dim * dim), tmp(dim * dim);
  for (long istep = 1; istep <= n_steps; ++istep) {
    k1.noalias() = liouvillian * v;
    tmp = v + (0.5 * dt) * k1;
    k2.noalias() = liouvillian * tmp;
    tmp = v + (0.5 * dt) * k2;
    k3.noalias() = liouvillian * tmp;
    tmp = v + dt * k3;
    k4.noalias() = liouvillian * tmp;
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (istep % sample_stride == 0 || istep == n_steps) {
      sample(static_cast<Real>(istep) * dt);
    }
  }
  return traj;
}

} // namespace gn
