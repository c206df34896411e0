// Brute-force many-body reference: the full Lindblad equation on the 2^L
// Fock space with jump operators in the eigenmode basis of a frozen h.
// Everything here is dense and intended for L <= 6 only; it exists to
// validate the correlation-matrix evolution, the Gaussian-state fidelity
// formula, and Wick factorization.
#pragma once

#include "gn/types.hpp"

#include <vector>

namespace gn {

// Fock-space annihilators under Jordan-Wigner ordering, site 0 least
// significant: c_j |n> = (-1)^(sum_{k&lt;j} n_k) |n - 1_j>.
struct ManyBodyBasis {
  int L = 0;
  int dim = 0;                  // 2^L
  std::vector<ComplexMatrix> c; // annihilator per site
};

ManyBodyBasis jordan_wigner_basis(int L);

ComplexMatrix many_body_hamiltonian(const ManyBodyBasis& basis, const RealMatrix& h);

// Dense 4^L x 4^L generator: vec(drho/dt) = liouvillian * vec(rho), with
// column-major vec.  Mode e with energy eps_e (from h, which already carries
// the chemical potential on its diagonal) couples with rates
// gamma * (1 - f(eps_e)) on Gamma_e and gamma * f(eps_e) on Gamma_e^dag,
// Gamma_e = sum_j conj(u(e,j)) c_j.
ComplexMatrix build_liouvillian(const ManyBodyBasis& basis, const RealMatrix& h,
                                const ModelParams& p);

// Gaussian density matrix with <c_j^dag c_k> = theta(j,k): a product over the
// eigenmodes of theta of (n_k N_k + (1-n_k)(1-N_k)).
ComplexMatrix gaussian_density_matrix(const ManyBodyBasis& basis, const CorrelationMatrix& theta);

CorrelationMatrix extract_correlations(const ManyBodyBasis& basis, const ComplexMatrix& rho);

Real overlap(const ComplexMatrix& rho1, const ComplexMatrix& rho2); // Tr[rho1 rho2]

struct ManyBodyTrajectory {
  std::vector<Real> times;
  std::vector<CorrelationMatrix> theta;
  std::vector<ComplexMatrix> rho;
};

// Classic RK4 on vec(rho) with fixed dt (use the same dt as the
// correlation-matrix integrator when comparing the two pictures).  Aborts
// with PhysicsError if |Tr rho - Tr rho(0)| drifts beyond trace_tol.
ManyBodyTrajectory evolve_many_body(const ComplexMatrix& rho0, const ComplexMatrix& liouvillian,
                                    Real dt, Real t_max, int sample_stride = 20,
                                    Real trace_tol = 1e-6);

} // namespace gn
