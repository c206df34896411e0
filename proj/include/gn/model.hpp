// Single-particle model: Hamiltonian assembly, diagonalization, Fermi factors,
// the self-consistency map for the bond field, and the order-parameter split.
#pragma once

#include "gn/types.hpp"

namespace gn {

// Fermi occupation 1/(1 + exp(eps/kBT)), overflow-safe for any argument.
Real fermi(Real eps, Real kBT);
RealVector fermi(const RealVector& eps, Real kBT);

// L x L real symmetric matrix: h(j,j) = -mu, h(j,j+1) = h(j+1,j) = -(J + sigma(j)),
// periodic wrap h(L-1,0) = -(J + sigma(L-1)).  The constant displacement energy
// sum_j sigma_j^2 / (2 g^2) is a c-number and is not part of h.
RealMatrix build_hamiltonian(const DisplacementField& sigma, const ModelParams& p);

// Dense symmetric eigensolve; eps ascending.  Throws PhysicsError on solver failure.
SpectralDecomposition diagonalize(const RealMatrix& h);

// sigma(j) = g^2 * (theta(j,j+1) + theta(j+1,j)) = 2 g^2 Re theta(j,j+1), cyclic.
DisplacementField self_consistent_sigma(const CorrelationMatrix& theta, const ModelParams& p);

// deltaJ = mean(sigma); m(j) = (-1)^j (sigma(j) - deltaJ).  Requires even length.
OrderParameterProfile decompose_order_parameter(const DisplacementField& sigma);
DisplacementField compose_order_parameter(const OrderParameterProfile& prof);

} // namespace gn
