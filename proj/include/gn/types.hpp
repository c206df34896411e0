// Common scalar and dense-matrix types for the dissipative Gross-Neveu chain.
//
// Conventions used throughout:
//   * sites are 0-based, j = 0..L-1, periodic; bond j couples sites j and (j+1) mod L
//   * theta(j,k) = <c_j^dag c_k>  (Hermitian, eigenvalues in [0,1])
//   * sigma(j) is the bond displacement living on bond j; the wrap bond L-1 -> 0
//     carries sigma(L-1)
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace gn {

using Real = double;
using Complex = std::complex<double>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

using DisplacementField = RealVector;
using CorrelationMatrix = ComplexMatrix;

// Invalid parameters, malformed input files, bad CLI/config values.  Exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A physical invariant was violated at runtime (occupations out of bounds,
// fidelity outside [0,1], many-body trace drift, ...).  Exit code 1.
struct PhysicsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelParams {
  int L = 100;       // number of sites, even, >= 4
  Real J = 1.0;      // bare hopping
  Real mu = 0.0;     // chemical potential
  Real g = 0.0;      // fermion-displacement coupling
  Real gamma = 0.01; // bath coupling rate
  Real kBT = 0.05;   // bath temperature

  void validate() const {
    if (L < 4 || L % 2 != 0)
      throw ConfigError("ModelParams: L must be even and >= 4, got " + std::to_string(L));
    if (!(J > 0)) throw ConfigError("ModelParams: J must be > 0");
    if (!(gamma >= 0)) throw ConfigError("ModelParams: gamma must be >= 0");
    if (!(g >= 0)) throw ConfigError("ModelParams: g must be >= 0");
    if (!(kBT > 0)) throw ConfigError("ModelParams: kBT must be > 0");
  }
};

// Eigenmodes of the single-particle Hamiltonian.  Row e of u holds the mode
// vector of energy eps(e): the bath jump operator for that mode is
// Gamma_e = sum_j conj(u(e,j)) c_j.  Rows are orthonormal; the overall phase
// of each row is arbitrary and nothing downstream may depend on it.
struct SpectralDecomposition {
  RealVector eps;  // ascending
  ComplexMatrix u; // rows = mode vectors
};

// sigma(j) = deltaJ + (-1)^j m(j): uniform bond shift plus staggered component.
struct OrderParameterProfile {
  Real deltaJ = 0.0;
  RealVector m;
};

} // namespace gn
