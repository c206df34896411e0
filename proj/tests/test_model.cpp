#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gn/model.hpp"

#include <cmath>

using namespace gn;

TEST_CASE("fermi factor: value, symmetry, and overflow safety") {
  CHECK(fermi(0.0, 0.05) == doctest::Approx(0.5).epsilon(1e-14));
  // 1/(1+e) at eps = kBT
  CHECK(fermi(0.05, 0.05) == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-14));
  // particle-hole symmetry f(eps) + f(-eps) = 1
  for (Real eps : {0.01, 0.3, 2.0, 40.0}) {
    CHECK(fermi(eps, 0.05) + fermi(-eps, 0.05) == doctest::Approx(1.0).epsilon(1e-14));
  }
  // huge arguments must not overflow or produce NaN
  CHECK(fermi(1e6, 0.05) == 0.0);
  CHECK(fermi(-1e6, 0.05) == 1.0);
  CHECK(std::isfinite(fermi(700.0, 1e-3)));

  RealVector eps(3);
  eps << -1.0, 0.0, 1.0;
  const RealVector f = fermi(eps, 0.05);
  CHECK(f(1) == doctest::Approx(0.5));
  CHECK(f(0) + f(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hamiltonian assembly: structure and values") {
  ModelParams p;
  p.L = 6;
  p.mu = 0.3;
  p.g = 1.0;
  DisplacementField sigma(6);
  sigma << 0.1, -0.2, 0.0, 0.3, -0.1, 0.05;
  const RealMatrix h = build_hamiltonian(sigma, p);

  CHECK(h.rows() == 6);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  // exactly 3L nonzero entries: L diagonal + 2L hopping
  int nonzeros = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (h(i, j) != 0.0) ++nonzeros;
  CHECK(nonzeros == 18);
  for (int j = 0; j < 6; ++j) {
    CHECK(h(j, j) == doctest::Approx(-0.3));
    CHECK(h(j, (j + 1) % 6) == doctest::Approx(-(1.0 + sigma(j))));
  }
}

TEST_CASE("diagonalization of the uniform ring reproduces cos-band eigenvalues") {
  ModelParams p;
  p.L = 4;
  p.mu = 0.0;

  SUBCASE("bare hopping") {
    const RealMatrix h = build_hamiltonian(DisplacementField::Zero(4), p);
    const SpectralDecomposition s = diagonalize(h);
    // -2J cos(2 pi k / 4) for k = 0..3 -> {-2, 0, 0, 2}
    CHECK(s.eps(0) == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(s.eps(1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.eps(2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.eps(3) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("uniform bond shift rescales the band") {
    const RealMatrix h = build_hamiltonian(DisplacementField::Constant(4, 0.1), p);
    const SpectralDecomposition s = diagonalize(h);
    CHECK(s.eps(0) == doctest::Approx(-2.2).epsilon(1e-12));
    CHECK(s.eps(3) == doctest::Approx(2.2).epsilon(1e-12));
  }
}

TEST_CASE("mode vectors reconstruct the hamiltonian and are orthonormal") {
  ModelParams p;
  p.L = 8;
  p.mu = 0.45;
  DisplacementField sigma(8);
  for (int j = 0; j < 8; ++j) sigma(j) = 0.2 * std::sin(1.7 * j + 0.3);
  const RealMatrix h = build_hamiltonian(sigma, p);
  const SpectralDecomposition s = diagonalize(h);

  // rows orthonormal: u u^dag = I
  const ComplexMatrix gram = s.u * s.u.adjoint();
  CHECK((gram - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
  // h = u^dag diag(eps) u
  const ComplexMatrix rebuilt = s.u.adjoint() * s.eps.asDiagonal() * s.u;
  CHECK((rebuilt - h.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("self-consistent bond field from the correlation matrix") {
  ModelParams p;
  p.L = 4;
  p.g = 1.0;
  CorrelationMatrix theta = CorrelationMatrix::Zero(4, 4);
  theta(0, 1) = Complex(0.25, 0.7); // imaginary part must not contribute
  theta(1, 0) = std::conj(theta(0, 1));
  const DisplacementField sigma = self_consistent_sigma(theta, p);
  CHECK(sigma(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(sigma(1) == doctest::Approx(0.0));
  CHECK(sigma(2) == doctest::Approx(0.0));
  CHECK(sigma(3) == doctest::Approx(0.0)); // wrap bond reads theta(3,0)

  SUBCASE("coupling scales quadratically") {
    p.g = 2.0;
    CHECK(self_consistent_sigma(theta, p)(0) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("wrap bond uses the corner element") {
    theta(3, 0) = Complex(0.1, 0.0);
    theta(0, 3) = Complex(0.1, 0.0);
    CHECK(self_consistent_sigma(theta, p)(3) == doctest::Approx(0.2).epsilon(1e-14));
  }
}

TEST_CASE("order-parameter split: uniform shift plus staggered component") {
  DisplacementField sigma(4);
  sigma << 0.6, 0.2, 0.6, 0.2; // deltaJ = 0.4, staggered amplitude 0.2
  const OrderParameterProfile prof = decompose_order_parameter(sigma);
  CHECK(prof.deltaJ == doctest::Approx(0.4).epsilon(1e-14));
  // m(j) = (-1)^j (sigma(j) - deltaJ): a perfectly dimerized profile
  // unstaggers to a uniform order parameter.
  for (int j = 0; j < 4; ++j) {
    CHECK(prof.m(j) == doctest::Approx(0.2).epsilon(1e-13));
  }
  // split is exact: compose inverts decompose
  const DisplacementField back = compose_order_parameter(prof);
  CHECK((back - sigma).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("order-parameter split rejects odd lengths") {
  DisplacementField sigma(5);
  sigma.setZero();
  CHECK_THROWS_AS((void)decompose_order_parameter(sigma), ConfigError);
}

TEST_CASE("parameter validation rejects malformed inputs") {
  ModelParams p;
  p.L = 5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.L = 2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.L = 100;
  p.kBT = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.kBT = 0.05;
  p.gamma = -0.1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.gamma = 0.01;
  CHECK_NOTHROW(p.validate());
}
