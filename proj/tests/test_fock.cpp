#include <cmath>

#include "doctest.h"
#include "kerrcat/errors.hpp"
#include "kerrcat/fock.hpp"

using namespace kerrcat;

TEST_CASE("annihilation operator") {
  const auto a2 = annihilation(FockBasis(2)).matrix;
  CHECK(a2(0, 1) == cplx(1));
  CHECK(a2(0, 0) == cplx(0));
  CHECK(a2(1, 0) == cplx(0));
  CHECK(a2(1, 1) == cplx(0));
  CHECK(std::abs(annihilation(FockBasis(3)).matrix(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK_THROWS_AS(FockBasis(1), InvalidBasis);

  const FockBasis b(12);
  const auto c = commutator(annihilation(b), creation(b)).matrix;
  for (int n = 0; n < 11; ++n) CHECK(std::abs(c(n, n) - 1.0) < 1e-14);
}

TEST_CASE("mixed dimensions are rejected") {
  CHECK_THROWS_AS(annihilation(FockBasis(3)) * annihilation(FockBasis(4)), BasisMismatch);
  CHECK_THROWS_AS(annihilation(FockBasis(3)) + annihilation(FockBasis(4)), BasisMismatch);
}

TEST_CASE("displacement") {
  const FockBasis b(40);
  CHECK((displacement(0.0, b).matrix - CMatrix::Identity(40, 40)).norm() < 1e-14);

  const cplx beta{1.5, -0.8};
  const CVector coh = displacement(beta, b).matrix * fock_state(0, b);
  CHECK((coh - coherent_amplitudes(beta, b)).norm() < 1e-10);
  CHECK(std::abs(expectation(number(b), coh).real() - std::norm(beta)) < 1e-6);

  const CMatrix prod = displacement(beta, b).matrix * displacement(-beta, b).matrix;
  CHECK((prod.topLeftCorner(8, 8) - CMatrix::Identity(8, 8)).norm() < 1e-9);
}

TEST_CASE("Hamiltonian structure") {
  const FockBasis b(30);
  const auto pure = build_hamiltonian(SystemParams::resonant(0.0), b).matrix;
  for (int n = 0; n < 30; ++n) CHECK(std::abs(pure(n, n) - double(n) * (n - 1)) < 1e-12);
  CHECK((pure - CMatrix(pure.diagonal().asDiagonal())).norm() == 0.0);

  for (double alpha : {0.0, 0.7, 2.0, 3.1}) {
    for (double delta : {0.0, 1.3, 4.0, -2.0}) {
      const auto params = SystemParams::detuned(alpha, delta);
      const auto h = build_hamiltonian(params, b);
      CHECK(hermiticity_defect(h.matrix) < 1e-12);
      CHECK(commutator(h, parity(b)).matrix.norm() < 1e-10 * h.matrix.norm());

      const auto a = annihilation(b);
      const auto ad = creation(b);
      const auto id = identity(b);
      const cplx a2 = alpha * alpha;
      const auto left = ad * ad - a2 * id;
      const auto right = a * a - a2 * id;
      const auto factored = left * right - cplx(delta) * number(b);
      // the truncated a+^2 a^2 product is exact on all but the top two rows
      CHECK((factored.matrix - h.matrix).topLeftCorner(28, 28).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("resonant cat ground states") {
  const FockBasis b(40);
  const auto h = build_hamiltonian(SystemParams::resonant(2.0), b).matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-9);
  CHECK(std::abs(es.eigenvalues()(1)) < 1e-9);
  CHECK(es.eigenvalues()(2) > 1.0);
  const CMatrix ground = es.eigenvectors().leftCols(2);
  for (double s : {2.0, -2.0}) {
    const CVector coh = coherent_amplitudes(s, b);
    const double f = (ground.adjoint() * coh).squaredNorm();
    CHECK(f > 1.0 - 5.0 * std::exp(-8.0));
  }
}

TEST_CASE("degenerate ground at m = 1") {
  const FockBasis b(50);
  const auto h = build_hamiltonian(SystemParams::at_degeneracy(2.0, 1), b).matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CHECK(std::abs(es.eigenvalues()(1) - es.eigenvalues()(0)) < 1e-10);
}

TEST_CASE("system parameter validation") {
  CHECK_THROWS_AS(SystemParams::detuned(-1.0, 0.0), InvalidParameter);
  CHECK_THROWS_AS(SystemParams::at_degeneracy(1.0, -1), InvalidParameter);
  SystemParams p = SystemParams::at_degeneracy(1.0, 2);
  CHECK(p.delta == 4.0);
  p.delta = 4.5;
  CHECK_THROWS_AS(p.validate(), InvalidParameter);
  CHECK(SystemParams::detuned(1.0, 6.0).degeneracy_index() == 3);
  CHECK_FALSE(SystemParams::detuned(1.0, 5.0).degeneracy_index().has_value());
  CHECK(default_fock_dim(0.0) == 10);
  CHECK(default_fock_dim(4.0) == 34);
  CHECK(convergence_dim(40) == 50);
}

TEST_CASE("sign observable") {
  const FockBasis b(60);
  const auto s = sign_x_observable(b);
  CHECK(std::abs(expectation(s, fock_state(0, b))) < 1e-12);
  const CVector coh = coherent_amplitudes(2.0, b);
  CHECK(std::abs(expectation(s, coh).real() - std::erf(std::sqrt(2.0) * 2.0)) < 2e-3);
  const auto p = parity(b);
  CHECK(((p * s * p).matrix + s.matrix).norm() < 1e-10);
  CHECK(hermiticity_defect(s.matrix) < 1e-12);

  const FockBasis odd(41);
  const auto s2 = (sign_x_observable(odd) * sign_x_observable(odd)).matrix;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(s2);
  int zeros = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double v = es.eigenvalues()(i);
    CHECK((std::abs(v) < 1e-10 || std::abs(v - 1.0) < 1e-10));
    if (std::abs(v) < 1e-10) ++zeros;
  }
  CHECK(zeros == 1);
}

TEST_CASE("displaced Fock states") {
  const FockBasis b(50);
  const CVector f3 = displaced_fock(0.0, 3, b);
  CHECK((f3 - fock_state(3, b)).norm() < 1e-14);
  const CVector s0 = displaced_fock(2.0, 0, b);
  const CVector s1 = displaced_fock(2.0, 1, b);
  CHECK(std::abs(s1.norm() - 1.0) < 1e-9);
  CHECK(std::abs(s0.dot(s1)) < 1e-9);
  CHECK(std::abs(expectation(number(b), s1).real() - 5.0) < 1e-6);
  CHECK_THROWS_AS(displaced_fock(1.0, 50, b), OutOfRange);
}
