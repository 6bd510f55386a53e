#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kerrcat/errors.hpp"
#include "kerrcat/spectral.hpp"

using namespace kerrcat;

namespace {

double infidelity(const CVector& a, const CVector& b) {
  return 1.0 - std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

}  // namespace

TEST_CASE("resonant gap is close to 4 K alpha^2") {
  const auto spec = diagonalize(SystemParams::resonant(2.0), FockBasis(50));
  CHECK(spec.even_levels[0].energy == 0.0);
  const double gap = spec.even_levels[1].energy - spec.even_levels[0].energy;
  CHECK(std::abs(gap - 16.0) < 0.25 * 16.0);
}

TEST_CASE("pure Kerr spectrum") {
  const auto spec = diagonalize(SystemParams::resonant(0.0), FockBasis(20));
  for (std::size_t i = 0; i < spec.even_levels.size(); ++i) {
    const double n = 2.0 * i;
    CHECK(std::abs(spec.even_levels[i].energy - n * (n - 1)) < 1e-10);
    CHECK(std::abs(spec.even_levels[i].state(static_cast<Eigen::Index>(n)).real() - 1.0) < 1e-12);
  }
  for (std::size_t i = 0; i < spec.odd_levels.size(); ++i) {
    const double n = 2.0 * i + 1;
    CHECK(std::abs(spec.odd_levels[i].energy - n * (n - 1)) < 1e-10);
  }
}

TEST_CASE("m + 1 degenerate pairs at Delta = 2 m K") {
  for (int m = 1; m <= 5; ++m) {
    const auto params = SystemParams::at_degeneracy(2.0, m);
    const auto spec = diagonalize(params, FockBasis(default_fock_dim(params)));
    for (int n = 0; n <= m; ++n) CHECK(std::abs(spec.pair_spacings[n]) < 1e-8);
    CHECK(std::abs(spec.pair_spacings[m + 1]) > 1e-3);
  }
  const auto spec3 = diagonalize(SystemParams::at_degeneracy(2.0, 3), FockBasis(70));
  for (int n = 0; n <= 3; ++n) CHECK(std::abs(spec3.pair_spacings[n]) < 1e-10);
  CHECK(std::abs(spec3.pair_spacings[4]) > 1e-2);
}

TEST_CASE("spacing sweep structure") {
  const FockBasis b(60);
  const auto rows = pair_spacing_sweep(2.0, {2.0, 3.0}, 3, b, 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].delta == 2.0);
  CHECK(rows[3].delta == 3.0);
  CHECK(std::abs(rows[0].spacing) < 1e-10);
  CHECK(std::abs(rows[1].spacing) < 1e-10);
  CHECK(std::abs(rows[4].spacing) > std::abs(rows[1].spacing));

  const auto small = pair_spacing_sweep(std::sqrt(2.0), {0.0}, 2, b);
  const auto large = pair_spacing_sweep(3.0, {0.0}, 2, b);
  CHECK(std::abs(large[1].spacing) < std::abs(small[1].spacing));

  std::ostringstream os;
  write_spacing_csv(os, rows);
  CHECK(os.str().rfind("delta_over_K,n,delta_n_over_K\n2.000000000000e+00,0,", 0) == 0);
}

TEST_CASE("displaced block") {
  const auto b0 = displaced_block_hamiltonian(SystemParams::at_degeneracy(2.0, 0), 1);
  CHECK(b0.block.rows() == 1);
  CHECK(b0.block(0, 0) == 0.0);

  const auto b1 = displaced_block_hamiltonian(SystemParams::at_degeneracy(2.0, 1), 1);
  CHECK(b1.block(0, 0) == 0.0);
  CHECK(std::abs(b1.block(1, 1) - 14.0) < 1e-14);
  CHECK(std::abs(b1.block(0, 1) - 4.0) < 1e-14);
  const auto b1r = displaced_block_hamiltonian(SystemParams::at_degeneracy(2.0, 1), -1);
  CHECK(std::abs(b1r.block(0, 1) + 4.0) < 1e-14);

  CHECK_THROWS_AS(displaced_block_hamiltonian(SystemParams::detuned(2.0, 3.0), 1), NotBlockable);
}

TEST_CASE("block energies agree with numerically displaced full Hamiltonian") {
  const auto params = SystemParams::at_degeneracy(1.5, 2);
  const FockBasis b(60);
  const CMatrix d = displacement(params.alpha, b).matrix;
  const CMatrix hd = d.adjoint() * build_hamiltonian(params, b).matrix * d;
  const auto blk = displaced_block_hamiltonian(params, -1);
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j)
      CHECK(std::abs(hd(i, j).real() - blk.energy_offset * (i == j) - blk.block(i, j)) < 1e-8);
}

TEST_CASE("m = 1 closed forms") {
  CHECK(std::abs(m1_mixing_angle(2.0) - std::atan(4.0 / (7.0 + std::sqrt(65.0)))) < 1e-15);
  CHECK(std::abs(m1_mixing_angle(2.0) - 0.2596) < 1e-4);
  CHECK(std::abs(m1_gap(2.0) - 16.1245) < 1e-4);

  for (double alpha : {1.0, 2.0, 3.0}) {
    const auto params = SystemParams::at_degeneracy(alpha, 1);
    const auto blk = displaced_block_hamiltonian(params, 1);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(blk.block);
    const double gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    CHECK(std::abs(gap / m1_gap(alpha) - 1.0) < 1e-10);
    const RVector v = es.eigenvectors().col(0);
    CHECK(std::abs(std::atan(std::abs(v(1) / v(0))) - m1_mixing_angle(alpha)) < 1e-12);
  }
}

TEST_CASE("analytic manifold matches dense diagonalization") {
  for (int m = 0; m <= 6; ++m) {
    for (double alpha : {1.0, 2.0, 3.0}) {
      const auto params = SystemParams::at_degeneracy(alpha, m);
      const FockBasis b(default_fock_dim(params) + 10);
      const auto spec = diagonalize(params, b);
      const auto man = analytic_degenerate_states(params, b);
      REQUIRE(man.right_states.size() == static_cast<std::size_t>(m + 1));
      const auto s = sign_x_observable(b);
      for (int n = 0; n <= m; ++n) {
        CHECK(std::abs(man.energies[n] - spec.energy_shift - spec.even_levels[n].energy) < 1e-9);
        const CVector& ep = spec.even_levels[n].state;
        const CVector& op = spec.odd_levels[n].state;
        const CVector& r = man.right_states[n];
        const CVector& l = man.left_states[n];
        const double in_pair = std::norm(ep.dot(r)) + std::norm(op.dot(r));
        CHECK(1.0 - in_pair / r.squaredNorm() < 1e-8);
        CHECK(infidelity(r + l, ep) < 1e-8);
        CHECK(infidelity(r - l, op) < 1e-8);
        CHECK(std::real(ep.dot(r + l)) > 0);
        CHECK(std::real(op.dot(r - l)) > 0);
        CHECK(expectation(s, man.right_states[n]).real() > 0);
      }
    }
  }
}

TEST_CASE("manifold spans the displaced ladder") {
  const auto params = SystemParams::at_degeneracy(2.0, 3);
  const FockBasis b(70);
  const auto man = analytic_degenerate_states(params, b);
  CMatrix p_states = CMatrix::Zero(70, 70);
  CMatrix p_ladder = CMatrix::Zero(70, 70);
  for (int n = 0; n <= 3; ++n) {
    p_states += man.right_states[n] * man.right_states[n].adjoint();
    const CVector l = displaced_fock(2.0, n, b);
    p_ladder += l * l.adjoint();
  }
  CHECK((p_states - p_ladder).norm() < 1e-7);
  const auto s = sign_x_observable(b);
  CHECK(std::abs(man.right_states[0].dot(s.matrix * man.left_states[0])) < 1e-5);
}

TEST_CASE("code states") {
  const FockBasis b(50);
  const auto res = code_states(diagonalize(SystemParams::resonant(2.0), b));
  const CVector coh = coherent_amplitudes(2.0, b);
  CHECK(infidelity(res.ket0, coh) < 10.0 * std::exp(-8.0));
  CHECK(std::abs(res.ket0.dot(res.ket1)) < 1e-12);

  const auto params = SystemParams::at_degeneracy(2.0, 3);
  const auto cs = code_states(diagonalize(params, FockBasis(default_fock_dim(params))));
  CHECK(std::abs(cs.nbar - 7.0) < 0.15 * 7.0);
  CHECK(std::abs(cs.ket0.dot(cs.ket1)) < 1e-12);

  CHECK_THROWS_AS(code_states(diagonalize(SystemParams::detuned(1.0, 3.0), b)),
                  NonDegenerateGround);
}
