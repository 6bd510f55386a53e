#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kerrcat/errors.hpp"
#include "kerrcat/estimators.hpp"

using namespace kerrcat;

TEST_CASE("one minus sinc") {
  CHECK(one_minus_sinc(0.0) == 0.0);
  for (double x : {0.999e-3, 1.001e-3}) CHECK(one_minus_sinc(x) == doctest::Approx(x * x / 6.0).epsilon(1e-6));
  CHECK(one_minus_sinc(M_PI) == doctest::Approx(1.0));
  CHECK(one_minus_sinc(-2.0) == doctest::Approx(one_minus_sinc(2.0)));
}

TEST_CASE("overlap formula terms") {
  const auto p = SystemParams::at_degeneracy(2.0, 0);
  const auto spec = diagonalize(p, FockBasis(default_fock_dim(p)));
  const auto noise = NoiseParams::reference();
  const auto g = gamma_formula(spec, noise);
  const double a2 = 4.0;
  CHECK(g.loss_term == doctest::Approx(1e-3 * a2 * std::exp(-4 * a2)));
  CHECK(g.floor_term == doctest::Approx(noise.leakage_rate(2.0) * std::exp(-2 * a2)));
  CHECK(g.gamma == doctest::Approx(g.loss_term + g.floor_term + g.pair_term));
  CHECK(g.weights.kappa_conf == 1e-3);
  double sum = 0.0;
  for (double l : g.weights.lambda) {
    CHECK(l >= 0.0);
    sum += l;
  }
  CHECK(sum <= 1.0 + 1e-6);
  CHECK(g.pair_term >= 0.0);

  // bracket saturates at 1 for a vanishing window
  const auto sat = gamma_formula(spec, noise, 0.0);
  CHECK(sat.pair_term == doctest::Approx(noise.leakage_rate(2.0) * sum).epsilon(1e-9));
  const auto wide = gamma_formula(spec, noise, 1e-12);
  CHECK(wide.pair_term == doctest::Approx(sat.pair_term).epsilon(1e-3));
  // and vanishes for an infinite one
  CHECK(gamma_formula(spec, noise, 1e12).pair_term < 1e-12 * sat.pair_term + 1e-30);
  CHECK(gamma_formula(spec, noise, 1e12).gamma == doctest::Approx(g.loss_term + g.floor_term).epsilon(1e-9));
  CHECK_THROWS_AS(gamma_formula(spec, noise, -1.0), InvalidParameter);
}

TEST_CASE("overlap formula is monotone in the window") {
  const auto p = SystemParams::at_degeneracy(2.0, 0);
  const auto spec = diagonalize(p, FockBasis(default_fock_dim(p)));
  double dmax = 0.0;
  for (double d : gamma_formula(spec, NoiseParams::reference()).weights.delta) dmax = std::max(dmax, std::abs(d));
  double last = 0.0;
  for (double kc : {100 * dmax / M_PI, 10 * dmax / M_PI, 3 * dmax / M_PI, dmax / M_PI}) {
    const double g = gamma_formula(spec, NoiseParams::reference(), kc).gamma;
    CHECK(g >= last);
    last = g;
  }
}

TEST_CASE("perturbative estimator without noise") {
  const auto st = perturbative_leakage(SystemParams::at_degeneracy(2.0, 1), NoiseParams{});
  CHECK(st.kappa_l == 0.0);
  CHECK(st.kappa.norm() < 1e-14);
  CHECK(perturbative_bitflip_rate(st).below_resolution);
  CHECK(st.kappa.rows() == 42);
}

TEST_CASE("coherent ground states barely leak under loss") {
  const double alpha = 2.0;
  const auto st = perturbative_leakage(SystemParams::at_degeneracy(alpha, 0), NoiseParams{1e-3, 0.0, 0.0});
  CHECK(st.kappa_l < 1e-3 * 10.0 * alpha * alpha * std::exp(-2.0 * alpha * alpha));
  const auto det = perturbative_leakage(SystemParams::at_degeneracy(alpha, 2), NoiseParams{1e-3, 0.0, 0.0});
  CHECK(det.kappa_l > 1e3 * st.kappa_l);
}

TEST_CASE("perturbative coefficients") {
  const auto st = perturbative_leakage(params_for_nbar(6.0, 2), NoiseParams::reference(), {10, 0});
  CHECK(st.kappa_l > 0.0);
  CHECK(st.kappa.rows() == 22);
  CHECK((st.kappa - st.kappa.adjoint()).norm() < 1e-12 * st.kappa.norm());
  // first-order trace conservation
  for (double t : {10.0, 100.0}) CHECK(std::abs(st.density(t).trace() - 1.0) < 1e-9);
  for (Eigen::Index p = 0; p + 1 < st.kappa.rows(); p += 2) {
    const double d = st.energies(p + 1) - st.energies(p);
    CHECK(st.kappa(p, p).real() >= -1e-15);
    for (double t : {5.0, 50.0, 500.0}) {
      CHECK(std::abs(st.tau(p, p, t) - st.kappa(p, p) * t) < 1e-15);
      if (std::abs(d) > PerturbativeState::resonant_threshold)
        CHECK(std::abs(st.tau(p, p + 1, t)) <= 2.0 * std::abs(st.kappa(p, p + 1)) / std::abs(d) * (1 + 1e-12));
    }
  }
  const auto pops = st.populations(100.0);
  CHECK(pops.size() == 11);
  CHECK(pops[0].first + pops[0].second == doctest::Approx(1.0 - st.kappa_l * 100.0 + (st.kappa(0, 0) + st.kappa(1, 1)).real() * 100.0));
  CHECK(st.max_neglected >= 0.0);
}

TEST_CASE("resonant and oscillatory branches agree at the crossover") {
  PerturbativeState st;
  st.kappa = CMatrix::Zero(2, 2);
  st.kappa(0, 1) = cplx(2e-4, 1e-4);
  st.kappa(1, 0) = std::conj(st.kappa(0, 1));
  st.energies = RVector::Zero(2);
  const double t = 1e3;
  st.energies(1) = 0.5 * PerturbativeState::resonant_threshold;
  const cplx res = st.tau(0, 1, t);
  st.energies(1) = 2.0 * PerturbativeState::resonant_threshold;
  const cplx osc = st.tau(0, 1, t);
  CHECK(std::abs(res - st.kappa(0, 1) * t) < 1e-12 * std::abs(res));
  CHECK(std::abs(osc - res) < 0.01 * std::abs(res));
}

TEST_CASE("degenerate-only leakage leaves the sign intact") {
  const auto st = perturbative_leakage(params_for_nbar(6.0, 2), NoiseParams{1e-3, 0.0, 0.0});
  const auto fit = perturbative_bitflip_rate(st);
  CHECK((fit.below_resolution || fit.gamma < 1e-9));
}

TEST_CASE("estimate CSV header") {
  std::ostringstream os;
  write_estimate_csv(os, {{4.0, 0.0, 2e-5, 2.5e-5}});
  CHECK(os.str().rfind("nbar,delta_over_K,gamma_estimated,gamma_simulated\n", 0) == 0);
}
