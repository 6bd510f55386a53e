#include <cmath>
#include <sstream>

#include "doctest.h"
#include "kerrcat/errors.hpp"
#include "kerrcat/filters.hpp"

using namespace kerrcat;

namespace {

// Two-level cat stand-in with transition energy omega.
struct Probe {
  FockBasis basis{2};
  QuantumOperator a = annihilation(basis);
  QuantumOperator n = number(basis);
};

double probe_decay_rate(double omega, const FilterParams& f, double t) {
  const Probe p;
  const auto lind = build_colored_lindbladian(cplx(omega) * p.n, p.a, p.n, NoiseParams{}, f, 1000);
  const auto layout = composite_layout(2, f, 1000);
  const CVector one = fock_state(1, p.basis);
  const auto traj = evolve(lind, layout.with_filter_vacuum(one * one.adjoint()), {t});
  const double pop = layout.reduce_to_cat(traj.states[0])(1, 1).real();
  return -std::log(pop) / t;
}

}  // namespace

TEST_CASE("filter operators") {
  const auto f1 = build_filter_operators(1);
  REQUIRE(f1.size() == 1);
  CMatrix expect(2, 2);
  expect << 0, 1, 0, 0;
  CHECK((f1[0] - expect).norm() == 0.0);

  const auto fs = build_filter_operators(3);
  REQUIRE(fs.size() == 3);
  CMatrix excited = CMatrix::Identity(4, 4);
  excited(0, 0) = 0;
  CMatrix sum = CMatrix::Zero(4, 4);
  for (const auto& f : fs) sum += f.adjoint() * f;
  CHECK((sum - excited).norm() < 1e-15);
  for (const auto& fj : fs)
    for (const auto& fk : fs) CHECK((fj * fk).norm() == 0.0);
  CHECK_THROWS_AS(build_filter_operators(0), InvalidParameter);
}

TEST_CASE("engineered rate arithmetic") {
  const auto f = FilterParams::standard(30.0);
  CHECK(f.kappa_f == doctest::Approx(6.0));
  CHECK(f.J == doctest::Approx(3.0));
  CHECK(f.g == doctest::Approx(1.2));
  CHECK(f.engineered_rate() == doctest::Approx(4.0 * f.kappa_f / 25.0));
  for (double k : {1.0, 0.1}) {
    const auto e = FilterParams::from_engineered_rate(30.0, k, 4);
    CHECK(e.engineered_rate() == doctest::Approx(k));
    CHECK(e.J == doctest::Approx(e.kappa_f / 2));
    CHECK(e.g == doctest::Approx(e.kappa_f / 5));
    CHECK(e.modes == 4);
    CHECK(e.delta_f == 30.0);
  }
}

TEST_CASE("composite layout") {
  const auto f = FilterParams::standard(30.0);
  const auto layout = composite_layout(14, f);
  CHECK(layout.dim() == 56);
  CHECK_THROWS_AS(composite_layout(14, FilterParams::standard(30.0, 4)), DimensionCapExceeded);
  CHECK(composite_layout(14, FilterParams::standard(30.0, 4), 70).dim() == 70);

  CMatrix rho = CMatrix::Random(14, 14);
  rho = rho * rho.adjoint();
  rho /= rho.trace();
  const CMatrix full = layout.with_filter_vacuum(rho);
  CHECK((layout.reduce_to_cat(full) - rho).norm() < 1e-14);
  CHECK(layout.filter_excitation(full) < 1e-15);
  const auto f1 = build_filter_operators(3)[0];
  const CMatrix lifted = layout.lift_filter(f1.adjoint()).matrix;
  const CMatrix excited = lifted * full * lifted.adjoint();
  CHECK(layout.filter_excitation(excited) == doctest::Approx(1.0));
}

TEST_CASE("decoupled filter leaves cat dynamics unchanged") {
  const auto cm = make_cat_model(SystemParams::detuned(1.3, 2.0), 6);
  const NoiseParams noise{0.05, 0.1, 0.01};
  auto f = FilterParams::standard(default_filter_detuning(cm.spectrum));
  f.g = 0.0;
  const auto colored = build_colored_lindbladian(cm.h, cm.a, cm.n, noise, f);
  const auto plain = build_lindbladian(cm.h, ambient_jumps(cm.a, cm.n, noise));
  const auto layout = composite_layout(6, f);
  const CMatrix rho0 = cm.ket0 * cm.ket0.adjoint();
  const std::vector<double> times{0.5, 3.0, 20.0};
  const auto a = evolve(colored, layout.with_filter_vacuum(rho0), times);
  const auto b = evolve(plain, rho0, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK((layout.reduce_to_cat(a.states[k]) - b.states[k]).norm() < 1e-10);
    CHECK(layout.filter_excitation(a.states[k]) < 1e-14);
    CHECK(std::abs(a.states[k].trace() - 1.0) < 1e-10);
    CHECK(min_eigenvalue(a.states[k]) > -1e-10);
  }
}

TEST_CASE("resonant probe decays at the eliminated rate") {
  FilterParams f;
  f.modes = 1;
  f.kappa_f = 1.0;
  f.g = 0.05;
  f.delta_f = 5.0;
  const double expected = 4.0 * f.g * f.g / f.kappa_f;
  CHECK(probe_decay_rate(f.delta_f, f, 0.7 / expected) == doctest::Approx(expected).epsilon(0.05));
  // single Lorentzian: 1 / (1 + (2 delta / kappa_f)^2)
  const double detuned = probe_decay_rate(f.delta_f + 3.0, f, 0.7 / expected);
  CHECK(detuned == doctest::Approx(expected / 37.0).epsilon(0.1));
}

TEST_CASE("filter chain passband") {
  auto f = FilterParams::standard(30.0);
  f.g = f.kappa_f / 50.0;
  const double on = probe_decay_rate(f.delta_f, f, 5.0 / f.engineered_rate());
  CHECK(on == doctest::Approx(f.engineered_rate()).epsilon(0.1));
  for (double offset : {3.0 * f.kappa_f, -f.delta_f}) {
    const double x = 2.0 * offset / f.kappa_f;
    const double lorentz = 1.0 / (1.0 + x * x);
    const double off = probe_decay_rate(f.delta_f + offset, f, 5.0 / f.engineered_rate());
    CHECK(off < on * lorentz);
  }
}

TEST_CASE("cat relaxation through the filter") {
  const auto cm = make_cat_model(SystemParams::detuned(1.2, 0.0), 6);
  FilterParams f = FilterParams::standard(default_filter_detuning(cm.spectrum), 1);
  f.g = f.kappa_f / 20.0;
  const auto lind = build_colored_lindbladian(cm.h, cm.a, cm.n, NoiseParams{}, f);
  const auto layout = composite_layout(6, f);
  // phi_1^+ relaxes to phi_0^-; <phi_0^+|a|phi_1^+> vanishes by parity
  const double m01 = std::norm(cm.a.matrix(1, 2)) + std::norm(cm.a.matrix(0, 2));
  const double expected = f.engineered_rate() * m01;
  const double t = 0.7 / expected;
  CMatrix rho0 = CMatrix::Zero(6, 6);
  rho0(2, 2) = 1.0;
  const auto traj = evolve(lind, layout.with_filter_vacuum(rho0), {t});
  const CMatrix rc = layout.reduce_to_cat(traj.states[0]);
  const double rate = -std::log(rc(2, 2).real()) / t;
  CHECK(rate == doctest::Approx(expected).epsilon(0.3));
}

TEST_CASE("colored leakage without ambient noise") {
  const auto p = SystemParams::at_degeneracy(2.0, 0);
  ColoredOptions opts;
  opts.n_trunc = 6;
  opts.horizon_without_noise = 200.0;
  const auto cm = make_cat_model(p, 6);
  CHECK(colored_leakage(p, NoiseParams{}, std::nullopt, opts).leakage < 1e-8);
  const auto f = FilterParams::standard(default_filter_detuning(cm.spectrum));
  const auto r = colored_leakage(p, NoiseParams{}, f, opts);
  // static dressing by the filter coupling only
  CHECK(r.leakage < std::pow(f.g / f.delta_f, 2) * cm.code.nbar);
  CHECK(r.filter_excitation < 0.2);
}

namespace {

double parity_decay_rate(int modes) {
  const auto p = SystemParams::at_degeneracy(2.0, 1);
  const auto cm = make_cat_model(p, 8);
  const auto f = FilterParams::standard(default_filter_detuning(cm.spectrum), modes);
  const auto lind = build_colored_lindbladian(cm.h, cm.a, cm.n, NoiseParams{}, f, 100);
  const auto layout = composite_layout(8, f, 100);
  CMatrix parity = CMatrix::Zero(8, 8);
  for (Eigen::Index k = 0; k < 8; ++k) parity(k, k) = cm.eb.parity[static_cast<std::size_t>(k)];
  const QuantumOperator pl = layout.lift_cat({Basis{BasisKind::eigen, 8}, parity});
  const CMatrix rho0 = layout.with_filter_vacuum(cm.ket_plus * cm.ket_plus.adjoint());
  const auto traj = evolve(lind, rho0, {100.0, 1000.0});
  const double p1 = (pl.matrix * traj.states[0]).trace().real();
  const double p2 = (pl.matrix * traj.states[1]).trace().real();
  return std::log(p1 / p2) / 900.0;
}

}  // namespace

TEST_CASE("degenerate pairs are transparent to the filter") {
  CHECK(parity_decay_rate(4) < 1e-6);
  // three modes: small against the loss-induced phase-flip rate nbar kappa1
  CHECK(parity_decay_rate(3) < 0.01 * 1e-3 * 4.0);
}

TEST_CASE("colored CSV headers") {
  std::ostringstream a, b;
  write_leakage_csv(a, {{10.0, 4.0, 1e-5, true}});
  write_bitflip_csv(b, {{8.0, 2.0, 3e-7, false}});
  CHECK(a.str().rfind("nbar,delta_over_K,leakage,filtered\n", 0) == 0);
  CHECK(b.str().rfind("nbar,delta_over_K,gamma_bitflip_over_K,filtered\n", 0) == 0);
}
