#pragma once
// Low-cost predictors of the excursion rate: the resonant overlap-weight
// formula and the first-order leakage estimator in the Kerr eigenbasis.

#include <iosfwd>
#include <optional>
#include <vector>

#include "kerrcat/dynamics.hpp"

namespace kerrcat {

struct OverlapWeights {
  std::vector<double> lambda;  // sum_+- |<alpha,1|phi_n^+->|^2 / 2, n >= 1
  std::vector<double> delta;   // e_n^- - e_n^+
  double kappa_conf = 0.0;
};

struct GammaEstimate {
  double gamma = 0.0;       // decay rate of |<S>|, i.e. |<S>| ~ exp(-gamma t)
  double loss_term = 0.0;   // kappa1 alpha^2 exp(-4 alpha^2)
  double floor_term = 0.0;  // kappa_l exp(-2 alpha^2)
  double pair_term = 0.0;   // kappa_l sum lambda_n (1 - sinc(delta_n / kappa_conf))
  OverlapWeights weights;
};

/// 1 - sin(x)/x, with the series used near 0.
double one_minus_sinc(double x);

/// kappa_conf defaults to kappa1. Meant for the resonant case.
GammaEstimate gamma_formula(const Spectrum& spectrum, const NoiseParams& noise,
                            std::optional<double> kappa_conf = std::nullopt);

struct PerturbativeOptions {
  std::size_t n_cutoff = 20;
  std::size_t fock_dim = 0;  // 0 = large enough for n_cutoff pairs
};

/// First-order state rho(t) = (1 - kappa_l t)|0><0| + sum_n sum_sr tau_nn^sr(t) |phi_n^s><phi_n^r|
/// in the eigenbasis (phi0+, phi0-, phi1+, ...). Pair 0 is included so the
/// trace is preserved to first order.
struct PerturbativeState {
  double kappa_l = 0.0;
  std::size_t n_cutoff = 0;
  RVector energies;
  CMatrix kappa;           // <phi_a| D_l(|0><0|) |phi_b>, full table
  CMatrix sign;            // sign(X) in the eigenbasis
  CVector ket0;            // |0>_m in the eigenbasis
  double max_neglected = 0.0;  // largest |kappa_np^sr| with n != p

  /// Resonant-limit threshold on |e_n^s - e_n^r| (K).
  static constexpr double resonant_threshold = 1e-10;

  /// tau_nn^sr(t) for a pair-diagonal entry; resonant when |delta| < threshold.
  cplx tau(std::size_t a, std::size_t b, double t) const;
  CMatrix density(double t) const;
  /// (even, odd) population of each pair at time t.
  std::vector<std::pair<double, double>> populations(double t) const;
  double sign_expectation(double t) const;
  /// <S> with every pair treated as degenerate minus the actual <S>.
  double sign_deficit(double t) const;
};

PerturbativeState perturbative_leakage(const SystemParams& params, const NoiseParams& noise,
                                       const PerturbativeOptions& opts = {});

struct PerturbativeFitOptions {
  double window_over_leak = 0.1;  // fit up to this / kappa_l
  double window_start_fraction = 0.1;
  std::size_t samples = 100;
};

/// Fits <S>(0) - deficit(t) to A exp(-2 Gamma t) inside the validity window.
DecayFit perturbative_bitflip_rate(const PerturbativeState& state,
                                   const PerturbativeFitOptions& opts = {});

struct EstimateRow {
  double nbar;
  double delta;
  double gamma_estimated;
  double gamma_simulated;
};

/// nbar,delta_over_K,gamma_estimated,gamma_simulated
void write_estimate_csv(std::ostream& os, const std::vector<EstimateRow>& rows);

}  // namespace kerrcat
