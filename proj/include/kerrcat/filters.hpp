#pragma once
// Colored dissipation: a chain of M filter modes coupled to the cat mode, the
// last one damped. The filter sector keeps at most one excitation, so it is
// spanned by |vac>, |1_1>, ..., |1_M>. Composite index = f * d + c with f the
// filter state and c the cat eigenstate (kron(F, C) ordering).
//
// Frame rotating with the filters: the coupling g a f1+ exp(i Delta_f t) is
// static and the filters carry +Delta_f sum_j fj+ fj.

#include <iosfwd>
#include <optional>
#include <vector>

#include "kerrcat/dynamics.hpp"

namespace kerrcat {

struct FilterParams {
  int modes = 3;
  double g = 0.0;
  double J = 0.0;
  double kappa_f = 0.0;
  double delta_f = 0.0;

  /// kappa_f = 2 J = delta_f / 5, g = kappa_f / 5.
  static FilterParams standard(double delta_f, int modes = 3);
  /// kappa_f = 2 J = 25 kappa_eng / 4, g = kappa_f / 5, delta_f as given.
  static FilterParams from_engineered_rate(double delta_f, double kappa_eng, int modes = 3);

  /// 4 g^2 / kappa_f
  double engineered_rate() const { return kappa_f > 0 ? 4.0 * g * g / kappa_f : 0.0; }
  void validate() const;
};

/// e_1 - e_0 of the even sector.
double default_filter_detuning(const Spectrum& spectrum);

/// f_j = |vac><1_j| on the (M+1)-dimensional filter sector, j = 1..M.
std::vector<CMatrix> build_filter_operators(int modes);

struct CompositeLayout {
  std::size_t cat_dim = 0;
  std::size_t filter_dim = 0;

  std::size_t dim() const { return cat_dim * filter_dim; }
  Basis descriptor() const { return {BasisKind::composite, dim()}; }
  /// 1_F (x) A
  QuantumOperator lift_cat(const QuantumOperator& op) const;
  /// F (x) 1_C
  QuantumOperator lift_filter(const CMatrix& f) const;
  /// Partial trace over the filter sector.
  CMatrix reduce_to_cat(const CMatrix& rho) const;
  /// Population outside the filter vacuum.
  double filter_excitation(const CMatrix& rho) const;
  /// rho_cat (x) |vac><vac|
  CMatrix with_filter_vacuum(const CMatrix& rho_cat) const;
};

/// Default cap d (M + 1) = 14 * 4.
inline constexpr std::size_t kDefaultCompositeCap = 56;

CompositeLayout composite_layout(std::size_t cat_dim, const FilterParams& filter,
                                 std::size_t cap = kDefaultCompositeCap);

/// g (a f1+ + a+ f1) + J sum (f_{j+1}+ f_j + h.c.) + Delta_f sum fj+ fj on the composite space.
QuantumOperator filter_hamiltonian(const QuantumOperator& a_cat, const FilterParams& filter,
                                   const CompositeLayout& layout);

/// H (x) 1 + filter terms, ambient channels on the cat and kappa_f D[f_M].
Lindbladian build_colored_lindbladian(const QuantumOperator& h_cat, const QuantumOperator& a_cat,
                                      const QuantumOperator& n_cat, const NoiseParams& noise,
                                      const FilterParams& filter,
                                      std::size_t cap = kDefaultCompositeCap);

struct ColoredOptions {
  std::size_t n_trunc = 14;
  std::size_t cap = kDefaultCompositeCap;
  std::size_t fock_dim = 0;
  double horizon_over_kappa = 10.0;
  std::size_t samples = 20;              // uniform steps over the horizon
  double window_start_over_kappa = 0.5;
  double horizon_without_noise = 1e4;    // absolute horizon (1/K) when kappa1 = 0
};

struct ColoredBitflip {
  DecayFit fit;
  std::vector<double> times;
  std::vector<double> sign_expectation;
  double nbar = 0.0;
  double max_filter_excitation = 0.0;
};

/// Evolves |0>_m (x) |vac> and fits <S (x) 1> to A exp(-2 Gamma t). Without a
/// filter the same grid is used on the cat alone.
ColoredBitflip colored_bitflip_rate(const SystemParams& params, const NoiseParams& noise,
                                    const std::optional<FilterParams>& filter,
                                    const ColoredOptions& opts = {});

struct ColoredLeakage {
  double leakage = 0.0;
  double filter_excitation = 0.0;
  std::vector<std::pair<double, double>> populations;  // per pair (even, odd)
  double nbar = 0.0;
};

/// Leakage of the cat-reduced state after horizon_over_kappa / kappa1 from |0>_m.
ColoredLeakage colored_leakage(const SystemParams& params, const NoiseParams& noise,
                               const std::optional<FilterParams>& filter,
                               const ColoredOptions& opts = {});

struct LeakageRow {
  double nbar;
  double delta;
  double leakage;
  bool filtered;
};

struct BitflipRow {
  double nbar;
  double delta;
  double gamma;
  bool filtered;
};

/// nbar,delta_over_K,leakage,filtered
void write_leakage_csv(std::ostream& os, const std::vector<LeakageRow>& rows);
/// nbar,delta_over_K,gamma_bitflip_over_K,filtered
void write_bitflip_csv(std::ostream& os, const std::vector<BitflipRow>& rows);

}  // namespace kerrcat
