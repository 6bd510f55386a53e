#pragma once
// Open-system evolution under the Lindblad master equation.
//
// Density matrices are vectorized column-stacked, vec(A X B) = (B^T (x) A) vec(X).

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kerrcat/spectral.hpp"

namespace kerrcat {

struct NoiseParams {
  double kappa1 = 0.0;
  double nth = 0.0;
  double kappa_phi = 0.0;

  static NoiseParams reference() { return {1e-3, 1e-2, 1e-5}; }

  double kappa_minus() const { return kappa1 * (1.0 + nth); }
  double kappa_plus() const { return kappa1 * nth; }
  /// n_th kappa1 + alpha^2 kappa_phi
  double leakage_rate(double alpha) const { return nth * kappa1 + alpha * alpha * kappa_phi; }
  bool silent() const { return kappa1 == 0.0 && nth == 0.0 && kappa_phi == 0.0; }
  void validate() const;
};

struct JumpOperator {
  QuantumOperator op;
  double rate;
};

class Lindbladian {
 public:
  Lindbladian(QuantumOperator hamiltonian, std::vector<JumpOperator> jumps);

  const Basis& basis() const { return h_.basis; }
  std::size_t dim() const { return h_.basis.dim; }
  const QuantumOperator& hamiltonian() const { return h_; }
  const std::vector<JumpOperator>& jumps() const { return jumps_; }
  /// Dense d^2 x d^2 generator, built on first use.
  const CMatrix& superoperator() const;
  /// L(rho) evaluated directly from the operators.
  CMatrix apply(const CMatrix& rho) const;
  /// Adjoint action L^dagger(X) (Heisenberg picture).
  CMatrix apply_adjoint(const CMatrix& x) const;

 private:
  QuantumOperator h_;
  std::vector<JumpOperator> jumps_;
  mutable std::shared_ptr<CMatrix> super_;
};

Lindbladian build_lindbladian(const QuantumOperator& h, const std::vector<JumpOperator>& jumps);

/// Ambient channels kappa_- D[a], kappa_+ D[a+], kappa_phi D[a+a] for operators
/// already expressed in the working basis. Zero-rate channels are omitted.
std::vector<JumpOperator> ambient_jumps(const QuantumOperator& a, const QuantumOperator& n,
                                        const NoiseParams& noise);

/// First n_trunc eigenstates ordered (phi0+, phi0-, phi1+, phi1-, ...).
struct EigenBasis {
  CMatrix vectors;  // dim x n_trunc, columns are eigenstates in the Fock basis
  RVector energies;
  std::vector<int> parity;     // +1 / -1 per column
  std::vector<int> pair_index; // n per column
  Basis descriptor() const { return {BasisKind::eigen, static_cast<std::size_t>(vectors.cols())}; }
};

EigenBasis make_eigenbasis(const Spectrum& spectrum, std::size_t n_trunc);

QuantumOperator project(const QuantumOperator& op, const EigenBasis& eb);

/// Truncated eigenbasis model of one cat mode: diagonal H and the projected
/// a, a+a, sign(X) and X, together with the code states in that basis.
struct CatModel {
  Spectrum spectrum;
  CodeStates code;
  EigenBasis eb;
  QuantumOperator h;
  QuantumOperator a;
  QuantumOperator n;
  QuantumOperator s;
  QuantumOperator x;
  CVector ket0;
  CVector ket1;
  CVector ket_plus;
  CVector ket_minus;
};

/// fock_dim = 0 selects the default truncation.
CatModel make_cat_model(const SystemParams& params, std::size_t n_trunc, std::size_t fock_dim = 0);
CVector project_state(const CVector& psi, const EigenBasis& eb);
CMatrix project_density(const CMatrix& rho, const EigenBasis& eb);
/// V rho V^dagger back in the Fock basis.
CMatrix lift_density(const CMatrix& rho, const EigenBasis& eb);

struct Trajectory {
  std::vector<double> times;
  std::vector<CMatrix> states;
};

enum class PropagationMethod { automatic, binary_cache, step_cache };

struct EvolveOptions {
  PropagationMethod method = PropagationMethod::automatic;
  /// Superoperator size up to which the binary power cache is used.
  std::size_t binary_cache_limit = 1024;
};

/// rho(t) = exp(t L) rho0 at each requested time (strictly increasing, >= 0).
Trajectory evolve(const Lindbladian& lindbladian, const CMatrix& rho0,
                  const std::vector<double>& times, const EvolveOptions& opts = {});

/// Linear functionals tr(O rho(t)) without storing the states.
std::vector<CVector> evolve_expectations(const Lindbladian& lindbladian, const CMatrix& rho0,
                                         const std::vector<double>& times,
                                         const std::vector<CMatrix>& observables,
                                         const EvolveOptions& opts = {});

struct SteadyStateOptions {
  double kernel_tol = 1e-12;          // singular values below tol * sigma_max span the kernel
  double metastable_rate = 0.0;       // singular values below this rate (K) also count as kernel
  std::size_t svd_limit = 1600;       // larger generators use the trace-row LU solve
  std::optional<CMatrix> initial;     // selects the sector when the kernel is degenerate
};

struct SteadyState {
  CMatrix rho;
  std::size_t kernel_dim = 1;
  double residual = 0.0;  // ||L(rho)||_F
};

SteadyState steady_state(const Lindbladian& lindbladian, const SteadyStateOptions& opts = {});

struct DecayFit {
  double gamma = 0.0;
  double amplitude = 1.0;
  double residual_rms = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  bool below_resolution = false;
  std::string warning;
};

/// Least-squares fit of v(t) = A exp(-2 Gamma t) over [t_start, t_end].
DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& values,
                   double t_start = 0.0, double t_end = -1.0);

/// n log-spaced times over [lo, hi].
std::vector<double> log_times(double lo, double hi, std::size_t n);

struct ExcursionOptions {
  std::size_t n_trunc = 20;
  std::size_t samples = 200;
  double t_min_over_kappa = 0.01;
  double horizon_over_kappa = 100.0;
  double window_start_over_kappa = 0.5;
  double horizon_without_noise = 1e5;  // absolute horizon (1/K) when kappa1 = 0
  std::size_t fock_dim = 0;            // 0 = default truncation
};

struct ExcursionResult {
  DecayFit fit;
  std::vector<double> times;
  std::vector<double> sign_expectation;
  double nbar = 0.0;
};

ExcursionResult excursion_rate(const SystemParams& params, const NoiseParams& noise,
                               const ExcursionOptions& opts = {});

/// alpha such that the code state |0>_m at Delta = 2 m K holds nbar photons.
SystemParams params_for_nbar(double nbar, int m, std::size_t fock_dim = 0);

/// Populations (even, odd) of each pair for a density matrix in the eigenbasis.
std::vector<std::pair<double, double>> pair_populations(const CMatrix& rho_eig,
                                                        const EigenBasis& eb);

/// sum_n n p_n / sum_n p_n over the m+1 degenerate pairs.
double mean_excitation_degenerate(const CMatrix& rho_eig, const EigenBasis& eb, int m);

/// 1 - <+|rho|+> - <-|rho|-> with rho in the Fock basis.
double leakage(const CMatrix& rho, const CodeStates& cs);
/// Same for rho in an eigenbasis whose first two columns are the ground pair.
double leakage_eigenbasis(const CMatrix& rho_eig);

struct ExcursionRow {
  double nbar;
  double delta;
  double gamma;
  double residual;
};

/// nbar,delta_over_K,gamma_S_over_K,residual
void write_excursion_csv(std::ostream& os, const std::vector<ExcursionRow>& rows);
/// pair_index,parity,population
void write_population_csv(std::ostream& os, const std::vector<std::pair<double, double>>& pops);

}  // namespace kerrcat
