#pragma once
// Truncated Fock-space operator algebra for a single bosonic mode.
//
// Units: K = 1 internally, energies and rates in K, times in 1/K. The drive is
// parametrized by a real amplitude alpha >= 0 with eps2 = -K alpha^2, so that
//   H = K a+^2 a^2 + eps2 a+^2 + eps2* a^2 - Delta a+a + K alpha^4
//     = K (a+^2 - alpha^2)(a^2 - alpha^2) - Delta a+a.

#include <cstddef>
#include <optional>
#include <string>

#include "kerrcat/linalg.hpp"

namespace kerrcat {

/// Numerical tolerances used by validity checks. Defaults are library-wide;
/// callers pass a modified copy to override.
struct Tolerances {
  double hermitian = 1e-12;      // relative Frobenius defect of Hamiltonians
  double trace = 1e-9;           // |tr(rho) - 1| for density matrices
  double psd_floor = -1e-9;      // smallest admissible density eigenvalue
  double degeneracy = 1e-8;      // |delta_n| below which a pair counts as exact
  double parity = 1e-8;          // 1 - |<Pi>| allowed for a parity eigenstate
  double convergence = 1e-6;     // relative change tolerated at 1.25x truncation
};

enum class BasisKind { fock, eigen, composite, two_mode };

std::string to_string(BasisKind kind);

/// Basis descriptor carried by every operator. Operators compose only when
/// their descriptors are equal.
struct Basis {
  BasisKind kind = BasisKind::fock;
  std::size_t dim = 0;

  friend bool operator==(const Basis&, const Basis&) = default;
};

/// Fock levels 0 .. dim-1.
class FockBasis {
 public:
  explicit FockBasis(std::size_t dim);
  std::size_t dim() const { return dim_; }
  Basis descriptor() const { return {BasisKind::fock, dim_}; }

 private:
  std::size_t dim_;
};

/// Dense operator tagged with its basis.
struct QuantumOperator {
  Basis basis;
  CMatrix matrix;

  QuantumOperator adjoint() const { return {basis, matrix.adjoint()}; }
  QuantumOperator& operator+=(const QuantumOperator& rhs);
  QuantumOperator& operator-=(const QuantumOperator& rhs);
};

QuantumOperator operator+(QuantumOperator lhs, const QuantumOperator& rhs);
QuantumOperator operator-(QuantumOperator lhs, const QuantumOperator& rhs);
QuantumOperator operator*(const QuantumOperator& lhs, const QuantumOperator& rhs);
QuantumOperator operator*(cplx s, QuantumOperator op);

/// Commutator [A, B].
QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b);

struct SystemParams {
  double kerr = 1.0;
  double alpha = 0.0;
  double delta = 0.0;
  std::optional<int> m;  // when set, delta == 2 m K

  static SystemParams resonant(double alpha);
  static SystemParams detuned(double alpha, double delta);
  static SystemParams at_degeneracy(double alpha, int m);

  double eps2() const { return -kerr * alpha * alpha; }
  /// Rough photon number alpha^2 + Delta / 2K of the confined states.
  double nbar_estimate() const;
  /// Detuning index m if Delta is an even multiple of K (to 1e-12), else empty.
  std::optional<int> degeneracy_index() const;
  void validate() const;
};

/// ceil(n + 10 sqrt(n) + 10) with n the photon-number estimate.
std::size_t default_fock_dim(const SystemParams& params);
std::size_t default_fock_dim(double nbar);
/// Enlarged truncation used by convergence checks.
std::size_t convergence_dim(std::size_t dim);

QuantumOperator identity(const FockBasis& basis);
QuantumOperator annihilation(const FockBasis& basis);
QuantumOperator creation(const FockBasis& basis);
QuantumOperator number(const FockBasis& basis);
/// exp(i pi a+a)
QuantumOperator parity(const FockBasis& basis);
/// X = a + a+
QuantumOperator position_quadrature(const FockBasis& basis);

/// exp(beta a+ - beta* a). Evaluated in a padded space and cropped so the
/// low-Fock corner carries no truncation error.
QuantumOperator displacement(cplx beta, const FockBasis& basis);

QuantumOperator build_hamiltonian(const SystemParams& params, const FockBasis& basis);

/// sign(a + a+) from the spectral decomposition of X, with sign(0) = 0.
QuantumOperator sign_x_observable(const FockBasis& basis);

/// D(alpha)|n>, normalized.
CVector displaced_fock(double alpha, std::size_t n, const FockBasis& basis);

/// Closed-form truncated coherent amplitudes exp(-|b|^2/2) b^n / sqrt(n!).
CVector coherent_amplitudes(cplx beta, const FockBasis& basis);

CVector fock_state(std::size_t n, const FockBasis& basis);

/// <psi|A|psi>
cplx expectation(const QuantumOperator& op, const CVector& psi);

}  // namespace kerrcat
