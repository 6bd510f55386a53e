#include "kerrcat/fock.hpp"

#include <cmath>

#include "kerrcat/errors.hpp"

namespace kerrcat {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::fock: return "fock";
    case BasisKind::eigen: return "eigen";
    case BasisKind::composite: return "composite";
    case BasisKind::two_mode: return "two_mode";
  }
  return "unknown";
}

FockBasis::FockBasis(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw InvalidBasis("Fock basis needs at least 2 levels, got " + std::to_string(dim));
}

namespace {

void require_same(const Basis& a, const Basis& b) {
  if (!(a == b)) {
    throw BasisMismatch("operator basis mismatch: " + to_string(a.kind) + "/" +
                        std::to_string(a.dim) + " vs " + to_string(b.kind) + "/" +
                        std::to_string(b.dim));
  }
}

QuantumOperator wrap(const FockBasis& basis, CMatrix m) {
  return {basis.descriptor(), std::move(m)};
}

}  // namespace

QuantumOperator& QuantumOperator::operator+=(const QuantumOperator& rhs) {
  require_same(basis, rhs.basis);
  matrix += rhs.matrix;
  return *this;
}

QuantumOperator& QuantumOperator::operator-=(const QuantumOperator& rhs) {
  require_same(basis, rhs.basis);
  matrix -= rhs.matrix;
  return *this;
}

QuantumOperator operator+(QuantumOperator lhs, const QuantumOperator& rhs) { return lhs += rhs; }
QuantumOperator operator-(QuantumOperator lhs, const QuantumOperator& rhs) { return lhs -= rhs; }

QuantumOperator operator*(const QuantumOperator& lhs, const QuantumOperator& rhs) {
  require_same(lhs.basis, rhs.basis);
  return {lhs.basis, lhs.matrix * rhs.matrix};
}

QuantumOperator operator*(cplx s, QuantumOperator op) {
  op.matrix *= s;
  return op;
}

QuantumOperator commutator(const QuantumOperator& a, const QuantumOperator& b) {
  return a * b - b * a;
}

SystemParams SystemParams::resonant(double alpha) { return detuned(alpha, 0.0); }

SystemParams SystemParams::detuned(double alpha, double delta) {
  SystemParams p;
  p.alpha = alpha;
  p.delta = delta;
  p.validate();
  return p;
}

SystemParams SystemParams::at_degeneracy(double alpha, int m) {
  if (m < 0) throw InvalidParameter("degeneracy index m must be nonnegative");
  SystemParams p;
  p.alpha = alpha;
  p.m = m;
  p.delta = 2.0 * m * p.kerr;
  p.validate();
  return p;
}

double SystemParams::nbar_estimate() const {
  return std::max(0.0, alpha * alpha + delta / (2.0 * kerr));
}

std::optional<int> SystemParams::degeneracy_index() const {
  if (m) return m;
  const double ratio = delta / (2.0 * kerr);
  const double rounded = std::round(ratio);
  if (rounded >= 0.0 && std::abs(ratio - rounded) < 1e-12) return static_cast<int>(rounded);
  return std::nullopt;
}

void SystemParams::validate() const {
  if (!(kerr > 0.0)) throw InvalidParameter("Kerr strength must be positive");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be finite and >= 0");
  if (!std::isfinite(delta)) throw InvalidParameter("detuning must be finite");
  if (m) {
    if (*m < 0) throw InvalidParameter("m must be nonnegative");
    if (delta != 2.0 * (*m) * kerr) throw InvalidParameter("delta must equal 2 m K when m is set");
  }
}

std::size_t default_fock_dim(double nbar) {
  nbar = std::max(0.0, nbar);
  return static_cast<std::size_t>(std::ceil(nbar + 10.0 * std::sqrt(nbar) + 10.0));
}

std::size_t default_fock_dim(const SystemParams& params) {
  return default_fock_dim(params.nbar_estimate());
}

std::size_t convergence_dim(std::size_t dim) {
  return static_cast<std::size_t>(std::ceil(1.25 * static_cast<double>(dim)));
}

QuantumOperator identity(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  return wrap(basis, CMatrix::Identity(n, n));
}

QuantumOperator annihilation(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix a = CMatrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return wrap(basis, std::move(a));
}

QuantumOperator creation(const FockBasis& basis) { return annihilation(basis).adjoint(); }

QuantumOperator number(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix num = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) num(k, k) = static_cast<double>(k);
  return wrap(basis, std::move(num));
}

QuantumOperator parity(const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CMatrix p = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return wrap(basis, std::move(p));
}

QuantumOperator position_quadrature(const FockBasis& basis) {
  const auto a = annihilation(basis);
  return a + a.adjoint();
}

QuantumOperator displacement(cplx beta, const FockBasis& basis) {
  const double mag = std::abs(beta);
  const auto pad = static_cast<std::size_t>(std::ceil(mag * mag + 10.0 * mag + 20.0));
  const FockBasis big(basis.dim() + pad);
  const auto a = annihilation(big).matrix;
  const CMatrix gen = beta * a.adjoint() - std::conj(beta) * a;
  const auto n = static_cast<Eigen::Index>(basis.dim());
  return wrap(basis, expm(gen).topLeftCorner(n, n));
}

QuantumOperator build_hamiltonian(const SystemParams& params, const FockBasis& basis) {
  params.validate();
  const auto n = static_cast<Eigen::Index>(basis.dim());
  const double k = params.kerr;
  const double a2 = params.alpha * params.alpha;
  const double eps2 = params.eps2();
  CMatrix h = CMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double nj = static_cast<double>(j);
    h(j, j) = k * nj * (nj - 1.0) - params.delta * nj + k * a2 * a2;
    if (j + 2 < n) {
      // <j+2| a+^2 |j> = sqrt((j+1)(j+2))
      const double me = std::sqrt((nj + 1.0) * (nj + 2.0));
      h(j + 2, j) = eps2 * me;
      h(j, j + 2) = eps2 * me;
    }
  }
  return wrap(basis, std::move(h));
}

QuantumOperator sign_x_observable(const FockBasis& basis) {
  const RMatrix x = position_quadrature(basis).matrix.real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(x);
  RVector signs(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < signs.size(); ++i) {
    const double v = es.eigenvalues()(i);
    signs(i) = std::abs(v) < 1e-12 ? 0.0 : (v > 0 ? 1.0 : -1.0);
  }
  const RMatrix s = es.eigenvectors() * signs.asDiagonal() * es.eigenvectors().transpose();
  return wrap(basis, s.cast<cplx>());
}

CVector fock_state(std::size_t n, const FockBasis& basis) {
  if (n >= basis.dim()) {
    throw OutOfRange("Fock index " + std::to_string(n) + " outside basis of dim " +
                     std::to_string(basis.dim()));
  }
  CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.dim()));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return v;
}

CVector displaced_fock(double alpha, std::size_t n, const FockBasis& basis) {
  const CVector ket = fock_state(n, basis);
  CVector out = displacement(alpha, basis).matrix * ket;
  return out / out.norm();
}

CVector coherent_amplitudes(cplx beta, const FockBasis& basis) {
  const auto n = static_cast<Eigen::Index>(basis.dim());
  CVector v(n);
  cplx amp = std::exp(-0.5 * std::norm(beta));
  for (Eigen::Index k = 0; k < n; ++k) {
    v(k) = amp;
    amp *= beta / std::sqrt(static_cast<double>(k + 1));
  }
  return v;
}

cplx expectation(const QuantumOperator& op, const CVector& psi) {
  return psi.dot(op.matrix * psi);
}

}  // namespace kerrcat
