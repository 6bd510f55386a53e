#pragma once
// Dense linear-algebra vocabulary shared by every module.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kerrcat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using RowMajorCMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr cplx kI{0.0, 1.0};

/// Matrix exponential by scaling and squaring with diagonal Pade approximants
/// (degrees 3..13, 1-norm backward-error thresholds).
CMatrix expm(const CMatrix& a);

/// exp(A) v for small ||A||_1 by a truncated Taylor series on the vector.
CVector expm_taylor_action(const RowMajorCMatrix& a, const CVector& v, double tol = 1e-17);

double one_norm(const CMatrix& a);

/// ||A - A^H||_F / ||A||_F (0 for the zero matrix).
double hermiticity_defect(const CMatrix& a);

/// (A + A^H) / 2
CMatrix hermitian_part(const CMatrix& a);

/// Smallest eigenvalue of the Hermitian part of rho.
double min_eigenvalue(const CMatrix& rho);

/// (1/2) ||a - b||_1 for Hermitian a, b.
double trace_distance(const CMatrix& a, const CMatrix& b);

/// <psi| rho |psi> for a normalized psi.
double state_fidelity(const CMatrix& rho, const CVector& psi);

/// Column-stacked vec(X).
CVector vectorize(const CMatrix& x);
CMatrix unvectorize(const CVector& v, Eigen::Index dim);

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace kerrcat
