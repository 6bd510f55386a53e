#include "kerrcat/kernels.hpp"

namespace kerrcat::kernels::scalar {

void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    const cplx* row = a + i * cols;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < cols; ++k) {
      const double ar = row[k].real(), ai = row[k].imag();
      const double xr = x[k].real(), xi = x[k].imag();
      re += ar * xr - ai * xi;
      im += ar * xi + ai * xr;
    }
    y[i] = {re, im};
  }
}

void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double zr = z[k].real(), zi = z[k].imag();
    const double wr = w[k].real(), wi = w[k].imag();
    const double pr = zr * wr - zi * wi;
    const double pi = zr * wi + zi * wr;
    out[k] = {c1 * pr - c2 * v[k].real(), c1 * pi - c2 * v[k].imag()};
  }
}

void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n) {
  const double cr = c.real(), ci = c.imag();
  for (std::size_t k = 0; k < n; ++k) {
    acc[k] += factor * (cr * w[k].real() - ci * w[k].imag());
  }
}

}  // namespace kerrcat::kernels::scalar
