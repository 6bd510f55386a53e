// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "kerrcat/kernels.hpp"

#include <immintrin.h>

namespace kerrcat::kernels::avx2 {

namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// Sum of the four lanes.
inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  const std::size_t vec_cols = cols & ~std::size_t{3};
  const double* xd = dp(x);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = dp(a + i * cols);
    // straight: (ar*xr, ai*xi) pairs; cross: (ar*xi, ai*xr) pairs
    __m256d straight0 = _mm256_setzero_pd(), straight1 = _mm256_setzero_pd();
    __m256d cross0 = _mm256_setzero_pd(), cross1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k < vec_cols; k += 4) {
      const __m256d a0 = _mm256_loadu_pd(row + 2 * k);
      const __m256d a1 = _mm256_loadu_pd(row + 2 * k + 4);
      const __m256d x0 = _mm256_loadu_pd(xd + 2 * k);
      const __m256d x1 = _mm256_loadu_pd(xd + 2 * k + 4);
      straight0 = _mm256_fmadd_pd(a0, x0, straight0);
      straight1 = _mm256_fmadd_pd(a1, x1, straight1);
      cross0 = _mm256_fmadd_pd(a0, _mm256_permute_pd(x0, 0b0101), cross0);
      cross1 = _mm256_fmadd_pd(a1, _mm256_permute_pd(x1, 0b0101), cross1);
    }
    const __m256d straight = _mm256_add_pd(straight0, straight1);
    const __m256d cross = _mm256_add_pd(cross0, cross1);
    // re = sum(even) - sum(odd) of straight; im = sum of all cross lanes
    const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    double re = hsum(_mm256_mul_pd(straight, sign));
    double im = hsum(cross);
    for (; k < cols; ++k) {
      const double ar = row[2 * k], ai = row[2 * k + 1];
      const double xr = xd[2 * k], xi = xd[2 * k + 1];
      re += ar * xr - ai * xi;
      im += ar * xi + ai * xr;
    }
    y[i] = {re, im};
  }
}

void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n) {
  const std::size_t vec_n = n & ~std::size_t{1};
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const double* zd = dp(z);
  const double* wd = dp(w);
  const double* vd = dp(v);
  double* od = dp(out);
  std::size_t k = 0;
  for (; k < vec_n; k += 2) {
    const __m256d zz = _mm256_loadu_pd(zd + 2 * k);
    const __m256d ww = _mm256_loadu_pd(wd + 2 * k);
    const __m256d vv = _mm256_loadu_pd(vd + 2 * k);
    const __m256d zr = _mm256_movedup_pd(zz);
    const __m256d zi = _mm256_permute_pd(zz, 0b1111);
    const __m256d wsw = _mm256_permute_pd(ww, 0b0101);
    const __m256d prod = _mm256_fmaddsub_pd(zr, ww, _mm256_mul_pd(zi, wsw));
    _mm256_storeu_pd(od + 2 * k, _mm256_fmsub_pd(vc1, prod, _mm256_mul_pd(vc2, vv)));
  }
  for (; k < n; ++k) {
    const double zr = zd[2 * k], zi = zd[2 * k + 1];
    const double wr = wd[2 * k], wi = wd[2 * k + 1];
    const double vr = vd[2 * k], vi = vd[2 * k + 1];
    od[2 * k] = c1 * (zr * wr - zi * wi) - c2 * vr;
    od[2 * k + 1] = c1 * (zr * wi + zi * wr) - c2 * vi;
  }
}

void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n) {
  const std::size_t vec_n = n & ~std::size_t{3};
  const __m256d coef = _mm256_set_pd(-factor * c.imag(), factor * c.real(),
                                     -factor * c.imag(), factor * c.real());
  const double* wd = dp(w);
  std::size_t k = 0;
  for (; k < vec_n; k += 4) {
    const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(wd + 2 * k), coef);
    const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(wd + 2 * k + 4), coef);
    // hadd yields lanes ordered (0, 2, 1, 3)
    const __m256d h = _mm256_permute4x64_pd(_mm256_hadd_pd(p0, p1), 0b11011000);
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), h));
  }
  const double cr = c.real(), ci = c.imag();
  for (; k < n; ++k) {
    acc[k] += factor * (cr * wd[2 * k] - ci * wd[2 * k + 1]);
  }
}

}  // namespace kerrcat::kernels::avx2
