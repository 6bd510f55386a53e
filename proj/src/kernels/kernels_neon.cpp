#include "kerrcat/kernels.hpp"

#include <arm_neon.h>

namespace kerrcat::kernels::neon {

namespace {
inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }
}  // namespace

void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols) {
  const double* xd = dp(x);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = dp(a + i * cols);
    float64x2_t straight = vdupq_n_f64(0.0);
    float64x2_t cross = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < cols; ++k) {
      const float64x2_t av = vld1q_f64(row + 2 * k);
      const float64x2_t xv = vld1q_f64(xd + 2 * k);
      straight = vfmaq_f64(straight, av, xv);
      cross = vfmaq_f64(cross, av, vextq_f64(xv, xv, 1));
    }
    y[i] = {vgetq_lane_f64(straight, 0) - vgetq_lane_f64(straight, 1), vaddvq_f64(cross)};
  }
}

void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n) {
  const double* zd = dp(z);
  const double* wd = dp(w);
  const double* vd = dp(v);
  double* od = dp(out);
  const float64x2_t flip = {-1.0, 1.0};
  for (std::size_t k = 0; k < n; ++k) {
    const float64x2_t zz = vld1q_f64(zd + 2 * k);
    const float64x2_t ww = vld1q_f64(wd + 2 * k);
    const float64x2_t zr = vdupq_laneq_f64(zz, 0);
    const float64x2_t zi = vdupq_laneq_f64(zz, 1);
    const float64x2_t wsw = vmulq_f64(vextq_f64(ww, ww, 1), flip);
    const float64x2_t prod = vfmaq_f64(vmulq_f64(zr, ww), zi, wsw);
    const float64x2_t res =
        vsubq_f64(vmulq_n_f64(prod, c1), vmulq_n_f64(vld1q_f64(vd + 2 * k), c2));
    vst1q_f64(od + 2 * k, res);
  }
}

void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n) {
  const float64x2_t coef = {factor * c.real(), -factor * c.imag()};
  const double* wd = dp(w);
  for (std::size_t k = 0; k < n; ++k) {
    acc[k] += vaddvq_f64(vmulq_f64(vld1q_f64(wd + 2 * k), coef));
  }
}

}  // namespace kerrcat::kernels::neon
