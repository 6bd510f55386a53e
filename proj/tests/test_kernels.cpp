#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "kerrcat/kernels.hpp"
#include "kerrcat/linalg.hpp"

using namespace kerrcat;

namespace {

std::vector<cplx> random_cplx(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {dist(rng), dist(rng)};
  return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::set_active_isa(saved); }
};

}  // namespace

TEST_CASE("scalar cgemv matches Eigen") {
  std::mt19937_64 rng(1);
  for (std::size_t rows : {1u, 3u, 8u, 17u}) {
    for (std::size_t cols : {1u, 2u, 5u, 16u, 33u}) {
      auto a = random_cplx(rows * cols, rng);
      auto x = random_cplx(cols, rng);
      std::vector<cplx> y(rows);
      kernels::scalar::cgemv(a.data(), x.data(), y.data(), rows, cols);
      Eigen::Map<RowMajorCMatrix> am(a.data(), rows, cols);
      Eigen::Map<CVector> xm(x.data(), cols);
      CVector ref = am * xm;
      for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(y[i] - ref(i)) < 1e-12);
    }
  }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels agree with scalar reference") {
  if (kernels::detected_isa() != kernels::Isa::avx2) {
    MESSAGE("AVX2 unavailable, skipping");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 4u, 7u, 16u, 31u, 100u}) {
    auto a = random_cplx(n * (n + 3), rng);
    auto x = random_cplx(n + 3, rng);
    std::vector<cplx> y0(n), y1(n);
    kernels::scalar::cgemv(a.data(), x.data(), y0.data(), n, n + 3);
    kernels::avx2::cgemv(a.data(), x.data(), y1.data(), n, n + 3);
    CHECK(max_diff(y0, y1) < 1e-12 * (n + 3));

    auto z = random_cplx(n, rng);
    auto w = random_cplx(n, rng);
    auto v = random_cplx(n, rng);
    std::vector<cplx> o0(n), o1(n);
    kernels::scalar::cmul_sub(z.data(), w.data(), v.data(), 0.7, 1.3, o0.data(), n);
    kernels::avx2::cmul_sub(z.data(), w.data(), v.data(), 0.7, 1.3, o1.data(), n);
    CHECK(max_diff(o0, o1) < 1e-13);

    auto alias = v;
    kernels::avx2::cmul_sub(z.data(), w.data(), alias.data(), 0.7, 1.3, alias.data(), n);
    CHECK(max_diff(o0, alias) < 1e-13);

    std::vector<double> acc0(n, 0.5), acc1(n, 0.5);
    kernels::scalar::accumulate_real({0.3, -1.1}, w.data(), 2.5, acc0.data(), n);
    kernels::avx2::accumulate_real({0.3, -1.1}, w.data(), 2.5, acc1.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(acc0[i] - acc1[i]) < 1e-13);
  }
}
#endif

TEST_CASE("dispatch switches and rejects unavailable targets") {
  IsaGuard guard;
  kernels::set_active_isa(kernels::Isa::scalar);
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  std::vector<cplx> a{1, 2, 3, 4}, x{1, kI}, y(2);
  kernels::cgemv(a, x, y, 2, 2);
  CHECK(std::abs(y[0] - cplx(1, 2)) < 1e-15);
  CHECK(std::abs(y[1] - cplx(3, 4)) < 1e-15);
  CHECK_THROWS_AS(kernels::cgemv(a, x, y, 3, 2), std::invalid_argument);
#if defined(__x86_64__)
  CHECK_THROWS_AS(kernels::set_active_isa(kernels::Isa::neon), std::invalid_argument);
#endif
}

TEST_CASE("expm matches Eigen MatrixFunctions across Pade degrees") {
  std::mt19937_64 rng(3);
  for (double scale : {1e-3, 0.1, 0.8, 1.9, 4.0, 40.0}) {
    auto data = random_cplx(12 * 12, rng);
    CMatrix a = Eigen::Map<CMatrix>(data.data(), 12, 12);
    a *= scale / one_norm(a);
    CMatrix ref = a.exp();
    CHECK((expm(a) - ref).norm() / ref.norm() < 1e-12);
  }
}

TEST_CASE("Taylor action agrees with dense exponential") {
  std::mt19937_64 rng(5);
  auto data = random_cplx(20 * 20, rng);
  CMatrix a = Eigen::Map<CMatrix>(data.data(), 20, 20);
  a *= 0.5 / one_norm(a);
  auto vd = random_cplx(20, rng);
  CVector v = Eigen::Map<CVector>(vd.data(), 20);
  RowMajorCMatrix ar = a;
  CVector out = expm_taylor_action(ar, v);
  CHECK((out - expm(a) * v).norm() < 1e-13 * v.norm());
}

TEST_CASE("vectorize uses column stacking") {
  CMatrix x(2, 2);
  x << 1, 2, 3, 4;
  CVector v = vectorize(x);
  CHECK(v(1) == cplx(3));
  CHECK(unvectorize(v, 2) == x);
  CHECK_THROWS(unvectorize(v, 3));
}
