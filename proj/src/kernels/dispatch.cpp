#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kerrcat/kernels.hpp"

namespace kerrcat::kernels {

namespace {

bool env_forces_scalar() {
  const char* v = std::getenv("KERRCAT_FORCE_SCALAR");
  return v != nullptr && std::string(v) != "0" && std::string(v) != "";
}

Isa probe() {
#if defined(__x86_64__) || defined(_M_X64)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
  return Isa::scalar;
#elif defined(__aarch64__)
  return Isa::neon;
#else
  return Isa::scalar;
#endif
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{env_forces_scalar() ? Isa::scalar : probe()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string("kernel size mismatch: ") + what);
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa detected_isa() { return probe(); }

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (isa != Isa::scalar && isa != probe()) {
    throw std::invalid_argument(std::string("instruction set not available: ") + isa_name(isa));
  }
  current().store(isa, std::memory_order_relaxed);
}

void cgemv(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> y,
           std::size_t rows, std::size_t cols) {
  check_sizes(a.size(), rows * cols, "cgemv matrix");
  check_sizes(x.size(), cols, "cgemv x");
  check_sizes(y.size(), rows, "cgemv y");
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::cgemv(a.data(), x.data(), y.data(), rows, cols);
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::cgemv(a.data(), x.data(), y.data(), rows, cols);
#endif
    default: return scalar::cgemv(a.data(), x.data(), y.data(), rows, cols);
  }
}

void cmul_sub(std::span<const cplx> z, std::span<const cplx> w, std::span<const cplx> v,
              double c1, double c2, std::span<cplx> out) {
  const std::size_t n = out.size();
  check_sizes(z.size(), n, "cmul_sub z");
  check_sizes(w.size(), n, "cmul_sub w");
  check_sizes(v.size(), n, "cmul_sub v");
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::cmul_sub(z.data(), w.data(), v.data(), c1, c2, out.data(), n);
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::cmul_sub(z.data(), w.data(), v.data(), c1, c2, out.data(), n);
#endif
    default: return scalar::cmul_sub(z.data(), w.data(), v.data(), c1, c2, out.data(), n);
  }
}

void accumulate_real(cplx c, std::span<const cplx> w, double factor, std::span<double> acc) {
  check_sizes(w.size(), acc.size(), "accumulate_real");
  switch (active_isa()) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return avx2::accumulate_real(c, w.data(), factor, acc.data(), acc.size());
#endif
#if defined(__aarch64__)
    case Isa::neon: return neon::accumulate_real(c, w.data(), factor, acc.data(), acc.size());
#endif
    default: return scalar::accumulate_real(c, w.data(), factor, acc.data(), acc.size());
  }
}

}  // namespace kerrcat::kernels
