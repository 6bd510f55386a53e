#pragma once
// Data-parallel inner loops used by the propagators and the Wigner renderer.
//
// Every kernel has a portable scalar reference implementation plus an
// intrinsics variant (AVX2+FMA on x86-64, NEON on AArch64). The variant is
// picked once at runtime from the CPU feature flags; setting the environment
// variable KERRCAT_FORCE_SCALAR=1 pins the scalar path. Complex arrays are
// interleaved (re, im) doubles, i.e. the layout of std::complex<double>.

#include <complex>
#include <cstddef>
#include <span>

namespace kerrcat::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

/// Best instruction set supported by this CPU and this build.
Isa detected_isa();

/// Instruction set currently used by the dispatching entry points.
Isa active_isa();

/// Override the dispatch target. Throws std::invalid_argument when the
/// requested variant is not available on this machine.
void set_active_isa(Isa isa);

/// y = A x with A stored row-major (rows x cols).
void cgemv(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> y,
           std::size_t rows, std::size_t cols);

/// out[k] = c1 * z[k] * w[k] - c2 * v[k]. `out` may alias `v`.
void cmul_sub(std::span<const cplx> z, std::span<const cplx> w, std::span<const cplx> v,
              double c1, double c2, std::span<cplx> out);

/// acc[k] += factor * Re(c * w[k]).
void accumulate_real(cplx c, std::span<const cplx> w, double factor, std::span<double> acc);

// Per-ISA entry points, exposed so tests can compare variants directly.
namespace scalar {
void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols);
void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n);
void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols);
void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n);
void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
void cgemv(const cplx* a, const cplx* x, cplx* y, std::size_t rows, std::size_t cols);
void cmul_sub(const cplx* z, const cplx* w, const cplx* v, double c1, double c2, cplx* out,
              std::size_t n);
void accumulate_real(cplx c, const cplx* w, double factor, double* acc, std::size_t n);
}  // namespace neon
#endif

}  // namespace kerrcat::kernels
