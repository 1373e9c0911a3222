#pragma once

#include <cstddef>

namespace harmo::simd {

// Hot-loop kernels. Every variant uses the same 4-lane accumulation order and
// fused multiply-adds, so results agree bit for bit with the scalar reference.
struct Kernels {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += a*x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = x + a*y
  void (*xpay)(const double* x, double a, double* y, std::size_t n);
  // out = a*b elementwise
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out[k] = c*(f[k+s] - f[k-s]); f points at the first output position.
  void (*central_diff)(const double* f, double* out, std::size_t n, std::ptrdiff_t s, double c);
  // out = a*x + b*y + c*z
  void (*lincomb3)(double a, const double* x, double b, const double* y, double c, const double* z,
                   double* out, std::size_t n);
  // out = coef*(ub - ua)
  void (*edge_flux)(const double* coef, const double* ua, const double* ub, double* out, std::size_t n);
};

const Kernels& scalar_kernels();
// Null when the build or the CPU lacks the instruction set.
const Kernels* avx2_kernels();
const Kernels* neon_kernels();

// Selected once: widest supported set unless HARMO_SIMD=scalar.
const Kernels& active();

}  // namespace harmo::simd
