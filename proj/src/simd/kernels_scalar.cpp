#include <cmath>

#include "harmo/simd.hpp"

namespace harmo::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = std::fma(a[i], b[i], s0);
    s1 = std::fma(a[i + 1], b[i + 1], s1);
    s2 = std::fma(a[i + 2], b[i + 2], s2);
    s3 = std::fma(a[i + 3], b[i + 3], s3);
  }
  double s = (s0 + s2) + (s1 + s3);
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, y[i], x[i]);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void central_diff(const double* f, double* out, std::size_t n, std::ptrdiff_t s, double c) {
  for (std::size_t i = 0; i < n; ++i) out[i] = c * (f[i + s] - f[i - s]);
}

void lincomb3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fma(c, z[i], std::fma(b, y[i], a * x[i]));
}

void edge_flux(const double* coef, const double* ua, const double* ub, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = coef[i] * (ub[i] - ua[i]);
}

const Kernels kScalar{"scalar", dot, axpy, xpay, mul, central_diff, lincomb3, edge_flux};

}  // namespace

const Kernels& scalar_kernels() { return kScalar; }

}  // namespace harmo::simd
