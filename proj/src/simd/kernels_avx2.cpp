#include <immintrin.h>

#include <cmath>

#include "harmo/simd.hpp"

namespace harmo::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  const __m128d pair = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
  double s = _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = std::fma(a, y[i], x[i]);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void central_diff(const double* f, double* out, std::size_t n, std::ptrdiff_t s, double c) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(f + i + s), _mm256_loadu_pd(f + i - s));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vc, d));
  }
  for (; i < n; ++i) out[i] = c * (f[i + s] - f[i - s]);
}

void lincomb3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n) {
  const __m256d va = _mm256_set1_pd(a), vb = _mm256_set1_pd(b), vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    r = _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), r);
    r = _mm256_fmadd_pd(vc, _mm256_loadu_pd(z + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = std::fma(c, z[i], std::fma(b, y[i], a * x[i]));
}

void edge_flux(const double* coef, const double* ua, const double* ub, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(ub + i), _mm256_loadu_pd(ua + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(coef + i), d));
  }
  for (; i < n; ++i) out[i] = coef[i] * (ub[i] - ua[i]);
}

const Kernels kAvx2{"avx2", dot, axpy, xpay, mul, central_diff, lincomb3, edge_flux};

}  // namespace

const Kernels* avx2_kernels_unchecked() { return &kAvx2; }

}  // namespace harmo::simd
