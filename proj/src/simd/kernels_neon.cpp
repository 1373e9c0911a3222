#include <arm_neon.h>

#include <cmath>

#include "harmo/simd.hpp"

namespace harmo::simd {
namespace {

// Two 2-lane accumulators reproduce the 4-lane order of the other variants.
double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vfmaq_f64(lo, vld1q_f64(a + i), vld1q_f64(b + i));
    hi = vfmaq_f64(hi, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  const float64x2_t pair = vaddq_f64(lo, hi);
  double s = vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void xpay(const double* x, double a, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), va, vld1q_f64(y + i)));
  for (; i < n; ++i) y[i] = std::fma(a, y[i], x[i]);
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void central_diff(const double* f, double* out, std::size_t n, std::ptrdiff_t s, double c) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vc, vsubq_f64(vld1q_f64(f + i + s), vld1q_f64(f + i - s))));
  for (; i < n; ++i) out[i] = c * (f[i + s] - f[i - s]);
}

void lincomb3(double a, const double* x, double b, const double* y, double c, const double* z, double* out,
              std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a), vb = vdupq_n_f64(b), vc = vdupq_n_f64(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t r = vmulq_f64(va, vld1q_f64(x + i));
    r = vfmaq_f64(r, vb, vld1q_f64(y + i));
    r = vfmaq_f64(r, vc, vld1q_f64(z + i));
    vst1q_f64(out + i, r);
  }
  for (; i < n; ++i) out[i] = std::fma(c, z[i], std::fma(b, y[i], a * x[i]));
}

void edge_flux(const double* coef, const double* ua, const double* ub, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(out + i, vmulq_f64(vld1q_f64(coef + i), vsubq_f64(vld1q_f64(ub + i), vld1q_f64(ua + i))));
  for (; i < n; ++i) out[i] = coef[i] * (ub[i] - ua[i]);
}

const Kernels kNeon{"neon", dot, axpy, xpay, mul, central_diff, lincomb3, edge_flux};

}  // namespace

const Kernels* neon_kernels_unchecked() { return &kNeon; }

}  // namespace harmo::simd
