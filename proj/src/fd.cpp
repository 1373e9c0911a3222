#include "harmo/fd.hpp"

#include <cmath>

#include "harmo/error.hpp"
#include "harmo/simd.hpp"

namespace harmo {

TensorField partial_derivative(const TensorField& f, int axis) {
  const GridSpec& g = f.grid();
  if (axis < 0 || axis >= g.dim()) fail(ErrorCode::Precondition, "axis out of range");
  const int N = g.shape()[axis];
  if (N < 3) fail(ErrorCode::StencilWidth, "axis too short for the stencil");
  const auto& K = simd::active();
  TensorField out(g, f.cov(), f.contra(), f.values());
  const std::size_t B = g.stride(axis) * f.ncomp();
  const std::size_t outer = g.size() / (g.stride(axis) * N);
  const double c = 1.0 / (2.0 * g.spacing()[axis]);
  const double* src = f.data().data();
  double* dst = out.data().data();
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * N * B;
    const double* fb = src + base;
    double* ob = dst + base;
    K.central_diff(fb + B, ob + B, (N - 2) * B, static_cast<std::ptrdiff_t>(B), c);
    const double* last = fb + (N - 1) * B;
    if (g.periodic(axis)) {
      K.lincomb3(c, fb + B, -c, last, 0.0, fb, ob, B);
      K.lincomb3(c, fb, -c, last - B, 0.0, fb, ob + (N - 1) * B, B);
    } else {
      // written as differences so that locally constant data gives exact zeros
      double* ot = ob + (N - 1) * B;
      for (std::size_t i = 0; i < B; ++i) {
        ob[i] = c * (4.0 * (fb[B + i] - fb[i]) - (fb[2 * B + i] - fb[i]));
        ot[i] = c * (4.0 * (last[i] - last[i - B]) - (last[i] - last[i - 2 * B]));
      }
    }
  }
  out.set_symmetry(f.symmetry());
  return out;
}

TensorField gradient(const TensorField& f) {
  const GridSpec& g = f.grid();
  const int n = g.dim();
  TensorField out(g, f.cov() + 1, f.contra(), f.values());
  const int nc = f.ncomp();
  for (int a = 0; a < n; ++a) {
    const TensorField d = partial_derivative(f, a);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double* s = d.node_ptr(k);
      double* o = out.node_ptr(k) + a * nc;
      for (int c = 0; c < nc; ++c) o[c] = s[c];
    }
  }
  return out;
}

double integrate(const TensorField& f, const TensorField* weight) {
  const GridSpec& g = f.grid();
  if (f.ncomp() != 1) fail(ErrorCode::ShapeMismatch, "integrate expects a scalar field");
  if (weight && !weight->compatible(f)) fail(ErrorCode::ShapeMismatch, "weight shape differs");
  const double v = g.cell_volume();
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    double w = g.node_weight(k) * v;
    if (weight) {
      const double wk = (*weight)(k, 0);
      if (!(wk >= 0.0) || !std::isfinite(wk))
        fail(ErrorCode::InvalidVolume, "negative or non-finite weight at node " + std::to_string(k), {wk});
      w *= wk;
    }
    s += f(k, 0) * w;
  }
  return s;
}

double integrate_boundary(const TensorField& f) {
  return integrate_boundary(f, [](std::size_t, int) { return 1.0; });
}

}  // namespace harmo
