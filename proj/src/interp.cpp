#include "harmo/interp.hpp"

#include <array>
#include <cmath>

#include "harmo/error.hpp"

namespace harmo {
namespace {

struct AxisStencil {
  int count = 0;
  std::array<int, 4> idx{};
  std::array<double, 4> w{};
  std::array<double, 4> dw{};
};

AxisStencil axis_stencil(const GridSpec& g, int a, double x, InterpOptions opt, const double* point) {
  const int N = g.shape()[a];
  const double h = g.spacing()[a];
  double t = (x - g.origin()[a]) / h;
  AxisStencil s;
  if (g.periodic(a)) {
    t = std::fmod(t, static_cast<double>(N));
    if (t < 0) t += N;
  } else {
    const double tol = opt.extrapolate_cells + 1e-9;
    if (!(t >= -tol && t <= (N - 1) + tol)) {
      std::vector<double> p(point, point + g.dim());
      fail(ErrorCode::OutOfDomain, "point outside grid hull on axis " + std::to_string(a), p);
    }
  }
  const int fl = static_cast<int>(std::floor(t));
  auto wrap = [&](int i) { return ((i % N) + N) % N; };
  if (opt.order == InterpOrder::Linear) {
    int i0 = fl;
    if (!g.periodic(a)) i0 = std::min(std::max(i0, 0), N - 2);
    const double u = t - i0;
    s.count = 2;
    s.idx = {g.periodic(a) ? wrap(i0) : i0, g.periodic(a) ? wrap(i0 + 1) : i0 + 1, 0, 0};
    s.w = {1.0 - u, u, 0, 0};
    s.dw = {-1.0 / h, 1.0 / h, 0, 0};
    return s;
  }
  int i0 = fl - 1;
  if (!g.periodic(a)) i0 = std::min(std::max(i0, 0), N - 4);
  const double u = t - i0;
  s.count = 4;
  for (int m = 0; m < 4; ++m) s.idx[m] = g.periodic(a) ? wrap(i0 + m) : i0 + m;
  const double u0 = u, u1 = u - 1, u2 = u - 2, u3 = u - 3;
  s.w = {-u1 * u2 * u3 / 6.0, u0 * u2 * u3 / 2.0, -u0 * u1 * u3 / 2.0, u0 * u1 * u2 / 6.0};
  s.dw = {-(u2 * u3 + u1 * u3 + u1 * u2) / 6.0, (u2 * u3 + u0 * u3 + u0 * u2) / 2.0,
          -(u1 * u3 + u0 * u3 + u0 * u1) / 2.0, (u1 * u2 + u0 * u2 + u0 * u1) / 6.0};
  for (double& d : s.dw) d /= h;
  return s;
}

}  // namespace

void interpolate_into(const TensorField& f, const double* point, double* out, double* grad, InterpOptions opt) {
  const GridSpec& g = f.grid();
  const int n = g.dim();
  const int nc = f.ncomp();
  std::array<AxisStencil, 8> st;
  if (n > 8) fail(ErrorCode::UnsupportedDimension, "interpolation supports n <= 8");
  for (int a = 0; a < n; ++a) st[a] = axis_stencil(g, a, point[a], opt, point);
  for (int c = 0; c < nc; ++c) out[c] = 0.0;
  if (grad)
    for (int c = 0; c < n * nc; ++c) grad[c] = 0.0;
  std::array<int, 8> m{};
  std::array<int, 8> node{};
  while (true) {
    double w = 1.0;
    for (int a = 0; a < n; ++a) {
      w *= st[a].w[m[a]];
      node[a] = st[a].idx[m[a]];
    }
    const double* v = f.node_ptr(g.index(node.data()));
    for (int c = 0; c < nc; ++c) out[c] += w * v[c];
    if (grad) {
      for (int b = 0; b < n; ++b) {
        double wb = 1.0;
        for (int a = 0; a < n; ++a) wb *= (a == b) ? st[a].dw[m[a]] : st[a].w[m[a]];
        for (int c = 0; c < nc; ++c) grad[b * nc + c] += wb * v[c];
      }
    }
    int a = n - 1;
    while (a >= 0 && ++m[a] == st[a].count) m[a--] = 0;
    if (a < 0) break;
  }
}

std::vector<double> interpolate(const TensorField& f, const std::vector<double>& point, InterpOptions opt) {
  if (static_cast<int>(point.size()) != f.grid().dim()) fail(ErrorCode::Precondition, "point dimension mismatch");
  std::vector<double> out(f.ncomp());
  interpolate_into(f, point.data(), out.data(), nullptr, opt);
  return out;
}

}  // namespace harmo
