#include <cmath>

#include "harmo/error.hpp"
#include "harmo/metric_ops.hpp"

namespace harmo {

MollifyResult mollify_metric(const MetricField& g, double delta) {
  const GridSpec& grid = g.grid();
  const int n = grid.dim();
  double hmin = grid.spacing()[0];
  for (double h : grid.spacing()) hmin = std::min(hmin, h);
  if (!(delta >= hmin)) return {g, false, "delta below one cell; metric returned unchanged", 1};

  // offsets inside the open ball of radius delta
  std::vector<std::vector<int>> offs;
  std::vector<double> wts;
  std::vector<int> reach(n);
  for (int a = 0; a < n; ++a) reach[a] = static_cast<int>(std::floor(delta / grid.spacing()[a]));
  std::vector<int> m(n);
  for (int a = 0; a < n; ++a) m[a] = -reach[a];
  while (true) {
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += std::pow(m[a] * grid.spacing()[a] / delta, 2);
    if (r2 < 1.0) {
      offs.push_back(m);
      wts.push_back(std::pow(1.0 - r2, 3));
    }
    int a = n - 1;
    for (; a >= 0; --a) {
      if (++m[a] <= reach[a]) break;
      m[a] = -reach[a];
    }
    if (a < 0) break;
  }

  const TensorField& src = g.components();
  TensorField out(grid, 2, 0);
  const int nc = n * n;
  std::vector<int> base(n), idx(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    grid.multi(k, base.data());
    double wsum = 0;
    double* o = out.node_ptr(k);
    for (std::size_t s = 0; s < offs.size(); ++s) {
      bool inside = true;
      for (int a = 0; a < n; ++a) {
        int i = base[a] + offs[s][a];
        const int N = grid.shape()[a];
        if (grid.periodic(a))
          i = ((i % N) + N) % N;
        else if (i < 0 || i >= N)
          inside = false;
        idx[a] = i;
      }
      if (!inside) continue;
      const double* v = src.node_ptr(grid.index(idx.data()));
      for (int c = 0; c < nc; ++c) o[c] += wts[s] * v[c];
      wsum += wts[s];
    }
    for (int c = 0; c < nc; ++c) o[c] /= wsum;
  }
  return {MetricField::from_components(std::move(out)), true, "ok", static_cast<int>(offs.size())};
}

MetricField scale_metric(const MetricField& g, double t, InterpOrder order) {
  if (!(t > 0.0 && t <= 1.0)) fail(ErrorCode::OutOfDomain, "scale factor must lie in (0,1]", {t});
  const GridSpec& grid = g.grid();
  const int n = grid.dim();
  if (t == 1.0) return g;
  TensorField out(grid, 2, 0);
  std::vector<double> x(n);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int a = 0; a < n; ++a) x[a] = grid.center(a) + t * (grid.coord(k, a) - grid.center(a));
    interpolate_into(g.components(), x.data(), out.node_ptr(k), nullptr, {order, 0.0});
  }
  return MetricField::from_components(std::move(out));
}

}  // namespace harmo
