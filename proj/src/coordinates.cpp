#include "harmo/coordinates.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <nlohmann/json.hpp>
#include <random>

#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/lorentz.hpp"
#include "harmo/parallel.hpp"

namespace harmo {

namespace {

constexpr double kBand = 2.0;  // cells of extrapolation allowed around a hull

InterpOptions cubic_band() { return {InterpOrder::Cubic, kBand}; }

SmallMat jacobian_from(const double* grad, int n) {
  SmallMat J(n, n);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i) J(i, a) = grad[a * n + i];
  return J;
}

double diameter(const GridSpec& g) {
  double s = 0;
  for (int a = 0; a < g.dim(); ++a) s += g.length(a) * g.length(a);
  return std::sqrt(s);
}

void clamp_to_band(const GridSpec& g, std::vector<double>& x, double cells) {
  for (int a = 0; a < g.dim(); ++a) {
    const double m = cells * g.spacing()[a];
    x[a] = std::clamp(x[a], g.lower(a) - m, g.upper(a) + m);
  }
}

bool inside_hull(const GridSpec& g, const std::vector<double>& x) {
  for (int a = 0; a < g.dim(); ++a) {
    const double slack = 1e-9 * g.spacing()[a];
    if (x[a] < g.lower(a) - slack || x[a] > g.upper(a) + slack) return false;
  }
  return true;
}

TensorField row_of(const CoframeField& W, int i) {
  const int n = W.dim();
  TensorField a(W.grid(), 1, 0);
  for (std::size_t k = 0; k < W.grid().size(); ++k)
    for (int b = 0; b < n; ++b) a(k, b) = W.W(k, i * n + b);
  return a;
}

double frobenius(const TensorField& f, std::size_t k) {
  double s = 0;
  for (int c = 0; c < f.ncomp(); ++c) s += f(k, c) * f(k, c);
  return std::sqrt(s);
}

}  // namespace

CoordinateMap::CoordinateMap(TensorField y) : y_(std::move(y)) {
  const int n = y_.grid().dim();
  if (y_.ncomp() != n) fail(ErrorCode::ShapeMismatch, "coordinate map needs n components");
  dy_ = gradient(y_);
  min_det_ = INFINITY;
  for (std::size_t k = 0; k < y_.nodes(); ++k) {
    const double d = jacobian_at(k).determinant();
    if (!(d > 0)) fail(ErrorCode::ImmersionFailure, "det dy <= 0", y_.grid().point(k));
    min_det_ = std::min(min_det_, d);
  }
}

SmallMat CoordinateMap::jacobian_at(std::size_t node) const { return jacobian_from(dy_.node_ptr(node), dim()); }

BiLipschitz CoordinateMap::bilipschitz(std::size_t pairs, std::uint64_t seed) const {
  const GridSpec& g = grid();
  const int n = dim();
  BiLipschitz b{INFINITY, 0.0};
  auto pair = [&](std::size_t p, std::size_t q) {
    double dy = 0, dx = 0;
    const auto xp = g.point(p), xq = g.point(q);
    for (int i = 0; i < n; ++i) {
      dy += std::pow(y_(p, i) - y_(q, i), 2);
      dx += std::pow(xp[i] - xq[i], 2);
    }
    if (dx == 0) return;
    const double r = std::sqrt(dy / dx);
    b.lower = std::min(b.lower, r);
    b.upper = std::max(b.upper, r);
  };
  for (std::size_t k = 0; k < g.size(); ++k)
    for (int a = 0; a < n; ++a)
      if (g.coord_index(k, a) + 1 < g.shape()[a]) pair(k, k + g.stride(a));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (std::size_t s = 0; s < pairs; ++s) pair(pick(rng), pick(rng));
  return b;
}

std::vector<double> CoordinateMap::eval(const std::vector<double>& x) const { return interpolate(y_, x, cubic_band()); }

std::vector<double> CoordinateMap::image_lower() const {
  std::vector<double> lo(dim(), INFINITY);
  for (std::size_t k = 0; k < y_.nodes(); ++k)
    for (int i = 0; i < dim(); ++i) lo[i] = std::min(lo[i], y_(k, i));
  return lo;
}

std::vector<double> CoordinateMap::image_upper() const {
  std::vector<double> hi(dim(), -INFINITY);
  for (std::size_t k = 0; k < y_.nodes(); ++k)
    for (int i = 0; i < dim(); ++i) hi[i] = std::max(hi[i], y_(k, i));
  return hi;
}

std::vector<double> CoordinateMap::invert(const std::vector<double>& target, const std::vector<double>* guess) const {
  const GridSpec& g = grid();
  const int n = dim();
  if (static_cast<int>(target.size()) != n) fail(ErrorCode::ShapeMismatch, "target has the wrong dimension");
  const double tol = 1e-10 * diameter(g);
  const double band = kBand * (1 - 1e-9);

  std::vector<double> x(n);
  if (guess) {
    x = *guess;
  } else {
    const auto lo = image_lower(), hi = image_upper();
    for (int a = 0; a < n; ++a) x[a] = target[a] - 0.5 * (lo[a] + hi[a]) + g.center(a);
  }
  clamp_to_band(g, x, band);

  std::vector<double> val(n), grad(n * n), xt(n), valt(n);
  auto residual = [&](const std::vector<double>& p, std::vector<double>& v, double* gr) {
    interpolate_into(y_, p.data(), v.data(), gr, cubic_band());
    double s = 0;
    for (int i = 0; i < n; ++i) s += std::pow(v[i] - target[i], 2);
    return std::sqrt(s);
  };
  double r = residual(x, val, grad.data());
  std::vector<double> best = x;
  double best_r = r;
  for (int it = 0; it < 50 && r > tol; ++it) {
    SmallVec rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = target[i] - val[i];
    const SmallVec dx = jacobian_from(grad.data(), n).partialPivLu().solve(rhs);
    double t = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      for (int a = 0; a < n; ++a) xt[a] = x[a] + t * dx[a];
      clamp_to_band(g, xt, band);
      const double rt = residual(xt, valt, nullptr);
      if (rt < r) {
        x = xt;
        r = residual(x, val, grad.data());
        moved = true;
        break;
      }
    }
    if (r < best_r) {
      best_r = r;
      best = x;
    }
    if (!moved) break;
  }
  if (r > tol) {
    std::vector<double> data = best;
    data.push_back(best_r);
    fail(ErrorCode::InversionFailure, "Newton inversion did not converge", data);
  }
  return x;
}

BuildYResult build_y(const MetricField& g, const CoframeField& W, const SolveOptions& opt) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  for (int a = 0; a < n; ++a)
    if (grid.periodic(a)) fail(ErrorCode::Precondition, "build_y needs box topology");
  if (!W.grid().same_layout(grid)) fail(ErrorCode::ShapeMismatch, "coframe and metric grids differ");
  const WeakLaplacian L(g, BoundaryKind::Neumann);
  const auto& mass = L.mass();
  double total = 0;
  for (double m : mass) total += m;

  std::vector<std::future<Solution>> jobs;
  for (int i = 0; i < n; ++i)
    jobs.push_back(std::async(std::launch::async, [&, i]() {
      std::vector<double> x0(grid.size());
      double mean = 0;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        x0[k] = grid.coord(k, i);
        mean += mass[k] * x0[k];
      }
      mean /= total;
      for (double& v : x0) v -= mean;
      return solve(L, L.rhs_from_oneform(row_of(W, i)), opt, nullptr, &x0);
    }));
  TensorField y = TensorField::vector_valued(grid, n);
  BuildYResult out;
  for (int i = 0; i < n; ++i) {
    Solution s = jobs[i].get();
    for (std::size_t k = 0; k < grid.size(); ++k) y(k, i) = s.u(k, 0);
    out.reports.push_back(std::move(s.report));
  }
  out.y = CoordinateMap(std::move(y));
  return out;
}

std::string ResidualReport::to_json() const {
  nlohmann::json j{{"sup", sup},     {"grad", grad},   {"hess", hess},  {"total", total},
                   {"closedness", closedness}, {"dstar", dstar}, {"weak", weak}, {"trace", trace}};
  return j.dump();
}

ResidualReport residual_system_report(const MetricField& g, const CoframeField& W, const CoordinateMap& y) {
  const GridSpec& grid = g.grid();
  const int n = g.dim();
  const std::size_t N = grid.size();
  TensorField e(grid, 1, 0, n);  // component i*n + a
  for (std::size_t k = 0; k < N; ++k)
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) e(k, i * n + a) = y.jacobian()(k, a * n + i) - W.W(k, i * n + a);
  const TensorField de = gradient(e);   // b*n*n + i*n + a
  const TensorField dde = gradient(de);
  const TensorField dW = gradient(W.W);

  ResidualReport rep;
  std::vector<double> v(N), g1(N), g2(N);
  for (std::size_t k = 0; k < N; ++k) {
    v[k] = frobenius(e, k);
    g1[k] = frobenius(de, k);
    g2[k] = frobenius(dde, k);
    rep.sup = std::max(rep.sup, v[k]);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
          const int n2 = n * n;
          const double d = de(k, a * n2 + i * n + b) - de(k, b * n2 + i * n + a) + dW(k, a * n2 + i * n + b) -
                           dW(k, b * n2 + i * n + a);
          rep.closedness = std::max(rep.closedness, std::abs(d));
        }
  }
  const auto w = grid.quadrature_weights();
  rep.grad = lorentz_norm(WeightedSample{g1, w}, {double(n), 1.0});
  rep.hess = lorentz_norm(WeightedSample{g2, w}, {n / 2.0, 1.0});
  rep.total = rep.sup + rep.grad + rep.hess;

  const NodeMask centre = central_region(grid, 0.5);
  const TensorField ginv = g.inverse();
  const WeakLaplacian L(g, BoundaryKind::Neumann);
  for (int i = 0; i < n; ++i) {
    TensorField ei(grid, 1, 0);
    for (std::size_t k = 0; k < N; ++k)
      for (int a = 0; a < n; ++a) ei(k, a) = e(k, i * n + a);
    const Codifferential d = codifferential_oneform(g, ei);
    for (std::size_t k = 0; k < N; ++k)
      if (centre(k)) rep.dstar = std::max(rep.dstar, std::abs(d.total(k, 0)));

    std::vector<double> yi(N);
    for (std::size_t k = 0; k < N; ++k) yi[k] = y.components()(k, i);
    const auto Ay = L.apply(yi);
    const auto b = L.rhs_from_oneform(row_of(W, i));
    double num = 0, den = 0;
    for (std::size_t k = 0; k < N; ++k) {
      num += std::pow(Ay[k] - b[k], 2);
      den += b[k] * b[k];
    }
    rep.weak = std::max(rep.weak, den > 0 ? std::sqrt(num / den) : std::sqrt(num));

    for (std::size_t k = 0; k < N; ++k) {
      if (!grid.on_boundary(k)) continue;
      const auto nu = grid.outward_normal(k);
      double en = 0, nn = 0;
      for (int a = 0; a < n; ++a)
        for (int b2 = 0; b2 < n; ++b2) {
          en += ginv(k, a * n + b2) * nu[a] * ei(k, b2);
          nn += ginv(k, a * n + b2) * nu[a] * nu[b2];
        }
      rep.trace = std::max(rep.trace, std::abs(en) / std::sqrt(nn));
    }
  }
  return rep;
}

GridSpec target_grid(const CoordinateMap& y) {
  const GridSpec& g = y.grid();
  const auto lo = y.image_lower(), hi = y.image_upper();
  std::vector<double> origin(g.dim());
  for (int a = 0; a < g.dim(); ++a) origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * g.length(a);
  return GridSpec::box(g.shape(), g.spacing(), origin);
}

PullbackResult pullback_metric(const MetricField& g, const CoordinateMap& y) {
  const GridSpec& src = g.grid();
  if (!src.same_layout(y.grid())) fail(ErrorCode::ShapeMismatch, "metric and map grids differ");
  const int n = g.dim();
  const GridSpec tgt = target_grid(y);
  const std::size_t N = tgt.size();
  TensorField G(tgt, 2, 0);
  PullbackResult out;
  out.covered = TensorField::scalar(tgt);
  std::vector<unsigned char> failed(N, 0);

  parallel_for(N, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x, prev, gv(n * n), jv(n * n);
    for (std::size_t k = begin; k < end; ++k) {
      const auto z = tgt.point(k);
      bool ok = true;
      try {
        x = prev.empty() ? y.invert(z) : y.invert(z, &prev);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::InversionFailure) throw;
        try {
          x = y.invert(z);
        } catch (const Error& err2) {
          if (err2.code() != ErrorCode::InversionFailure) throw;
          x.assign(err2.data().begin(), err2.data().begin() + n);
          ok = false;
        }
      }
      prev = x;
      const bool in = ok && inside_hull(src, x);
      out.covered(k, 0) = in ? 1.0 : 0.0;
      failed[k] = ok ? 0 : 1;
      // outside the hull the formula is evaluated at the nearest hull point
      if (!in) clamp_to_band(src, x, 0.0);
      interpolate_into(g.components(), x.data(), gv.data(), nullptr, cubic_band());
      interpolate_into(y.jacobian(), x.data(), jv.data(), nullptr, cubic_band());
      const SmallMat M = jacobian_from(jv.data(), n).inverse();
      SmallMat gx(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gx(i, j) = 0.5 * (gv[i * n + j] + gv[j * n + i]);
      const SmallMat P = M.transpose() * gx * M;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) G(k, a * n + b) = 0.5 * (P(a, b) + P(b, a));
      if (in && !(P.determinant() > 0 && Eigen::LLT<SmallMat>(P).info() == Eigen::Success))
        fail(ErrorCode::PullbackDegeneracy, "pulled back metric not positive definite", z);
    }
  });
  std::size_t cov = 0;
  for (std::size_t k = 0; k < N; ++k) {
    cov += out.covered(k, 0) > 0 ? 1 : 0;
    out.unresolved += failed[k];
  }
  out.coverage = double(cov) / double(N);
  try {
    out.metric = MetricField::from_components(std::move(G));
  } catch (const Error& err) {
    fail(ErrorCode::PullbackDegeneracy, std::string("pulled back metric rejected: ") + err.what(), err.data());
  }
  return out;
}

MetricField pushforward_check(const MetricField& G, const CoordinateMap& y) {
  const GridSpec& src = y.grid();
  const GridSpec& tgt = G.grid();
  const int n = src.dim();
  TensorField out(src, 2, 0);
  parallel_for(src.size(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> z(n), gv(n * n);
    for (std::size_t k = begin; k < end; ++k) {
      for (int i = 0; i < n; ++i) z[i] = y.components()(k, i);
      clamp_to_band(tgt, z, 0.0);
      interpolate_into(G.components(), z.data(), gv.data(), nullptr, cubic_band());
      const SmallMat J = y.jacobian_at(k);
      SmallMat gz(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gz(i, j) = 0.5 * (gv[i * n + j] + gv[j * n + i]);
      const SmallMat P = J.transpose() * gz * J;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out(k, a * n + b) = 0.5 * (P(a, b) + P(b, a));
    }
  });
  return MetricField::from_components(std::move(out));
}

HarmonicCorrection harmonic_correction(const MetricField& h, const std::vector<TensorField>* boundary,
                                       const SolveOptions& opt, double certificate_tol, bool check_near_flat) {
  const GridSpec& grid = h.grid();
  const int n = h.dim();
  const std::size_t N = grid.size();
  if (check_near_flat && !(h.max_deviation_from_identity() < 0.5))
    fail(ErrorCode::Precondition, "harmonic correction needs max |h - delta| < 0.5", {h.max_deviation_from_identity()});
  if (boundary && static_cast<int>(boundary->size()) != n)
    fail(ErrorCode::ShapeMismatch, "boundary data needs n scalar fields");
  if (!(certificate_tol > 0)) fail(ErrorCode::Config, "certificate tolerance must be positive");
  const WeakLaplacian L(h, BoundaryKind::Dirichlet);
  const auto& mass = L.mass();

  std::vector<std::vector<double>> bdata(n, std::vector<double>(N)), z(n);
  for (int r = 0; r < n; ++r)
    for (std::size_t k = 0; k < N; ++k) bdata[r][k] = boundary ? (*boundary)[r](k, 0) : grid.coord(k, r);
  for (int r = 0; r < n; ++r) z[r] = bdata[r];

  HarmonicCorrection out;
  out.defect = TensorField::vector_valued(grid, n);
  SolveOptions o = opt;
  for (;;) {
    ++out.rounds;
    std::vector<std::future<Solution>> jobs;
    for (int r = 0; r < n; ++r)
      jobs.push_back(std::async(std::launch::async, [&, r]() {
        return solve(L, std::vector<double>(N, 0.0), o, &bdata[r], &z[r]);
      }));
    out.reports.clear();
    for (int r = 0; r < n; ++r) {
      Solution s = jobs[r].get();
      z[r].assign(s.u.data().begin(), s.u.data().end());
      out.reports.push_back(std::move(s.report));
    }
    out.defect_max = 0;
    for (int r = 0; r < n; ++r) {
      const auto Az = L.apply(z[r]);
      for (std::size_t k = 0; k < N; ++k) {
        out.defect(k, r) = grid.on_boundary(k) ? 0.0 : Az[k] / mass[k];
        out.defect_max = std::max(out.defect_max, std::abs(out.defect(k, r)));
      }
    }
    if (out.defect_max <= certificate_tol || o.tol <= 1e-15) break;
    o.tol = std::max(1e-15, o.tol * 1e-2);
  }
  if (out.defect_max > certificate_tol)
    fail(ErrorCode::CertificationFailure, "harmonic defect above the certificate tolerance", out.defect.data());

  TensorField zf = TensorField::vector_valued(grid, n);
  for (int r = 0; r < n; ++r)
    for (std::size_t k = 0; k < N; ++k) zf(k, r) = z[r][k];
  out.z = CoordinateMap(std::move(zf));

  TensorField G(grid, 2, 0);
  for (std::size_t k = 0; k < N; ++k) {
    const SmallMat M = out.z.jacobian_at(k).inverse();
    const SmallMat P = M.transpose() * h.at(k) * M;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        G(k, a * n + b) = 0.5 * (P(a, b) + P(b, a));
        out.deviation_sup = std::max(out.deviation_sup, std::abs(G(k, a * n + b) - (a == b ? 1.0 : 0.0)));
      }
  }
  out.metric = MetricField::from_components(std::move(G));

  const NodeMask centre = central_region(grid, 0.5);
  for (int r = 0; r < n; ++r) {
    const TensorField lap = laplace_beltrami_apply(h, out.z.components().component(r));
    for (std::size_t k = 0; k < N; ++k)
      if (centre(k)) out.fd_defect_max = std::max(out.fd_defect_max, std::abs(lap(k, 0)));
  }
  return out;
}

double deviation_barw(const MetricField& G, const CoordinateMap& z) {
  const GridSpec& grid = G.grid();
  const int n = grid.dim();
  const std::size_t N = grid.size();
  std::vector<SmallMat> M(N);
  std::vector<double> w = grid.quadrature_weights();
  for (std::size_t k = 0; k < N; ++k) {
    const SmallMat J = z.jacobian_at(k);
    M[k] = J.inverse();
    w[k] *= std::abs(J.determinant());
  }
  // D_alpha f = M(a, alpha) d_a f on every component of f
  auto chain = [&](const TensorField& f) {
    const TensorField d = gradient(f);
    const int c = f.ncomp();
    TensorField out(grid, 0, 0, n * c);
    for (std::size_t k = 0; k < N; ++k)
      for (int al = 0; al < n; ++al)
        for (int m = 0; m < c; ++m) {
          double s = 0;
          for (int a = 0; a < n; ++a) s += M[k](a, al) * d(k, a * c + m);
          out(k, al * c + m) = s;
        }
    return out;
  };
  double best = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      TensorField f = TensorField::scalar(grid);
      for (std::size_t k = 0; k < N; ++k) f(k, 0) = G(k, i, j) - (i == j ? 1.0 : 0.0);
      const TensorField d1 = chain(f);
      const TensorField d2 = chain(d1);
      std::vector<double> v(N), g1(N), g2(N);
      for (std::size_t k = 0; k < N; ++k) {
        v[k] = f(k, 0);
        g1[k] = frobenius(d1, k);
        g2[k] = frobenius(d2, k);
      }
      double sup = 0;
      for (double x : v) sup = std::max(sup, std::abs(x));
      const double val = sup + lorentz_norm(WeightedSample{g1, w}, {double(n), 1.0}) +
                         lorentz_norm(WeightedSample{g2, w}, {n / 2.0, 1.0});
      best = std::max(best, val);
    }
  return best;
}

}  // namespace harmo
