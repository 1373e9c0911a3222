#include "harmo/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/lorentz.hpp"
#include "harmo/parallel.hpp"

namespace harmo {

using std::numbers::pi;

TensorField sample_immersion(const GridSpec& grid, const AnalyticImmersion& f) {
  if (grid.dim() != f.dim) fail(ErrorCode::ShapeMismatch, "immersion dimension does not match the grid");
  TensorField t = TensorField::vector_valued(grid, f.ambient);
  std::vector<double> x(grid.dim());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coord(k, a);
    f.map(x.data(), t.node_ptr(k));
  }
  return t;
}

AnalyticImmersion flat_immersion(int n, int d, std::vector<double> q) {
  if (d <= n) fail(ErrorCode::UnsupportedDimension, "ambient dimension must exceed n");
  if (q.empty()) q.assign(d, 0.0);
  if (static_cast<int>(q.size()) != d) fail(ErrorCode::ShapeMismatch, "offset needs d entries");
  for (int a = 0; a < n; ++a)
    if (q[a] != 0.0) fail(ErrorCode::Precondition, "offset must be normal to R^n x 0");
  AnalyticImmersion f{"flat", n, d, {}};
  f.map = [n, d, q](const double* x, double* out) {
    for (int c = 0; c < d; ++c) out[c] = q[c] + (c < n ? x[c] : 0.0);
  };
  return f;
}

AnalyticImmersion sphere_chart(int n, double R, int d) {
  if (d <= n) fail(ErrorCode::UnsupportedDimension, "ambient dimension must exceed n");
  if (!(R > 0)) fail(ErrorCode::Generation, "sphere radius must be positive");
  AnalyticImmersion f{"sphere_chart", n, d, {}};
  f.map = [n, d, R](const double* x, double* out) {
    double s = 0;
    for (int a = 0; a < n; ++a) s += x[a] * x[a];
    const double q = 1.0 / (1.0 + s);
    for (int a = 0; a < n; ++a) out[a] = 2.0 * R * x[a] * q;
    out[n] = R * (1.0 - s) * q;
    for (int c = n + 1; c < d; ++c) out[c] = 0.0;
  };
  return f;
}

AnalyticImmersion graph_immersion(std::vector<GraphFamily> u) {
  if (u.empty()) fail(ErrorCode::Generation, "graph immersion needs at least one height function");
  const int n = u.front().dim;
  for (const auto& g : u)
    if (g.dim != n) fail(ErrorCode::Generation, "height functions disagree on n");
  const int d = n + static_cast<int>(u.size());
  AnalyticImmersion f{"graph", n, d, {}};
  f.map = [n, u](const double* x, double* out) {
    for (int a = 0; a < n; ++a) out[a] = x[a];
    for (std::size_t k = 0; k < u.size(); ++k) out[n + k] = u[k].u(x);
  };
  return f;
}

AnalyticImmersion sphere_cap(int n, int d, double R) {
  if (d <= n) fail(ErrorCode::UnsupportedDimension, "ambient dimension must exceed n");
  if (!(R > 1.0)) fail(ErrorCode::Generation, "cap radius must exceed 1");
  AnalyticImmersion f{"sphere_cap", n, d, {}};
  const double h = std::sqrt(R * R - 1.0);
  f.map = [n, d, R, h](const double* x, double* out) {
    double s = 0;
    for (int a = 0; a < n; ++a) {
      s += x[a] * x[a];
      out[a] = x[a];
    }
    if (s >= R * R) fail(ErrorCode::OutOfDomain, "point outside the cap chart");
    out[n] = std::sqrt(R * R - s) - h;
    for (int c = n + 1; c < d; ++c) out[c] = 0.0;
  };
  return f;
}

std::vector<std::vector<int>> subsets(int m, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > m) return out;
  std::vector<int> s(k);
  for (int i = 0; i < k; ++i) s[i] = i;
  while (true) {
    out.push_back(s);
    int i = k - 1;
    while (i >= 0 && s[i] == m - k + i) --i;
    if (i < 0) break;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
  return out;
}

namespace {

// Sign of the permutation listing `a` then `b`.
int shuffle_sign(const std::vector<int>& a, const std::vector<int>& b) {
  int inv = 0;
  for (int x : a)
    for (int y : b)
      if (x > y) ++inv;
  return inv % 2 ? -1 : 1;
}

// |T|^2 for a covariant rank-`rank` tensor with `d` values per index tuple,
// component idx*d + c, contracted with ginv on every slot.
double valued_norm2(const double* gi, const double* t, int rank, int n, int d, std::vector<double>& a,
                    std::vector<double>& b) {
  const int nc = ipow(n, rank) * d;
  a.assign(t, t + nc);
  b.resize(nc);
  for (int s = 0; s < rank; ++s) {
    const int stride = ipow(n, rank - 1 - s) * d;
    for (int c = 0; c < nc; ++c) {
      const int digit = (c / stride) % n;
      const int base = c - digit * stride;
      double acc = 0;
      for (int m = 0; m < n; ++m) acc += gi[digit * n + m] * a[base + m * stride];
      b[c] = acc;
    }
    std::swap(a, b);
  }
  double s2 = 0;
  for (int c = 0; c < nc; ++c) s2 += a[c] * t[c];
  return std::max(0.0, s2);
}

std::vector<double> volume_weights(const ImmersionField& phi) {
  std::vector<double> w = phi.grid().quadrature_weights();
  const TensorField vol = phi.volume_density();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] *= vol(k, 0);
  return w;
}

}  // namespace

ImmersionField::ImmersionField(TensorField phi) : phi_(std::move(phi)) {
  const GridSpec& grid = phi_.grid();
  const int n = grid.dim();
  const int d = phi_.values();
  if (phi_.cov() != 0 || phi_.contra() != 0 || phi_.ncomp() != d)
    fail(ErrorCode::ShapeMismatch, "immersion must be an R^d-valued scalar field");
  if (d <= n) fail(ErrorCode::UnsupportedDimension, "ambient dimension must exceed n");
  if (d > 8) fail(ErrorCode::UnsupportedDimension, "ambient dimension above 8");
  const std::size_t N = grid.size();

  dphi_ = gradient(phi_);
  const TensorField d2 = gradient(dphi_);
  const auto plu = subsets(d, n);
  const int np = static_cast<int>(plu.size());

  TensorField gc(grid, 2, 0);
  ginv_ = TensorField(grid, 0, 2);
  ii_ = TensorField(grid, 2, 0, d);
  H_ = TensorField::vector_valued(grid, d);
  gauss_ = TensorField(grid, 0, 0, np);

  parallel_for(N, [&](std::size_t b, std::size_t e) {
    SmallMat J(n, d), sub(n, n);
    for (std::size_t k = b; k < e; ++k) {
      const double* dp = dphi_.node_ptr(k);
      double scale = 0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < d; ++c) {
          J(a, c) = dp[a * d + c];
          scale = std::max(scale, std::abs(J(a, c)));
        }
      const SmallMat G = J * J.transpose();
      const double det = G.determinant();
      if (!(det > 1e-12 * std::pow(scale * scale, n))) {
        std::vector<double> pt = grid.point(k);
        fail(ErrorCode::Degeneracy, "immersion differential loses rank", pt);
      }
      SmallMat Gi = G.inverse();
      Gi = 0.5 * (Gi + Gi.transpose()).eval();
      store_matrix(gc, k, 0.5 * (G + G.transpose()));
      store_matrix(ginv_, k, Gi);

      const SmallMat P = SmallMat::Identity(d, d) - J.transpose() * Gi * J;
      const double* dd = d2.node_ptr(k);
      double* ii = ii_.node_ptr(k);
      SmallVec v(d), pv(d);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          for (int c = 0; c < d; ++c) v(c) = 0.5 * (dd[i * n * d + j * d + c] + dd[j * n * d + i * d + c]);
          pv = P * v;
          for (int c = 0; c < d; ++c) ii[(i * n + j) * d + c] = ii[(j * n + i) * d + c] = pv(c);
        }
      double* h = H_.node_ptr(k);
      for (int c = 0; c < d; ++c) {
        double s = 0;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) s += Gi(i, j) * ii[(i * n + j) * d + c];
        h[c] = s / n;
      }
      const double vol = std::sqrt(det);
      double* gm = gauss_.node_ptr(k);
      for (int p = 0; p < np; ++p) {
        for (int a = 0; a < n; ++a)
          for (int m = 0; m < n; ++m) sub(a, m) = J(a, plu[p][m]);
        gm[p] = sub.determinant() / vol;
      }
    }
  });
  g_ = MetricField::from_components(std::move(gc));
}

TensorField ImmersionField::normal() const {
  const int n = dim(), d = ambient();
  const auto plu = subsets(d, n);
  const auto dual = subsets(d, d - n);
  TensorField out(grid(), 0, 0, static_cast<int>(dual.size()));
  std::vector<int> sign(dual.size()), src(dual.size());
  for (std::size_t q = 0; q < dual.size(); ++q) {
    std::vector<int> comp;
    for (int c = 0; c < d; ++c)
      if (std::find(dual[q].begin(), dual[q].end(), c) == dual[q].end()) comp.push_back(c);
    src[q] = static_cast<int>(std::find(plu.begin(), plu.end(), comp) - plu.begin());
    sign[q] = shuffle_sign(comp, dual[q]);
  }
  for (std::size_t k = 0; k < grid().size(); ++k)
    for (std::size_t q = 0; q < dual.size(); ++q) out(k, static_cast<int>(q)) = sign[q] * gauss_(k, src[q]);
  return out;
}

TensorField ImmersionField::ii_norm() const {
  const int n = dim(), d = ambient();
  TensorField out = TensorField::scalar(grid());
  std::vector<double> a, b;
  for (std::size_t k = 0; k < grid().size(); ++k)
    out(k, 0) = std::sqrt(valued_norm2(ginv_.node_ptr(k), ii_.node_ptr(k), 2, n, d, a, b));
  return out;
}

double ImmersionField::ii_tangential_defect() const {
  const int n = dim(), d = ambient();
  double worst = 0;
  for (std::size_t k = 0; k < grid().size(); ++k) {
    const double* ii = ii_.node_ptr(k);
    const double* dp = dphi_.node_ptr(k);
    double mag = 0;
    for (int c = 0; c < n * n * d; ++c) mag = std::max(mag, std::abs(ii[c]));
    for (int ij = 0; ij < n * n; ++ij)
      for (int a = 0; a < n; ++a) {
        double s = 0, t = 0;
        for (int c = 0; c < d; ++c) {
          s += ii[ij * d + c] * dp[a * d + c];
          t += dp[a * d + c] * dp[a * d + c];
        }
        worst = std::max(worst, std::abs(s) / std::sqrt(t) / std::max(mag, 1e-300));
      }
  }
  return worst;
}

double interior_max(const TensorField& f, int layers) {
  const GridSpec& g = f.grid();
  double worst = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    bool inside = true;
    for (int a = 0; a < g.dim() && inside; ++a) {
      if (g.periodic(a)) continue;
      const int i = g.coord_index(k, a);
      inside = i >= layers && i < g.shape()[a] - layers;
    }
    if (inside) worst = std::max(worst, std::abs(f(k, 0)));
  }
  return worst;
}

TensorField gauss_codazzi_residual(const ImmersionField& phi) {
  const int n = phi.dim(), d = phi.ambient();
  const RiemannField R = riemann_from_christoffel(phi.metric());
  const TensorField& ii = phi.second_fundamental_form();
  TensorField out = TensorField::scalar(phi.grid());
  auto dot = [&](std::size_t k, int a, int b) {
    double s = 0;
    for (int c = 0; c < d; ++c) s += ii(k, a * d + c) * ii(k, b * d + c);
    return s;
  };
  for (std::size_t k = 0; k < phi.grid().size(); ++k) {
    double worst = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          for (int m = 0; m < n; ++m) {
            const double gc = dot(k, i * n + l, j * n + m) - dot(k, i * n + m, j * n + l);
            worst = std::max(worst, std::abs(R.R(k, ((i * n + j) * n + l) * n + m) - gc));
          }
    out(k, 0) = worst;
  }
  return out;
}

EnergyReport energy_En(const ImmersionField& phi, int skip_layers) {
  const int n = phi.dim(), d = phi.ambient();
  if (n % 2) fail(ErrorCode::UnsupportedDimension, "energy E_n needs even n");
  if (n != 2 && n != 4) fail(ErrorCode::UnsupportedDimension, "energy E_n implemented for n = 2 and 4");
  std::vector<double> w = volume_weights(phi);
  const TensorField iin = phi.ii_norm();
  const GridSpec& grid = phi.grid();
  const std::size_t N = grid.size();
  for (std::size_t k = 0; k < N; ++k)
    for (int a = 0; a < n; ++a) {
      if (grid.periodic(a)) continue;
      const int i = grid.coord_index(k, a);
      if (i < skip_layers || i >= grid.shape()[a] - skip_layers) w[k] = 0.0;
    }
  EnergyReport rep;
  rep.dim = n;
  double t0 = 0;
  for (std::size_t k = 0; k < N; ++k) t0 += w[k] * std::pow(iin(k, 0), n);
  rep.terms.push_back(t0);

  if (n == 4) {
    const TensorField& ii = phi.second_fundamental_form();
    const TensorField& dp = phi.differential();
    const TensorField& gi = phi.metric_inverse();
    const TensorField d2 = gradient(dp);
    const TensorField dii = gradient(ii);
    const int nii = n * n * d;
    std::vector<double> t1(N);
    parallel_for(N, [&](std::size_t b, std::size_t e) {
      SmallMat J(n, d);
      std::vector<double> gam(n * n * n), nab(n * nii), va, vb;
      SmallVec v(d), pv(d);
      for (std::size_t k = b; k < e; ++k) {
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < d; ++c) J(a, c) = dp(k, a * d + c);
        SmallMat Gi(n, n);
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) Gi(a, c) = gi(k, a * n + c);
        const SmallMat P = SmallMat::Identity(d, d) - J.transpose() * Gi * J;
        // G^m_ki = g^ml d_l Phi . d_k d_i Phi
        for (int kk = 0; kk < n; ++kk)
          for (int i = 0; i < n; ++i) {
            std::vector<double> low(n, 0.0);
            for (int l = 0; l < n; ++l)
              for (int c = 0; c < d; ++c) low[l] += J(l, c) * d2(k, kk * n * d + i * d + c);
            for (int m = 0; m < n; ++m) {
              double s = 0;
              for (int l = 0; l < n; ++l) s += Gi(m, l) * low[l];
              gam[(m * n + kk) * n + i] = s;
            }
          }
        for (int kk = 0; kk < n; ++kk)
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              for (int c = 0; c < d; ++c) v(c) = dii(k, kk * nii + (i * n + j) * d + c);
              pv = P * v;
              for (int c = 0; c < d; ++c) {
                double s = pv(c);
                for (int m = 0; m < n; ++m)
                  s -= gam[(m * n + kk) * n + i] * ii(k, (m * n + j) * d + c) +
                       gam[(m * n + kk) * n + j] * ii(k, (i * n + m) * d + c);
                nab[kk * nii + (i * n + j) * d + c] = s;
              }
            }
        t1[k] = valued_norm2(gi.node_ptr(k), nab.data(), 3, n, d, va, vb);
      }
    });
    double s = 0;
    for (std::size_t k = 0; k < N; ++k) s += w[k] * t1[k];
    rep.terms.push_back(s);
  }
  for (double t : rep.terms) rep.total += t;
  return rep;
}

CurvatureFromII riemann_lorentz_from_II(const ImmersionField& phi) {
  const int n = phi.dim();
  CurvatureFromII out;
  out.riemann = riemann_lorentz_norm(phi.metric(), {n / 2.0, 1.0});
  const TensorField vol = phi.volume_density();
  out.ii = lorentz_norm(sample_of(phi.ii_norm(), &vol), {double(n), 2.0});
  out.slack = 2.0 * out.ii * out.ii - out.riemann;
  return out;
}

double unit_ball_volume(int m) {
  if (m < 0) fail(ErrorCode::UnsupportedDimension, "negative ball dimension");
  return std::pow(pi, m / 2.0) / std::tgamma(m / 2.0 + 1.0);
}

double brendle_constant(int n, int d) {
  if (n < 2 || d <= n) fail(ErrorCode::UnsupportedDimension, "constant needs d > n >= 2");
  return n * std::pow(double(d) / (d - n) * unit_ball_volume(d) / unit_ball_volume(d - n), 1.0 / n);
}

SobolevCheck brendle_sobolev_check(const ImmersionField& phi, const TensorField& test) {
  const int n = phi.dim(), d = phi.ambient();
  const GridSpec& grid = phi.grid();
  if (n < 2) fail(ErrorCode::UnsupportedDimension, "Sobolev check needs n >= 2");
  if (!(test.grid() == grid) || test.ncomp() != 1) fail(ErrorCode::ShapeMismatch, "test function must be a scalar on the immersion grid");
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (!(test(k, 0) >= 0.0)) fail(ErrorCode::Precondition, "test function must be nonnegative", {test(k, 0), double(k)});

  SobolevCheck out;
  out.ambient = d;
  out.ambient_used = std::max(d, n + 2);
  out.constant = brendle_constant(n, d);
  out.constant_used = brendle_constant(n, out.ambient_used);

  const TensorField vol = phi.volume_density();
  const TensorField& gi = phi.metric_inverse();
  const TensorField& H = phi.mean_curvature();
  const TensorField dt = gradient(test);
  const double p = n / (n - 1.0);
  TensorField pw = TensorField::scalar(grid), bulk = TensorField::scalar(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double f = test(k, 0);
    pw(k, 0) = std::pow(f, p);
    double g2 = 0, h2 = 0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) g2 += gi(k, a * n + b) * dt(k, a) * dt(k, b);
    for (int c = 0; c < d; ++c) h2 += H(k, c) * H(k, c);
    bulk(k, 0) = std::sqrt(std::max(0.0, g2) + n * n * f * f * h2);
  }
  const double mass = integrate(pw, &vol);
  out.bulk = integrate(bulk, &vol);
  const MetricField& g = phi.metric();
  out.boundary = integrate_boundary(test, [&](std::size_t k, int axis) {
    SmallMat m(n - 1, n - 1);
    for (int i = 0, ii = 0; i < n; ++i) {
      if (i == axis) continue;
      for (int j = 0, jj = 0; j < n; ++j) {
        if (j == axis) continue;
        m(ii, jj++) = g(k, i, j);
      }
      ++ii;
    }
    return std::sqrt(std::max(0.0, m.determinant()));
  });
  const double base = std::pow(mass, (n - 1.0) / n);
  out.lhs = out.constant_used * base;
  out.rhs = out.boundary + out.bulk;
  out.margin = out.rhs - out.lhs;
  out.margin_literal = out.rhs - out.constant * base;
  out.holds = out.margin >= 0.0;
  return out;
}

SobolevCheck isoperimetric_check(const ImmersionField& phi) {
  return brendle_sobolev_check(phi, TensorField::scalar(phi.grid(), 1.0));
}

}  // namespace harmo
