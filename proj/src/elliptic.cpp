#include "harmo/elliptic.hpp"

#include <cmath>

#include "harmo/error.hpp"
#include "harmo/simd.hpp"
#include "json.hpp"

namespace harmo {

namespace {

double harmonic_mean(double a, double b) { return (a + b > 0) ? 2 * a * b / (a + b) : 0.0; }

// 1/2 for every non-periodic axis other than `skip` on which the node sits
// on a face.
double face_factor(const GridSpec& g, std::size_t node, int skip) {
  double w = 1.0;
  for (int b = 0; b < g.dim(); ++b) {
    if (b == skip || g.periodic(b)) continue;
    const int i = g.coord_index(node, b);
    if (i == 0 || i == g.shape()[b] - 1) w *= 0.5;
  }
  return w;
}

}  // namespace

WeakLaplacian::WeakLaplacian(const MetricField& g, BoundaryKind bc) : grid_(g.grid()), bc_(bc), n_(g.dim()) {
  const int n = n_;
  const std::size_t N = grid_.size();
  const double V = grid_.cell_volume();
  const TensorField ginv = g.inverse();
  const TensorField vol = g.sqrt_det();
  K_ = TensorField(grid_, 0, 2);
  bool offdiag = false;
  for (std::size_t k = 0; k < N; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const double v = vol(k, 0) * ginv(k, a * n + b);
        K_(k, a * n + b) = v;
        if (a != b && v != 0.0) offdiag = true;
      }
  mass_.resize(N);
  for (std::size_t k = 0; k < N; ++k) mass_[k] = vol(k, 0) * grid_.node_weight(k) * V;

  diag_.assign(N, 0.0);
  edge_coef_.assign(n, std::vector<double>(N, 0.0));
  for (int a = 0; a < n; ++a) {
    const double h = grid_.spacing()[a];
    const int Na = grid_.shape()[a];
    const std::size_t s = grid_.stride(a);
    for (std::size_t k = 0; k < N; ++k) {
      const int i = grid_.coord_index(k, a);
      std::size_t nb;
      if (i + 1 < Na)
        nb = k + s;
      else if (grid_.periodic(a))
        nb = k - static_cast<std::size_t>(Na - 1) * s;
      else
        continue;
      const double c = harmonic_mean(K_(k, a * n + a), K_(nb, a * n + a)) * face_factor(grid_, k, a) * V / (h * h);
      edge_coef_[a][k] = c;
      diag_[k] += c;
      diag_[nb] += c;
    }
  }

  if (offdiag) {
    const int corners = 1 << n;
    const double share = static_cast<double>(corners / 2);
    std::vector<std::size_t> cidx(corners);
    for (std::size_t k = 0; k < N; ++k) {
      bool origin = true;
      for (int a = 0; a < n; ++a)
        if (!grid_.periodic(a) && grid_.coord_index(k, a) == grid_.shape()[a] - 1) origin = false;
      if (!origin) continue;
      Cell cell{k, std::vector<double>(n * n, 0.0)};
      cell_corners(k, cidx.data());
      for (int m = 0; m < corners; ++m)
        for (int c = 0; c < n * n; ++c) cell.K[c] += K_(cidx[m], c) / corners;
      for (int m = 0; m < corners; ++m) {
        double d = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const double sa = (m >> a & 1) ? 1.0 : -1.0, sb = (m >> b & 1) ? 1.0 : -1.0;
            d += cell.K[a * n + b] * V * sa * sb /
                 (share * grid_.spacing()[a] * share * grid_.spacing()[b]);
          }
        diag_[cidx[m]] += d;
      }
      cells_.push_back(std::move(cell));
    }
  }
}

void WeakLaplacian::cell_corners(std::size_t origin, std::size_t* corners) const {
  const int n = n_;
  for (int m = 0; m < (1 << n); ++m) {
    std::size_t idx = origin;
    for (int a = 0; a < n; ++a) {
      if (!(m >> a & 1)) continue;
      const std::size_t s = grid_.stride(a);
      if (grid_.coord_index(origin, a) + 1 < grid_.shape()[a])
        idx += s;
      else
        idx -= static_cast<std::size_t>(grid_.shape()[a] - 1) * s;
    }
    corners[m] = idx;
  }
}

void WeakLaplacian::edge_pass(const double* u, double* out, std::vector<double>& flux) const {
  const auto& K = simd::active();
  const std::size_t N = grid_.size();
  for (int a = 0; a < n_; ++a) {
    const std::size_t s = grid_.stride(a);
    const std::size_t Na = static_cast<std::size_t>(grid_.shape()[a]);
    const std::size_t block = Na * s;
    const double* coef = edge_coef_[a].data();
    for (std::size_t base = 0; base < N; base += block) {
      const std::size_t len = (Na - 1) * s;
      K.edge_flux(coef + base, u + base, u + base + s, flux.data(), len);
      K.axpy(-1.0, flux.data(), out + base, len);
      K.axpy(1.0, flux.data(), out + base + s, len);
      if (grid_.periodic(a)) {
        const std::size_t last = base + len;
        K.edge_flux(coef + last, u + last, u + base, flux.data(), s);
        K.axpy(-1.0, flux.data(), out + last, s);
        K.axpy(1.0, flux.data(), out + base, s);
      }
    }
  }
}

void WeakLaplacian::apply(const double* u, double* out) const {
  const std::size_t N = grid_.size();
  std::fill(out, out + N, 0.0);
  std::vector<double> flux(N);
  edge_pass(u, out, flux);
  if (cells_.empty()) return;
  const int n = n_, corners = 1 << n;
  const double share = static_cast<double>(corners / 2);
  const double V = grid_.cell_volume();
  std::vector<std::size_t> c(corners);
  std::vector<double> G(n), F(n);
  for (const Cell& cell : cells_) {
    cell_corners(cell.origin, c.data());
    for (int b = 0; b < n; ++b) {
      double s = 0;
      for (int m = 0; m < corners; ++m)
        if (!(m >> b & 1)) s += u[c[m | (1 << b)]] - u[c[m]];
      G[b] = s / (share * grid_.spacing()[b]);
    }
    for (int a = 0; a < n; ++a) {
      double f = 0;
      for (int b = 0; b < n; ++b)
        if (b != a) f += cell.K[a * n + b] * G[b];
      const double phi = V * f / (share * grid_.spacing()[a]);
      for (int m = 0; m < corners; ++m)
        if (!(m >> a & 1)) {
          out[c[m]] -= phi;
          out[c[m | (1 << a)]] += phi;
        }
    }
  }
}

std::vector<double> WeakLaplacian::apply(const std::vector<double>& u) const {
  if (u.size() != size()) fail(ErrorCode::ShapeMismatch, "vector length does not match the grid");
  std::vector<double> out(size());
  apply(u.data(), out.data());
  return out;
}

std::vector<double> WeakLaplacian::rhs_from_source(const TensorField& f) const {
  if (f.ncomp() != 1 || !f.grid().same_layout(grid_)) fail(ErrorCode::ShapeMismatch, "scalar source on the operator grid expected");
  std::vector<double> b(size());
  for (std::size_t k = 0; k < size(); ++k) b[k] = f(k, 0) * mass_[k];
  return b;
}

std::vector<double> WeakLaplacian::rhs_from_oneform(const TensorField& alpha) const {
  const int n = n_;
  if (alpha.ncomp() != n || !alpha.grid().same_layout(grid_)) fail(ErrorCode::ShapeMismatch, "1-form on the operator grid expected");
  const std::size_t N = size();
  std::vector<double> b(N, 0.0);
  for (int a = 0; a < n; ++a) {
    const double h = grid_.spacing()[a];
    const int Na = grid_.shape()[a];
    const std::size_t s = grid_.stride(a);
    for (std::size_t k = 0; k < N; ++k) {
      const double c = edge_coef_[a][k];
      if (c == 0.0) continue;
      const std::size_t nb = (grid_.coord_index(k, a) + 1 < Na) ? k + s : k - static_cast<std::size_t>(Na - 1) * s;
      const double phi = c * h * 0.5 * (alpha(k, a) + alpha(nb, a));
      b[k] -= phi;
      b[nb] += phi;
    }
  }
  if (cells_.empty()) return b;
  const int corners = 1 << n;
  const double share = static_cast<double>(corners / 2);
  const double V = grid_.cell_volume();
  std::vector<std::size_t> c(corners);
  std::vector<double> avg(n);
  for (const Cell& cell : cells_) {
    cell_corners(cell.origin, c.data());
    std::fill(avg.begin(), avg.end(), 0.0);
    for (int m = 0; m < corners; ++m)
      for (int a = 0; a < n; ++a) avg[a] += alpha(c[m], a) / corners;
    for (int a = 0; a < n; ++a) {
      double f = 0;
      for (int bb = 0; bb < n; ++bb)
        if (bb != a) f += cell.K[a * n + bb] * avg[bb];
      const double phi = V * f / (share * grid_.spacing()[a]);
      for (int m = 0; m < corners; ++m)
        if (!(m >> a & 1)) {
          b[c[m]] -= phi;
          b[c[m | (1 << a)]] += phi;
        }
    }
  }
  return b;
}

void WeakLaplacian::add_boundary_flux(std::vector<double>& rhs,
                                      const std::function<double(std::size_t, int, int)>& q) const {
  if (rhs.size() != size()) fail(ErrorCode::ShapeMismatch, "rhs length does not match the grid");
  for (std::size_t k = 0; k < size(); ++k)
    for (int a = 0; a < n_; ++a) {
      if (grid_.periodic(a)) continue;
      const int i = grid_.coord_index(k, a);
      for (int side = 0; side < 2; ++side) {
        if (i != (side ? grid_.shape()[a] - 1 : 0)) continue;
        double w = face_factor(grid_, k, a);
        for (int b = 0; b < n_; ++b)
          if (b != a) w *= grid_.spacing()[b];
        rhs[k] += q(k, a, side) * w;
      }
    }
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["iterations"] = iterations;
  j["relative_residual"] = relative_residual;
  j["compatibility_defect"] = compatibility_defect;
  j["recentered"] = recentered;
  j["converged"] = converged;
  j["residual_curve"] = residual_curve;
  return j.dump();
}

Solution solve(const WeakLaplacian& A, std::vector<double> rhs, const SolveOptions& opt,
               const std::vector<double>* boundary, const std::vector<double>* x0) {
  const GridSpec& g = A.grid();
  const std::size_t N = g.size();
  if (rhs.size() != N) fail(ErrorCode::ShapeMismatch, "rhs length does not match the grid");
  if (!(opt.tol > 0) || opt.maxiter < 0) fail(ErrorCode::Config, "solver tolerance must be positive");
  const auto& K = simd::active();
  SolveReport rep;

  const bool dirichlet = A.bc() == BoundaryKind::Dirichlet;
  std::vector<double> mask(N, 1.0);
  std::vector<double> x(N, 0.0), bref;
  if (x0) {
    if (x0->size() != N) fail(ErrorCode::ShapeMismatch, "initial guess length does not match the grid");
    x = *x0;
  }
  if (dirichlet) {
    if (!boundary || boundary->size() != N) fail(ErrorCode::Precondition, "Dirichlet solve needs boundary values");
    std::size_t nb = 0;
    for (std::size_t k = 0; k < N; ++k)
      if (g.on_boundary(k)) {
        mask[k] = 0.0;
        x[k] = (*boundary)[k];
        ++nb;
      }
    if (nb == 0) fail(ErrorCode::Precondition, "Dirichlet problem on a grid without boundary");
    // reference norm: residual of the zero-interior guess
    std::vector<double> xb(N, 0.0);
    for (std::size_t k = 0; k < N; ++k)
      if (mask[k] == 0.0) xb[k] = x[k];
    bref.resize(N);
    const std::vector<double> ab = A.apply(xb);
    for (std::size_t k = 0; k < N; ++k) bref[k] = mask[k] * (rhs[k] - ab[k]);
  } else {
    double sum = 0, abs = 0;
    for (double v : rhs) {
      sum += v;
      abs += std::abs(v);
    }
    rep.compatibility_defect = abs > 0 ? std::abs(sum) / abs : 0.0;
    if (rep.compatibility_defect > opt.compat_tol)
      fail(ErrorCode::Compatibility, "Neumann right-hand side has nonzero mean", {rep.compatibility_defect});
    if (sum != 0.0) {
      const double shift = sum / static_cast<double>(N);
      for (double& v : rhs) v -= shift;
      rep.recentered = true;
    }
  }

  auto project = [&](std::vector<double>& v) {
    if (dirichlet) {
      K.mul(mask.data(), v.data(), v.data(), N);
      return;
    }
    double s = 0;
    for (double e : v) s += e;
    const double shift = s / static_cast<double>(N);
    for (double& e : v) e -= shift;
  };

  // residual r = b - A x, restricted to the active rows
  std::vector<double> r(N), Ax(N);
  A.apply(x.data(), Ax.data());
  for (std::size_t k = 0; k < N; ++k) r[k] = rhs[k] - Ax[k];
  if (!dirichlet) bref = rhs;
  const double bnorm = std::sqrt(K.dot(bref.data(), bref.data(), N));
  project(r);

  auto finish = [&]() {
    if (!dirichlet) {
      const auto& w = A.mass();
      double s = 0, m = 0;
      for (std::size_t k = 0; k < N; ++k) {
        s += w[k] * x[k];
        m += w[k];
      }
      for (double& e : x) e -= s / m;
    }
    TensorField u = TensorField::scalar(g);
    u.data() = x;
    return Solution{std::move(u), rep};
  };

  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    if (dirichlet)
      for (std::size_t k = 0; k < N; ++k)
        if (mask[k] == 0.0) x[k] = (*boundary)[k];
    rep.converged = true;
    rep.residual_curve.push_back(0.0);
    return finish();
  }

  std::vector<double> dinv(N);
  for (std::size_t k = 0; k < N; ++k) {
    const double d = A.diagonal()[k];
    dinv[k] = d > 0 ? 1.0 / d : 1.0;
  }
  double rel = std::sqrt(K.dot(r.data(), r.data(), N)) / bnorm;
  rep.residual_curve.push_back(rel);
  std::vector<double> z(N), p(N), Ap(N);
  K.mul(dinv.data(), r.data(), z.data(), N);
  if (dirichlet) K.mul(mask.data(), z.data(), z.data(), N);
  p = z;
  double rz = K.dot(r.data(), z.data(), N);
  int it = 0;
  while (rel > opt.tol && it < opt.maxiter) {
    A.apply(p.data(), Ap.data());
    if (dirichlet) K.mul(mask.data(), Ap.data(), Ap.data(), N);
    const double pAp = K.dot(p.data(), Ap.data(), N);
    if (!(pAp > 0)) break;
    const double alpha = rz / pAp;
    K.axpy(alpha, p.data(), x.data(), N);
    K.axpy(-alpha, Ap.data(), r.data(), N);
    project(r);
    ++it;
    rel = std::sqrt(K.dot(r.data(), r.data(), N)) / bnorm;
    rep.residual_curve.push_back(rel);
    K.mul(dinv.data(), r.data(), z.data(), N);
    if (dirichlet) K.mul(mask.data(), z.data(), z.data(), N);
    const double rz_new = K.dot(r.data(), z.data(), N);
    K.xpay(z.data(), rz_new / rz, p.data(), N);
    rz = rz_new;
  }
  rep.iterations = it;
  rep.relative_residual = rel;
  rep.converged = rel <= opt.tol;
  if (!rep.converged) fail(ErrorCode::NonConvergence, "conjugate gradient did not reach the tolerance", rep.residual_curve);
  return finish();
}

}  // namespace harmo
