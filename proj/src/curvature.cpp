#include "harmo/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "harmo/error.hpp"
#include "harmo/fd.hpp"

namespace harmo {
namespace {

inline int i4(int n, int i, int j, int k, int l) { return ((i * n + j) * n + k) * n + l; }
inline int i3(int n, int i, int j, int k) { return (i * n + j) * n + k; }

}  // namespace

double RiemannSymmetry::max() const { return std::max({antisym_ij, antisym_kl, pair, bianchi}); }

NodeMask central_region(const GridSpec& g, double frac) {
  return [g, frac](std::size_t k) {
    for (int a = 0; a < g.dim(); ++a) {
      if (g.periodic(a)) continue;
      const double c = g.center(a), half = 0.5 * frac * g.length(a);
      if (std::abs(g.coord(k, a) - c) > half + 1e-12) return false;
    }
    return true;
  };
}

TensorField christoffel(const MetricField& g) {
  const int n = g.dim();
  const TensorField dg = gradient(g.components());  // (a,b,c) = d_a g_bc
  const TensorField ginv = g.inverse();
  TensorField G(g.grid(), 2, 1);
  std::vector<double> low(n * n * n);
  for (std::size_t k = 0; k < g.grid().size(); ++k) {
    const double* d = dg.node_ptr(k);
    const double* gi = ginv.node_ptr(k);
    double* out = G.node_ptr(k);
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          low[i3(n, l, i, j)] = 0.5 * (d[i3(n, i, j, l)] + d[i3(n, j, i, l)] - d[i3(n, l, i, j)]);
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0;
          for (int l = 0; l < n; ++l) s += gi[r * n + l] * low[i3(n, l, i, j)];
          out[i3(n, r, i, j)] = out[i3(n, r, j, i)] = s;
        }
  }
  G.set_symmetry(SymmetryTag::SymmetricPair);
  return G;
}

RiemannSymmetry riemann_symmetry(const RiemannField& rf, const NodeMask& mask) {
  const TensorField& R = rf.R;
  const int n = R.grid().dim();
  RiemannSymmetry s;
  for (std::size_t k = 0; k < R.nodes(); ++k) {
    if (mask && !mask(k)) continue;
    const double* r = R.node_ptr(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double v = r[i4(n, i, j, a, b)];
            s.antisym_ij = std::max(s.antisym_ij, std::abs(v + r[i4(n, j, i, a, b)]));
            s.antisym_kl = std::max(s.antisym_kl, std::abs(v + r[i4(n, i, j, b, a)]));
            s.pair = std::max(s.pair, std::abs(v - r[i4(n, a, b, i, j)]));
            s.bianchi = std::max(s.bianchi, std::abs(v + r[i4(n, j, a, i, b)] + r[i4(n, a, i, j, b)]));
          }
  }
  return s;
}

RiemannField riemann_from_christoffel(const MetricField& g) {
  const int n = g.dim();
  const TensorField G = christoffel(g);
  const TensorField dG = gradient(G);  // (i,l,j,k) = d_i G^l_jk
  const int n3 = n * n * n;
  RiemannField out{TensorField(g.grid(), 4, 0)};
  std::vector<double> mixed(n * n * n * n);  // (i,j,k,l) = R_ijk^l
  for (std::size_t node = 0; node < g.grid().size(); ++node) {
    const double* d = dG.node_ptr(node);
    const double* c = G.node_ptr(node);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = d[i * n3 + i3(n, l, j, k)] - d[j * n3 + i3(n, l, i, k)];
            for (int m = 0; m < n; ++m) v += c[i3(n, m, j, k)] * c[i3(n, l, i, m)] - c[i3(n, m, i, k)] * c[i3(n, l, j, m)];
            mixed[i4(n, i, j, k, l)] = v;
          }
    double* r = out.R.node_ptr(node);
    const double* gm = g.components().node_ptr(node);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = 0;
            for (int p = 0; p < n; ++p) v += gm[k * n + p] * mixed[i4(n, i, j, l, p)];
            r[i4(n, i, j, k, l)] = v;
          }
  }
  return out;
}

RiemannDecomposition riemann_direct(const MetricField& g) {
  const int n = g.dim();
  const TensorField dg = gradient(g.components());  // (a,b,c) = d_a g_bc
  const TensorField d2g = gradient(dg);             // (e,a,b,c) = d_e d_a g_bc
  const TensorField ginv = g.inverse();
  RiemannDecomposition out{RiemannField{TensorField(g.grid(), 4, 0)}, RiemannField{TensorField(g.grid(), 4, 0)},
                           RiemannField{TensorField(g.grid(), 4, 0)}};
  const int n3 = n * n * n;
  std::vector<double> low(n3);  // Gamma_{p,jk}
  for (std::size_t node = 0; node < g.grid().size(); ++node) {
    const double* d = dg.node_ptr(node);
    const double* d2 = d2g.node_ptr(node);
    const double* gi = ginv.node_ptr(node);
    for (int p = 0; p < n; ++p)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          low[i3(n, p, j, k)] = 0.5 * (d[i3(n, j, k, p)] + d[i3(n, k, j, p)] - d[i3(n, p, j, k)]);
    auto dd = [&](int e, int a, int b, int c) { return d2[e * n3 + i3(n, a, b, c)]; };
    double* A = out.A.R.node_ptr(node);
    double* B = out.B.R.node_ptr(node);
    double* S = out.sum.R.node_ptr(node);
    // Riem_{ijkp} = <R(d_i,d_j)d_k, d_p> here; stored with (k,p) swapped.
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int p = 0; p < n; ++p) {
            const double a =
                0.5 * (dd(i, k, j, p) - dd(i, p, j, k) - dd(j, k, i, p) + dd(j, p, i, k));
            double b = 0;
            for (int al = 0; al < n; ++al)
              for (int q = 0; q < n; ++q) {
                const double giq = gi[al * n + q];
                b += -d[i3(n, i, al, p)] * giq * low[i3(n, q, j, k)] + d[i3(n, j, p, al)] * giq * low[i3(n, q, i, k)] +
                     low[i3(n, p, i, al)] * giq * low[i3(n, q, j, k)] - low[i3(n, p, j, al)] * giq * low[i3(n, q, i, k)];
              }
            const int idx = i4(n, i, j, p, k);
            A[idx] = a;
            B[idx] = b;
            S[idx] = a + b;
          }
  }
  return out;
}

TensorField ricci(const MetricField& g, const RiemannField& r) {
  const int n = g.dim();
  const TensorField ginv = g.inverse();
  TensorField ric(g.grid(), 2, 0);
  for (std::size_t node = 0; node < g.grid().size(); ++node) {
    const double* R = r.R.node_ptr(node);
    const double* gi = ginv.node_ptr(node);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0;
        for (int i = 0; i < n; ++i)
          for (int m = 0; m < n; ++m) s += gi[i * n + m] * R[i4(n, i, j, m, k)];
        ric(node, j * n + k) = s;
      }
  }
  return ric;
}

TensorField ricci(const MetricField& g) { return ricci(g, riemann_from_christoffel(g)); }

TensorField harmonic_defect(const MetricField& g) {
  const int n = g.dim();
  const TensorField G = christoffel(g);
  const TensorField ginv = g.inverse();
  TensorField out(g.grid(), 0, 1);
  for (std::size_t node = 0; node < g.grid().size(); ++node) {
    const double* c = G.node_ptr(node);
    const double* gi = ginv.node_ptr(node);
    for (int r = 0; r < n; ++r) {
      double s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += gi[i * n + j] * c[i3(n, r, i, j)];
      out(node, r) = s;
    }
  }
  return out;
}

TensorField covariant_norm(const TensorField& ginv, const TensorField& t, int rank) {
  const int n = ginv.grid().dim();
  const int nc = ipow(n, rank);
  if (t.ncomp() != nc) fail(ErrorCode::ShapeMismatch, "covariant_norm rank mismatch");
  TensorField out = TensorField::scalar(t.grid());
  std::vector<double> a(nc), b(nc);
  for (std::size_t node = 0; node < t.nodes(); ++node) {
    const double* gi = ginv.node_ptr(node);
    const double* v = t.node_ptr(node);
    std::copy(v, v + nc, a.begin());
    // raise one index at a time: slot s has stride n^(rank-1-s)
    for (int s = 0; s < rank; ++s) {
      const int stride = ipow(n, rank - 1 - s);
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
    for (int c = 0; c < nc; ++c) s2 += a[c] * v[c];
    out(node, 0) = std::sqrt(std::max(0.0, s2));
  }
  return out;
}

TensorField riemann_norm(const MetricField& g, const RiemannField& r) {
  return covariant_norm(g.inverse(), r.R, 4);
}

TensorField volume_density(const MetricField& g) { return g.sqrt_det(); }

double riemann_lorentz_norm(const MetricField& g, const RiemannField& r, LorentzExponent e) {
  const TensorField mag = riemann_norm(g, r);
  const TensorField vol = volume_density(g);
  return lorentz_norm(sample_of(mag, &vol), e);
}

double riemann_lorentz_norm(const MetricField& g, LorentzExponent e) {
  return riemann_lorentz_norm(g, riemann_from_christoffel(g), e);
}

TensorField laplace_beltrami_apply(const MetricField& g, const TensorField& u) {
  const int n = g.dim();
  if (u.ncomp() != 1) fail(ErrorCode::ShapeMismatch, "Laplace-Beltrami expects a scalar");
  const TensorField du = gradient(u);
  const TensorField ginv = g.inverse();
  const TensorField sg = g.sqrt_det();
  TensorField out = TensorField::scalar(g.grid());
  for (int a = 0; a < n; ++a) {
    TensorField flux = TensorField::scalar(g.grid());
    for (std::size_t k = 0; k < g.grid().size(); ++k) {
      double s = 0;
      for (int b = 0; b < n; ++b) s += ginv(k, a * n + b) * du(k, b);
      flux(k, 0) = sg(k, 0) * s;
    }
    out += partial_derivative(flux, a);
  }
  for (std::size_t k = 0; k < g.grid().size(); ++k) out(k, 0) /= sg(k, 0);
  return out;
}

TensorField covariant_derivative_oneform(const MetricField& g, const TensorField& alpha) {
  const int n = g.dim();
  if (alpha.ncomp() != n) fail(ErrorCode::ShapeMismatch, "expected a 1-form");
  const TensorField da = gradient(alpha);  // (j,i) = d_j a_i
  const TensorField G = christoffel(g);
  TensorField out(g.grid(), 2, 0);
  for (std::size_t k = 0; k < g.grid().size(); ++k) {
    const double* c = G.node_ptr(k);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = da(k, j * n + i);
        for (int m = 0; m < n; ++m) s -= c[i3(n, m, j, i)] * alpha(k, m);
        out(k, j * n + i) = s;
      }
  }
  return out;
}

Codifferential codifferential_oneform(const MetricField& g, const TensorField& alpha) {
  const int n = g.dim();
  if (alpha.ncomp() != n) fail(ErrorCode::ShapeMismatch, "expected a 1-form");
  const TensorField da = gradient(alpha);
  const TensorField G = christoffel(g);
  const TensorField ginv = g.inverse();
  Codifferential out{TensorField::scalar(g.grid()), TensorField::scalar(g.grid()), TensorField::scalar(g.grid())};
  for (std::size_t k = 0; k < g.grid().size(); ++k) {
    const double* gi = ginv.node_ptr(k);
    const double* c = G.node_ptr(k);
    double eu = 0, corr = 0;
    for (int m = 0; m < n; ++m) eu -= da(k, m * n + m);
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l) {
        corr -= (gi[m * n + l] - (m == l ? 1.0 : 0.0)) * da(k, l * n + m);
        for (int p = 0; p < n; ++p) corr += gi[m * n + l] * c[i3(n, p, l, m)] * alpha(k, p);
      }
    out.euclidean(k, 0) = eu;
    out.correction(k, 0) = corr;
    out.total(k, 0) = eu + corr;
  }
  return out;
}

}  // namespace harmo
