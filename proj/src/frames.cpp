#include "harmo/frames.hpp"

#include <cmath>

#include "harmo/error.hpp"
#include "harmo/fd.hpp"

namespace harmo {

CoframeField gram_schmidt_coframe(const MetricField& g) {
  const int n = g.dim();
  const TensorField ginv = g.inverse();
  CoframeField out{TensorField(g.grid(), 1, 1)};
  for (std::size_t k = 0; k < g.grid().size(); ++k) {
    const SmallMat gi = node_matrix(ginv, k, n, n);
    Eigen::LLT<SmallMat> llt(gi);
    if (llt.info() != Eigen::Success) fail(ErrorCode::EllipticityViolation, "inverse metric not positive definite", {double(k)});
    const SmallMat L = llt.matrixL();
    const SmallMat W = L.triangularView<Eigen::Lower>().solve(SmallMat::Identity(n, n));
    store_matrix(out.W, k, W);
  }
  return out;
}

double orthonormality_residual(const MetricField& g, const CoframeField& W) {
  const int n = g.dim();
  const TensorField ginv = g.inverse();
  double r = 0;
  for (std::size_t k = 0; k < g.grid().size(); ++k) {
    const SmallMat w = node_matrix(W.W, k, n, n);
    const SmallMat e = w * node_matrix(ginv, k, n, n) * w.transpose() - SmallMat::Identity(n, n);
    r = std::max(r, e.cwiseAbs().maxCoeff());
  }
  return r;
}

double min_det(const CoframeField& W) {
  const int n = W.dim();
  double m = INFINITY;
  for (std::size_t k = 0; k < W.grid().size(); ++k) m = std::min(m, node_matrix(W.W, k, n, n).determinant());
  return m;
}

CoframeField rotate_coframe(const CoframeField& W, const TensorField& R) {
  const int n = W.dim();
  CoframeField out{W.W};
  for (std::size_t k = 0; k < W.grid().size(); ++k)
    store_matrix(out.W, k, node_matrix(R, k, n, n) * node_matrix(W.W, k, n, n));
  return out;
}

ConnectionForms connection_forms(const MetricField& g, const CoframeField& W) {
  return connection_forms(christoffel(g), W);
}

ConnectionForms connection_forms(const TensorField& G, const CoframeField& W) {
  const int n = W.dim();
  const int n2 = n * n;
  const TensorField dW = gradient(W.W);
  ConnectionForms c{TensorField(W.grid(), 3, 0), 0.0};
  SmallMat Gk(n, n), dWk(n, n);
  for (std::size_t node = 0; node < W.grid().size(); ++node) {
    const SmallMat w = node_matrix(W.W, node, n, n);
    const SmallMat E = w.inverse();
    for (int k = 0; k < n; ++k) {
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
          Gk(b, d) = G(node, (b * n + k) * n + d);
          dWk(b, d) = dW(node, k * n2 + b * n + d);
        }
      const SmallMat A = -dWk * E + w * Gk * E;
      c.raw_skew_defect = std::max(c.raw_skew_defect, (A + A.transpose()).cwiseAbs().maxCoeff());
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c.A(node, (i * n + j) * n + k) = 0.5 * (A(i, j) - A(j, i));
    }
  }
  c.A.set_symmetry(SymmetryTag::None);
  return c;
}

double structure_residual(const CoframeField& W, const ConnectionForms& c, const NodeMask& mask) {
  const int n = W.dim();
  const int n2 = n * n;
  const TensorField dW = gradient(W.W);
  double r = 0;
  for (std::size_t node = 0; node < W.grid().size(); ++node) {
    if (mask && !mask(node)) continue;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          double v = dW(node, k * n2 + i * n + l) - dW(node, l * n2 + i * n + k);
          for (int j = 0; j < n; ++j)
            v -= W.W(node, j * n + k) * c.A(node, (i * n + j) * n + l) - W.W(node, j * n + l) * c.A(node, (i * n + j) * n + k);
          r = std::max(r, std::abs(v));
        }
  }
  return r;
}

FrameCodifferential frame_codifferential(const MetricField& g, const CoframeField& W, const ConnectionForms& c) {
  const int n = g.dim();
  const GridSpec& grid = g.grid();
  FrameCodifferential out{TensorField(grid, 0, 1), TensorField(grid, 0, 1)};
  for (int i = 0; i < n; ++i) {
    TensorField row(grid, 1, 0);
    for (std::size_t k = 0; k < grid.size(); ++k)
      for (int a = 0; a < n; ++a) row(k, a) = W.W(k, i * n + a);
    const Codifferential d = codifferential_oneform(g, row);
    for (std::size_t k = 0; k < grid.size(); ++k) out.dstar(k, i) = d.total(k, 0);
  }
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const SmallMat E = node_matrix(W.W, k, n, n).inverse();
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m) s += c.A(k, (i * n + j) * n + m) * E(m, j);
      out.contraction(k, i) = s;
    }
  }
  return out;
}

TensorField curvature_two_forms(const ConnectionForms& c) {
  const int n = c.dim();
  const int n3 = n * n * n;
  const TensorField dA = gradient(c.A);
  TensorField F(c.A.grid(), 4, 0);
  for (std::size_t node = 0; node < F.nodes(); ++node)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double v = dA(node, k * n3 + (i * n + j) * n + l) - dA(node, l * n3 + (i * n + j) * n + k);
            for (int m = 0; m < n; ++m)
              v += c.A(node, (i * n + m) * n + k) * c.A(node, (m * n + j) * n + l) -
                   c.A(node, (i * n + m) * n + l) * c.A(node, (m * n + j) * n + k);
            F(node, ((i * n + j) * n + k) * n + l) = v;
          }
  return F;
}

RiemannField riemann_from_frame(const CoframeField& W, const TensorField& F) {
  const int n = W.dim();
  RiemannField r{TensorField(W.grid(), 4, 0)};
  for (std::size_t node = 0; node < F.nodes(); ++node)
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q) {
            double v = 0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                v += W.W(node, i * n + p) * W.W(node, j * n + q) * F(node, ((i * n + j) * n + k) * n + l);
            r.R(node, ((k * n + l) * n + p) * n + q) = v;
          }
  return r;
}

namespace {

bool has_boundary(const GridSpec& g) {
  for (int a = 0; a < g.dim(); ++a)
    if (!g.periodic(a)) return true;
  return false;
}

double normal_component(const ConnectionForms& c, std::size_t node, int i, int j, const std::vector<double>& nu) {
  const int n = c.dim();
  double s = 0;
  for (int k = 0; k < n; ++k) s += c.A(node, (i * n + j) * n + k) * nu[k];
  return s;
}

}  // namespace

CoulombResidual coulomb_residual(const ConnectionForms& c) {
  const int n = c.dim();
  const GridSpec& g = c.A.grid();
  CoulombResidual out;
  std::vector<TensorField> dA;
  for (int k = 0; k < n; ++k) dA.push_back(partial_derivative(c.A, k));
  const LorentzExponent e{0.5 * n, 1.0};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      TensorField div = TensorField::scalar(g);
      for (std::size_t node = 0; node < g.size(); ++node) {
        double s = 0;
        for (int k = 0; k < n; ++k) s -= dA[k](node, (i * n + j) * n + k);
        div(node, 0) = s;
      }
      out.interior = std::max(out.interior, lorentz_norm(sample_of(div), e));
    }
  if (!has_boundary(g)) {
    out.status = "periodic grid: no boundary";
    return out;
  }
  for (std::size_t node = 0; node < g.size(); ++node) {
    if (!g.on_boundary(node)) continue;
    const auto nu = g.outward_normal(node);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.boundary = std::max(out.boundary, std::abs(normal_component(c, node, i, j, nu)));
  }
  return out;
}

double connection_objective(const ConnectionForms& c) {
  const int n = c.dim();
  const GridSpec& g = c.A.grid();
  TensorField bulk = TensorField::scalar(g), bdry = TensorField::scalar(g);
  for (std::size_t node = 0; node < g.size(); ++node) {
    double s = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k) s += c.A(node, (i * n + j) * n + k) * c.A(node, (i * n + j) * n + k);
    bulk(node, 0) = s;
    if (g.on_boundary(node)) {
      const auto nu = g.outward_normal(node);
      double b = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) b += std::pow(normal_component(c, node, i, j, nu), 2);
      bdry(node, 0) = b;
    }
  }
  double J = integrate(bulk);
  if (has_boundary(g)) J += integrate_boundary(bdry);
  return J;
}

double connection_lorentz_norm(const ConnectionForms& c, LorentzExponent e) {
  const int n = c.dim();
  const GridSpec& g = c.A.grid();
  double best = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      TensorField f(g, 1, 0);
      for (std::size_t node = 0; node < g.size(); ++node)
        for (int k = 0; k < n; ++k) f(node, k) = c.A(node, (i * n + j) * n + k);
      best = std::max(best, lorentz_norm(sample_of(f), e));
    }
  return best;
}

}  // namespace harmo
