#include "harmo/metric.hpp"

#include <cmath>

#include "harmo/error.hpp"

namespace harmo {

SmallMat node_matrix(const TensorField& f, std::size_t node, int rows, int cols, int offset) {
  SmallMat m(rows, cols);
  const double* p = f.node_ptr(node) + offset;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = p[i * cols + j];
  return m;
}

void store_matrix(TensorField& f, std::size_t node, const SmallMat& m, int offset) {
  double* p = f.node_ptr(node) + offset;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) p[i * m.cols() + j] = m(i, j);
}

MetricField MetricField::from_components(TensorField g, double sym_tol) {
  const int n = g.grid().dim();
  if (g.ncomp() != n * n || g.values() != 1) fail(ErrorCode::ShapeMismatch, "metric needs n*n components per node");
  double worst = 0.0;
  std::size_t worst_node = 0;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    double* p = g.node_ptr(k);
    double scale = 0.0;
    for (int c = 0; c < n * n; ++c) {
      if (!std::isfinite(p[c])) fail(ErrorCode::EllipticityViolation, "non-finite metric entry", {double(k)});
      scale = std::max(scale, std::abs(p[c]));
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double d = std::abs(p[i * n + j] - p[j * n + i]);
        if (d > sym_tol * scale && d > worst) {
          worst = d;
          worst_node = k;
        }
        const double avg = 0.5 * (p[i * n + j] + p[j * n + i]);
        p[i * n + j] = p[j * n + i] = avg;
      }
  }
  if (worst > 0.0)
    fail(ErrorCode::Symmetry,
         "metric not symmetric: |g_ij - g_ji| = " + std::to_string(worst) + " at node " + std::to_string(worst_node),
         {worst, double(worst_node)});
  MetricField m;
  double lam = 1.0;
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    Eigen::SelfAdjointEigenSolver<SmallMat> es(node_matrix(g, k, n, n), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()(0), hi = es.eigenvalues()(n - 1);
    if (!(lo > 0.0))
      fail(ErrorCode::EllipticityViolation, "metric not positive definite at node " + std::to_string(k), {lo, double(k)});
    lam = std::max({lam, hi, 1.0 / lo});
  }
  g.set_symmetry(SymmetryTag::SymmetricPair);
  m.g_ = std::move(g);
  m.lambda_ = lam;
  return m;
}

MetricField MetricField::flat(const GridSpec& grid) {
  const int n = grid.dim();
  TensorField g(grid, 2, 0);
  for (std::size_t k = 0; k < grid.size(); ++k)
    for (int i = 0; i < n; ++i) g(k, i * n + i) = 1.0;
  return from_components(std::move(g));
}

SmallMat MetricField::at(std::size_t node) const { return node_matrix(g_, node, dim(), dim()); }

TensorField MetricField::inverse() const {
  TensorField inv(grid(), 0, 2);
  for (std::size_t k = 0; k < g_.nodes(); ++k) {
    SmallMat gi = at(k).inverse();
    gi = 0.5 * (gi + gi.transpose()).eval();
    store_matrix(inv, k, gi);
  }
  inv.set_symmetry(SymmetryTag::SymmetricPair);
  return inv;
}

TensorField MetricField::sqrt_det() const {
  TensorField s = TensorField::scalar(grid());
  for (std::size_t k = 0; k < g_.nodes(); ++k) s(k, 0) = std::sqrt(at(k).determinant());
  return s;
}

double MetricField::max_deviation_from_identity() const {
  const int n = dim();
  double m = 0.0;
  for (std::size_t k = 0; k < g_.nodes(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m = std::max(m, std::abs(g_(k, i * n + j) - (i == j ? 1.0 : 0.0)));
  return m;
}

}  // namespace harmo
