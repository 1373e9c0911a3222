#include "harmo/grid.hpp"

#include <cmath>
#include <sstream>

#include "harmo/error.hpp"

namespace harmo {

const char* to_string(Topology t) {
  switch (t) {
    case Topology::Torus: return "torus";
    case Topology::Box: return "box";
    case Topology::Mixed: return "mixed";
  }
  return "?";
}

GridSpec::GridSpec(std::vector<int> shape, std::vector<double> spacing, std::vector<bool> periodic,
                   std::vector<double> origin)
    : shape_(std::move(shape)),
      spacing_(std::move(spacing)),
      periodic_(std::move(periodic)),
      origin_(std::move(origin)) {
  const std::size_t n = shape_.size();
  if (n < 1) fail(ErrorCode::InvalidGrid, "dimension must be positive");
  if (spacing_.size() != n || periodic_.size() != n)
    fail(ErrorCode::InvalidGrid, "shape/spacing/topology length mismatch");
  if (origin_.empty()) origin_.assign(n, 0.0);
  if (origin_.size() != n) fail(ErrorCode::InvalidGrid, "origin length mismatch");
  for (std::size_t a = 0; a < n; ++a) {
    if (shape_[a] < 5)
      fail(ErrorCode::StencilWidth,
           "axis " + std::to_string(a) + " has " + std::to_string(shape_[a]) + " nodes, need >= 5");
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      fail(ErrorCode::InvalidGrid, "spacing must be positive on axis " + std::to_string(a));
  }
  stride_.assign(n, 1);
  for (int a = static_cast<int>(n) - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * shape_[a + 1];
  size_ = stride_[0] * shape_[0];
}

GridSpec GridSpec::box(std::vector<int> shape, std::vector<double> spacing, std::vector<double> origin) {
  std::vector<bool> p(shape.size(), false);
  return GridSpec(std::move(shape), std::move(spacing), std::move(p), std::move(origin));
}

GridSpec GridSpec::torus(std::vector<int> shape, std::vector<double> spacing, std::vector<double> origin) {
  std::vector<bool> p(shape.size(), true);
  return GridSpec(std::move(shape), std::move(spacing), std::move(p), std::move(origin));
}

GridSpec GridSpec::cube(int dim, int nodes, double lo, double hi) {
  const double h = (hi - lo) / (nodes - 1);
  return box(std::vector<int>(dim, nodes), std::vector<double>(dim, h), std::vector<double>(dim, lo));
}

Topology GridSpec::topology() const {
  bool any = false, all = true;
  for (bool p : periodic_) {
    any = any || p;
    all = all && p;
  }
  if (all) return Topology::Torus;
  if (!any) return Topology::Box;
  return Topology::Mixed;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

double GridSpec::length(int axis) const {
  return spacing_[axis] * (periodic_[axis] ? shape_[axis] : shape_[axis] - 1);
}

std::size_t GridSpec::index(const int* multi) const {
  std::size_t k = 0;
  for (int a = 0; a < dim(); ++a) k += stride_[a] * static_cast<std::size_t>(multi[a]);
  return k;
}

void GridSpec::multi(std::size_t node, int* out) const {
  for (int a = 0; a < dim(); ++a) out[a] = coord_index(node, a);
}

std::vector<int> GridSpec::multi(std::size_t node) const {
  std::vector<int> m(dim());
  multi(node, m.data());
  return m;
}

std::vector<double> GridSpec::point(std::size_t node) const {
  std::vector<double> p(dim());
  for (int a = 0; a < dim(); ++a) p[a] = coord(node, a);
  return p;
}

bool GridSpec::on_boundary(std::size_t node) const {
  for (int a = 0; a < dim(); ++a) {
    if (periodic_[a]) continue;
    const int i = coord_index(node, a);
    if (i == 0 || i == shape_[a] - 1) return true;
  }
  return false;
}

std::vector<double> GridSpec::outward_normal(std::size_t node) const {
  std::vector<double> nu(dim(), 0.0);
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) {
    if (periodic_[a]) continue;
    const int i = coord_index(node, a);
    if (i == 0) nu[a] = -1.0;
    if (i == shape_[a] - 1) nu[a] = 1.0;
    s += nu[a] * nu[a];
  }
  if (s > 0) {
    s = std::sqrt(s);
    for (double& v : nu) v /= s;
  }
  return nu;
}

double GridSpec::node_weight(std::size_t node) const {
  double w = 1.0;
  for (int a = 0; a < dim(); ++a) {
    if (periodic_[a]) continue;
    const int i = coord_index(node, a);
    if (i == 0 || i == shape_[a] - 1) w *= 0.5;
  }
  return w;
}

std::vector<double> GridSpec::quadrature_weights() const {
  std::vector<double> w(size_);
  const double v = cell_volume();
  for (std::size_t k = 0; k < size_; ++k) w[k] = node_weight(k) * v;
  return w;
}

bool GridSpec::same_layout(const GridSpec& o) const {
  return shape_ == o.shape_ && periodic_ == o.periodic_;
}

bool GridSpec::operator==(const GridSpec& o) const {
  return shape_ == o.shape_ && periodic_ == o.periodic_ && spacing_ == o.spacing_ && origin_ == o.origin_;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os << "grid dim=" << dim() << " shape=";
  for (int a = 0; a < dim(); ++a) os << (a ? "," : "") << shape_[a];
  os << " topology=" << to_string(topology());
  return os.str();
}

}  // namespace harmo
