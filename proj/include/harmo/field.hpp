#pragma once

#include <cstddef>
#include <vector>

#include "harmo/grid.hpp"

namespace harmo {

enum class SymmetryTag { None, SymmetricPair, AntisymmetricPair };

// Node-major array of per-node components. A tensor with `cov` covariant and
// `contra` contravariant indices has n^(cov+contra) components, row-major over
// the indices; `values` > 1 makes the field R^values-valued (immersions,
// Gauss maps), multiplying the component count.
class TensorField {
 public:
  TensorField() = default;
  TensorField(GridSpec grid, int cov, int contra, int values = 1, double fill = 0.0);

  static TensorField scalar(const GridSpec& g, double fill = 0.0) { return TensorField(g, 0, 0, 1, fill); }
  static TensorField vector_valued(const GridSpec& g, int d) { return TensorField(g, 0, 0, d); }

  const GridSpec& grid() const { return grid_; }
  int cov() const { return cov_; }
  int contra() const { return contra_; }
  int values() const { return values_; }
  int ncomp() const { return ncomp_; }
  std::size_t nodes() const { return grid_.size(); }
  SymmetryTag symmetry() const { return sym_; }
  void set_symmetry(SymmetryTag s) { sym_ = s; }

  double& operator()(std::size_t node, int c) { return data_[node * ncomp_ + c]; }
  double operator()(std::size_t node, int c) const { return data_[node * ncomp_ + c]; }
  double* node_ptr(std::size_t node) { return data_.data() + node * ncomp_; }
  const double* node_ptr(std::size_t node) const { return data_.data() + node * ncomp_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  // Extract one component as a scalar field.
  TensorField component(int c) const;
  void set_component(int c, const TensorField& s);

  // Largest violation of the declared pair symmetry over the last two indices.
  double symmetry_defect() const;
  bool compatible(const TensorField& o) const;

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(double s, TensorField a) { return a *= s; }

  double max_abs() const;

 private:
  GridSpec grid_;
  int cov_ = 0, contra_ = 0, values_ = 1, ncomp_ = 1;
  SymmetryTag sym_ = SymmetryTag::None;
  std::vector<double> data_;
};

int ipow(int b, int e);

// Builds a field by evaluating f(point, out) at every node.
template <class F>
TensorField sample(const GridSpec& g, int cov, int contra, int values, F&& f) {
  TensorField t(g, cov, contra, values);
  std::vector<double> x(g.dim());
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int a = 0; a < g.dim(); ++a) x[a] = g.coord(k, a);
    f(x, t.node_ptr(k));
  }
  return t;
}

template <class F>
TensorField sample_scalar(const GridSpec& g, F&& f) {
  return sample(g, 0, 0, 1, [&](const std::vector<double>& x, double* o) { o[0] = f(x); });
}

}  // namespace harmo
