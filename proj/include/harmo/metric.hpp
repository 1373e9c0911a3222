#pragma once

#include <Eigen/Dense>

#include "harmo/field.hpp"

namespace harmo {

using SmallMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 8, 8>;
using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;

// Symmetric positive definite g_ij per node with recorded ellipticity
// lambda >= 1: lambda^-1 delta <= g <= lambda delta everywhere.
class MetricField {
 public:
  MetricField() = default;

  // Validates symmetry (entries may differ by at most sym_tol*max|g|, then
  // are symmetrised exactly) and positive definiteness.
  static MetricField from_components(TensorField g, double sym_tol = 1e-12);
  static MetricField flat(const GridSpec& grid);

  const TensorField& components() const { return g_; }
  const GridSpec& grid() const { return g_.grid(); }
  int dim() const { return g_.grid().dim(); }
  double ellipticity() const { return lambda_; }

  SmallMat at(std::size_t node) const;
  double operator()(std::size_t node, int i, int j) const { return g_(node, i * dim() + j); }

  TensorField inverse() const;   // g^ij
  TensorField sqrt_det() const;  // sqrt(det g)
  double max_deviation_from_identity() const;

 private:
  TensorField g_;
  double lambda_ = 1.0;
};

SmallMat node_matrix(const TensorField& f, std::size_t node, int rows, int cols, int offset = 0);
void store_matrix(TensorField& f, std::size_t node, const SmallMat& m, int offset = 0);

}  // namespace harmo
