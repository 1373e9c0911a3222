#include "harmo/field.hpp"

#include <algorithm>
#include <cmath>

#include "harmo/error.hpp"

namespace harmo {

int ipow(int b, int e) {
  int r = 1;
  while (e-- > 0) r *= b;
  return r;
}

TensorField::TensorField(GridSpec grid, int cov, int contra, int values, double fill)
    : grid_(std::move(grid)), cov_(cov), contra_(contra), values_(values) {
  if (cov < 0 || contra < 0 || values < 1) fail(ErrorCode::ShapeMismatch, "invalid rank");
  ncomp_ = ipow(grid_.dim(), cov + contra) * values;
  data_.assign(grid_.size() * ncomp_, fill);
}

TensorField TensorField::component(int c) const {
  TensorField s = scalar(grid_);
  for (std::size_t k = 0; k < nodes(); ++k) s(k, 0) = (*this)(k, c);
  return s;
}

void TensorField::set_component(int c, const TensorField& s) {
  for (std::size_t k = 0; k < nodes(); ++k) (*this)(k, c) = s(k, 0);
}

double TensorField::symmetry_defect() const {
  if (sym_ == SymmetryTag::None || cov_ + contra_ < 2) return 0.0;
  const int n = grid_.dim();
  const int blocks = ncomp_ / (n * n);
  const double sgn = sym_ == SymmetryTag::SymmetricPair ? 1.0 : -1.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < nodes(); ++k) {
    const double* p = node_ptr(k);
    for (int b = 0; b < blocks; ++b)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
          worst = std::max(worst, std::abs(p[b * n * n + i * n + j] - sgn * p[b * n * n + j * n + i]));
  }
  return worst;
}

bool TensorField::compatible(const TensorField& o) const {
  return grid_.same_layout(o.grid_) && ncomp_ == o.ncomp_;
}

TensorField& TensorField::operator+=(const TensorField& o) {
  if (!compatible(o)) fail(ErrorCode::ShapeMismatch, "field shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  if (!compatible(o)) fail(ErrorCode::ShapeMismatch, "field shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace harmo
