#pragma once

#include <vector>

#include "harmo/field.hpp"

namespace harmo {

enum class InterpOrder { Linear, Cubic };

struct InterpOptions {
  InterpOrder order = InterpOrder::Linear;
  // Points up to this many cells outside a box axis are extrapolated
  // with the boundary stencil instead of rejected.
  double extrapolate_cells = 0.0;
};

// Multilinear (exact on per-axis affine fields) or separable 4-point
// Lagrange (exact on per-axis cubics) interpolation of every component.
std::vector<double> interpolate(const TensorField& f, const std::vector<double>& point, InterpOptions opt = {});

// Same, writing ncomp values to `out` and, when `grad` is non-null, the
// derivative of the interpolant: grad[a*ncomp + c] = d_a f_c.
void interpolate_into(const TensorField& f, const double* point, double* out, double* grad, InterpOptions opt);

}  // namespace harmo
