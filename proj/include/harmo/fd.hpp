#pragma once

#include <optional>

#include "harmo/field.hpp"

namespace harmo {

// d/dx_axis of every component: central differences inside, second-order
// one-sided stencils on box faces, wrap-around on periodic axes.
TensorField partial_derivative(const TensorField& f, int axis);

// All partials stacked under a new leading covariant index:
// out(node, a*ncomp + c) = d_a f_c.
TensorField gradient(const TensorField& f);

// Trapezoid (box) / rectangle (periodic) quadrature of f*weight.
double integrate(const TensorField& f, const TensorField* weight = nullptr);

// Integral over the box faces of f*weight with per-face trapezoid weights;
// `face_weight(node, axis)` returns the surface element of that face (1 for
// Euclidean faces). Periodic axes have no faces.
template <class FW>
double integrate_boundary(const TensorField& f, FW&& face_weight);

double integrate_boundary(const TensorField& f);

}  // namespace harmo

#include "harmo/fd_impl.hpp"
