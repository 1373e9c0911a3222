#pragma once

#include <string>

#include "harmo/interp.hpp"
#include "harmo/metric.hpp"

namespace harmo {

struct MollifyResult {
  MetricField metric;
  bool applied = true;
  std::string status = "ok";
  int kernel_points = 0;
};

// Discrete convolution with (1 - |y/delta|^2)^3, truncated at box faces and
// renormalised per node, so each output is a convex combination of inputs.
MollifyResult mollify_metric(const MetricField& g, double delta);

// g_t(x) = g(c + t (x - c)) on the same grid, c the grid centre.
MetricField scale_metric(const MetricField& g, double t, InterpOrder order = InterpOrder::Cubic);

}  // namespace harmo
