#pragma once

#include <functional>
#include <string>
#include <vector>

#include "harmo/metric.hpp"

namespace harmo {

// Compactly supported polynomial bump (1 - |x-c|^2/r^2)^6 with exact first
// and second derivatives; C^5 across the support boundary.
struct Bump {
  std::vector<double> center;
  double radius = 1.0;
  double value(const double* x) const;
  void gradient(const double* x, double* out) const;
  void hessian(const double* x, double* out) const;  // n*n
};

// Metric given pointwise in closed form: g(x, out[n*n]).
struct AnalyticMetric {
  std::string kind;
  int dim = 3;
  std::function<void(const double* x, double* g)> eval;
};

MetricField sample_metric(const GridSpec& grid, const AnalyticMetric& m);

AnalyticMetric flat_metric(int n);

// g = exp(2 phi) delta with phi = amp * bump.
struct ConformalFamily {
  int dim;
  double amp;
  Bump bump;
  double phi(const double* x) const { return amp * bump.value(x); }
  void dphi(const double* x, double* out) const;
  void d2phi(const double* x, double* out) const;
  AnalyticMetric metric() const;
  // Gamma^k_ij = delta_ik d_j phi + delta_jk d_i phi - delta_ij d_k phi.
  void christoffel(const double* x, double* out) const;
};

// g = f^* delta for f(x) = x + eps * bump(x) * (sin(pi x_{i+1}/r))_i.
struct PullbackFamily {
  int dim;
  double eps;
  Bump bump;
  void map(const double* x, double* out) const;
  void jacobian(const double* x, double* out) const;  // out[i*n+a] = d_a f^i
  void second(const double* x, double* out) const;    // out[(i*n+a)*n+b] = d_a d_b f^i
  AnalyticMetric metric() const;
  // Gamma^k_ij = (Df^-1)^k_m d_i d_j f^m.
  void christoffel(const double* x, double* out) const;
};

// Round unit sphere in stereographic coordinates, scaled: g = 4 s^2 (1+s^2|x|^2)^-2 delta
// has curvature 1 for s = 1; s rescales the chart.
AnalyticMetric stereographic_metric(int n, double s = 1.0);

// Graph x -> (x, u(x)) in R^(n+1) with u = sum_k a_k sin(w_k . x + p_k).
struct GraphFamily {
  int dim;
  std::vector<double> amp, phase;
  std::vector<std::vector<double>> freq;
  double u(const double* x) const;
  void du(const double* x, double* out) const;
  void d2u(const double* x, double* out) const;
  AnalyticMetric metric() const;  // delta + du du^T
  static GraphFamily random(int n, int modes, double size, unsigned seed);
};

}  // namespace harmo
