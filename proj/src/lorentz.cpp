#include "harmo/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "harmo/error.hpp"
#include "harmo/fd.hpp"

namespace harmo {

LorentzExponent LorentzExponent::make(double p, double q) {
  LorentzExponent e{p, q};
  e.validate();
  return e;
}

void LorentzExponent::validate() const {
  if (!(p >= 1.0) || !(q >= 1.0)) fail(ErrorCode::InvalidExponent, "p and q must be >= 1");
  if (std::isinf(p) && !std::isinf(q)) fail(ErrorCode::InvalidExponent, "p = inf requires q = inf");
}

void WeightedSample::validate() const {
  if (values.empty()) fail(ErrorCode::InvalidSample, "empty sample");
  if (values.size() != weights.size()) fail(ErrorCode::InvalidSample, "values/weights length mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) fail(ErrorCode::InvalidSample, "non-finite value", {static_cast<double>(i)});
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      fail(ErrorCode::InvalidSample, "non-positive weight", {static_cast<double>(i)});
  }
}

double DistributionFunction::operator()(double lambda) const {
  // first level strictly greater than lambda
  auto it = std::upper_bound(levels.begin(), levels.end(), lambda);
  if (it == levels.end()) return 0.0;
  return mass[it - levels.begin()];
}

DistributionFunction distribution_function(const WeightedSample& s) {
  s.validate();
  std::vector<std::size_t> order(s.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double va = std::abs(s.values[a]), vb = std::abs(s.values[b]);
    return va != vb ? va > vb : s.weights[a] < s.weights[b];
  });
  // Walk from the largest value down, merging ties, accumulating mass.
  DistributionFunction mu;
  double acc = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double v = std::abs(s.values[order[i]]);
    if (v == 0.0) break;
    while (i < order.size() && std::abs(s.values[order[i]]) == v) acc += s.weights[order[i++]];
    mu.levels.push_back(v);
    mu.mass.push_back(acc);
  }
  std::reverse(mu.levels.begin(), mu.levels.end());
  std::reverse(mu.mass.begin(), mu.mass.end());
  return mu;
}

double lorentz_norm(const DistributionFunction& mu, LorentzExponent e) {
  e.validate();
  if (mu.levels.empty()) return 0.0;
  if (std::isinf(e.q)) {
    if (std::isinf(e.p)) return mu.levels.back();
    double best = 0.0;
    for (std::size_t k = 0; k < mu.levels.size(); ++k)
      best = std::max(best, mu.levels[k] * std::pow(mu.mass[k], 1.0 / e.p));
    return best;
  }
  double sum = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < mu.levels.size(); ++k) {
    const double cur = std::pow(mu.levels[k], e.q);
    sum += std::pow(mu.mass[k], e.q / e.p) * (cur - prev);
    prev = cur;
  }
  return std::pow(e.p / e.q * sum, 1.0 / e.q);
}

double lorentz_norm(const WeightedSample& s, LorentzExponent e) {
  e.validate();
  return lorentz_norm(distribution_function(s), e);
}

WeightedSample sample_of(const TensorField& f, const TensorField* density) {
  const GridSpec& g = f.grid();
  WeightedSample s;
  s.values.resize(g.size());
  s.weights = g.quadrature_weights();
  for (std::size_t k = 0; k < g.size(); ++k) {
    double m = 0.0;
    const double* p = f.node_ptr(k);
    for (int c = 0; c < f.ncomp(); ++c) m += p[c] * p[c];
    s.values[k] = std::sqrt(m);
    if (density) {
      const double d = (*density)(k, 0);
      if (!(d > 0.0)) fail(ErrorCode::InvalidVolume, "non-positive volume density", {d});
      s.weights[k] *= d;
    }
  }
  return s;
}

double barw_from_layers(const std::vector<double>& value, const std::vector<double>& grad,
                        const std::vector<double>& hess, const std::vector<double>& weights, int n) {
  if (n < 3) fail(ErrorCode::UnsupportedDimension, "barW norm needs n >= 3");
  double sup = 0.0;
  for (double v : value) sup = std::max(sup, std::abs(v));
  const double a = lorentz_norm(WeightedSample{grad, weights}, {static_cast<double>(n), 1.0});
  const double b = lorentz_norm(WeightedSample{hess, weights}, {n / 2.0, 1.0});
  return sup + a + b;
}

double barw_norm(const TensorField& f, const GridSpec& grid) {
  const int n = grid.dim();
  if (n < 3) fail(ErrorCode::UnsupportedDimension, "barW norm needs n >= 3");
  if (f.ncomp() != 1 || !f.grid().same_layout(grid)) fail(ErrorCode::ShapeMismatch, "barW expects a scalar on grid");
  const TensorField d1 = gradient(f);
  const TensorField d2 = gradient(d1);
  std::vector<double> v(grid.size()), g1(grid.size()), g2(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    v[k] = f(k, 0);
    double s1 = 0, s2 = 0;
    for (int a = 0; a < n; ++a) s1 += d1(k, a) * d1(k, a);
    for (int c = 0; c < n * n; ++c) s2 += d2(k, c) * d2(k, c);
    g1[k] = std::sqrt(s1);
    g2[k] = std::sqrt(s2);
  }
  return barw_from_layers(v, g1, g2, grid.quadrature_weights(), n);
}

}  // namespace harmo
