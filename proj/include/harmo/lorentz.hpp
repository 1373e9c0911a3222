#pragma once

#include <limits>
#include <vector>

#include "harmo/field.hpp"

namespace harmo {

class MetricField;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct LorentzExponent {
  double p = 2, q = 2;
  // p, q in [1, inf]; p = inf forces q = inf.
  static LorentzExponent make(double p, double q);
  void validate() const;
};

struct WeightedSample {
  std::vector<double> values;   // |f| at nodes
  std::vector<double> weights;  // positive measures
  void validate() const;
};

// mu(lambda) = vol{|f| > lambda} as a right-continuous step function:
// mu = mass[k] on [level[k-1], level[k]) with level[-1] = 0, and 0 beyond
// the last level. Levels are the distinct positive values, ascending.
struct DistributionFunction {
  std::vector<double> levels;
  std::vector<double> mass;
  double operator()(double lambda) const;
};

DistributionFunction distribution_function(const WeightedSample& s);

// Closed-form p * int_0^inf lambda^(q-1) mu(lambda)^(q/p) dlambda, to the 1/q.
double lorentz_norm(const WeightedSample& s, LorentzExponent e);
double lorentz_norm(const DistributionFunction& mu, LorentzExponent e);

// Sample of |f| (Euclidean norm over components) with trapezoid weights,
// optionally multiplied by a positive scalar volume density.
WeightedSample sample_of(const TensorField& f, const TensorField* density = nullptr);

// ||f||_inf + ||grad f||_(n,1) + ||hess f||_(n/2,1) given the three pointwise
// magnitudes and common weights.
double barw_from_layers(const std::vector<double>& value, const std::vector<double>& grad,
                        const std::vector<double>& hess, const std::vector<double>& weights, int n);

// Same with Euclidean weights and finite-difference derivatives; n >= 3.
double barw_norm(const TensorField& f, const GridSpec& grid);

struct SobolevLorentzTerms {
  std::vector<double> per_order;
  double total = 0;
};

// sum_{j<=k} || |nabla^j f|_g ||_(p,q) with dvol_g weights (scalar f, k <= 2).
SobolevLorentzTerms sobolev_lorentz_norm(const TensorField& f, const MetricField& g, int k, LorentzExponent e);

}  // namespace harmo
