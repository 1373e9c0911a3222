#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/lorentz.hpp"
#include "test_support.hpp"

using namespace harmo;

namespace {

WeightedSample random_sample(std::mt19937_64& rng, int len) {
  std::uniform_real_distribution<double> U(0.0, 3.0), W(0.1, 2.0);
  WeightedSample s;
  for (int i = 0; i < len; ++i) {
    s.values.push_back(U(rng));
    s.weights.push_back(W(rng));
  }
  return s;
}

double brute_force(const WeightedSample& s, LorentzExponent e, int points) {
  const auto mu = distribution_function(s);
  const double top = mu.levels.back();
  const double h = top / points;
  double acc = 0;
  for (int i = 0; i < points; ++i) {
    const double l = (i + 0.5) * h;
    acc += std::pow(l, e.q - 1) * std::pow(mu(l), e.q / e.p);
  }
  return std::pow(e.p * acc * h, 1.0 / e.q);
}

}  // namespace

TEST_CASE("distribution function examples") {
  auto mu = distribution_function({{2.5}, {4.0}});
  CHECK(mu(0.0) == 4.0);
  CHECK(mu(2.4999) == 4.0);
  CHECK(mu(2.5) == 0.0);
  mu = distribution_function({{1, 2}, {3, 5}});
  CHECK(mu(0.0) == 8.0);
  CHECK(mu(0.99) == 8.0);
  CHECK(mu(1.0) == 5.0);
  CHECK(mu(1.5) == 5.0);
  CHECK(mu(2.0) == 0.0);
  CHECK(mu(7.0) == 0.0);
  mu = distribution_function({{0, 0, 0}, {1, 1, 1}});
  CHECK(mu.levels.empty());
  CHECK(mu(0.0) == 0.0);
  CHECK(lorentz_norm(WeightedSample{{0, 0}, {1, 1}}, {2, 1}) == 0.0);
  CHECK_THROWS_AS(distribution_function({{}, {}}), Error);
}

TEST_CASE("indicator closed forms") {
  CHECK(std::abs(lorentz_norm(WeightedSample{{1.0}, {4.0}}, {2, 2}) - 2.0) <= 1e-12);
  CHECK(std::abs(lorentz_norm(WeightedSample{{3.0}, {4.0}}, {2, 1}) - 12.0) <= 1e-12);
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.5})
    for (double q : {1.0, 2.0, 3.5, 7.0}) {
      const double c = 1.7, m = 0.6;
      const double want = std::pow(p / q, 1 / q) * c * std::pow(m, 1 / p);
      // split the set into pieces carrying the same value: ties must merge
      const double got = lorentz_norm(WeightedSample{{c, c, c}, {0.1, 0.2, 0.3}}, {p, q});
      CHECK(std::abs(got - want) <= 1e-12 * want);
    }
  // q = inf is the weak-type quasi-norm, p = q = inf the sup norm
  CHECK(lorentz_norm(WeightedSample{{1, 2}, {3, 5}}, {2, kInf}) == doctest::Approx(std::max(1 * std::sqrt(8.0), 2 * std::sqrt(5.0))));
  CHECK(lorentz_norm(WeightedSample{{1, 2}, {3, 5}}, {kInf, kInf}) == 2.0);
}

TEST_CASE("exponent and sample validation") {
  CHECK_THROWS_AS(LorentzExponent::make(kInf, 2.0), Error);
  CHECK_THROWS_AS(LorentzExponent::make(0.5, 2.0), Error);
  CHECK_THROWS_AS(LorentzExponent::make(2.0, 0.9), Error);
  CHECK_NOTHROW(LorentzExponent::make(kInf, kInf));
  try {
    lorentz_norm(WeightedSample{{1.0, NAN}, {1, 1}}, {2, 2});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSample);
  }
  CHECK_THROWS_AS(lorentz_norm(WeightedSample{{1.0}, {-1.0}}, {2, 2}), Error);
}

TEST_CASE("L(p,p) equals L^p on random samples") {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    auto s = random_sample(rng, 1 + t);
    const double p = 1.0 + 0.05 * t;
    double lp = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) lp += s.weights[i] * std::pow(s.values[i], p);
    lp = std::pow(lp, 1 / p);
    worst = std::max(worst, std::abs(lorentz_norm(s, {p, p}) - lp) / lp);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("closed form agrees with quadrature of the defining integral") {
  // Two-step sample with breakpoints on the midpoint grid.
  WeightedSample s{{1.0, 2.5}, {0.7, 1.9}};
  for (auto e : {LorentzExponent{2, 1}, LorentzExponent{1.5, 3}, LorentzExponent{3, 1}, LorentzExponent{4, 2}}) {
    const double exact = lorentz_norm(s, e);
    CHECK(std::abs(brute_force(s, e, 1000000) - exact) <= 1e-6 * exact);
    const auto mu = distribution_function(s);
    const double adapt = std::pow(
        e.p * testing::adaptive_simpson([&](double l) { return std::pow(l, e.q - 1) * std::pow(mu(l), e.q / e.p); },
                                        0.0, 3.0, 1e-13),
        1 / e.q);
    CHECK(std::abs(adapt - exact) <= 1e-6 * exact);
  }
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    auto r = random_sample(rng, 6);
    const auto mu = distribution_function(r);
    const LorentzExponent e{2.5, 1.5};
    const double adapt = std::pow(
        e.p * testing::adaptive_simpson([&](double l) { return std::pow(l, e.q - 1) * std::pow(mu(l), e.q / e.p); },
                                        0.0, mu.levels.back() + 0.1, 1e-13),
        1 / e.q);
    CHECK(std::abs(adapt - lorentz_norm(r, e)) <= 1e-6 * adapt);
  }
}

TEST_CASE("homogeneity, permutation invariance and nesting") {
  std::mt19937_64 rng(3);
  double worst_nest = 0, worst_fm = 0;
  for (int t = 0; t < 100; ++t) {
    auto s = random_sample(rng, 20);
    const LorentzExponent e{2.0 + 0.01 * t, 1.0};
    const double base = lorentz_norm(s, e);
    auto s2 = s;
    for (double& v : s2.values) v *= -4.0;
    CHECK(lorentz_norm(s2, e) == 4.0 * base);
    auto s3 = s;
    std::reverse(s3.values.begin(), s3.values.end());
    std::reverse(s3.weights.begin(), s3.weights.end());
    CHECK(lorentz_norm(s3, e) == base);
    // nesting q < r with the sharp constant (q/p)^(1/q - 1/r)
    const double p = e.p, q = 1.0, r = 3.0;
    const double ratio = lorentz_norm(s, {p, r}) / lorentz_norm(s, {p, q});
    CHECK(ratio <= std::pow(q / p, 1 / q - 1 / r) + 1e-12);
    worst_nest = std::max(worst_nest, ratio);
    // finite-measure comparison p < q
    double vol = 0;
    for (double w : s.weights) vol += w;
    const double fm = lorentz_norm(s, {1.5, 2.0}) / (std::pow(vol, 1 / 1.5 - 1 / 3.0) * lorentz_norm(s, {3.0, 2.0}));
    worst_fm = std::max(worst_fm, fm);
  }
  MESSAGE("empirical nesting constant " << worst_nest << ", finite-measure constant " << worst_fm);
  CHECK(std::isfinite(worst_fm));
}

TEST_CASE("Sobolev-Lorentz norm of a linear profile") {
  auto value = [](int N) {
    GridSpec g = GridSpec::cube(3, N, 0.0, 1.0);
    auto f = sample_scalar(g, [](const std::vector<double>& x) { return x[0]; });
    return sobolev_lorentz_norm(f, MetricField::flat(g), 1, {3, 1});
  };
  auto a = value(9), b = value(17), c = value(33);
  // ||x_1||_(3,1) = 3 int_0^1 (1-l)^(1/3) dl = 9/4, ||1||_(3,1) = 3
  CHECK(c.per_order[1] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(c.total == doctest::Approx(5.25).epsilon(0.01));
  const double d1 = std::abs(a.total - b.total), d2 = std::abs(b.total - c.total);
  MESSAGE("successive differences " << d1 << " " << d2);
  CHECK(d2 < d1);
  auto g = GridSpec::cube(3, 9, 0.0, 1.0);
  auto cst = TensorField::scalar(g, 2.0);
  auto s = sobolev_lorentz_norm(cst, MetricField::flat(g), 1, {3, 1});
  CHECK(s.per_order[1] == 0.0);
  CHECK(s.total == doctest::Approx(lorentz_norm(sample_of(cst), {3, 1})));
}

TEST_CASE("barW norm closed forms") {
  GridSpec g2 = GridSpec::cube(2, 9, 0.0, 1.0);
  CHECK_THROWS_AS(barw_norm(TensorField::scalar(g2), g2), Error);
  GridSpec g = GridSpec::cube(3, 33, 0.0, 1.0);
  CHECK(barw_norm(TensorField::scalar(g), g) == 0.0);
  auto f = sample_scalar(g, [](const std::vector<double>& x) { return x[0] * x[0]; });
  // 1 + 3 int_0^2 (1 - l/2)^(1/3) dl + (3/2) * 2 = 1 + 4.5 + 3
  CHECK(barw_norm(f, g) == doctest::Approx(8.5).epsilon(0.01));
  auto bump = sample_scalar(g, [](const std::vector<double>& x) {
    const double r = (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5) + (x[2] - 0.5) * (x[2] - 0.5);
    return std::exp(-20 * r);
  });
  const double b1 = barw_norm(bump, g);
  CHECK(barw_norm(0.01 * bump, g) == doctest::Approx(0.01 * b1).epsilon(1e-12));
}
