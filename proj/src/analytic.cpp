#include "harmo/analytic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "harmo/error.hpp"

namespace harmo {

using std::numbers::pi;

double Bump::value(const double* x) const {
  double s = 0;
  for (std::size_t a = 0; a < center.size(); ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
  s /= radius * radius;
  if (s >= 1.0) return 0.0;
  return std::pow(1.0 - s, 6);
}

void Bump::gradient(const double* x, double* out) const {
  const int n = static_cast<int>(center.size());
  double s = 0;
  for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
  const double r2 = radius * radius;
  s /= r2;
  for (int a = 0; a < n; ++a) out[a] = s >= 1.0 ? 0.0 : -12.0 * std::pow(1.0 - s, 5) * (x[a] - center[a]) / r2;
}

void Bump::hessian(const double* x, double* out) const {
  const int n = static_cast<int>(center.size());
  double s = 0;
  for (int a = 0; a < n; ++a) s += (x[a] - center[a]) * (x[a] - center[a]);
  const double r2 = radius * radius;
  s /= r2;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (s >= 1.0) {
        out[a * n + b] = 0.0;
        continue;
      }
      const double da = x[a] - center[a], db = x[b] - center[b];
      out[a * n + b] = 120.0 * std::pow(1.0 - s, 4) * da * db / (r2 * r2) - (a == b ? 12.0 * std::pow(1.0 - s, 5) / r2 : 0.0);
    }
}

MetricField sample_metric(const GridSpec& grid, const AnalyticMetric& m) {
  if (grid.dim() != m.dim) fail(ErrorCode::ShapeMismatch, "metric dimension differs from grid");
  TensorField g(grid, 2, 0);
  std::vector<double> x(grid.dim());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coord(k, a);
    m.eval(x.data(), g.node_ptr(k));
  }
  return MetricField::from_components(std::move(g));
}

AnalyticMetric flat_metric(int n) {
  return {"flat", n, [n](const double*, double* g) {
            for (int i = 0; i < n * n; ++i) g[i] = (i % (n + 1) == 0) ? 1.0 : 0.0;
          }};
}

void ConformalFamily::dphi(const double* x, double* out) const {
  bump.gradient(x, out);
  for (int a = 0; a < dim; ++a) out[a] *= amp;
}

void ConformalFamily::d2phi(const double* x, double* out) const {
  bump.hessian(x, out);
  for (int a = 0; a < dim * dim; ++a) out[a] *= amp;
}

AnalyticMetric ConformalFamily::metric() const {
  ConformalFamily self = *this;
  return {"conformal", dim, [self](const double* x, double* g) {
            const int n = self.dim;
            const double e = std::exp(2.0 * self.phi(x));
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) g[i * n + j] = i == j ? e : 0.0;
          }};
}

void ConformalFamily::christoffel(const double* x, double* out) const {
  const int n = dim;
  std::vector<double> d(n);
  dphi(x, d.data());
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out[(k * n + i) * n + j] = (i == k ? d[j] : 0.0) + (j == k ? d[i] : 0.0) - (i == j ? d[k] : 0.0);
}

void PullbackFamily::map(const double* x, double* out) const {
  const int n = dim;
  const double b = bump.value(x);
  for (int i = 0; i < n; ++i) out[i] = x[i] + eps * b * std::sin(pi * x[(i + 1) % n] / bump.radius);
}

void PullbackFamily::jacobian(const double* x, double* out) const {
  const int n = dim;
  const double b = bump.value(x);
  std::vector<double> db(n);
  bump.gradient(x, db.data());
  const double w = pi / bump.radius;
  for (int i = 0; i < n; ++i) {
    const int t = (i + 1) % n;
    const double s = std::sin(w * x[t]), c = std::cos(w * x[t]);
    for (int a = 0; a < n; ++a) out[i * n + a] = (i == a ? 1.0 : 0.0) + eps * (db[a] * s + (a == t ? b * w * c : 0.0));
  }
}

void PullbackFamily::second(const double* x, double* out) const {
  const int n = dim;
  const double b = bump.value(x);
  std::vector<double> db(n), hb(n * n);
  bump.gradient(x, db.data());
  bump.hessian(x, hb.data());
  const double w = pi / bump.radius;
  for (int i = 0; i < n; ++i) {
    const int t = (i + 1) % n;
    const double s = std::sin(w * x[t]), c = std::cos(w * x[t]);
    for (int a = 0; a < n; ++a)
      for (int bb = 0; bb < n; ++bb) {
        double v = hb[a * n + bb] * s;
        if (bb == t) v += db[a] * w * c;
        if (a == t) v += db[bb] * w * c;
        if (a == t && bb == t) v -= b * w * w * s;
        out[(i * n + a) * n + bb] = eps * v;
      }
  }
}

AnalyticMetric PullbackFamily::metric() const {
  PullbackFamily self = *this;
  return {"pullback", dim, [self](const double* x, double* g) {
            const int n = self.dim;
            std::vector<double> J(n * n);
            self.jacobian(x, J.data());
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) {
                double s = 0;
                for (int i = 0; i < n; ++i) s += J[i * n + a] * J[i * n + b];
                g[a * n + b] = s;
              }
          }};
}

void PullbackFamily::christoffel(const double* x, double* out) const {
  const int n = dim;
  SmallMat J(n, n);
  std::vector<double> Jv(n * n), H(n * n * n);
  jacobian(x, Jv.data());
  second(x, H.data());
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a) J(i, a) = Jv[i * n + a];
  const SmallMat Ji = J.inverse();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int m = 0; m < n; ++m) s += Ji(k, m) * H[(m * n + i) * n + j];
        out[(k * n + i) * n + j] = s;
      }
}

AnalyticMetric stereographic_metric(int n, double s) {
  return {"stereographic", n, [n, s](const double* x, double* g) {
            double r2 = 0;
            for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
            const double c = 4.0 * s * s / ((1.0 + s * s * r2) * (1.0 + s * s * r2));
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) g[i * n + j] = i == j ? c : 0.0;
          }};
}

double GraphFamily::u(const double* x) const {
  double v = 0;
  for (std::size_t m = 0; m < amp.size(); ++m) {
    double arg = phase[m];
    for (int a = 0; a < dim; ++a) arg += freq[m][a] * x[a];
    v += amp[m] * std::sin(arg);
  }
  return v;
}

void GraphFamily::du(const double* x, double* out) const {
  for (int a = 0; a < dim; ++a) out[a] = 0;
  for (std::size_t m = 0; m < amp.size(); ++m) {
    double arg = phase[m];
    for (int a = 0; a < dim; ++a) arg += freq[m][a] * x[a];
    for (int a = 0; a < dim; ++a) out[a] += amp[m] * freq[m][a] * std::cos(arg);
  }
}

void GraphFamily::d2u(const double* x, double* out) const {
  for (int a = 0; a < dim * dim; ++a) out[a] = 0;
  for (std::size_t m = 0; m < amp.size(); ++m) {
    double arg = phase[m];
    for (int a = 0; a < dim; ++a) arg += freq[m][a] * x[a];
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) out[a * dim + b] -= amp[m] * freq[m][a] * freq[m][b] * std::sin(arg);
  }
}

AnalyticMetric GraphFamily::metric() const {
  GraphFamily self = *this;
  return {"graph", dim, [self](const double* x, double* g) {
            const int n = self.dim;
            std::vector<double> d(n);
            self.du(x, d.data());
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) g[i * n + j] = (i == j ? 1.0 : 0.0) + d[i] * d[j];
          }};
}

GraphFamily GraphFamily::random(int n, int modes, double size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  GraphFamily f;
  f.dim = n;
  for (int m = 0; m < modes; ++m) {
    f.amp.push_back(size * U(rng) / (m + 1));
    f.phase.push_back(pi * U(rng));
    std::vector<double> w(n);
    for (double& v : w) v = 2.0 * U(rng);
    f.freq.push_back(w);
  }
  return f;
}

}  // namespace harmo
