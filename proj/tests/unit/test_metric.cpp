#include <cmath>
#include <string>

#include "doctest.h"
#include "harmo/analytic.hpp"
#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/metric_ops.hpp"
#include "test_support.hpp"

using namespace harmo;

namespace {

ConformalFamily conformal(int n, double amp) { return {n, amp, Bump{std::vector<double>(n, 0.0), 0.8}}; }
PullbackFamily pullback(int n, double eps) { return {n, eps, Bump{std::vector<double>(n, 0.0), 0.7}}; }

double max_over(const GridSpec& g, const NodeMask& mask, const std::function<double(std::size_t)>& f) {
  double m = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!mask || mask(k)) m = std::max(m, f(k));
  return m;
}

double christoffel_error(int N, const std::function<void(const double*, double*)>& oracle, const AnalyticMetric& am) {
  GridSpec g = GridSpec::cube(am.dim, N, -1.0, 1.0);
  auto G = christoffel(sample_metric(g, am));
  const int n = am.dim;
  std::vector<double> want(n * n * n);
  return max_over(g, {}, [&](std::size_t k) {
    auto x = g.point(k);
    oracle(x.data(), want.data());
    double e = 0;
    for (int c = 0; c < n * n * n; ++c) e = std::max(e, std::abs(G(k, c) - want[c]));
    return e;
  });
}

// Unit sphere oracle R_ijkl = g_ik g_jl - g_il g_jk on the central half.
double sphere_error(int N, bool direct) {
  const int n = 3;
  GridSpec g = GridSpec::cube(n, N, -0.5, 0.5);
  auto m = sample_metric(g, stereographic_metric(n));
  RiemannField R = direct ? riemann_direct(m).sum : riemann_from_christoffel(m);
  return max_over(g, central_region(g, 0.5), [&](std::size_t k) {
    double e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double want = m(k, i, a) * m(k, j, b) - m(k, i, b) * m(k, j, a);
            e = std::max(e, std::abs(R.R(k, ((i * n + j) * n + a) * n + b) - want));
          }
    return e;
  });
}

}  // namespace

TEST_CASE("metric validation") {
  GridSpec g = GridSpec::cube(2, 6, 0.0, 1.0);
  TensorField t(g, 2, 0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    t(k, 0) = 2.0;
    t(k, 3) = 0.5;
  }
  auto m = MetricField::from_components(t);
  CHECK(m.ellipticity() == doctest::Approx(2.0));
  CHECK(MetricField::flat(g).ellipticity() == 1.0);
  auto asym = t;
  asym(4, 1) = 0.1;
  try {
    MetricField::from_components(asym);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Symmetry);
  }
  auto indef = t;
  indef(3, 3) = -1.0;
  CHECK_THROWS_AS(MetricField::from_components(indef), Error);
}

TEST_CASE("Christoffel symbols") {
  GridSpec g = GridSpec::cube(3, 9, -1.0, 1.0);
  CHECK(christoffel(MetricField::flat(g)).max_abs() == 0.0);
  auto c = conformal(3, 0.1);
  auto G = christoffel(sample_metric(g, c.metric()));
  CHECK(G.symmetry_defect() == 0.0);

  auto cf = [&](const double* x, double* o) { c.christoffel(x, o); };
  const double e1 = christoffel_error(33, cf, c.metric()), e2 = christoffel_error(65, cf, c.metric());
  MESSAGE("conformal Christoffel errors " << e1 << " " << e2);
  CHECK(testing::observed_order(e1, e2) > 1.8);

  auto p = pullback(3, 0.05);
  auto pf = [&](const double* x, double* o) { p.christoffel(x, o); };
  const double p1 = christoffel_error(17, pf, p.metric()), p2 = christoffel_error(33, pf, p.metric());
  MESSAGE("pullback Christoffel errors " << p1 << " " << p2);
  CHECK(testing::observed_order(p1, p2) > 1.8);
}

TEST_CASE("Riemann tensor on flat and round metrics") {
  GridSpec g = GridSpec::cube(3, 9, -1.0, 1.0);
  auto flat = MetricField::flat(g);
  CHECK(riemann_from_christoffel(flat).R.max_abs() <= 1e-10);
  auto d = riemann_direct(flat);
  CHECK(d.A.R.max_abs() == 0.0);
  CHECK(d.B.R.max_abs() == 0.0);

  // constant conformal factor: every derivative vanishes
  ConformalFamily cst{3, 0.0, Bump{{0, 0, 0}, 1.0}};
  auto am = cst.metric();
  am.eval = [](const double*, double* o) {
    for (int i = 0; i < 9; ++i) o[i] = (i % 4 == 0) ? std::exp(0.6) : 0.0;
  };
  auto dc = riemann_direct(sample_metric(g, am));
  CHECK(dc.A.R.max_abs() <= 1e-12);
  CHECK(dc.B.R.max_abs() <= 1e-12);

  for (bool direct : {false, true}) {
    const double e1 = sphere_error(17, direct), e2 = sphere_error(33, direct);
    MESSAGE(std::string(direct ? "direct" : "christoffel") << " sphere errors " << e1 << " " << e2);
    CHECK(e2 < 0.15);
    CHECK(testing::observed_order(e1, e2) > 1.8);
  }
}

TEST_CASE("pullback of the Euclidean metric is flat to O(h^2)") {
  auto p = pullback(3, 0.05);
  auto rnorm = [&](int N) {
    GridSpec g = GridSpec::cube(3, N, -1.0, 1.0);
    return riemann_from_christoffel(sample_metric(g, p.metric())).R.max_abs();
  };
  const double r1 = rnorm(33), r2 = rnorm(65);
  MESSAGE("pullback |Riem| " << r1 << " " << r2);
  CHECK(r1 / r2 >= 3.0);
}

TEST_CASE("cross-formula agreement and symmetries shrink under refinement") {
  auto c = conformal(3, 0.2);
  auto measure = [&](int N) {
    GridSpec g = GridSpec::cube(3, N, -1.0, 1.0);
    auto m = sample_metric(g, c.metric());
    auto a = riemann_from_christoffel(m);
    auto d = riemann_direct(m);
    const auto mask = central_region(g, 0.5);
    double cross = max_over(g, mask, [&](std::size_t k) {
      double e = 0;
      for (int q = 0; q < 81; ++q) e = std::max(e, std::abs(a.R(k, q) - d.sum.R(k, q)));
      return e;
    });
    return std::pair{cross, riemann_symmetry(a, mask)};
  };
  auto [c1, s1] = measure(33);
  auto [c2, s2] = measure(65);
  MESSAGE("cross " << c1 << " " << c2 << " bianchi " << s1.bianchi << " " << s2.bianchi);
  CHECK(c1 / c2 >= 3.0);
  CHECK(s1.antisym_ij == 0.0);
  CHECK(s2.antisym_kl <= 1e-10 + s1.antisym_kl / 3.0);
  CHECK(s2.pair <= 1e-10 + s1.pair / 3.0);
  CHECK(s2.bianchi <= 1e-10 + s1.bianchi / 3.0);
}

TEST_CASE("Ricci of the round sphere is 2g; flat harmonic defect vanishes") {
  auto err = [](int N) {
    GridSpec g = GridSpec::cube(3, N, -0.5, 0.5);
    auto m = sample_metric(g, stereographic_metric(3));
    auto ric = ricci(m);
    return max_over(g, central_region(g, 0.5), [&](std::size_t k) {
      double e = 0;
      for (int c = 0; c < 9; ++c) e = std::max(e, std::abs(ric(k, c) - 2.0 * m.components()(k, c)));
      return e;
    });
  };
  const double e1 = err(17), e2 = err(33);
  CHECK(testing::observed_order(e1, e2) > 1.8);
  GridSpec g = GridSpec::cube(3, 9, -1, 1);
  CHECK(harmonic_defect(MetricField::flat(g)).max_abs() == 0.0);
  CHECK(ricci(MetricField::flat(g)).max_abs() <= 1e-12);
}

TEST_CASE("Laplace-Beltrami operator") {
  GridSpec g = GridSpec::cube(3, 11, -1.0, 1.0);
  auto flat = MetricField::flat(g);
  auto sq = sample_scalar(g, [](const std::vector<double>& x) { return x[0] * x[0]; });
  auto L = laplace_beltrami_apply(flat, sq);
  auto inner = central_region(g, 0.5);
  CHECK(max_over(g, inner, [&](std::size_t k) { return std::abs(L(k, 0) - 2.0); }) <= 1e-10);
  auto harm = sample_scalar(g, [](const std::vector<double>& x) { return x[0] * x[0] - x[1] * x[1]; });
  CHECK(max_over(g, inner, [&](std::size_t k) { return std::abs(laplace_beltrami_apply(flat, harm)(k, 0)); }) <= 1e-10);
  CHECK(laplace_beltrami_apply(flat, TensorField::scalar(g, 3.0)).max_abs() == 0.0);

  // manufactured: Delta_g u = e^{-2 phi} (Delta u + (n-2) grad phi . grad u)
  auto c = conformal(3, 0.15);
  auto err = [&](int N) {
    GridSpec gg = GridSpec::cube(3, N, -1.0, 1.0);
    auto m = sample_metric(gg, c.metric());
    auto u = sample_scalar(gg, [](const std::vector<double>& x) { return std::sin(x[0]) * std::cos(2 * x[1]) + x[2] * x[2]; });
    auto Lu = laplace_beltrami_apply(m, u);
    return max_over(gg, central_region(gg, 0.5), [&](std::size_t k) {
      auto x = gg.point(k);
      double dp[3];
      c.dphi(x.data(), dp);
      const double lap = -5 * std::sin(x[0]) * std::cos(2 * x[1]) + 2;
      const double gu[3] = {std::cos(x[0]) * std::cos(2 * x[1]), -2 * std::sin(x[0]) * std::sin(2 * x[1]), 2 * x[2]};
      const double want = std::exp(-2 * c.phi(x.data())) * (lap + dp[0] * gu[0] + dp[1] * gu[1] + dp[2] * gu[2]);
      return std::abs(Lu(k, 0) - want);
    });
  };
  const double e1 = err(17), e2 = err(33);
  MESSAGE("manufactured Laplace-Beltrami " << e1 << " " << e2);
  CHECK(testing::observed_order(e1, e2) > 1.8);
}

TEST_CASE("covariant derivative and codifferential of 1-forms") {
  GridSpec g = GridSpec::cube(3, 13, -1.0, 1.0);
  auto flat = MetricField::flat(g);
  auto alpha = sample(g, 1, 0, 1, [](const std::vector<double>& x, double* o) {
    o[0] = x[0] * x[1];
    o[1] = std::sin(x[2]);
    o[2] = x[2] * x[2];
  });
  auto cd = codifferential_oneform(flat, alpha);
  auto inner = central_region(g, 0.5);
  CHECK(max_over(g, inner, [&](std::size_t k) { return std::abs(cd.total(k, 0) + g.coord(k, 1) + 2 * g.coord(k, 2)); }) <= 1e-10);
  CHECK(cd.correction.max_abs() == 0.0);
  TensorField cst(g, 1, 0);
  for (std::size_t k = 0; k < g.size(); ++k) cst(k, 1) = 2.0;
  CHECK(codifferential_oneform(flat, cst).total.max_abs() == 0.0);

  // alpha = df gives d*alpha = -Delta_g f
  auto c = conformal(3, 0.15);
  auto err = [&](int N) {
    GridSpec gg = GridSpec::cube(3, N, -1.0, 1.0);
    auto m = sample_metric(gg, c.metric());
    auto f = sample_scalar(gg, [](const std::vector<double>& x) { return std::cos(x[0] + 2 * x[1]) * x[2]; });
    auto df = gradient(f);
    auto d = codifferential_oneform(m, df);
    auto L = laplace_beltrami_apply(m, f);
    auto nab = covariant_derivative_oneform(m, df);
    double sym = 0;
    for (std::size_t k = 0; k < gg.size(); ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sym = std::max(sym, std::abs(nab(k, i * 3 + j) - nab(k, j * 3 + i)));
    const double e = max_over(gg, central_region(gg, 0.5), [&](std::size_t k) {
      return std::abs(d.total(k, 0) + L(k, 0));
    });
    return std::pair{e, sym};
  };
  auto [e1, s1] = err(33);
  auto [e2, s2] = err(65);
  MESSAGE("d* df + Delta f: " << e1 << " " << e2);
  CHECK(testing::observed_order(e1, e2) > 1.8);
  CHECK(std::max(s1, s2) <= 1e-12);  // nabla df is symmetric
}

TEST_CASE("discrete integration by parts holds to O(h)") {
  auto c = conformal(3, 0.15);
  auto defect = [&](int N) {
    GridSpec g = GridSpec::cube(3, N, -1.0, 1.0);
    auto m = sample_metric(g, c.metric());
    auto u = sample_scalar(g, [](const std::vector<double>& x) { return std::sin(x[0] + x[1]) + x[2]; });
    auto v = sample_scalar(g, [](const std::vector<double>& x) { return std::cos(x[2]) * x[0]; });
    auto vol = m.sqrt_det();
    auto ginv = m.inverse();
    auto du = gradient(u), dv = gradient(v);
    auto Lu = laplace_beltrami_apply(m, u);
    TensorField lhs = TensorField::scalar(g), rhs = TensorField::scalar(g), flux = TensorField::scalar(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
      lhs(k, 0) = Lu(k, 0) * v(k, 0);
      double s = 0;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) s += ginv(k, a * 3 + b) * du(k, a) * dv(k, b);
      rhs(k, 0) = s;
      auto nu = g.outward_normal(k);
      (void)nu;
    }
    // boundary term: int_faces v sqrt(g) g^{ab} d_b u nu_a, face by face
    double bterm = 0;
    for (int a = 0; a < 3; ++a)
      for (int side = 0; side < 2; ++side) {
        TensorField f = TensorField::scalar(g);
        for (std::size_t k = 0; k < g.size(); ++k) {
          const int ia = g.coord_index(k, a);
          if (ia != (side ? N - 1 : 0)) continue;
          double s = 0;
          for (int b = 0; b < 3; ++b) s += ginv(k, a * 3 + b) * du(k, b);
          f(k, 0) = (side ? 1.0 : -1.0) * v(k, 0) * vol(k, 0) * s;
        }
        bterm += integrate_boundary(f, [&](std::size_t k, int axis) {
          return (axis == a && g.coord_index(k, a) == (side ? N - 1 : 0)) ? 1.0 : 0.0;
        });
      }
    return std::abs(integrate(lhs, &vol) - bterm + integrate(rhs, &vol));
  };
  const double d1 = defect(17), d2 = defect(33);
  MESSAGE("integration by parts defect " << d1 << " " << d2);
  CHECK(d2 < 0.7 * d1);
  CHECK(d2 < 0.05);
}

TEST_CASE("mollification") {
  GridSpec g = GridSpec::cube(3, 17, -1.0, 1.0);
  TensorField t(g, 2, 0);
  for (std::size_t k = 0; k < g.size(); ++k) {
    t(k, 0) = 2.0;
    t(k, 4) = 1.5;
    t(k, 8) = 0.7;
    t(k, 1) = t(k, 3) = 0.1;
  }
  auto cst = MetricField::from_components(t);
  auto r = mollify_metric(cst, 0.3);
  CHECK(r.applied);
  CHECK((r.metric.components() - cst.components()).max_abs() <= 1e-14);
  auto noop = mollify_metric(cst, 0.05);
  CHECK_FALSE(noop.applied);

  auto c = conformal(3, 0.3);
  auto m = sample_metric(g, c.metric());
  const double lam = m.ellipticity();
  for (double delta : {0.15, 0.3, 0.5}) {
    auto mm = mollify_metric(m, delta).metric;
    bool ok = true;
    for (std::size_t k = 0; k < g.size(); ++k) {
      Eigen::SelfAdjointEigenSolver<SmallMat> es(mm.at(k));
      ok = ok && es.eigenvalues()(0) >= 1 / lam - 1e-14 && es.eigenvalues()(2) <= lam + 1e-14;
    }
    CHECK(ok);
  }
  // || Riem^{g_delta} - Riem^g ||_(n/2,1) decreases as delta -> h
  auto R = riemann_from_christoffel(m);
  double prev = 1e300;
  for (double delta : {0.6, 0.4, 0.25, 0.13}) {
    auto mm = mollify_metric(m, delta).metric;
    auto Rd = riemann_from_christoffel(mm);
    RiemannField diff{Rd.R - R.R};
    const double d = riemann_lorentz_norm(m, diff, {1.5, 1});
    MESSAGE("delta " << delta << " curvature difference " << d);
    CHECK(d < prev);
    prev = d;
  }
}

TEST_CASE("rescaling") {
  GridSpec g = GridSpec::cube(3, 17, -1.0, 1.0);
  auto c = conformal(3, 0.2);
  auto m = sample_metric(g, c.metric());
  CHECK((scale_metric(m, 1.0).components() - m.components()).max_abs() == 0.0);
  auto f = scale_metric(MetricField::flat(g), 0.6);
  CHECK(f.max_deviation_from_identity() <= 1e-14);
  CHECK_THROWS_AS(scale_metric(m, 1.5), Error);
  CHECK_THROWS_AS(scale_metric(m, 0.0), Error);
}
