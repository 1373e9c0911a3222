#include "harmo/reports.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "harmo/analytic.hpp"
#include "harmo/curvature.hpp"
#include "harmo/elliptic.hpp"
#include "harmo/error.hpp"
#include "harmo/extension.hpp"
#include "harmo/immersion.hpp"
#include "harmo/lorentz.hpp"
#include "harmo/metric_ops.hpp"
#include "harmo/parallel.hpp"

namespace harmo {

namespace {

using json = nlohmann::json;
constexpr double pi = 3.14159265358979323846;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double order(double coarse, double fine) { return std::log(coarse / fine) / std::log(2.0); }

struct Rows {
  std::vector<CheckRow>& out;
  void add(std::string name, double value, double bound, bool pass, std::string detail = "") {
    out.push_back({std::move(name), value, bound, pass, std::move(detail)});
  }
  // value <= bound
  void at_most(std::string name, double value, double bound, std::string detail = "") {
    add(std::move(name), value, bound, std::isfinite(value) && value <= bound, std::move(detail));
  }
  void at_least(std::string name, double value, double bound, std::string detail = "") {
    add(std::move(name), value, bound, std::isfinite(value) && value >= bound, std::move(detail));
  }
  // fine <= coarse / ratio, or both below the floor
  void shrinks(const std::string& name, double coarse, double fine, double ratio, double floor = 1e-10) {
    const bool tiny = fine <= floor;
    const double r = fine > 0 ? coarse / fine : std::numeric_limits<double>::infinity();
    add(name, tiny ? 0.0 : r, ratio, tiny || r >= ratio, num(coarse) + " -> " + num(fine));
  }
  // observed order between successive levels >= bound, or tiny
  void orders(const std::string& name, const std::vector<double>& e, double bound, double floor = 1e-12) {
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      const bool tiny = e[i + 1] <= floor;
      const double p = tiny ? bound : order(e[i], e[i + 1]);
      add(name + " [" + std::to_string(i) + "]", p, bound, tiny || p >= bound, num(e[i]) + " -> " + num(e[i + 1]));
    }
  }
};

double masked_max(const GridSpec& g, const NodeMask& m, const std::function<double(std::size_t)>& f) {
  double e = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!m || m(k)) e = std::max(e, f(k));
  return e;
}

struct Family {
  std::string name;
  AnalyticMetric metric;
};

std::vector<Family> metric_families(int n, unsigned seed) {
  const Bump b{std::vector<double>(n, 0.0), 0.8};
  return {{"flat", flat_metric(n)},
          {"conformal", ConformalFamily{n, 0.2, b}.metric()},
          {"pullback", PullbackFamily{n, 0.05, b}.metric()},
          {"stereographic", stereographic_metric(n, 0.5)},
          {"graph", GraphFamily::random(n, 4, 0.3, seed).metric()}};
}

void check_levels(const std::vector<int>& lv, std::size_t need) {
  if (lv.size() < need) fail(ErrorCode::Config, "need at least " + std::to_string(need) + " refinement levels");
  for (std::size_t i = 0; i + 1 < lv.size(); ++i)
    if (lv[i + 1] - 1 != 2 * (lv[i] - 1))
      fail(ErrorCode::Config, "refinement levels must halve h: N' - 1 = 2 (N - 1)");
}

// Raw component asymmetry relative to max |g|.
double raw_asymmetry(const TensorField& f) {
  const int n = f.grid().dim();
  double a = 0, m = 0;
  for (std::size_t k = 0; k < f.nodes(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        a = std::max(a, std::abs(f(k, i * n + j) - f(k, j * n + i)));
        m = std::max(m, std::abs(f(k, i * n + j)));
      }
  return m > 0 ? a / m : a;
}

// Reads an input metric; false (and a failing row) when it is not a symmetric tensor.
bool input_metric(const TensorField& in, Rows& rows, MetricField& g) {
  const int n = in.grid().dim();
  if (in.cov() + in.contra() != 2 || in.values() != 1 || in.ncomp() != n * n) {
    rows.add("input is a rank-2 field", 0, 1, false, "metric file must carry rank=2,0");
    return false;
  }
  const double a = raw_asymmetry(in);
  rows.at_most("metric symmetry", a, 1e-12, a > 1e-12 ? "asymmetric metric: max |g_ij - g_ji| / max |g| = " + num(a) : "");
  if (a > 1e-12) return false;
  try {
    g = MetricField::from_components(in);
  } catch (const Error& e) {
    rows.add("metric positive definite", 0, 0, false, e.what());
    return false;
  }
  return true;
}

double max_abs_R(const RiemannField& R, const NodeMask& m) {
  const int nc = R.R.ncomp();
  return masked_max(R.grid(), m, [&](std::size_t k) {
    double e = 0;
    for (int q = 0; q < nc; ++q) e = std::max(e, std::abs(R.R(k, q)));
    return e;
  });
}

// ---------------------------------------------------------------- suites

void suite_symmetries(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  if (input) {
    MetricField g;
    if (!input_metric(*input, rows, g)) return;
    const RiemannField R = riemann_from_christoffel(g);
    const NodeMask m = central_region(g.grid(), 0.5);
    const RiemannSymmetry s = riemann_symmetry(R, m);
    const double scale = max_abs_R(R, m) + 1e-300;
    rows.at_most("antisymmetry ij", s.antisym_ij, 0.0);
    rows.at_most("antisymmetry kl / |R|", s.antisym_kl / scale, 0.1);
    rows.at_most("pair symmetry / |R|", s.pair / scale, 0.1);
    rows.at_most("first Bianchi / |R|", s.bianchi / scale, 0.1);
    return;
  }
  check_levels(cfg.levels, 2);
  for (const Family& f : metric_families(cfg.dim, cfg.seed)) {
    std::vector<RiemannSymmetry> s;
    for (int N : {cfg.levels[0], cfg.levels[1]}) {
      const GridSpec grid = GridSpec::cube(cfg.dim, N, -1, 1);
      s.push_back(riemann_symmetry(riemann_from_christoffel(sample_metric(grid, f.metric)), central_region(grid, 0.5)));
    }
    rows.at_most(f.name + ": antisymmetry ij", s[1].antisym_ij, 0.0);
    rows.shrinks(f.name + ": antisymmetry kl", s[0].antisym_kl, s[1].antisym_kl, 3.0);
    rows.shrinks(f.name + ": pair symmetry", s[0].pair, s[1].pair, 3.0);
    rows.shrinks(f.name + ": first Bianchi", s[0].bianchi, s[1].bianchi, 3.0);
  }
}

double cross_difference(const MetricField& g, const NodeMask& m) {
  const RiemannField a = riemann_from_christoffel(g);
  const RiemannDecomposition d = riemann_direct(g);
  return masked_max(g.grid(), m, [&](std::size_t k) {
    double e = 0;
    for (int q = 0; q < a.R.ncomp(); ++q) e = std::max(e, std::abs(a.R(k, q) - d.sum.R(k, q)));
    return e;
  });
}

// max |R - (g_ik g_jl - g_il g_jk)| over the mask.
double sphere_riemann_error(const MetricField& g, const RiemannField& R, const NodeMask& m) {
  const int n = g.dim();
  return masked_max(g.grid(), m, [&](std::size_t k) {
    double e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int p = 0; p < n; ++p)
          for (int l = 0; l < n; ++l) {
            const double want = g(k, i, p) * g(k, j, l) - g(k, i, l) * g(k, j, p);
            e = std::max(e, std::abs(R.R(k, ((i * n + j) * n + p) * n + l) - want));
          }
    return e;
  });
}

void suite_cross(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  if (input) {
    MetricField g;
    if (!input_metric(*input, rows, g)) return;
    const NodeMask m = central_region(g.grid(), 0.5);
    const double scale = max_abs_R(riemann_from_christoffel(g), m) + 1e-300;
    rows.at_most("direct vs Christoffel / |R|", cross_difference(g, m) / scale, 0.1);
    return;
  }
  check_levels(cfg.levels, 2);
  for (const Family& f : metric_families(cfg.dim, cfg.seed)) {
    std::vector<double> e;
    for (int N : {cfg.levels[0], cfg.levels[1]}) {
      const GridSpec grid = GridSpec::cube(cfg.dim, N, -1, 1);
      e.push_back(cross_difference(sample_metric(grid, f.metric), central_region(grid, 0.5)));
    }
    rows.shrinks(f.name + ": direct vs Christoffel", e[0], e[1], 3.0);
  }
  std::vector<double> e;
  for (int N : {cfg.levels[0], cfg.levels[1]}) {
    const GridSpec grid = GridSpec::cube(cfg.dim, N, -1, 1);
    const MetricField g = sample_metric(grid, stereographic_metric(cfg.dim, 0.5));
    e.push_back(sphere_riemann_error(g, riemann_direct(g).sum, central_region(grid, 0.5)));
  }
  rows.shrinks("stereographic: direct vs closed form", e[0], e[1], 3.0);
}

WeightedSample random_sample(std::mt19937_64& rng, int len) {
  std::uniform_real_distribution<double> U(0.0, 3.0), W(0.1, 2.0);
  WeightedSample s;
  for (int i = 0; i < len; ++i) {
    s.values.push_back(U(rng));
    s.weights.push_back(W(rng));
  }
  return s;
}

// p int_0^inf l^(q-1) mu(l)^(q/p) dl to the 1/q, tanh-sinh on each step of mu
// (l^(q-1) is singular at 0 for q < 2).
double quadrature_norm(const WeightedSample& s, LorentzExponent e) {
  const DistributionFunction mu = distribution_function(s);
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0, a = 0;
  for (std::size_t k = 0; k < mu.levels.size(); ++k) {
    const double b = mu.levels[k], m = mu.mass[k];
    total += ts.integrate([&](double l) { return std::pow(l, e.q - 1) * std::pow(m, e.q / e.p); }, a, b);
    a = b;
  }
  return std::pow(e.p * total, 1 / e.q);
}

// ||Riem^{g_t}||_(n/2,1) for t in {0.5, 0.8, 1}.
std::vector<double> scale_family(const MetricField& g) {
  std::vector<double> r;
  const double p = g.dim() / 2.0;
  for (double t : {0.5, 0.8, 1.0}) r.push_back(riemann_lorentz_norm(scale_metric(g, t), LorentzExponent::make(p, 1)));
  return r;
}

void suite_lorentz(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  double ind = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.5})
    for (double q : {1.0, 2.0, 3.5, 7.0}) {
      const double c = 1.7, m = 0.6;
      const double want = std::pow(p / q, 1 / q) * c * std::pow(m, 1 / p);
      const double got = lorentz_norm(WeightedSample{{c, c, c}, {0.1, 0.2, 0.3}}, {p, q});
      ind = std::max(ind, std::abs(got - want) / want);
    }
  rows.at_most("indicator closed forms (relative)", ind, 1e-12);

  std::mt19937_64 rng(cfg.seed);
  double lp_err = 0;
  for (int t = 0; t < 100; ++t) {
    const WeightedSample s = random_sample(rng, 1 + t);
    const double p = 1.0 + 0.05 * t;
    double lp = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) lp += s.weights[i] * std::pow(s.values[i], p);
    lp = std::pow(lp, 1 / p);
    lp_err = std::max(lp_err, std::abs(lorentz_norm(s, {p, p}) - lp) / lp);
  }
  rows.at_most("L(p,p) = L^p on 100 samples", lp_err, 1e-10);

  double quad = 0;
  for (int t = 0; t < 20; ++t) {
    const WeightedSample s = random_sample(rng, 2 + t);
    for (auto e : {LorentzExponent{2, 1}, LorentzExponent{1.5, 3}, LorentzExponent{3, 1}, LorentzExponent{2.5, 1.5}}) {
      const double exact = lorentz_norm(s, e);
      quad = std::max(quad, std::abs(quadrature_norm(s, e) - exact) / exact);
    }
  }
  rows.at_most("quadrature oracle (relative)", quad, 1e-6);

  std::vector<double> r;
  if (input) {
    MetricField g;
    if (!input_metric(*input, rows, g)) return;
    r = scale_family(g);
  } else {
    const GridSpec grid = GridSpec::cube(3, 81, -1, 1);
    r = scale_family(sample_metric(grid, ConformalFamily{3, 0.05, Bump{{0, 0, 0}, 0.5}}.metric()));
  }
  const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
  const double spread = hi <= 1e-12 ? 0.0 : hi / lo - 1;
  rows.at_most("scale invariance of ||Riem||_(n/2,1), t in {0.5, 0.8, 1}", spread, 0.02,
               num(r[0]) + " " + num(r[1]) + " " + num(r[2]));
}

void suite_pipeline(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  if (input) {
    MetricField g;
    if (!input_metric(*input, rows, g)) return;
    const PipelineReport r = run_pipeline(g, cfg.pipeline()).report;
    rows.at_most("harmonic defect", r.harmonic_defect, cfg.certificate_tol);
    rows.at_most("residual layers of dy - omega", r.residual.total, std::max(1.0, 10 * r.curvature_norm));
    rows.add("C_emp", r.c_emp, 0, std::isfinite(r.c_emp), "deviation_barw / curvature_norm");
    rows.add("coverage", r.coverage, 0.5, r.coverage >= 0.5);
    if (r.curvature_norm <= 1e-10) rows.at_most("flat input: |z^* g - delta|", r.deviation_sup, 1e-8);
    return;
  }
  const GridSpec grid = GridSpec::cube(3, 17, -1, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineReport r = run_pipeline(MetricField::flat(grid), cfg.pipeline()).report;
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rows.at_most("flat 17^3: |z^* g - delta|", r.deviation_sup, 1e-8);
  rows.at_most("flat 17^3: harmonic defect", r.harmonic_defect, 1e-8);
  rows.at_most("flat 17^3: runtime [s]", dt, 10.0);

  try {
    run_pipeline(sample_metric(GridSpec::cube(3, 13, -1, 1), stereographic_metric(3, 1.0)), cfg.pipeline());
    rows.add("admission abort on the unit sphere chart", 0, 0, false, "pipeline accepted the input");
  } catch (const Error& e) {
    rows.add("admission abort on the unit sphere chart", 0, 0,
             e.code() == ErrorCode::AdmissionExceeded && e.stage() == "admission", e.what());
  }
  const GridSpec small = GridSpec::cube(3, 9, 0, 1);
  try {
    solve(WeakLaplacian(MetricField::flat(small), BoundaryKind::Neumann), std::vector<double>(small.size(), 1.0));
    rows.add("Neumann incompatibility raised", 0, 0, false, "solve accepted a nonzero-mean right-hand side");
  } catch (const Error& e) {
    rows.add("Neumann incompatibility raised", e.data().empty() ? 0 : e.data()[0], 1e-8,
             e.code() == ErrorCode::Compatibility, e.what());
  }
  TensorField bad = MetricField::flat(small).components();
  for (std::size_t k = 0; k < small.size(); ++k) bad(k, 1) += 1e-3;
  try {
    MetricField::from_components(bad);
    rows.add("asymmetric metric rejected", 0, 0, false, "accepted");
  } catch (const Error& e) {
    rows.add("asymmetric metric rejected", 0, 0, e.code() == ErrorCode::Symmetry, e.what());
  }
}

ImmersionField immersion_of(const GridSpec& g, const AnalyticImmersion& f) {
  return ImmersionField(sample_immersion(g, f));
}

void suite_immersion(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  if (input) {
    if (input->cov() + input->contra() != 0 || input->values() <= input->grid().dim()) {
      rows.add("input is an immersion", 0, 0, false, "immersion file must carry rank=0,d with d > n");
      return;
    }
    const ImmersionField f(*input);
    const double ii = interior_max(f.ii_norm(), 2);
    const double gc = interior_max(gauss_codazzi_residual(f), 2);
    rows.at_most("Gauss-Codazzi residual / (|II|^2 + 1e-300)", ii > 0 ? gc / (ii * ii) : gc, ii > 0 ? 0.1 : 1e-10);
    rows.at_most("II normal to the image", f.ii_tangential_defect(), 1e-6);
    const SobolevCheck s = isoperimetric_check(f);
    rows.at_least("isoperimetric margin", s.margin, 0.0, "constant " + num(s.constant_used));
    return;
  }
  for (int n : {2, 3}) {
    const std::vector<int> nodes{33, 65};
    for (int d : {n + 1, n + 2}) {
      std::vector<GraphFamily> us{GraphFamily::random(n, 4, 0.3, cfg.seed)};
      if (d == n + 2) us.push_back(GraphFamily::random(n, 4, 0.3, cfg.seed + 1000));
      const AnalyticImmersion fams[2] = {sphere_chart(n, 2.0, d), graph_immersion(us)};
      const char* names[2] = {"sphere chart", "graph"};
      for (int c = 0; c < 2; ++c) {
        std::vector<double> e;
        for (int N : nodes) {
          const double lo = c == 0 ? -0.5 : -1.0;
          const GridSpec grid = GridSpec::cube(n, N, lo, -lo);
          const TensorField r = gauss_codazzi_residual(immersion_of(grid, fams[c]));
          e.push_back(masked_max(grid, central_region(grid, 0.75), [&](std::size_t k) {
            double m = 0;
            for (int q = 0; q < r.ncomp(); ++q) m = std::max(m, std::abs(r(k, q)));
            return m;
          }));
        }
        rows.orders(std::string("Gauss-Codazzi order, ") + names[c] + " n=" + std::to_string(n) +
                        " d=" + std::to_string(d), e, 1.8);
      }
    }
  }
  rows.at_most("L(3,4) vs 3 pi^(2/3)", std::abs(brendle_constant(3, 4) / (3 * std::pow(pi, 2.0 / 3)) - 1), 1e-12);
  rows.at_most("L(3,5) vs 3 (4 pi/3)^(1/3)", std::abs(brendle_constant(3, 5) / (3 * std::cbrt(4 * pi / 3)) - 1),
               1e-12);
  double worst = std::numeric_limits<double>::infinity();
  const GridSpec cg = GridSpec::cube(3, 17, -0.5, 0.5);
  for (int i = 0; i < 10; ++i) {
    const double R = 1.5 * std::pow(1.6, i);
    const int d = 4 + i % 2;
    worst = std::min(worst, isoperimetric_check(immersion_of(cg, sphere_cap(3, d, R))).margin);
  }
  rows.at_least("Sobolev inequality, 10 caps: min margin", worst, 0.0);
}

struct CapRun {
  double eps = 0, ii = 0;
  JunctionReport coarse, fine;
  double flat_defect = 0, ii_outside = 0;
};

void suite_extension(const RunConfig& cfg, const TensorField* input, Rows& rows) {
  (void)cfg;
  if (input) {
    const ImmersionField f(*input);
    try {
      const GluedImmersion gl = glue_extension(f, {}, sphere_grid(f.dim(), 16));
      rows.at_most("flat beyond r = 2", gl.flat_defect, 0.0);
      rows.at_most("II beyond r = 2", gl.ii_outside, 1e-12);
      rows.add("||II_Psi||_(n,2)", gl.ii_norm, 0, std::isfinite(gl.ii_norm));
    } catch (const Error& e) {
      rows.add("extension hypotheses", 0, 0, false, e.what());
    }
    return;
  }
  std::vector<double> eps, ii;
  double flat = 0, outside = 0;
  for (double R : {8.0, 16.0, 32.0, 64.0}) {
    const GluedImmersion gl =
        glue_extension(immersion_of(GridSpec::cube(3, 33, -1, 1), sphere_cap(3, 4, R)), {}, sphere_grid(3, 16));
    eps.push_back(gl.data.ledger.eps);
    ii.push_back(gl.ii_norm);
    flat = std::max(flat, gl.flat_defect);
    outside = std::max(outside, gl.ii_outside);
  }
  const double slope = loglog_slope(eps, ii);
  rows.add("slope of ||II_Psi||_(3,2) vs eps", slope, 1.0 / 3, std::abs(slope - 1.0 / 3) <= 0.3, "band 1/3 +- 0.3");
  rows.at_most("flat beyond r = 2", flat, 0.0);
  rows.at_most("II beyond r = 2", outside, 1e-12);
  ExtensionConfig c2;
  c2.radial_nodes = 49;
  const JunctionReport a = junction_report(
      glue_extension(immersion_of(GridSpec::cube(3, 33, -1, 1), sphere_cap(3, 4, 8.0)), {}, sphere_grid(3, 16)));
  const JunctionReport b = junction_report(
      glue_extension(immersion_of(GridSpec::cube(3, 65, -1, 1), sphere_cap(3, 4, 8.0)), {}, sphere_grid(3, 32), c2));
  rows.shrinks("junction jump of Psi", a.value_jump, b.value_jump, 2.0, 1e-12);
  rows.shrinks("junction jump of dPsi (tangential)", a.tangential_jump, b.tangential_jump, 2.0, 1e-12);
  rows.shrinks("junction jump of n_Psi", a.normal_jump, b.normal_jump, 2.0, 1e-12);
  rows.add("radial parametrization kink (not geometric)", b.radial_jump, 0, true, num(a.radial_jump) + " -> " + num(b.radial_jump));
}

void suite_convergence(const RunConfig& cfg, const TensorField*, Rows& rows) {
  std::vector<int> lv = cfg.levels.size() >= 3 ? cfg.levels : std::vector<int>{17, 33, 65};
  check_levels(lv, 3);
  const int n = 3;
  const ConformalFamily c{n, 0.2, Bump{{0, 0, 0}, 0.8}};
  std::vector<double> gam, riem, ii, lap;
  for (int N : lv) {
    const GridSpec grid = GridSpec::cube(n, N, -1, 1);
    const NodeMask m = central_region(grid, 0.5);
    const MetricField g = sample_metric(grid, c.metric());
    const TensorField G = christoffel(g);
    std::vector<double> want(n * n * n);
    gam.push_back(masked_max(grid, m, [&](std::size_t k) {
      c.christoffel(grid.point(k).data(), want.data());
      double e = 0;
      for (int q = 0; q < n * n * n; ++q) e = std::max(e, std::abs(G(k, q) - want[q]));
      return e;
    }));
    const MetricField s = sample_metric(grid, stereographic_metric(n, 0.5));
    riem.push_back(sphere_riemann_error(s, riemann_from_christoffel(s), m));
    if (N <= 33) {
      const GridSpec sg = GridSpec::cube(n, N, -0.5, 0.5);
      const TensorField norm = immersion_of(sg, sphere_chart(n, 2.0, n + 1)).ii_norm();
      TensorField err = TensorField::scalar(sg);
      for (std::size_t k = 0; k < sg.size(); ++k) err(k, 0) = std::abs(norm(k, 0) * norm(k, 0) - n / 4.0);
      ii.push_back(interior_max(err, 2));
    }
  }
  rows.orders("Christoffel vs closed form (conformal)", gam, 1.8);
  rows.orders("Riemann vs closed form (stereographic)", riem, 1.8);
  rows.orders("|II|^2 vs n/R^2 (sphere chart)", ii, 1.8);
}

}  // namespace

// ---------------------------------------------------------------- config

void RunConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorCode::Config, m); };
  if (!(solver_tol > 0) || !(certificate_tol > 0) || !(admission_threshold > 0)) bad("tolerances must be positive");
  if (eps.empty()) bad("sweep eps list is empty");
  if (levels.empty()) bad("refinement level list is empty");
  for (int l : levels)
    if (l < 5) bad("refinement levels need at least 5 nodes per axis");
  if (dim < 2 || dim > 4) bad("dimension must be 2, 3 or 4");
  if (nodes < 5) bad("need at least 5 nodes per axis");
  if (!(lo < hi)) bad("need lo < hi");
}

PipelineConfig RunConfig::pipeline() const {
  PipelineConfig p;
  p.coulomb = coulomb;
  p.solver.tol = solver_tol;
  p.certificate_tol = certificate_tol;
  p.admission_threshold = admission_threshold;
  return p;
}

ExitCode exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Config:
    case ErrorCode::Format:
    case ErrorCode::Generation:
    case ErrorCode::InvalidGrid:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::Symmetry:
    case ErrorCode::EllipticityViolation:
    case ErrorCode::InvalidExponent:
    case ErrorCode::UnsupportedDimension:
      return ExitCode::Config;
    default:
      return ExitCode::Numerical;
  }
}

// ---------------------------------------------------------------- verify

bool SuiteReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass; });
}

std::string SuiteReport::to_json() const {
  json j;
  j["schema"] = "harmo-verify/1";
  j["suite"] = suite;
  j["passed"] = passed();
  json rows = json::array();
  for (const CheckRow& c : checks) {
    json r{{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    r["value"] = std::isfinite(c.value) ? json(c.value) : json(num(c.value));
    r["bound"] = std::isfinite(c.bound) ? json(c.bound) : json(num(c.bound));
    rows.push_back(r);
  }
  j["checks"] = rows;
  return j.dump(1);
}

std::string SuiteReport::table() const {
  std::size_t w = 5;
  for (const CheckRow& c : checks) w = std::max(w, c.name.size());
  std::ostringstream os;
  char buf[64];
  os << "suite " << suite << "\n";
  for (const CheckRow& c : checks) {
    std::snprintf(buf, sizeof buf, "  %-4s  %12.4e  %12.4e  ", c.pass ? "ok" : "FAIL", c.value, c.bound);
    os << buf << c.name << std::string(w - c.name.size(), ' ');
    if (!c.detail.empty()) os << "  " << c.detail;
    os << "\n";
  }
  os << (passed() ? "PASS" : "FAIL") << " (" << checks.size() << " checks)\n";
  return os.str();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"curvature-symmetries", "cross-formula", "lorentz",    "pipeline",
                                          "immersion",            "extension",     "convergence"};
  return s;
}

SuiteReport verify_suite(const std::string& suite, const RunConfig& cfg, const TensorField* input) {
  cfg.validate();
  SuiteReport rep;
  rep.suite = suite;
  Rows rows{rep.checks};
  if (suite == "curvature-symmetries") suite_symmetries(cfg, input, rows);
  else if (suite == "cross-formula") suite_cross(cfg, input, rows);
  else if (suite == "lorentz") suite_lorentz(cfg, input, rows);
  else if (suite == "pipeline") suite_pipeline(cfg, input, rows);
  else if (suite == "immersion") suite_immersion(cfg, input, rows);
  else if (suite == "extension") suite_extension(cfg, input, rows);
  else if (suite == "convergence") suite_convergence(cfg, input, rows);
  else fail(ErrorCode::Config, "unknown suite '" + suite + "'");
  return rep;
}

// ---------------------------------------------------------------- sweep

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b, ++m;
  }
  if (m < 2) return std::nan("");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << r[c];
    os << "\n";
  }
  return os.str();
}

const std::vector<std::string>& study_names() {
  static const std::vector<std::string> s{"flat", "conformal", "pullback", "extension", "metric-extension"};
  return s;
}

namespace {

struct Instance {
  std::vector<double> values;
  std::string status = "ok";
};

// column name -> producing operation
using Schema = std::vector<std::pair<std::string, std::string>>;

Schema pipeline_schema() {
  return {{"curvature_norm", "riemann_lorentz_norm (n/2,1)"},
          {"riem_sup", "riemann_norm sup"},
          {"deviation_sup", "run_pipeline: max |z^* g - delta|"},
          {"deviation_barw", "run_pipeline: deviation_barw"},
          {"c_emp", "deviation_barw / curvature_norm"},
          {"harmonic_defect", "harmonic_correction certificate"},
          {"residual_total", "residual_system_report"},
          {"objective_ratio", "coulomb_relax final / initial"}};
}

Instance pipeline_instance(const MetricField& g, const RunConfig& cfg) {
  Instance r;
  r.values.assign(8, std::nan(""));
  r.values[1] = riemann_norm(g, riemann_from_christoffel(g)).max_abs();
  try {
    const PipelineReport p = run_pipeline(g, cfg.pipeline()).report;
    r.values = {p.curvature_norm, r.values[1], p.deviation_sup, p.deviation_barw, p.c_emp, p.harmonic_defect,
                p.residual.total, p.objective_initial > 0 ? p.objective_final / p.objective_initial : 0.0};
  } catch (const Error& e) {
    r.status = std::string(to_string(e.code())) + (e.stage().empty() ? "" : "@" + e.stage());
  }
  return r;
}

Schema extension_schema() {
  return {{"R", "sphere_cap radius"},
          {"ledger_eps", "boundary ledger eps (max of four)"},
          {"eps_graph", "boundary ledger"},
          {"eps_tangent", "boundary ledger, L^n gradient form"},
          {"eps_tangent_w1n", "boundary ledger, W^(1,n) form"},
          {"eps_ii", "||II_Phi||_(n,2) on the unit ball"},
          {"ii_norm", "||II_Psi||_(n,2)"},
          {"three_layer", "three_layer_norm(psi')"},
          {"flat_defect", "glue_extension: max |Psi - plane| beyond r = 2"},
          {"value_jump", "junction_report"},
          {"tangential_jump", "junction_report"},
          {"normal_jump", "junction_report"},
          {"radial_kink", "junction_report"}};
}

Schema metric_extension_schema() {
  return {{"riemann_global", "metric_extension_glue"},
          {"boundary_norm", "metric_extension_glue"},
          {"interior_riemann", "metric_extension_glue"},
          {"c_emp", "riemann_global / (boundary_norm + interior_riemann)"}};
}

}  // namespace

SweepTable sweep_study(const std::string& study, const RunConfig& cfg) {
  cfg.validate();
  if (std::find(study_names().begin(), study_names().end(), study) == study_names().end())
    fail(ErrorCode::Config, "unknown study '" + study + "'");
  const Schema schema = study == "extension"          ? extension_schema()
                        : study == "metric-extension" ? metric_extension_schema()
                                                      : pipeline_schema();
  const std::size_t count = cfg.eps.size();
  std::vector<Instance> out(count);
  const int n = cfg.dim;

  parallel_tasks(count, [&](std::size_t i) {
    const double eps = cfg.eps[i];
    Instance& r = out[i];
    try {
      if (study == "extension") {
        // eps is the cap curvature 1/R
        if (!(eps > 0) || eps >= 0.5) fail(ErrorCode::Config, "extension study needs 0 < eps < 0.5 (cap curvature)");
        const double R = 1 / eps;
        const int N = cfg.nodes;
        const GluedImmersion gl =
            glue_extension(immersion_of(GridSpec::cube(3, N, -1, 1), sphere_cap(3, 4, R)), {}, sphere_grid(3, (N - 1) / 2));
        const JunctionReport j = junction_report(gl);
        const BoundaryLedger& L = gl.data.ledger;
        r.values = {R,          L.eps,        L.eps_graph,   L.eps_tangent,     L.eps_tangent_w1n,
                    L.eps_ii,   gl.ii_norm,   gl.three_layer, gl.flat_defect,   j.value_jump,
                    j.tangential_jump, j.normal_jump, j.radial_jump};
      } else if (study == "metric-extension") {
        const GridSpec inner = GridSpec::cube(n, cfg.nodes, -1.1, 1.1);
        const GridSpec box = GridSpec::cube(n, 2 * cfg.nodes - 9, -2.5, 2.5);
        std::vector<double> c(n, 0.0);
        c[0] = 0.3;
        const ConformalFamily f{n, eps, Bump{c, 1.5}};
        const MetricExtension m = metric_extension_glue(sample_metric(inner, f.metric()), box, sphere_grid(n, 16));
        r.values = {m.riemann_global, m.boundary_norm, m.interior_riemann, m.c_emp};
      } else {
        const GridSpec grid = GridSpec::cube(n, cfg.nodes, cfg.lo, cfg.hi);
        const Bump b{std::vector<double>(n, 0.5 * (cfg.lo + cfg.hi)), 0.4 * (cfg.hi - cfg.lo)};
        const AnalyticMetric am = study == "flat"        ? flat_metric(n)
                                  : study == "conformal" ? ConformalFamily{n, eps, b}.metric()
                                                         : PullbackFamily{n, eps, b}.metric();
        r = pipeline_instance(sample_metric(grid, am), cfg);
      }
    } catch (const Error& e) {
      r.values.assign(schema.size(), std::nan(""));
      r.status = to_string(e.code());
    } catch (const std::exception&) {
      r.values.assign(schema.size(), std::nan(""));
      r.status = "exception";
    }
  });

  SweepTable t;
  t.study = study;
  t.columns = {"schema", "study", "index", "eps"};
  for (const auto& c : schema) t.columns.push_back(c.first);
  t.columns.push_back("status");
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::string> row{"harmo-sweep/1", study, std::to_string(i), num(cfg.eps[i])};
    for (double v : out[i].values) row.push_back(num(v));
    row.push_back(out[i].status);
    t.rows.push_back(row);
  }

  json s;
  s["schema"] = "harmo-sweep-summary/1";
  s["study"] = study;
  json prod;
  prod["eps"] = study == "extension" ? "cap curvature 1/R" : "family amplitude";
  for (const auto& c : schema) prod[c.first] = c.second;
  s["producers"] = prod;
  int failed = 0;
  for (const Instance& r : out) failed += r.status != "ok";
  s["instances"] = count;
  s["failed"] = failed;
  auto column = [&](const std::string& name) {
    std::vector<double> v;
    const auto it = std::find_if(schema.begin(), schema.end(), [&](const auto& p) { return p.first == name; });
    if (it == schema.end()) return v;
    const std::size_t c = it - schema.begin();
    for (const Instance& r : out)
      if (r.status == "ok") v.push_back(r.values[c]);
    return v;
  };
  auto ratio = [](const std::vector<double>& v) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (double x : v) {
      if (!std::isfinite(x)) return std::nan("");
      lo = std::min(lo, x), hi = std::max(hi, x);
    }
    return v.empty() || lo <= 0 ? std::nan("") : hi / lo;
  };
  auto put = [&](const char* key, double v) { s[key] = std::isfinite(v) ? json(v) : json(nullptr); };
  if (study == "extension") {
    const double slope = loglog_slope(column("ledger_eps"), column("ii_norm"));
    put("slope_ii_vs_eps", slope);
    s["slope_target"] = 1.0 / 3;
    s["slope_band"] = 0.3;
    s["slope_in_band"] = std::isfinite(slope) && std::abs(slope - 1.0 / 3) <= 0.3;
  } else {
    const std::vector<double> C = column("c_emp");
    bool finite = !C.empty();
    double cmax = 0;
    for (double x : C) finite = finite && std::isfinite(x), cmax = std::max(cmax, std::abs(x));
    s["c_emp_finite"] = finite;
    put("c_emp_max", cmax);
    put("c_emp_max_over_min", ratio(C));
  }
  t.summary = s.dump(1);
  return t;
}

}  // namespace harmo
