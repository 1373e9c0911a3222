// Acceptance run: one PASS/FAIL line per criterion, details indented below.
#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "harmo/analytic.hpp"
#include "harmo/curvature.hpp"
#include "harmo/elliptic.hpp"
#include "harmo/error.hpp"
#include "harmo/extension.hpp"
#include "harmo/frames.hpp"
#include "harmo/immersion.hpp"
#include "harmo/lorentz.hpp"
#include "harmo/metric_ops.hpp"
#include "harmo/pipeline.hpp"

using namespace harmo;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Criterion {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Criterion::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  pass = pass && ok;
  lines.push_back(std::string(ok ? "ok   " : "BAD  ") + buf);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double masked_max(const GridSpec& g, const NodeMask& m, const std::function<double(std::size_t)>& f) {
  double e = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (!m || m(k)) e = std::max(e, f(k));
  return e;
}

int ridx(int n, int i, int j, int k, int l) { return ((i * n + j) * n + k) * n + l; }

// Algebraic residuals computed straight from the components.
struct Symm {
  double ij = 0, kl = 0, pair = 0, bianchi = 0;
};

Symm symmetry_residuals(const RiemannField& R, const NodeMask& m) {
  const int n = R.grid().dim();
  Symm s;
  for (std::size_t p = 0; p < R.grid().size(); ++p) {
    if (m && !m(p)) continue;
    auto r = [&](int i, int j, int k, int l) { return R.R(p, ridx(n, i, j, k, l)); };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            s.ij = std::max(s.ij, std::abs(r(i, j, k, l) + r(j, i, k, l)));
            s.kl = std::max(s.kl, std::abs(r(i, j, k, l) + r(i, j, l, k)));
            s.pair = std::max(s.pair, std::abs(r(i, j, k, l) - r(k, l, i, j)));
            s.bianchi = std::max(s.bianchi, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
          }
  }
  return s;
}

// |R - (g_ik g_jl - g_il g_jk)|, the unit sphere in any chart.
double unit_sphere_error(const MetricField& g, const RiemannField& R, const NodeMask& m) {
  const int n = g.dim();
  return masked_max(g.grid(), m, [&](std::size_t p) {
    double e = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            const double want = g(p, i, k) * g(p, j, l) - g(p, i, l) * g(p, j, k);
            e = std::max(e, std::abs(R.R(p, ridx(n, i, j, k, l)) - want));
          }
    return e;
  });
}

// (int_0^inf (t^(1/p) f*(t))^q dt/t)^(1/q) for a step function f*.
double rearrangement_norm(const WeightedSample& s, double p, double q) {
  std::vector<std::size_t> idx(s.values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return std::abs(s.values[a]) > std::abs(s.values[b]); });
  boost::math::quadrature::tanh_sinh<double> ts;
  double total = 0, t0 = 0;
  for (std::size_t i : idx) {
    const double v = std::abs(s.values[i]), t1 = t0 + s.weights[i];
    // shifted to [0, w] so the abscissas stay resolved away from t = 0
    if (v > 0)
      total += std::pow(v, q) * ts.integrate([&](double u) { return std::pow(t0 + u, q / p - 1); }, 0.0, t1 - t0);
    t0 = t1;
  }
  return std::pow(total, 1 / q);
}

WeightedSample random_sample(std::mt19937_64& rng, int len) {
  std::uniform_real_distribution<double> U(-3.0, 3.0), W(0.05, 2.0);
  WeightedSample s;
  for (int i = 0; i < len; ++i) {
    s.values.push_back(U(rng));
    s.weights.push_back(W(rng));
  }
  return s;
}

double ball_volume(int k) { return std::pow(pi, k / 2.0) / std::tgamma(k / 2.0 + 1); }

// Smooth rotation field exp(s X(x)), X antisymmetric.
TensorField wiggly_rotation(const GridSpec& g, double s) {
  const int n = g.dim();
  TensorField R(g, 0, 2);
  SmallMat X(n, n);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto x = g.point(k);
    X.setZero();
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++p) {
        X(i, j) = s * std::sin(1.3 * x[0] + p) * std::cos(0.9 * x[n - 1] - 0.5 * p);
        X(j, i) = -X(i, j);
      }
    store_matrix(R, k, rotation_exp(X));
  }
  return R;
}

ImmersionField sampled(const GridSpec& g, const AnalyticImmersion& f) { return ImmersionField(sample_immersion(g, f)); }

// ------------------------------------------------------------------ criteria

void flat_exactness(Criterion& c) {
  const GridSpec g = GridSpec::cube(3, 17, -1, 1);
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineReport r = run_pipeline(MetricField::flat(g)).report;
  const double dt = seconds_since(t0);
  c.check(r.deviation_sup <= 1e-8, "|z^*g - delta|_inf = %.3e (<= 1e-8)", r.deviation_sup);
  c.check(r.harmonic_defect <= 1e-8, "harmonic defect = %.3e (<= 1e-8)", r.harmonic_defect);
  c.check(dt <= 10, "runtime %.2f s (<= 10)", dt);
}

void flat_pullback(Criterion& c) {
  const PullbackFamily f{3, 0.05, Bump{{0, 0, 0}, 0.8}};
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> riem;
  MetricField g33;
  for (int N : {33, 65}) {
    const MetricField g = sample_metric(GridSpec::cube(3, N, -1, 1), f.metric());
    riem.push_back(riemann_norm(g, riemann_from_christoffel(g)).max_abs());
    if (N == 33) g33 = g;
  }
  const double ratio = riem[0] / riem[1];
  c.check(ratio >= 3, "|Riem|_inf 33 -> 65: %.4f -> %.4f, ratio %.2f (>= 3)", riem[0], riem[1], ratio);
  PipelineConfig pc;
  pc.admission_threshold = 10;  // the discrete curvature at 33^3 is truncation error, not geometry
  const PipelineReport r = run_pipeline(g33, pc).report;
  const double bound = 10 * (pc.solver.tol + riem[0]);
  c.check(r.deviation_sup <= bound, "deviation %.3e <= 10 (tol + |Riem|) = %.3e", r.deviation_sup, bound);
  const double dt = seconds_since(t0);
  c.check(dt <= 120, "runtime %.1f s (<= 120)", dt);
}

void cross_formula(Criterion& c) {
  const int n = 3;
  const Bump b{{0, 0, 0}, 0.8};
  const std::vector<std::pair<std::string, AnalyticMetric>> fams{
      {"flat", flat_metric(n)},
      {"conformal", ConformalFamily{n, 0.2, b}.metric()},
      {"pullback", PullbackFamily{n, 0.05, b}.metric()},
      {"stereographic", stereographic_metric(n, 0.5)},
      {"graph", GraphFamily::random(n, 4, 0.3, 1).metric()}};
  auto shrinks = [&](const std::string& what, double a, double b2) {
    const bool tiny = b2 <= 1e-10;
    c.check(tiny || a / b2 >= 3, "%s: %.3e -> %.3e (ratio %.2f)", what.c_str(), a, b2, tiny ? 0.0 : a / b2);
  };
  for (const auto& [name, am] : fams) {
    std::vector<double> cross;
    std::vector<Symm> sym;
    for (int N : {33, 65}) {
      const GridSpec grid = GridSpec::cube(n, N, -1, 1);
      const NodeMask m = central_region(grid, 0.5);
      const MetricField g = sample_metric(grid, am);
      const RiemannField a = riemann_from_christoffel(g);
      const RiemannField d = riemann_direct(g).sum;
      cross.push_back(masked_max(grid, m, [&](std::size_t k) {
        double e = 0;
        for (int q = 0; q < a.R.ncomp(); ++q) e = std::max(e, std::abs(a.R(k, q) - d.R(k, q)));
        return e;
      }));
      sym.push_back(symmetry_residuals(a, m));
    }
    shrinks(name + " direct vs Christoffel", cross[0], cross[1]);
    c.check(sym[1].ij == 0, "%s antisymmetry ij exact: %.1e", name.c_str(), sym[1].ij);
    shrinks(name + " antisymmetry kl", sym[0].kl, sym[1].kl);
    shrinks(name + " pair symmetry", sym[0].pair, sym[1].pair);
    shrinks(name + " first Bianchi", sym[0].bianchi, sym[1].bianchi);
  }
  std::vector<double> e;
  for (int N : {33, 65}) {
    const GridSpec grid = GridSpec::cube(n, N, -1, 1);
    const MetricField g = sample_metric(grid, stereographic_metric(n, 0.5));
    e.push_back(unit_sphere_error(g, riemann_direct(g).sum, central_region(grid, 0.5)));
  }
  shrinks("stereographic direct vs closed form", e[0], e[1]);
}

// Residual on the central 3/4 of the box, a fixed region under refinement.
double gc_error(const GridSpec& g, const AnalyticImmersion& f) {
  const TensorField r = gauss_codazzi_residual(sampled(g, f));
  return masked_max(g, central_region(g, 0.75), [&](std::size_t k) {
    double e = 0;
    for (int q = 0; q < r.ncomp(); ++q) e = std::max(e, std::abs(r(k, q)));
    return e;
  });
}

void gauss_codazzi(Criterion& c) {
  for (int n : {2, 3})
    for (int d : {n + 1, n + 2}) {
      std::vector<GraphFamily> us{GraphFamily::random(n, 4, 0.3, 7)};
      if (d == n + 2) us.push_back(GraphFamily::random(n, 4, 0.3, 1007));
      const AnalyticImmersion fams[2] = {sphere_chart(n, 2.0, d), graph_immersion(us)};
      const double half[2] = {0.5, 1.0};
      const char* names[2] = {"sphere chart", "random graph"};
      for (int f = 0; f < 2; ++f) {
        std::vector<double> e;
        for (int N : {33, 65})
          e.push_back(gc_error(GridSpec::cube(n, N, -half[f], half[f]), fams[f]));
        const double p = std::log2(e[0] / e[1]);
        c.check(p >= 1.8, "%s n=%d d=%d: %.3e -> %.3e, order %.2f (>= 1.8)", names[f], n, d, e[0], e[1], p);
      }
    }
}

void lorentz(Criterion& c) {
  double ind = 0;
  for (double p : {1.0, 1.5, 2.0, 3.0, 5.0})
    for (double q : {1.0, 2.0, 4.0, 8.0})
      for (double mass : {0.25, 1.0, 3.0}) {
        // ||v 1_E||_(p,q) = (p/q)^(1/q) v |E|^(1/p)
        const double v = 2.5;
        const double want = std::pow(p / q, 1 / q) * v * std::pow(mass, 1 / p);
        const double got = lorentz_norm(WeightedSample{{v, -v}, {0.4 * mass, 0.6 * mass}}, LorentzExponent::make(p, q));
        ind = std::max(ind, std::abs(got - want) / want);
      }
  c.check(ind <= 1e-12, "indicator closed forms, max relative error %.2e (<= 1e-12)", ind);

  std::mt19937_64 rng(2024);
  double lp = 0;
  for (int t = 0; t < 100; ++t) {
    const WeightedSample s = random_sample(rng, 1 + t % 37);
    const double p = 1.0 + 0.07 * t;
    double sum = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) sum += s.weights[i] * std::pow(std::abs(s.values[i]), p);
    const double want = std::pow(sum, 1 / p);
    lp = std::max(lp, std::abs(lorentz_norm(s, LorentzExponent::make(p, p)) - want) / want);
  }
  c.check(lp <= 1e-10, "L(p,p) = L^p on 100 samples, max relative error %.2e (<= 1e-10)", lp);

  double quad = 0;
  for (int t = 0; t < 25; ++t) {
    const WeightedSample s = random_sample(rng, 2 + t);
    for (auto [p, q] : std::vector<std::pair<double, double>>{{2, 1}, {1.5, 3}, {3, 1}, {2.5, 1.5}, {4, 2}}) {
      const double exact = lorentz_norm(s, LorentzExponent::make(p, q));
      quad = std::max(quad, std::abs(rearrangement_norm(s, p, q) - exact) / exact);
    }
  }
  c.check(quad <= 1e-6, "rearrangement quadrature oracle, max relative error %.2e (<= 1e-6)", quad);

  const MetricField g = sample_metric(GridSpec::cube(3, 81, -1, 1), ConformalFamily{3, 0.05, Bump{{0, 0, 0}, 0.5}}.metric());
  std::vector<double> r;
  for (double t : {0.5, 0.8, 1.0}) r.push_back(riemann_lorentz_norm(scale_metric(g, t), LorentzExponent::make(1.5, 1)));
  const double spread = *std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end()) - 1;
  c.check(spread <= 0.02, "||Riem^{g_t}||_(3/2,1) at t = 0.5/0.8/1: %.4f %.4f %.4f, spread %.2f%% (<= 2%%)", r[0], r[1],
          r[2], 100 * spread);
}

void estimate_shape(Criterion& c) {
  const GridSpec grid = GridSpec::cube(3, 17, -1, 1);
  PipelineConfig pc;
  pc.admission_threshold = 10;
  std::vector<double> C;
  for (double eps : {1e-3, 5e-3, 1e-2, 5e-2}) {
    const PipelineReport r = run_pipeline(sample_metric(grid, ConformalFamily{3, eps, Bump{{0, 0, 0}, 0.8}}.metric()), pc).report;
    const double ce = r.deviation_barw / r.curvature_norm;
    c.check(std::isfinite(ce) && ce > 0, "eps %.0e: ||Riem||_(3/2,1) %.3e, barW deviation %.3e, C_emp %.4f", eps,
            r.curvature_norm, r.deviation_barw, ce);
    C.push_back(ce);
  }
  const double ratio = *std::max_element(C.begin(), C.end()) / *std::min_element(C.begin(), C.end());
  c.check(ratio <= 10, "C_emp max/min = %.3f (<= 10)", ratio);
}

void coulomb(Criterion& c) {
  const GridSpec g = GridSpec::cube(3, 17, -1, 1);
  const MetricField flat = MetricField::flat(g);
  const CoframeField W = rotate_coframe(gram_schmidt_coframe(flat), wiggly_rotation(g, 0.8));
  const RelaxResult res = coulomb_relax(flat, W, {30, 1.0, 1e-8});
  c.check(res.final_objective <= 1e-3 * res.initial_objective, "wiggly rotation: objective %.3e -> %.3e (ratio %.2e, <= 1e-3)",
          res.initial_objective, res.final_objective, res.final_objective / res.initial_objective);
  for (double eps : {0.02, 0.05}) {
    const MetricField m = sample_metric(g, ConformalFamily{3, eps, Bump{{0, 0, 0}, 0.8}}.metric());
    const CoframeField W0 = gram_schmidt_coframe(m);
    const double before = coulomb_residual(connection_forms(m, W0)).interior;
    const RelaxResult r = coulomb_relax(m, W0, {30, 1.0, 1e-10});
    const double after = coulomb_residual(connection_forms(m, r.W)).interior;
    c.check(after * 10 <= before, "conformal eps %.2f: interior residual %.3e -> %.3e (>= 10x)", eps, before, after);
  }
}

void ball_constant(Criterion& c) {
  auto L = [](int n, int d) { return n * std::pow(double(d) / (d - n) * ball_volume(d) / ball_volume(d - n), 1.0 / n); };
  for (int d : {4, 5}) {
    const double rel = std::abs(brendle_constant(3, d) / L(3, d) - 1);
    c.check(rel <= 1e-12, "L(3,%d) = %.15f vs ball volumes, relative %.1e", d, brendle_constant(3, d), rel);
  }
  const GridSpec cg = GridSpec::cube(3, 17, -0.5, 0.5);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 10; ++i) {
    const double R = 1.5 * std::pow(1.6, i);
    const int d = 4 + i % 2;
    const SobolevCheck s = isoperimetric_check(sampled(cg, sphere_cap(3, d, R)));
    worst = std::min(worst, s.margin);
    c.check(s.margin >= 0, "cap R=%.2f d=%d: lhs %.4e rhs %.4e margin %.3e", R, d, s.lhs, s.rhs, s.margin);
  }
  c.check(worst >= 0, "min margin over 10 immersions %.3e (>= 0)", worst);
}

void extension(Criterion& c) {
  std::vector<double> eps, ii;
  double flat = 0, outside = 0;
  for (double R : {8.0, 16.0, 32.0, 64.0}) {
    const GluedImmersion gl = glue_extension(sampled(GridSpec::cube(3, 33, -1, 1), sphere_cap(3, 4, R)), {}, sphere_grid(3, 16));
    eps.push_back(gl.data.ledger.eps);
    ii.push_back(gl.ii_norm);
    flat = std::max(flat, gl.flat_defect);
    outside = std::max(outside, gl.ii_outside);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double a = std::log(eps[i]), b = std::log(ii[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  const double m = eps.size();
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  c.check(std::abs(slope - 1.0 / 3) <= 0.3, "slope of ||II_Psi||_(3,2) vs eps = %.3f (band 1/3 +- 0.3); eps %.3e..%.3e",
          slope, eps.back(), eps.front());
  c.check(flat == 0, "|Psi - plane| beyond r = 2: %.1e (exactly 0)", flat);
  c.check(outside <= 1e-12, "|II_Psi| beyond r = 2: %.1e", outside);
  ExtensionConfig fine;
  fine.radial_nodes = 49;
  const JunctionReport a =
      junction_report(glue_extension(sampled(GridSpec::cube(3, 33, -1, 1), sphere_cap(3, 4, 8.0)), {}, sphere_grid(3, 16)));
  const JunctionReport b = junction_report(
      glue_extension(sampled(GridSpec::cube(3, 65, -1, 1), sphere_cap(3, 4, 8.0)), {}, sphere_grid(3, 32), fine));
  auto first_order = [&](const char* what, double x, double y) {
    c.check(y <= 1e-12 || x / y >= 2, "junction jump of %s: %.3e -> %.3e under h/2 (ratio >= 2)", what, x, y);
  };
  first_order("Psi", a.value_jump, b.value_jump);
  first_order("dPsi (tangential)", a.tangential_jump, b.tangential_jump);
  first_order("n_Psi", a.normal_jump, b.normal_jump);
}

void negative(Criterion& c) {
  const GridSpec small = GridSpec::cube(3, 9, 0, 1);
  TensorField bad = MetricField::flat(small).components();
  for (std::size_t k = 0; k < small.size(); ++k) bad(k, 1) += 1e-3;
  try {
    MetricField::from_components(bad);
    c.check(false, "asymmetric metric accepted");
  } catch (const Error& e) {
    c.check(e.code() == ErrorCode::Symmetry, "asymmetric metric: %s", e.what());
  }
  try {
    run_pipeline(sample_metric(GridSpec::cube(3, 13, -1, 1), stereographic_metric(3, 1.0)));
    c.check(false, "unit sphere chart passed admission");
  } catch (const Error& e) {
    c.check(e.code() == ErrorCode::AdmissionExceeded && e.stage() == "admission", "curvature above threshold: %s [stage %s]",
            e.what(), e.stage().c_str());
  }
  const WeakLaplacian A(MetricField::flat(small), BoundaryKind::Neumann);
  std::vector<double> rhs(small.size());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = std::cos(pi * small.point(k)[0]);
  double mean = 0, abs = 0;
  for (double v : rhs) mean += v, abs += std::abs(v);
  mean /= rhs.size();
  for (double& v : rhs) v -= mean;
  for (double rel : {1e-6, 1e-12}) {
    std::vector<double> r = rhs;
    for (double& v : r) v += rel * abs / r.size();
    try {
      solve(A, r);
      c.check(rel < 1e-8, "relative mean %.0e accepted", rel);
    } catch (const Error& e) {
      c.check(rel > 1e-8 && e.code() == ErrorCode::Compatibility, "relative mean %.0e: %s", rel, e.what());
    }
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Criterion&)>> all{
      {"flat exactness", flat_exactness},
      {"flat pullback recovery", flat_pullback},
      {"cross-formula curvature", cross_formula},
      {"Gauss-Codazzi", gauss_codazzi},
      {"Lorentz norms", lorentz},
      {"estimate-shape study", estimate_shape},
      {"Coulomb relaxation", coulomb},
      {"constant L and Sobolev inequality", ball_constant},
      {"extension scaling", extension},
      {"negative tests", negative}};
  int failed = 0, i = 0;
  for (const auto& [name, run] : all) {
    Criterion c{name};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(c);
    } catch (const std::exception& e) {
      c.check(false, "unexpected exception: %s", e.what());
    }
    std::printf("%s [%d] %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", ++i, name.c_str(), seconds_since(t0));
    for (const auto& l : c.lines) std::printf("       %s\n", l.c_str());
    std::fflush(stdout);
    failed += !c.pass;
  }
  std::printf("%d/%zu criteria pass\n", int(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
