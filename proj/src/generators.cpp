#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "harmo/analytic.hpp"
#include "harmo/error.hpp"
#include "harmo/extension.hpp"
#include "harmo/hgf_io.hpp"
#include "harmo/immersion.hpp"
#include "harmo/reports.hpp"

namespace harmo {

namespace {

using json = nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) fail(ErrorCode::Generation, msg);
}

json params_json(const GeneratorSpec& s) {
  return {{"kind", s.kind},     {"dim", s.dim},         {"nodes", s.nodes}, {"lo", s.lo},
          {"hi", s.hi},         {"eps", s.eps},         {"radius", s.radius}, {"scale", s.scale},
          {"ambient", s.ambient}, {"modes", s.modes}, {"seed", s.seed}};
}

// Per-node closed form sampled into a flat array, node-major.
template <class F>
std::vector<double> per_node(const GridSpec& g, int ncomp, F&& f) {
  std::vector<double> out(g.size() * ncomp);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const std::vector<double> x = g.point(k);
    f(x.data(), out.data() + k * ncomp);
  }
  return out;
}

Bump centred_bump(const GridSpec& g) {
  std::vector<double> c(g.dim());
  for (int a = 0; a < g.dim(); ++a) c[a] = g.center(a);
  return Bump{c, 0.4 * (g.upper(0) - g.lower(0))};
}

json christoffel_entry(const GridSpec& g, std::vector<double> values) {
  const int n = g.dim();
  return {{"layout", "node-major; k*n*n + i*n + j = Gamma^k_ij"}, {"ncomp", n * n * n}, {"values", std::move(values)}};
}

}  // namespace

const std::vector<std::string>& generator_kinds() {
  static const std::vector<std::string> k{"flat", "conformal", "pullback", "stereographic", "graph-immersion",
                                          "sphere-cap"};
  return k;
}

Generated generate_case(const GeneratorSpec& s) {
  require(std::find(generator_kinds().begin(), generator_kinds().end(), s.kind) != generator_kinds().end(),
          "unknown generator kind '" + s.kind + "'");
  require(s.dim >= 2 && s.dim <= 4, "dimension must be 2, 3 or 4");
  require(s.nodes >= 5 && s.nodes <= 513, "nodes per axis must be in [5, 513]");
  require(std::isfinite(s.lo) && std::isfinite(s.hi) && s.lo < s.hi, "need lo < hi");
  const GridSpec g = GridSpec::cube(s.dim, s.nodes, s.lo, s.hi);
  const int n = s.dim;

  Generated out;
  json side;
  side["schema"] = "harmo-sidecar/1";
  side["producer"] = "generate";
  side["params"] = params_json(s);
  side["grid"] = g.describe();
  json truth;

  if (s.kind == "flat") {
    out.field = MetricField::flat(g).components();
    truth["metric"] = "delta";
    truth["christoffel"] = "zero";
    truth["riemann"] = "zero";
  } else if (s.kind == "conformal") {
    require(std::abs(s.eps) <= 2.0, "conformal amplitude must satisfy |eps| <= 2");
    const ConformalFamily c{n, s.eps, centred_bump(g)};
    out.field = sample_metric(g, c.metric()).components();
    truth["metric"] = "exp(2 eps b) delta, b = (1 - |x-c|^2/r^2)^6";
    truth["bump"] = {{"center", c.bump.center}, {"radius", c.bump.radius}};
    truth["christoffel"] = christoffel_entry(
        g, per_node(g, n * n * n, [&](const double* x, double* o) { c.christoffel(x, o); }));
  } else if (s.kind == "pullback") {
    require(std::abs(s.eps) <= 0.1, "pullback amplitude must satisfy |eps| <= 0.1");
    const PullbackFamily f{n, s.eps, centred_bump(g)};
    out.field = sample_metric(g, f.metric()).components();
    truth["metric"] = "f^* delta, f = x + eps b(x) (sin(pi x_{i+1}/r))_i";
    truth["bump"] = {{"center", f.bump.center}, {"radius", f.bump.radius}};
    truth["riemann"] = "zero";
    truth["christoffel"] = christoffel_entry(
        g, per_node(g, n * n * n, [&](const double* x, double* o) { f.christoffel(x, o); }));
    truth["map"] = {{"layout", "node-major; f^i"},
                    {"values", per_node(g, n, [&](const double* x, double* o) { f.map(x, o); })}};
  } else if (s.kind == "stereographic") {
    require(s.scale > 0 && s.scale <= 4, "stereographic scale must be in (0, 4]");
    const double sc = s.scale;
    out.field = sample_metric(g, stereographic_metric(n, sc)).components();
    truth["metric"] = "4 s^2 (1 + s^2 |x|^2)^-2 delta";
    truth["riemann"] = "g_ik g_jl - g_il g_jk";
    truth["sectional_curvature"] = 1.0;
    truth["christoffel"] = christoffel_entry(g, per_node(g, n * n * n, [&](const double* x, double* o) {
      double r2 = 0;
      for (int a = 0; a < n; ++a) r2 += x[a] * x[a];
      std::vector<double> dphi(n);
      for (int a = 0; a < n; ++a) dphi[a] = -2 * sc * sc * x[a] / (1 + sc * sc * r2);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            o[k * n * n + i * n + j] =
                (i == k ? dphi[j] : 0.0) + (j == k ? dphi[i] : 0.0) - (i == j ? dphi[k] : 0.0);
    }));
  } else if (s.kind == "graph-immersion") {
    const int d = s.ambient == 0 ? n + 1 : s.ambient;
    require(d > n && d <= 8, "graph ambient dimension must be in (n, 8]");
    require(std::abs(s.eps) <= 1.0, "graph amplitude must satisfy |eps| <= 1");
    require(s.modes >= 1 && s.modes <= 16, "graph modes must be in [1, 16]");
    std::vector<GraphFamily> us;
    for (int c = 0; c < d - n; ++c) us.push_back(GraphFamily::random(n, s.modes, s.eps, s.seed + 1000u * c));
    out.field = sample_immersion(g, graph_immersion(us));
    out.immersion = true;
    json fam = json::array();
    for (const GraphFamily& u : us) fam.push_back({{"amp", u.amp}, {"phase", u.phase}, {"freq", u.freq}});
    truth["immersion"] = "(x, u_1(x), ..., u_k(x)), u = sum_m a_m sin(w_m . x + p_m)";
    truth["graphs"] = fam;
    truth["metric"] = {{"layout", "node-major; i*n + j"},
                       {"values", per_node(g, n * n, [&](const double* x, double* o) {
                          std::vector<double> du(n);
                          for (int i = 0; i < n * n; ++i) o[i] = (i % (n + 1) == 0) ? 1.0 : 0.0;
                          for (const GraphFamily& u : us) {
                            u.du(x, du.data());
                            for (int i = 0; i < n; ++i)
                              for (int j = 0; j < n; ++j) o[i * n + j] += du[i] * du[j];
                          }
                        })}};
    if (d == n + 1) {
      // scalar second fundamental form against the upward unit normal
      truth["ii_scalar"] = {{"layout", "node-major; i*n + j; u_ij / sqrt(1 + |du|^2)"},
                            {"values", per_node(g, n * n, [&](const double* x, double* o) {
                               std::vector<double> du(n), h(n * n);
                               us[0].du(x, du.data());
                               us[0].d2u(x, h.data());
                               double q = 1;
                               for (double v : du) q += v * v;
                               for (int i = 0; i < n * n; ++i) o[i] = h[i] / std::sqrt(q);
                             })}};
    }
  } else {  // sphere-cap
    const int d = s.ambient == 0 ? n + 1 : s.ambient;
    require(n == 2 || n == 3, "sphere-cap needs n in {2, 3}");
    require(d > n && d <= 8, "sphere-cap ambient dimension must be in (n, 8]");
    require(s.lo <= -1 && s.hi >= 1, "sphere-cap box must contain the closed unit ball");
    const double reach = std::sqrt(double(n)) * std::max(-s.lo, s.hi);
    require(s.radius > reach, "sphere-cap radius must exceed the box half-diagonal");
    out.field = sample_immersion(g, sphere_cap(n, d, s.radius));
    out.immersion = true;
    const double R = s.radius;
    truth["immersion"] = "(x, sqrt(R^2 - |x|^2) - sqrt(R^2 - 1), 0, ...)";
    truth["ii_norm_squared"] = n / (R * R);
    truth["mean_curvature"] = 1 / R;
    truth["boundary_tangent_offset"] = 1 / std::sqrt(R * R - 1);
    const BoundaryGraphData bd = boundary_graph_data(ImmersionField(out.field), sphere_grid(n, 16), {}, 4.0);
    const BoundaryLedger& L = bd.ledger;
    side["boundary_graph_data"] = {{"sphere_nodes", 16},
                                   {"K", L.K},
                                   {"phi_sup", L.phi_sup},
                                   {"dphi_sup", L.dphi_sup},
                                   {"d2phi_Ln", L.d2phi_Ln},
                                   {"tau_sup", L.tau_sup},
                                   {"dtau_Ln", L.dtau_Ln},
                                   {"tau_Ln", L.tau_Ln},
                                   {"ii_norm", L.ii_norm},
                                   {"eps_graph", L.eps_graph},
                                   {"eps_tangent", L.eps_tangent},
                                   {"eps_tangent_w1n", L.eps_tangent_w1n},
                                   {"eps_ii", L.eps_ii},
                                   {"eps", L.eps},
                                   {"tangency", L.tangency}};
  }
  if (!out.immersion) out.field.set_symmetry(SymmetryTag::SymmetricPair);
  side["rank"] = out.immersion ? std::vector<int>{0, out.field.values()} : std::vector<int>{2, 0};
  side["hgf_header"] = hgf_header(out.field);
  side["ground_truth"] = truth;
  out.sidecar = side.dump(1);
  return out;
}

}  // namespace harmo
