#include "harmo/extension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/interp.hpp"
#include "harmo/lorentz.hpp"

namespace harmo {

using std::numbers::pi;

namespace {

void require_polar_dim(int n) {
  if (n != 2 && n != 3) fail(ErrorCode::UnsupportedDimension, "polar grids implemented for n = 2 and 3");
}

// Axis of the polar angle theta in a sphere (offset 0) or annulus (offset 1) grid.
int theta_axis(int n, int offset) { return n == 3 ? offset : -1; }

void angles_of(const GridSpec& grid, std::size_t node, int first, int count, double* out) {
  for (int a = 0; a < count; ++a) out[a] = grid.coord(node, first + a);
}

// Euclidean d(x)/d(angle_a) on the unit sphere.
void sphere_tangents(int n, const double* ang, double* t) {
  if (n == 2) {
    t[0] = -std::sin(ang[0]);
    t[1] = std::cos(ang[0]);
    return;
  }
  const double st = std::sin(ang[0]), ct = std::cos(ang[0]), sp = std::sin(ang[1]), cp = std::cos(ang[1]);
  t[0] = ct * cp;
  t[1] = ct * sp;
  t[2] = -st;
  t[3] = -st * sp;
  t[4] = st * cp;
  t[5] = 0.0;
}

struct Layers {
  double sup = 0, grad_sup = 0, Lp = 0, grad_Lp = 0, hess_Lp = 0;
};

// Pointwise |f|, |nabla f|_g, |nabla^2 f|_g of an R^m-valued scalar field
// (Euclidean norm over values) and their sup / L^p norms against w.
Layers layers_of(const MetricField& gm, const TensorField& f, const std::vector<double>& w, double p,
                 const std::vector<char>* mask = nullptr) {
  const GridSpec& grid = f.grid();
  const int n = grid.dim();
  const std::size_t N = grid.size();
  const TensorField gi = gm.inverse();
  const TensorField G = christoffel(gm);
  std::vector<double> v2(N, 0.0), d2(N, 0.0), h2(N, 0.0);
  for (int c = 0; c < f.ncomp(); ++c) {
    const TensorField s = f.component(c);
    const TensorField ds = gradient(s);
    const TensorField dds = gradient(ds);
    std::vector<double> hess(n * n), a(n * n), b(n * n);
    for (std::size_t k = 0; k < N; ++k) {
      v2[k] += s(k, 0) * s(k, 0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d2[k] += gi(k, i * n + j) * ds(k, i) * ds(k, j);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double h = 0.5 * (dds(k, j * n + i) + dds(k, i * n + j));
          for (int m = 0; m < n; ++m) h -= G(k, (m * n + j) * n + i) * ds(k, m);
          hess[j * n + i] = h;
        }
      // |H|^2 = g^ja g^ib H_ji H_ab
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double s1 = 0;
          for (int m = 0; m < n; ++m) s1 += gi(k, j * n + m) * hess[m * n + i];
          a[j * n + i] = s1;
        }
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          double s1 = 0;
          for (int m = 0; m < n; ++m) s1 += a[j * n + m] * gi(k, m * n + i);
          b[j * n + i] = s1;
        }
      double t = 0;
      for (int q = 0; q < n * n; ++q) t += b[q] * hess[q];
      h2[k] += std::max(0.0, t);
    }
  }
  Layers L;
  double sv = 0, sd = 0, sh = 0;
  for (std::size_t k = 0; k < N; ++k) {
    if (mask && !(*mask)[k]) continue;
    const double v = std::sqrt(v2[k]), dv = std::sqrt(std::max(0.0, d2[k])), hv = std::sqrt(h2[k]);
    L.sup = std::max(L.sup, v);
    L.grad_sup = std::max(L.grad_sup, dv);
    sv += w[k] * std::pow(v, p);
    sd += w[k] * std::pow(dv, p);
    sh += w[k] * std::pow(hv, p);
  }
  L.Lp = std::pow(sv, 1.0 / p);
  L.grad_Lp = std::pow(sd, 1.0 / p);
  L.hess_Lp = std::pow(sh, 1.0 / p);
  return L;
}

void check_shared_axes(const GridSpec& sphere, const GridSpec& polar) {
  bool ok = polar.dim() == sphere.dim() + 1;
  for (int a = 0; ok && a < sphere.dim(); ++a)
    ok = polar.shape()[a + 1] == sphere.shape()[a] && polar.spacing()[a + 1] == sphere.spacing()[a] &&
         polar.origin()[a + 1] == sphere.origin()[a] && polar.periodic(a + 1) == sphere.periodic(a);
  if (!ok) fail(ErrorCode::ShapeMismatch, "annulus grid does not share the sphere axes");
}

double lorentz_of(const std::vector<double>& v, const std::vector<double>& w, LorentzExponent e) {
  if (v.empty()) return 0.0;
  return lorentz_norm(WeightedSample{v, w}, e);
}

}  // namespace

GridSpec sphere_grid(int n, int nodes) {
  require_polar_dim(n);
  if (nodes < 4) fail(ErrorCode::InvalidGrid, "sphere grid needs at least 4 nodes");
  if (n == 2) return GridSpec({nodes}, {2 * pi / nodes}, {true}, {0.0});
  const double h = pi / nodes;
  return GridSpec({nodes, 2 * nodes}, {h, h}, {false, true}, {0.5 * h, 0.0});
}

void sphere_point(int n, const double* a, double* out) {
  if (n == 2) {
    out[0] = std::cos(a[0]);
    out[1] = std::sin(a[0]);
    return;
  }
  out[0] = std::sin(a[0]) * std::cos(a[1]);
  out[1] = std::sin(a[0]) * std::sin(a[1]);
  out[2] = std::cos(a[0]);
}

GridSpec annulus_grid(const GridSpec& sphere, double r_in, double r_out, int radial_nodes) {
  if (!(r_in > 0) || !(r_out > r_in) || radial_nodes < 3) fail(ErrorCode::InvalidGrid, "bad annulus radii or node count");
  std::vector<int> shape{radial_nodes};
  std::vector<double> h{(r_out - r_in) / (radial_nodes - 1)}, o{r_in};
  std::vector<bool> per{false};
  for (int a = 0; a < sphere.dim(); ++a) {
    shape.push_back(sphere.shape()[a]);
    h.push_back(sphere.spacing()[a]);
    o.push_back(sphere.origin()[a]);
    per.push_back(sphere.periodic(a));
  }
  return GridSpec(shape, h, per, o);
}

std::vector<double> polar_weights(const GridSpec& grid, int n) {
  require_polar_dim(n);
  const bool annulus = grid.dim() == n;
  if (!annulus && grid.dim() != n - 1) fail(ErrorCode::ShapeMismatch, "not a polar grid of dimension n");
  const int off = annulus ? 1 : 0;
  const int ta = theta_axis(n, off);
  std::vector<double> w(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double v = 1.0;
    for (int a = 0; a < grid.dim(); ++a) v *= grid.spacing()[a];
    if (annulus) {
      const int i = grid.coord_index(k, 0);
      if (i == 0 || i == grid.shape()[0] - 1) v *= 0.5;
      v *= std::pow(grid.coord(k, 0), n - 1);
    }
    if (ta >= 0) v *= std::sin(grid.coord(k, ta));
    w[k] = v;
  }
  return w;
}

MetricField polar_metric(const GridSpec& grid, int n) {
  require_polar_dim(n);
  const bool annulus = grid.dim() == n;
  if (!annulus && grid.dim() != n - 1) fail(ErrorCode::ShapeMismatch, "not a polar grid of dimension n");
  const int m = grid.dim();
  TensorField g(grid, 2, 0);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = annulus ? grid.coord(k, 0) : 1.0;
    const int off = annulus ? 1 : 0;
    if (annulus) g(k, 0) = 1.0;
    g(k, off * m + off) = r * r;
    if (n == 3) {
      const double s = std::sin(grid.coord(k, off));
      g(k, (off + 1) * m + off + 1) = r * r * s * s;
    }
  }
  return MetricField::from_components(std::move(g));
}

double hermite_h0(double r) {
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

double hermite_h1(double r) {
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return t - 2.0 * t * t + t * t * t;
}

double hermite_h0_prime(double r) {
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return -6.0 * t + 6.0 * t * t;
}

double hermite_h1_prime(double r) {
  if (r >= 2.0) return 0.0;
  const double t = r - 1.0;
  return 1.0 - 4.0 * t + 3.0 * t * t;
}

double cutoff(double r, double a, double b) {
  if (r <= a) return 1.0;
  if (r >= b) return 0.0;
  const double s = (r - a) / (b - a);
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

BoundaryLedger evaluate_ledger(const BoundaryGraphData& data, double K, double ii) {
  const int n = data.n;
  const MetricField gs = polar_metric(data.sphere, n);
  const std::vector<double> w = polar_weights(data.sphere, n);
  TensorField diff = data.tau;
  std::vector<double> ang(n - 1), th(n);
  for (std::size_t k = 0; k < data.sphere.size(); ++k) {
    angles_of(data.sphere, k, 0, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    for (int c = 0; c < n; ++c) diff(k, c) -= th[c];
  }
  const Layers lp = layers_of(gs, data.phi, w, n);
  const Layers lt = layers_of(gs, diff, w, n);
  BoundaryLedger L;
  L.K = K;
  L.phi_sup = lp.sup;
  L.dphi_sup = lp.grad_sup;
  L.d2phi_Ln = lp.hess_Lp;
  L.tau_sup = lt.sup;
  L.dtau_Ln = lt.grad_Lp;
  L.tau_Ln = lt.Lp;
  L.ii_norm = ii;
  const double a = L.phi_sup + L.dphi_sup;
  L.eps_graph = a == 0.0 ? 0.0 : (K > L.d2phi_Ln ? a / (K - L.d2phi_Ln) : kInf);
  L.eps_tangent = (L.tau_sup + L.dtau_Ln) / K;
  L.eps_tangent_w1n = (L.tau_sup + L.tau_Ln + L.dtau_Ln) / K;
  L.eps_ii = ii;
  L.eps = std::max({L.eps_graph, L.eps_tangent, L.eps_tangent_w1n, L.eps_ii});
  return L;
}

BoundaryGraphData boundary_graph_data(const ImmersionField& phi, const GridSpec& sphere, std::vector<double> q,
                                      double K) {
  const int n = phi.dim(), d = phi.ambient();
  require_polar_dim(n);
  if (sphere.dim() != n - 1) fail(ErrorCode::ShapeMismatch, "sphere grid dimension must be n-1");
  if (q.empty()) q.assign(d, 0.0);
  if (static_cast<int>(q.size()) != d) fail(ErrorCode::ShapeMismatch, "offset needs d entries");
  double q2 = 0;
  for (int c = 0; c < d; ++c) {
    if (c < n && q[c] != 0.0) fail(ErrorCode::Precondition, "offset must be normal to R^n x 0");
    q2 += q[c] * q[c];
  }
  if (!(q2 < 1.0)) fail(ErrorCode::Precondition, "plane slice misses the unit sphere", {std::sqrt(q2)});

  BoundaryGraphData out;
  out.n = n;
  out.d = d;
  out.sphere = sphere;
  out.q = q;
  out.rho = std::sqrt(1.0 - q2);
  out.phi = TensorField::vector_valued(sphere, d);
  out.tau = TensorField::vector_valued(sphere, d);

  const InterpOptions cubic{InterpOrder::Cubic, 0.0};
  std::vector<double> ang(n - 1), th(n), val(d), grad(n * d), tan(3 * n);
  double tangency = 0;
  for (std::size_t k = 0; k < sphere.size(); ++k) {
    angles_of(sphere, k, 0, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    interpolate_into(phi.map(), th.data(), val.data(), grad.data(), cubic);
    SmallMat J(n, d);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < d; ++c) J(a, c) = grad[a * d + c];
    SmallVec v(d);
    for (int c = 0; c < d; ++c) v(c) = val[c];
    const SmallMat G = J * J.transpose();
    const SmallVec tau = J.transpose() * (G.ldlt().solve(J * v));
    for (int c = 0; c < d; ++c) {
      out.phi(k, c) = (val[c] - q[c]) / out.rho - (c < n ? th[c] : 0.0);
      out.tau(k, c) = tau(c) / out.rho;
    }
    sphere_tangents(n, ang.data(), tan.data());
    for (int s = 0; s < n - 1; ++s) {
      SmallVec dt = SmallVec::Zero(d);
      for (int a = 0; a < n; ++a) dt += tan[s * n + a] * J.row(a).transpose();
      tangency = std::max(tangency, std::abs(dt.dot(tau)) / dt.norm());
    }
  }

  const GridSpec& grid = phi.grid();
  const TensorField iin = phi.ii_norm();
  const TensorField vol = phi.volume_density();
  const std::vector<double> qw = grid.quadrature_weights();
  std::vector<double> vals, ws;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double r2 = 0;
    for (int a = 0; a < n; ++a) r2 += grid.coord(k, a) * grid.coord(k, a);
    if (r2 > 1.0) continue;
    vals.push_back(iin(k, 0));
    ws.push_back(qw[k] * vol(k, 0));
  }
  out.ledger = evaluate_ledger(out, K, lorentz_of(vals, ws, {double(n), 2.0}));
  out.ledger.tangency = tangency;
  return out;
}

TensorField hermite_trace_extension(const BoundaryGraphData& data, const GridSpec& annulus) {
  check_shared_axes(data.sphere, annulus);
  const int n = data.n, d = data.d;
  const std::size_t S = data.sphere.size();
  TensorField out = TensorField::vector_valued(annulus, d);
  std::vector<double> ang(n - 1), th(n);
  for (std::size_t k = 0; k < annulus.size(); ++k) {
    const double r = annulus.coord(k, 0);
    const std::size_t s = k % S;
    angles_of(data.sphere, s, 0, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    const double h0 = hermite_h0(r), h1 = hermite_h1(r);
    for (int c = 0; c < d; ++c)
      out(k, c) = h0 * data.phi(s, c) + h1 * (data.tau(s, c) - (c < n ? th[c] : 0.0));
  }
  return out;
}

double three_layer_norm(const TensorField& psi_prime, int n) {
  const GridSpec& grid = psi_prime.grid();
  const MetricField gp = polar_metric(grid, n);
  const std::vector<double> w = polar_weights(grid, n);
  std::vector<char> mask(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) mask[k] = grid.coord(k, 0) <= 2.0 + 1e-12;
  const Layers L = layers_of(gp, psi_prime, w, n, &mask);
  return L.sup + L.grad_Lp + L.hess_Lp;
}

GluedImmersion glue_extension(const ImmersionField& phi, std::vector<double> q, const GridSpec& sphere,
                              const ExtensionConfig& cfg) {
  const int n = phi.dim(), d = phi.ambient();
  if (!(cfg.graph_radius > 1.0 && cfg.graph_radius < 2.0)) fail(ErrorCode::Config, "graph radius must lie in (1, 2)");
  if (!(cfg.r_out > 2.0)) fail(ErrorCode::Config, "outer radius must exceed 2");
  if (cfg.collar_nodes < 3) fail(ErrorCode::Config, "collar needs at least 3 nodes");

  GluedImmersion out;
  out.data = boundary_graph_data(phi, sphere, q, cfg.K);
  const BoundaryGraphData& data = out.data;
  const BoundaryLedger& L = data.ledger;
  double qn = 0;
  for (double v : data.q) qn += v * v;
  qn = std::sqrt(qn);
  std::string why;
  if (!(qn < cfg.offset_bound)) why += "plane offset " + std::to_string(qn) + " not below the bound; ";
  if (!(L.eps_graph <= cfg.eps_max)) why += "graph hypothesis failed (eps " + std::to_string(L.eps_graph) + "); ";
  if (!(std::max(L.eps_tangent, L.eps_tangent_w1n) <= cfg.eps_max))
    why += "tangent hypothesis failed (eps " + std::to_string(std::max(L.eps_tangent, L.eps_tangent_w1n)) + "); ";
  if (!(L.eps_ii <= cfg.eps_max)) why += "second fundamental form too large (" + std::to_string(L.eps_ii) + "); ";
  if (!why.empty())
    fail(ErrorCode::HypothesisFailure, why, {L.eps_graph, L.eps_tangent, L.eps_tangent_w1n, L.eps_ii});

  const GridSpec ann = annulus_grid(sphere, 1.0, cfg.r_out, cfg.radial_nodes);
  const double hr = ann.spacing()[0];
  out.psi_prime = hermite_trace_extension(data, ann);
  const double a = 0.5 * (1.0 + cfg.graph_radius);

  TensorField psi = TensorField::vector_valued(ann, d);
  std::vector<double> ang(n - 1), th(n);
  for (std::size_t k = 0; k < ann.size(); ++k) {
    const double r = ann.coord(k, 0);
    angles_of(ann, k, 1, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    const double chi = cutoff(r, a, 2.0);
    for (int c = 0; c < d; ++c) {
      const double x = c < n ? r * th[c] : 0.0;
      psi(k, c) = data.q[c] + data.rho * (x + chi * out.psi_prime(k, c));
    }
    if (r >= 2.0)
      for (int c = 0; c < d; ++c) {
        const double x = c < n ? r * th[c] : 0.0;
        out.flat_defect = std::max(out.flat_defect, std::abs(psi(k, c) - (data.q[c] + data.rho * x)));
      }
  }
  out.annulus = ImmersionField(std::move(psi));

  const GridSpec col = annulus_grid(sphere, 1.0 - (cfg.collar_nodes - 1) * hr, 1.0, cfg.collar_nodes);
  TensorField cphi = TensorField::vector_valued(col, d);
  const InterpOptions cubic{InterpOrder::Cubic, 0.0};
  std::vector<double> x(n);
  for (std::size_t k = 0; k < col.size(); ++k) {
    angles_of(col, k, 1, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    for (int c = 0; c < n; ++c) x[c] = col.coord(k, 0) * th[c];
    interpolate_into(phi.map(), x.data(), cphi.node_ptr(k), nullptr, cubic);
  }
  out.collar = ImmersionField(std::move(cphi));
  out.inner = phi;

  const GridSpec& grid = phi.grid();
  out.inner_mask = TensorField::scalar(grid);
  const TensorField iin = phi.ii_norm();
  const TensorField vin = phi.volume_density();
  const std::vector<double> qw = grid.quadrature_weights();
  std::vector<double> v_in, w_in, v_an, w_an;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double r2 = 0;
    for (int c = 0; c < n; ++c) r2 += grid.coord(k, c) * grid.coord(k, c);
    if (r2 > 1.0) continue;
    out.inner_mask(k, 0) = 1.0;
    v_in.push_back(iin(k, 0));
    w_in.push_back(qw[k] * vin(k, 0));
  }
  // parameter weights: trapezoid in r, midpoint in theta, no Jacobian (it
  // sits in the induced volume density)
  const TensorField ian = out.annulus.ii_norm();
  const TensorField van = out.annulus.volume_density();
  for (std::size_t k = 0; k < ann.size(); ++k) {
    double w = 1.0;
    for (int c = 0; c < ann.dim(); ++c) w *= ann.spacing()[c];
    const int i = ann.coord_index(k, 0);
    if (i == 0 || i == ann.shape()[0] - 1) w *= 0.5;
    v_an.push_back(ian(k, 0));
    w_an.push_back(w * van(k, 0));
    if (ann.coord(k, 0) > 2.0 + 2.0 * hr + 1e-12) out.ii_outside = std::max(out.ii_outside, ian(k, 0));
  }
  const LorentzExponent e{double(n), 2.0};
  out.ii_norm_inner = lorentz_of(v_in, w_in, e);
  out.ii_norm_annulus = lorentz_of(v_an, w_an, e);
  std::vector<double> v_all = v_in, w_all = w_in;
  v_all.insert(v_all.end(), v_an.begin(), v_an.end());
  w_all.insert(w_all.end(), w_an.begin(), w_an.end());
  out.ii_norm = lorentz_of(v_all, w_all, e);
  out.three_layer = three_layer_norm(out.psi_prime, n);
  return out;
}

JunctionReport junction_report(const GluedImmersion& glued) {
  const ImmersionField& in = glued.collar;
  const ImmersionField& out = glued.annulus;
  const int n = in.dim(), d = in.ambient();
  const std::size_t S = glued.data.sphere.size();
  const std::size_t base = (in.grid().shape()[0] - 1) * S;
  const int np = in.gauss_map().ncomp();
  JunctionReport rep;
  for (std::size_t s = 0; s < S; ++s) {
    const std::size_t ki = base + s, ko = s;
    double v = 0, t = 0, r = 0, g = 0;
    for (int c = 0; c < d; ++c) v += std::pow(out.map()(ko, c) - in.map()(ki, c), 2);
    for (int a = 0; a < n; ++a) {
      double j = 0;
      for (int c = 0; c < d; ++c) j += std::pow(out.differential()(ko, a * d + c) - in.differential()(ki, a * d + c), 2);
      (a == 0 ? r : t) += j;
    }
    for (int p = 0; p < np; ++p) g += std::pow(out.gauss_map()(ko, p) - in.gauss_map()(ki, p), 2);
    rep.value_jump = std::max(rep.value_jump, std::sqrt(v));
    rep.tangential_jump = std::max(rep.tangential_jump, std::sqrt(t));
    rep.radial_jump = std::max(rep.radial_jump, std::sqrt(r));
    rep.normal_jump = std::max(rep.normal_jump, std::sqrt(g));
  }
  const double den = rep.value_jump + rep.tangential_jump + rep.radial_jump;
  rep.normal_ratio = den > 0 ? rep.normal_jump / den : 0.0;
  return rep;
}

TensorField glued_on_box(const GluedImmersion& glued, const GridSpec& box) {
  const int n = glued.inner.dim(), d = glued.inner.ambient();
  if (box.dim() != n) fail(ErrorCode::ShapeMismatch, "box grid must have the dimension of the immersion");
  for (int a = 0; a < n; ++a)
    if (box.periodic(a)) fail(ErrorCode::InvalidGrid, "glued_on_box needs a box topology");
  const GridSpec& ann = glued.annulus.grid();
  const double r_out = ann.upper(0);
  const BoundaryGraphData& data = glued.data;
  const InterpOptions inner{InterpOrder::Cubic, 0.0};
  // theta nodes start half a cell from the poles
  const InterpOptions polar{InterpOrder::Cubic, 1.0};

  TensorField out = TensorField::vector_valued(box, d);
  std::vector<double> x(n), p(n);
  for (std::size_t k = 0; k < box.size(); ++k) {
    double r2 = 0;
    for (int c = 0; c < n; ++c) {
      x[c] = box.coord(k, c);
      r2 += x[c] * x[c];
    }
    const double r = std::sqrt(r2);
    double* o = out.node_ptr(k);
    if (r < 1.0) {
      interpolate_into(glued.inner.map(), x.data(), o, nullptr, inner);
    } else if (r <= r_out) {
      double phi = std::atan2(x[1], x[0]);
      if (phi < 0) phi += 2 * pi;
      p[0] = r;
      if (n == 2) {
        p[1] = phi;
      } else {
        p[1] = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
        p[2] = phi;
      }
      interpolate_into(glued.annulus.map(), p.data(), o, nullptr, polar);
    } else {
      for (int c = 0; c < d; ++c) o[c] = data.q[c] + data.rho * (c < n ? x[c] : 0.0);
    }
  }
  return out;
}

MetricExtension metric_extension_glue(const MetricField& g, const GridSpec& box, const GridSpec& sphere,
                                      const ExtensionConfig& cfg) {
  const int n = g.dim();
  require_polar_dim(n);
  if (box.dim() != n || sphere.dim() != n - 1) fail(ErrorCode::ShapeMismatch, "box and sphere grids must match n");
  if (!(cfg.graph_radius > 1.0 && cfg.graph_radius < 2.0)) fail(ErrorCode::Config, "graph radius must lie in (1, 2)");
  const int nn = n * n;
  const double a = 0.5 * (1.0 + cfg.graph_radius);
  const InterpOptions cubic{InterpOrder::Cubic, 0.0};
  const TensorField& gc = g.components();

  TensorField out(box, 2, 0);
  std::vector<double> x(n), th(n), val(nn), grad(n * nn);
  for (std::size_t k = 0; k < box.size(); ++k) {
    double r2 = 0;
    for (int c = 0; c < n; ++c) {
      x[c] = box.coord(k, c);
      r2 += x[c] * x[c];
    }
    const double r = std::sqrt(r2);
    double* o = out.node_ptr(k);
    for (int i = 0; i < n; ++i) o[i * n + i] = 1.0;
    if (r < 1.0) {
      interpolate_into(gc, x.data(), o, nullptr, cubic);
    } else if (r < 2.0) {
      for (int c = 0; c < n; ++c) th[c] = x[c] / r;
      interpolate_into(gc, th.data(), val.data(), grad.data(), cubic);
      const double chi = cutoff(r, a, 2.0), h0 = hermite_h0(r), h1 = hermite_h1(r);
      for (int q = 0; q < nn; ++q) {
        double tau = 0;
        for (int c = 0; c < n; ++c) tau += th[c] * grad[c * nn + q];
        const double kappa = val[q] - (q % (n + 1) == 0 ? 1.0 : 0.0);
        o[q] += chi * (h0 * kappa + h1 * tau);
      }
    }
    SmallMat m = node_matrix(out, k, n, n);
    m = 0.5 * (m + m.transpose()).eval();
    store_matrix(out, k, m);
    Eigen::SelfAdjointEigenSolver<SmallMat> es(m, Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0)) fail(ErrorCode::ExtensionDegeneracy, "extended metric not positive definite", x);
  }

  MetricExtension rep;
  rep.metric = MetricField::from_components(std::move(out));
  const RiemannField R = riemann_from_christoffel(rep.metric);
  const TensorField mag = riemann_norm(rep.metric, R);
  const TensorField vol = rep.metric.sqrt_det();
  const std::vector<double> qw = box.quadrature_weights();
  std::vector<double> v[3], w[3], va, wa;
  for (std::size_t k = 0; k < box.size(); ++k) {
    double r2 = 0;
    for (int c = 0; c < n; ++c) r2 += box.coord(k, c) * box.coord(k, c);
    const int region = r2 < 1.0 ? 0 : (r2 < 4.0 ? 1 : 2);
    v[region].push_back(mag(k, 0));
    w[region].push_back(qw[k] * vol(k, 0));
    va.push_back(mag(k, 0));
    wa.push_back(qw[k] * vol(k, 0));
  }
  const LorentzExponent e{n / 2.0, 1.0};
  rep.riemann_inner = lorentz_of(v[0], w[0], e);
  rep.riemann_annulus = lorentz_of(v[1], w[1], e);
  rep.riemann_outer = lorentz_of(v[2], w[2], e);
  rep.riemann_global = lorentz_of(va, wa, e);

  // trace data on the sphere grid, one scalar field per entry
  const MetricField gs = polar_metric(sphere, n);
  const std::vector<double> sw = polar_weights(sphere, n);
  std::vector<TensorField> kap(nn, TensorField::scalar(sphere)), tau(nn, TensorField::scalar(sphere));
  std::vector<double> ang(n - 1);
  for (std::size_t k = 0; k < sphere.size(); ++k) {
    angles_of(sphere, k, 0, n - 1, ang.data());
    sphere_point(n, ang.data(), th.data());
    interpolate_into(gc, th.data(), val.data(), grad.data(), cubic);
    for (int q = 0; q < nn; ++q) {
      double t = 0;
      for (int c = 0; c < n; ++c) t += th[c] * grad[c * nn + q];
      kap[q](k, 0) = val[q] - (q % (n + 1) == 0 ? 1.0 : 0.0);
      tau[q](k, 0) = t;
    }
  }
  for (int q = 0; q < nn; ++q) {
    const Layers kh = layers_of(gs, kap[q], sw, n / 2.0), th2 = layers_of(gs, tau[q], sw, n / 2.0);
    rep.boundary_norm += kh.Lp + kh.grad_Lp + kh.hess_Lp + th2.Lp + th2.grad_Lp;
    const Layers kn = layers_of(gs, kap[q], sw, n), tn = layers_of(gs, tau[q], sw, n);
    rep.boundary_norm_n += kn.Lp + kn.grad_Lp + kn.hess_Lp + tn.Lp + tn.grad_Lp;
  }

  const GridSpec& gg = g.grid();
  const TensorField gmag = riemann_norm(g, riemann_from_christoffel(g));
  const TensorField gvol = g.sqrt_det();
  const std::vector<double> gw = gg.quadrature_weights();
  std::vector<double> vi, wi;
  for (std::size_t k = 0; k < gg.size(); ++k) {
    double r2 = 0;
    for (int c = 0; c < n; ++c) r2 += gg.coord(k, c) * gg.coord(k, c);
    if (r2 > 1.0) continue;
    vi.push_back(gmag(k, 0));
    wi.push_back(gw[k] * gvol(k, 0));
  }
  rep.interior_riemann = lorentz_of(vi, wi, e);
  const double den = rep.boundary_norm + rep.interior_riemann;
  rep.c_emp = den > 1e-14 ? rep.riemann_global / den : 0.0;
  return rep;
}

}  // namespace harmo
