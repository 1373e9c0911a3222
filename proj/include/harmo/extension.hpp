#pragma once

#include <vector>

#include "harmo/immersion.hpp"

namespace harmo {

// Latitude-longitude grid on S^(n-1), n in {2, 3}. n = 2: one periodic angle
// with `nodes` points. n = 3: (theta, phi) with theta at the `nodes` cell
// midpoints of [0, pi] (poles excluded) and phi periodic with 2*nodes points.
GridSpec sphere_grid(int n, int nodes);
// Unit vector in R^n of the angles `angles` (sphere-grid coordinates).
void sphere_point(int n, const double* angles, double* out);
// (r, angles) product grid over [r_in, r_out] sharing the sphere axes.
GridSpec annulus_grid(const GridSpec& sphere, double r_in, double r_out, int radial_nodes);
// Quadrature weights of a sphere or annulus grid for Euclidean measure:
// trapezoid in r, midpoint in theta, times r^(n-1) and sin(theta).
std::vector<double> polar_weights(const GridSpec& grid, int n);
// Flat metric of R^n in polar coordinates on an annulus grid, or the round
// metric on a sphere grid.
MetricField polar_metric(const GridSpec& grid, int n);

// Cubic Hermite profiles on [1, 2]: h0(1) = 1, h1'(1) = 1, all other end
// values and slopes zero; both vanish for r >= 2.
double hermite_h0(double r);
double hermite_h1(double r);
double hermite_h0_prime(double r);
double hermite_h1_prime(double r);
// C^2 quintic smoothstep: 1 for r <= a, 0 for r >= b.
double cutoff(double r, double a, double b);

struct ExtensionConfig {
  double K = 4.0;             // ledger constant
  double eps_max = 0.5;       // largest admissible ledger epsilon
  double offset_bound = 0.9;  // |q| < offset_bound
  double graph_radius = 1.5;  // cutoff ramps down on [(1 + graph_radius)/2, 2]
  double r_out = 2.5;
  int radial_nodes = 25;      // on [1, r_out]
  int collar_nodes = 5;       // inner polar collar [1 - (m-1)h, 1]
};

// Smallness ledger of the boundary data. The tangent hypothesis is kept in
// both forms: sup + ||grad(tau - id)||_L^n and sup + ||tau - id||_W^(1,n).
struct BoundaryLedger {
  double K = 0;
  double phi_sup = 0, dphi_sup = 0, d2phi_Ln = 0;
  double tau_sup = 0, dtau_Ln = 0, tau_Ln = 0;
  double ii_norm = 0;  // ||II_Phi||_(n,2) on the unit ball
  double eps_graph = 0, eps_tangent = 0, eps_tangent_w1n = 0, eps_ii = 0;
  double eps = 0;            // max of the four
  double tangency = 0;       // max |tau . d_theta Phi| / |d_theta Phi|
};

// Boundary data in the frame where the plane slice is the unit sphere:
// phi = (Phi - q)/rho - (theta, 0), tau = proj_T(Phi)/rho, rho = sqrt(1-|q|^2).
struct BoundaryGraphData {
  int n = 3, d = 4;
  GridSpec sphere;
  TensorField phi, tau;  // d values on the sphere grid
  std::vector<double> q;
  double rho = 1.0;
  BoundaryLedger ledger;
};

// Reads Phi and its tangent plane on |x| = 1 by cubic interpolation of an
// immersion sampled on a box containing the closed unit ball.
BoundaryGraphData boundary_graph_data(const ImmersionField& phi, const GridSpec& sphere, std::vector<double> q,
                                      double K);
// Ledger of given phi/tau (fields filled by hand); ii_norm left at `ii`.
BoundaryLedger evaluate_ledger(const BoundaryGraphData& data, double K, double ii = 0.0);

// psi'(r, theta) = h0(r) phi(theta) + h1(r) (tau(theta) - theta) on an
// annulus grid sharing the data's sphere axes; zero for r >= 2.
TensorField hermite_trace_extension(const BoundaryGraphData& data, const GridSpec& annulus);

// ||psi'||_inf + ||grad psi'||_L^n + ||hess psi'||_L^n on the annulus part r <= 2.
double three_layer_norm(const TensorField& psi_prime, int n);

struct GluedImmersion {
  ImmersionField inner;    // Phi on its box grid
  TensorField inner_mask;  // 1 on |x| <= 1
  ImmersionField collar;   // Phi on the polar collar ending at r = 1
  ImmersionField annulus;  // Psi on [1, r_out] x sphere
  TensorField psi_prime;
  BoundaryGraphData data;
  double ii_norm = 0;  // ||II_Psi||_(n,2) over the ball and the annulus
  double ii_norm_inner = 0, ii_norm_annulus = 0;
  double three_layer = 0;
  double flat_defect = 0;  // max |Psi - (q + rho (x, 0))| over r >= 2, exact 0 expected
  double ii_outside = 0;   // max |II_Psi| over nodes whose stencils stay in r > 2
};

// Psi = Phi inside, q + rho((x,0) + chi psi') on the annulus, q + rho (x,0)
// beyond r = 2. HypothesisFailure when the ledger exceeds cfg.eps_max or
// |q| >= cfg.offset_bound; data = {eps_graph, eps_tangent, eps_tangent_w1n, eps_ii}.
GluedImmersion glue_extension(const ImmersionField& phi, std::vector<double> q, const GridSpec& sphere,
                              const ExtensionConfig& cfg = {});

struct JunctionReport {
  double value_jump = 0;       // max |Psi(1+) - Phi(1-)|
  double tangential_jump = 0;  // max |d_theta Psi - d_theta Phi| on r = 1
  double radial_jump = 0;      // max |d_r Psi - d_r Phi|: parametrization kink, not geometric
  double normal_jump = 0;      // max |n_Psi - n_Phi| in Pluecker coordinates
  double normal_ratio = 0;     // normal_jump / (value_jump + tangential_jump + radial_jump)
};
JunctionReport junction_report(const GluedImmersion& glued);

// Psi sampled on a box grid of dimension n: cubic interpolation of Phi on
// |x| < 1 and of the annulus on 1 <= |x| <= r_out, q + rho (x, 0) beyond.
TensorField glued_on_box(const GluedImmersion& glued, const GridSpec& box);

struct MetricExtension {
  MetricField metric;  // on the big box
  double riemann_global = 0, riemann_inner = 0, riemann_annulus = 0, riemann_outer = 0;
  // sum_ij ||g_ij - delta||_W^(2,n/2)(S) + ||d_r g_ij||_W^(1,n/2)(S)
  double boundary_norm = 0;
  // same with exponent n (smallness hypothesis)
  double boundary_norm_n = 0;
  double interior_riemann = 0;  // ||Riem^g||_(n/2,1) of the input on its own grid, |x| <= 1
  double c_emp = 0;             // riemann_global / (boundary_norm + interior_riemann)
};

// g given on a box grid containing the closed unit ball. The extension lives
// on `box`: g inside |x| < 1, delta + chi(h0 kappa + h1 tau) on 1 <= |x| < 2
// with kappa = g - delta and tau = d_r g read on the unit sphere, delta
// beyond. ExtensionDegeneracy with the node point when SPD fails.
MetricExtension metric_extension_glue(const MetricField& g, const GridSpec& box, const GridSpec& sphere,
                                      const ExtensionConfig& cfg = {});

}  // namespace harmo
