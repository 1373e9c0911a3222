#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "harmo/elliptic.hpp"
#include "harmo/frames.hpp"
#include "harmo/interp.hpp"

namespace harmo {

struct BiLipschitz {
  double lower = 0;  // l with l|a-b| <= |y(a)-y(b)|
  double upper = 0;  // L with |y(a)-y(b)| <= L|a-b|
};

// y: source grid -> R^n, orientation preserving.
class CoordinateMap {
 public:
  CoordinateMap() = default;
  // Computes dy and rejects det(dy) <= 0 with an immersion-failure error.
  explicit CoordinateMap(TensorField y);

  const TensorField& components() const { return y_; }  // R^n-valued
  const TensorField& jacobian() const { return dy_; }   // component a*n + i = d_a y^i
  const GridSpec& grid() const { return y_.grid(); }
  int dim() const { return y_.grid().dim(); }
  SmallMat jacobian_at(std::size_t node) const;
  double min_det() const { return min_det_; }

  // Ratios |y(a)-y(b)|/|a-b| over all neighbour pairs plus `pairs` random
  // node pairs.
  BiLipschitz bilipschitz(std::size_t pairs = 4000, std::uint64_t seed = 1) const;

  std::vector<double> eval(const std::vector<double>& x) const;
  // Newton iteration on y(x) = target with the cubic interpolant, up to
  // two cells of extrapolation; stops at |y(x)-target| <= 1e-10 diam.
  // Divergence after 50 steps raises an inversion failure carrying the
  // best iterate.
  std::vector<double> invert(const std::vector<double>& target, const std::vector<double>* guess = nullptr) const;

  std::vector<double> image_lower() const;
  std::vector<double> image_upper() const;

 private:
  TensorField y_, dy_;
  double min_det_ = 0;
};

struct BuildYResult {
  CoordinateMap y;
  std::vector<SolveReport> reports;
};

// -Delta_g y^i = d^{*g} omega^i, d y^i(nu) = omega^i(nu), zero mean.
BuildYResult build_y(const MetricField& g, const CoframeField& W, const SolveOptions& opt = {});

// Layers of e = dy - omega: sup |e|, ||grad e||_(n,1), ||hess e||_(n/2,1)
// (Euclidean), plus the checks of the system it satisfies.
struct ResidualReport {
  double sup = 0;
  double grad = 0;
  double hess = 0;
  double total = 0;
  double closedness = 0;    // max |d e + d omega|
  double dstar = 0;         // max over the central region of |d^{*g} e|, nested differences
  double weak = 0;          // relative residual of the assembled equation for y
  double trace = 0;         // max |e(nu_g)| on the boundary, nu_g the g-unit conormal
  std::string to_json() const;
};
ResidualReport residual_system_report(const MetricField& g, const CoframeField& W, const CoordinateMap& y);

struct PullbackResult {
  MetricField metric;   // (y^-1)^* g on the target grid
  TensorField covered;  // 1 where the preimage was found inside the source hull
  double coverage = 1;  // fraction of covered target nodes
  std::size_t unresolved = 0;  // inversions that did not converge
};

// Target grid: source shape and spacing, centred on the image box.
GridSpec target_grid(const CoordinateMap& y);
PullbackResult pullback_metric(const MetricField& g, const CoordinateMap& y);
// y^* G back on the source grid.
MetricField pushforward_check(const MetricField& G, const CoordinateMap& y);

struct HarmonicCorrection {
  CoordinateMap z;
  MetricField metric;       // metric in z coordinates at the grid nodes: M^T h M, M = (dz)^-1
  TensorField defect;       // (A z)^r / dvol at interior nodes
  double defect_max = 0;
  double fd_defect_max = 0; // |Gamma^r| = |Delta_h z^r| by nested differences, central region
  double deviation_sup = 0; // max |metric - delta|
  int rounds = 0;           // solver passes, each 100x tighter, until certified
  std::vector<SolveReport> reports;
};

// Solves Delta_h z^r = 0 with z = boundary data (identity when null),
// tightening the solver tolerance until defect_max <= certificate_tol or the
// tolerance reaches 1e-15; then raises a certification failure carrying the
// defect field. check_near_flat enforces max |h - delta| < 0.5.
HarmonicCorrection harmonic_correction(const MetricField& h, const std::vector<TensorField>* boundary = nullptr,
                                       const SolveOptions& opt = {}, double certificate_tol = 1e-6,
                                       bool check_near_flat = true);

// ||G_ij - delta_ij||_{W bar} in the coordinates of z: derivatives by the
// chain rule through (dz)^-1, weights |det dz| dV; max over components.
double deviation_barw(const MetricField& G, const CoordinateMap& z);

}  // namespace harmo
