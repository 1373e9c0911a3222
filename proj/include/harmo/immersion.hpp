#pragma once

#include <functional>
#include <string>
#include <vector>

#include "harmo/analytic.hpp"
#include "harmo/metric.hpp"

namespace harmo {

// x -> Phi(x) in R^ambient, evaluated pointwise.
struct AnalyticImmersion {
  std::string kind;
  int dim = 3, ambient = 4;
  std::function<void(const double* x, double* out)> map;
};

TensorField sample_immersion(const GridSpec& grid, const AnalyticImmersion& f);

// q + (x, 0); q must lie in {0}^n x R^(d-n) (empty q means 0).
AnalyticImmersion flat_immersion(int n, int d, std::vector<double> q = {});
// Inverse stereographic chart of the round S^n(R), padded with zeros up to d.
// Induced metric 4R^2 (1+|x|^2)^-2 delta.
AnalyticImmersion sphere_chart(int n, double R, int d);
// (x, u_1(x), ..., u_k(x)); d = n + k.
AnalyticImmersion graph_immersion(std::vector<GraphFamily> u);
// (x, sqrt(R^2-|x|^2) - sqrt(R^2-1), 0, ...): a cap of S^n(R) whose
// boundary circle |x| = 1 lies on the unit sphere of R^d. Needs R > sqrt(n)
// on the cube [-1,1]^n.
AnalyticImmersion sphere_cap(int n, int d, double R);

// Immersion on a grid with its derived geometry computed once at
// construction: dPhi (component a*d + c = d_a Phi^c), g = dPhi dPhi^T,
// II_ij = P_N d_i d_j Phi (component (i*n+j)*d + c), H = g^ij II_ij / n and
// the unit tangent n-vector in Pluecker coordinates (lexicographic
// n-subsets of {0..d-1}).
class ImmersionField {
 public:
  ImmersionField() = default;
  // Throws Degeneracy with the node point when dPhi loses rank.
  explicit ImmersionField(TensorField phi);

  const GridSpec& grid() const { return phi_.grid(); }
  int dim() const { return grid().dim(); }
  int ambient() const { return phi_.values(); }

  const TensorField& map() const { return phi_; }
  const TensorField& differential() const { return dphi_; }
  const MetricField& metric() const { return g_; }
  const TensorField& metric_inverse() const { return ginv_; }
  const TensorField& second_fundamental_form() const { return ii_; }
  const TensorField& mean_curvature() const { return H_; }
  const TensorField& gauss_map() const { return gauss_; }
  // Hodge dual of the Gauss map, Pluecker coordinates of the unit normal
  // (d-n)-vector; for d = n+1 the unit normal itself.
  TensorField normal() const;

  TensorField ii_norm() const;  // |II|_g
  TensorField volume_density() const { return g_.sqrt_det(); }
  double ellipticity() const { return g_.ellipticity(); }

  // Largest |<II_ij, d_a Phi>| / max(|II|, tiny) over nodes.
  double ii_tangential_defect() const;

 private:
  TensorField phi_, dphi_, ginv_, ii_, H_, gauss_;
  MetricField g_;
};

// Lexicographic k-subsets of {0..m-1}.
std::vector<std::vector<int>> subsets(int m, int k);

// Max of a scalar field over nodes at least `layers` nodes away from every
// box face.
double interior_max(const TensorField& f, int layers);

// max_ijkl |Riem(g_Phi)_ijkl - (II_ik.II_jl - II_il.II_jk)| per node.
TensorField gauss_codazzi_residual(const ImmersionField& phi);

struct EnergyReport {
  int dim = 0;
  std::vector<double> terms;  // int |nabla^i II|^(n/(i+1)) dvol, i = 0..n/2-1
  double total = 0;
};
// n = 2: int |II|^2;  n = 4: int |II|^4 + int |nabla II|^2 with
// (nabla_k II)_ij = P_N d_k II_ij - G^m_ki II_mj - G^m_kj II_im.
// Nodes within `skip_layers` of a box face are left out of the integrals.
EnergyReport energy_En(const ImmersionField& phi, int skip_layers = 0);

struct CurvatureFromII {
  double riemann = 0;  // ||Riem||_(n/2,1)
  double ii = 0;       // ||II||_(n,2)
  double slack = 0;    // 2 ii^2 - riemann
};
CurvatureFromII riemann_lorentz_from_II(const ImmersionField& phi);

double unit_ball_volume(int m);
// n (d/(d-n) |B^d| / |B^(d-n)|)^(1/n).
double brendle_constant(int n, int d);

struct SobolevCheck {
  int ambient = 0, ambient_used = 0;
  double constant = 0;       // brendle_constant(n, d)
  double constant_used = 0;  // brendle_constant(n, max(d, n+2))
  double lhs = 0;            // constant_used (int phi^(n/(n-1)))^((n-1)/n)
  double boundary = 0;       // int_dSigma phi
  double bulk = 0;           // int sqrt(|d phi|^2 + n^2 phi^2 |H|^2)
  double rhs = 0, margin = 0;
  double margin_literal = 0;  // rhs - constant * (...)
  bool holds = false;
};
// phi >= 0 scalar on the immersion grid; boundary measure from the induced
// metric on the box faces. The constant for d = n+1 is taken from the
// inclusion R^(n+1) c R^(n+2).
SobolevCheck brendle_sobolev_check(const ImmersionField& phi, const TensorField& test);
SobolevCheck isoperimetric_check(const ImmersionField& phi);

}  // namespace harmo
