#pragma once

#include <string>
#include <vector>

#include "harmo/curvature.hpp"

namespace harmo {

// Row i holds omega^i = W^i_a dx^a; component i*n + a.
struct CoframeField {
  TensorField W;
  const GridSpec& grid() const { return W.grid(); }
  int dim() const { return W.grid().dim(); }
};

// Connection 1-forms omega^i_j(d_k) = <nabla_{d_k} e_j, e_i>_g, component
// (i*n + j)*n + k. Antisymmetric in (i,j) exactly.
struct ConnectionForms {
  TensorField A;
  double raw_skew_defect = 0;  // before antisymmetrisation
  int dim() const { return A.grid().dim(); }
};

// Gram-Schmidt on (dx^1, ..., dx^n): W lower triangular with positive
// diagonal and W g^-1 W^T = I.
CoframeField gram_schmidt_coframe(const MetricField& g);

// max over nodes of |W g^-1 W^T - I|; minimum of det W.
double orthonormality_residual(const MetricField& g, const CoframeField& W);
double min_det(const CoframeField& W);

// W' = R W for a per-node rotation field R (component i*n + j).
CoframeField rotate_coframe(const CoframeField& W, const TensorField& R);

// omega^a_b(d_k) from A_k = -(d_k W) W^-1 + W Gamma_k W^-1, (Gamma_k)_bc = Gamma^b_kc.
ConnectionForms connection_forms(const MetricField& g, const CoframeField& W);
ConnectionForms connection_forms(const TensorField& christoffel, const CoframeField& W);

// max over masked nodes of |d omega^i - sum_j omega^j ^ omega^i_j|.
double structure_residual(const CoframeField& W, const ConnectionForms& c, const NodeMask& mask = {});

// d^{*g} omega^i and sum_j omega^i_j(e_j), component i. With d^* = -div the
// two agree.
struct FrameCodifferential {
  TensorField dstar;
  TensorField contraction;
};
FrameCodifferential frame_codifferential(const MetricField& g, const CoframeField& W, const ConnectionForms& c);

// F^i_j(d_k, d_l) = d omega^i_j + sum_m omega^i_m ^ omega^m_j,
// component ((i*n + j)*n + k)*n + l.
TensorField curvature_two_forms(const ConnectionForms& c);

// R_{klpq} = W^i_p W^j_q F^i_j(d_k, d_l): coordinate components in the
// RiemannField convention.
RiemannField riemann_from_frame(const CoframeField& W, const TensorField& F);

struct CoulombResidual {
  double interior = 0;  // max_{i<j} || d^{*eucl} omega^i_j ||_(n/2,1)
  double boundary = 0;  // max |omega^i_j(nu)| over boundary nodes
  std::string status = "ok";
};
CoulombResidual coulomb_residual(const ConnectionForms& c);

// sum_{i<j} int |omega^i_j|^2 dx + sum_{i<j} int_boundary |omega^i_j(nu)|^2.
double connection_objective(const ConnectionForms& c);

// max_{i<j} || |omega^i_j| ||_(p,q) with Euclidean weights.
double connection_lorentz_norm(const ConnectionForms& c, LorentzExponent e);

struct RelaxOptions {
  int steps = 50;
  double rate = 1.0;   // initial line-search step
  double tol = 1e-12;  // stop when objective <= tol * initial
  double solver_tol = 1e-10;
};

struct RelaxResult {
  CoframeField W;
  double initial_objective = 0;
  double final_objective = 0;
  int steps = 0;
  int accepted = 0;
  std::string status;  // converged | max-steps | stagnation
  std::vector<double> history;
};

// Gauge descent W <- exp(t xi) W. Each step solves, for every pair i<j,
// the flat Neumann problem for xi_ij with d xi_ij closest to omega^i_j,
// then halves t until the objective decreases.
RelaxResult coulomb_relax(const MetricField& g, const CoframeField& W0, const RelaxOptions& opt = {});

// exp of an antisymmetric matrix.
SmallMat rotation_exp(const SmallMat& xi);

}  // namespace harmo
