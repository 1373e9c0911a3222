#pragma once

#include <functional>

#include "harmo/lorentz.hpp"
#include "harmo/metric.hpp"

namespace harmo {

// Gamma^k_ij, component k*n*n + i*n + j. Symmetric in (i,j) exactly.
TensorField christoffel(const MetricField& g);

// Lowered Riemann tensor R_ijkl = <R(d_i,d_j) d_l, d_k>, component ((i*n+j)*n+k)*n+l.
// Sectional curvature of span(d_i,d_j) is R_ijij / |d_i ^ d_j|^2; on the
// unit sphere R_ijkl = g_ik g_jl - g_il g_jk.
struct RiemannField {
  TensorField R;
  const GridSpec& grid() const { return R.grid(); }
};

struct RiemannSymmetry {
  double antisym_ij = 0;
  double antisym_kl = 0;
  double pair = 0;
  double bianchi = 0;
  double max() const;
};

// Node filter used by residual measurements; empty means every node.
using NodeMask = std::function<bool(std::size_t)>;

// Nodes whose coordinates lie in the central fraction `frac` of the box
// (0.5 = central half). Periodic axes are unrestricted.
NodeMask central_region(const GridSpec& g, double frac);

RiemannSymmetry riemann_symmetry(const RiemannField& r, const NodeMask& mask = {});

// R_ijk^l = d_i G^l_jk - d_j G^l_ik + G^m_jk G^l_im - G^m_ik G^l_jm, then lowered.
RiemannField riemann_from_christoffel(const MetricField& g);

// Linear second-derivative part A plus quadratic first-derivative part B,
// computed from g directly.
struct RiemannDecomposition {
  RiemannField A, B, sum;
};
RiemannDecomposition riemann_direct(const MetricField& g);

// Ric_jk = R_ijk^i.
TensorField ricci(const MetricField& g, const RiemannField& r);
TensorField ricci(const MetricField& g);

// Gamma^r = g^ij Gamma^r_ij; equals -Delta_g x^r.
TensorField harmonic_defect(const MetricField& g);

// |Riem|_g per node.
TensorField riemann_norm(const MetricField& g, const RiemannField& r);
// || |Riem|_g ||_(p,q) with dvol_g weights.
double riemann_lorentz_norm(const MetricField& g, const RiemannField& r, LorentzExponent e);
double riemann_lorentz_norm(const MetricField& g, LorentzExponent e);

// Delta_g u = (det g)^-1/2 d_a( sqrt(det g) g^ab d_b u ), nested differences.
TensorField laplace_beltrami_apply(const MetricField& g, const TensorField& u);

// nabla_j a_i = d_j a_i - Gamma^m_ji a_m, component j*n + i.
TensorField covariant_derivative_oneform(const MetricField& g, const TensorField& alpha);

// d^{*g} a = -g^ml nabla_l a_m, split as the Euclidean codifferential
// -sum_m d_m a_m plus the metric correction.
struct Codifferential {
  TensorField euclidean;
  TensorField correction;
  TensorField total;
};
Codifferential codifferential_oneform(const MetricField& g, const TensorField& alpha);

// Pointwise g-norm of a covariant tensor with `rank` indices stored row-major.
TensorField covariant_norm(const TensorField& ginv, const TensorField& t, int rank);

// Lorentz and Sobolev-Lorentz helpers living next to the metric calculus.
TensorField volume_density(const MetricField& g);

}  // namespace harmo
