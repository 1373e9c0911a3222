#pragma once

#include <functional>
#include <string>
#include <vector>

#include "harmo/metric.hpp"

namespace harmo {

enum class BoundaryKind { Neumann, Dirichlet };

// Symmetric weak-form discretisation of u -> -d_a( sqrt(det g) g^ab d_b u ).
// Diagonal couplings live on grid edges with the harmonic mean of
// sqrt(det g) g^aa at the two ends; off-diagonal couplings live on cells
// with cell-averaged coefficients and cell-averaged differences. Rows are
// scaled by the node's quadrature weight, so A u ~ -w V div(K grad u).
// Neumann data is natural: A itself has zero row sums.
class WeakLaplacian {
 public:
  WeakLaplacian(const MetricField& g, BoundaryKind bc);

  const GridSpec& grid() const { return grid_; }
  BoundaryKind bc() const { return bc_; }
  std::size_t size() const { return grid_.size(); }

  void apply(const double* u, double* out) const;
  std::vector<double> apply(const std::vector<double>& u) const;
  const std::vector<double>& diagonal() const { return diag_; }

  // f sqrt(det g) w V.
  std::vector<double> rhs_from_source(const TensorField& f) const;
  // Weak form of int <alpha, dv>_g dvol_g with the same stencils as A, so
  // rhs_from_oneform(du) reproduces A u for affine u.
  std::vector<double> rhs_from_oneform(const TensorField& alpha) const;
  // Adds face integrals of the outward conormal flux q(node, axis, side)
  // = sqrt(det g) g^{axis b} d_b u * (side ? 1 : -1).
  void add_boundary_flux(std::vector<double>& rhs,
                         const std::function<double(std::size_t node, int axis, int side)>& q) const;

  // sqrt(det g) * quadrature weight; the measure used for mean-zero.
  const std::vector<double>& mass() const { return mass_; }

 private:
  struct Cell {
    std::size_t origin;
    std::vector<double> K;  // cell-averaged sqrt(det g) g^ab
  };
  void edge_pass(const double* u, double* out, std::vector<double>& flux) const;
  void cell_corners(std::size_t origin, std::size_t* corners) const;

  GridSpec grid_;
  BoundaryKind bc_;
  int n_ = 0;
  std::vector<std::vector<double>> edge_coef_;  // per axis, indexed by the edge's first node
  std::vector<Cell> cells_;                     // only when g has off-diagonal entries
  std::vector<double> diag_;
  std::vector<double> mass_;
  TensorField K_;
};

struct SolveOptions {
  double tol = 1e-10;
  int maxiter = 20000;
  double compat_tol = 1e-8;
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0;
  double compatibility_defect = 0;
  bool recentered = false;
  bool converged = false;
  std::vector<double> residual_curve;
  std::string to_json() const;
};

struct Solution {
  TensorField u;
  SolveReport report;
};

// Jacobi-preconditioned CG. Neumann (or torus): rhs compatibility is
// checked against compat_tol * sum|rhs| and the rhs is recentred below it;
// the solution has zero mean for mass(). Dirichlet: `boundary` supplies the
// values at box-boundary nodes; interior rows are solved.
Solution solve(const WeakLaplacian& A, std::vector<double> rhs, const SolveOptions& opt = {},
               const std::vector<double>* boundary = nullptr, const std::vector<double>* x0 = nullptr);

}  // namespace harmo
