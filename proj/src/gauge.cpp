#include <cmath>
#include <future>
#include <unsupported/Eigen/MatrixFunctions>

#include "harmo/elliptic.hpp"
#include "harmo/error.hpp"
#include "harmo/frames.hpp"

namespace harmo {

SmallMat rotation_exp(const SmallMat& xi) {
  const Eigen::MatrixXd m = xi;
  const Eigen::MatrixXd r = m.exp();
  return r;
}

namespace {

CoframeField gauge_step(const CoframeField& W, const std::vector<TensorField>& xi, double t) {
  const int n = W.dim();
  CoframeField out{W.W};
  SmallMat X(n, n);
  for (std::size_t k = 0; k < W.grid().size(); ++k) {
    X.setZero();
    int p = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++p) {
        X(i, j) = t * xi[p](k, 0);
        X(j, i) = -X(i, j);
      }
    store_matrix(out.W, k, rotation_exp(X) * node_matrix(W.W, k, n, n));
  }
  return out;
}

}  // namespace

RelaxResult coulomb_relax(const MetricField& g, const CoframeField& W0, const RelaxOptions& opt) {
  if (opt.steps < 0 || !(opt.rate > 0) || !(opt.tol >= 0)) fail(ErrorCode::Config, "relaxation needs steps >= 0, rate > 0, tol >= 0");
  const int n = g.dim();
  const GridSpec& grid = g.grid();
  const TensorField G = christoffel(g);
  const WeakLaplacian L(MetricField::flat(grid), BoundaryKind::Neumann);

  RelaxResult res;
  res.W = W0;
  ConnectionForms conn = connection_forms(G, res.W);
  double J = connection_objective(conn);
  res.initial_objective = J;
  res.history.push_back(J);
  res.status = "max-steps";
  int failures = 0;

  for (int step = 0; step < opt.steps; ++step) {
    if (J <= opt.tol * res.initial_objective || J == 0.0) {
      res.status = "converged";
      break;
    }
    // xi_ij with d xi_ij the flat L2 projection of omega^i_j onto gradients
    std::vector<std::future<TensorField>> jobs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        jobs.push_back(std::async(std::launch::async, [&, i, j]() {
          TensorField a(grid, 1, 0);
          for (std::size_t k = 0; k < grid.size(); ++k)
            for (int m = 0; m < n; ++m) a(k, m) = conn.A(k, (i * n + j) * n + m);
          return solve(L, L.rhs_from_oneform(a), {opt.solver_tol}).u;
        }));
    std::vector<TensorField> xi;
    for (auto& f : jobs) xi.push_back(f.get());

    ++res.steps;
    double t = opt.rate;
    bool accepted = false;
    while (failures < 10) {
      CoframeField Wt = gauge_step(res.W, xi, t);
      ConnectionForms ct = connection_forms(G, Wt);
      const double Jt = connection_objective(ct);
      if (Jt < J) {
        const double rel = (J - Jt) / J;
        res.W = std::move(Wt);
        conn = std::move(ct);
        J = Jt;
        res.history.push_back(J);
        ++res.accepted;
        failures = 0;
        accepted = true;
        if (rel < 1e-9) res.status = "stationary";
        break;
      }
      ++failures;
      t *= 0.5;
    }
    if (!accepted) {
      res.status = "stagnation";
      break;
    }
    if (res.status == "stationary") break;
  }
  if (res.status == "max-steps" && J <= opt.tol * res.initial_objective) res.status = "converged";
  res.final_objective = J;
  return res;
}

}  // namespace harmo
