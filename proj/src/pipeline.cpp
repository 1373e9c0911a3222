#include "harmo/pipeline.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/lorentz.hpp"

namespace harmo {

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

// sup + ||grad||_(n,1) + ||hess||_(n/2,1) of each metric entry minus delta
// over the masked nodes, Euclidean weights; max over entries.
double masked_deviation_layers(const MetricField& G, const TensorField& mask) {
  const GridSpec& grid = G.grid();
  const int n = grid.dim();
  const std::size_t N = grid.size();
  const auto w = grid.quadrature_weights();
  double best = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      TensorField f = TensorField::scalar(grid);
      for (std::size_t k = 0; k < N; ++k) f(k, 0) = G(k, i, j) - (i == j ? 1.0 : 0.0);
      const TensorField d1 = gradient(f), d2 = gradient(d1);
      WeightedSample s1, s2;
      double sup = 0;
      for (std::size_t k = 0; k < N; ++k) {
        if (mask(k, 0) == 0.0) continue;
        sup = std::max(sup, std::abs(f(k, 0)));
        double a = 0, b = 0;
        for (int c = 0; c < d1.ncomp(); ++c) a += d1(k, c) * d1(k, c);
        for (int c = 0; c < d2.ncomp(); ++c) b += d2(k, c) * d2(k, c);
        s1.values.push_back(std::sqrt(a));
        s2.values.push_back(std::sqrt(b));
        s1.weights.push_back(w[k]);
        s2.weights.push_back(w[k]);
      }
      if (s1.values.empty()) continue;
      best = std::max(best, sup + lorentz_norm(s1, {double(n), 1.0}) + lorentz_norm(s2, {n / 2.0, 1.0}));
    }
  return best;
}

int total_iterations(const std::vector<SolveReport>& r) {
  int s = 0;
  for (const auto& x : r) s += x.iterations;
  return s;
}

}  // namespace

std::string PipelineReport::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["nodes"] = nodes;
  j["curvature_norm"] = curvature_norm;
  j["coulomb"] = {{"enabled", coulomb},
                  {"status", relax_status},
                  {"objective_initial", objective_initial},
                  {"objective_final", objective_final},
                  {"interior_before", coulomb_interior_before},
                  {"interior_after", coulomb_interior_after},
                  {"boundary_before", coulomb_boundary_before},
                  {"boundary_after", coulomb_boundary_after}};
  j["residual"] = nlohmann::json::parse(residual.to_json());
  j["y_iterations"] = y_iterations;
  j["pullback"] = {{"deviation_sup", pullback_deviation_sup},
                   {"deviation_barw", pullback_deviation_barw},
                   {"coverage", coverage},
                   {"unresolved", unresolved}};
  j["harmonic"] = {{"defect", harmonic_defect},
                   {"defect_fd", harmonic_defect_fd},
                   {"rounds", harmonic_rounds},
                   {"iterations", z_iterations}};
  j["deviation_sup"] = deviation_sup;
  j["deviation_barw"] = deviation_barw;
  j["c_emp"] = c_emp;
  j["y_bilipschitz"] = {y_bilipschitz.lower, y_bilipschitz.upper};
  j["z_bilipschitz"] = {z_bilipschitz.lower, z_bilipschitz.upper};
  return j.dump(2);
}

PipelineResult run_pipeline(const MetricField& g, const PipelineConfig& cfg) {
  if (!(cfg.admission_threshold > 0) || !(cfg.certificate_tol > 0))
    fail(ErrorCode::Config, "admission threshold and certificate tolerance must be positive");
  const int n = g.dim();
  PipelineResult out;
  PipelineReport& rep = out.report;
  rep.dim = n;
  rep.nodes = g.grid().size();

  rep.curvature_norm = staged("admission", [&] {
    const double c = riemann_lorentz_norm(g, {n / 2.0, 1.0});
    if (c > cfg.admission_threshold)
      fail(ErrorCode::AdmissionExceeded, "curvature norm above the admission threshold", {c, cfg.admission_threshold});
    return c;
  });

  out.coframe = staged("coframe", [&] { return gram_schmidt_coframe(g); });
  rep.coulomb = cfg.coulomb;
  staged("coulomb", [&] {
    const TensorField G = christoffel(g);
    const CoulombResidual before = coulomb_residual(connection_forms(G, out.coframe));
    rep.coulomb_interior_before = before.interior;
    rep.coulomb_boundary_before = before.boundary;
    if (cfg.coulomb) {
      RelaxResult r = coulomb_relax(g, out.coframe, cfg.relax);
      out.coframe = std::move(r.W);
      rep.relax_status = r.status;
      rep.objective_initial = r.initial_objective;
      rep.objective_final = r.final_objective;
    }
    const CoulombResidual after = coulomb_residual(connection_forms(G, out.coframe));
    rep.coulomb_interior_after = after.interior;
    rep.coulomb_boundary_after = after.boundary;
    return 0;
  });

  staged("build_y", [&] {
    BuildYResult b = build_y(g, out.coframe, cfg.solver);
    out.y = std::move(b.y);
    rep.y_iterations = total_iterations(b.reports);
    rep.residual = residual_system_report(g, out.coframe, out.y);
    rep.y_bilipschitz = out.y.bilipschitz();
    return 0;
  });

  staged("pullback", [&] {
    out.pullback = pullback_metric(g, out.y);
    rep.coverage = out.pullback.coverage;
    rep.unresolved = out.pullback.unresolved;
    const MetricField& h = out.pullback.metric;
    for (std::size_t k = 0; k < h.grid().size(); ++k) {
      if (out.pullback.covered(k, 0) == 0.0) continue;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          rep.pullback_deviation_sup = std::max(rep.pullback_deviation_sup, std::abs(h(k, i, j) - (i == j ? 1.0 : 0.0)));
    }
    rep.pullback_deviation_barw = masked_deviation_layers(h, out.pullback.covered);
    return 0;
  });

  staged("harmonic_correction", [&] {
    if (!(rep.pullback_deviation_sup < 0.5))
      fail(ErrorCode::Precondition, "pulled back metric too far from delta for the correction",
           {rep.pullback_deviation_sup});
    std::vector<TensorField> bdry;
    for (int i = 0; i < n; ++i) bdry.push_back(out.y.components().component(i));
    out.correction = harmonic_correction(g, &bdry, cfg.solver, cfg.certificate_tol, false);
    rep.harmonic_defect = out.correction.defect_max;
    rep.harmonic_defect_fd = out.correction.fd_defect_max;
    rep.harmonic_rounds = out.correction.rounds;
    rep.z_iterations = total_iterations(out.correction.reports);
    rep.deviation_sup = out.correction.deviation_sup;
    rep.deviation_barw = deviation_barw(out.correction.metric, out.correction.z);
    rep.z_bilipschitz = out.correction.z.bilipschitz();
    return 0;
  });

  rep.c_emp = rep.curvature_norm > 1e-12 ? rep.deviation_barw / rep.curvature_norm : 0.0;
  return out;
}

}  // namespace harmo
