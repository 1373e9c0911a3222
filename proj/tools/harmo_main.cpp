// harmo: generators, pipeline runs, verification suites and sweeps.
#include <cmath>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "harmo/analytic.hpp"
#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/extension.hpp"
#include "harmo/frames.hpp"
#include "harmo/hgf_io.hpp"
#include "harmo/immersion.hpp"
#include "harmo/pipeline.hpp"
#include "harmo/reports.hpp"

using namespace harmo;
using json = nlohmann::json;

namespace {

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << "\n";
    return;
  }
  std::ofstream os(path);
  if (!os) fail(ErrorCode::Config, "cannot write " + path);
  os << text << "\n";
}

TensorField load(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) fail(ErrorCode::Config, "missing input file " + path);
  return read_hgf(path);
}

MetricField load_metric(const std::string& path) {
  TensorField t = load(path);
  const int n = t.grid().dim();
  if (t.cov() + t.contra() != 2 || t.values() != 1 || t.ncomp() != n * n)
    fail(ErrorCode::Format, path + " is not a rank-2 metric field");
  return MetricField::from_components(std::move(t));
}

ImmersionField load_immersion(const std::string& path) {
  TensorField t = load(path);
  if (t.cov() + t.contra() != 0 || t.values() <= t.grid().dim())
    fail(ErrorCode::Format, path + " is not an immersion (rank=0,d with d > n)");
  return ImmersionField(std::move(t));
}

json symmetry_json(const RiemannSymmetry& s) {
  return {{"antisym_ij", s.antisym_ij}, {"antisym_kl", s.antisym_kl}, {"pair", s.pair}, {"bianchi", s.bianchi}};
}

int run_curvature(const std::string& in, const std::string& report, const std::string& riem_out) {
  const MetricField g = load_metric(in);
  const int n = g.dim();
  const RiemannField R = riemann_from_christoffel(g);
  const RiemannDecomposition D = riemann_direct(g);
  const NodeMask centre = central_region(g.grid(), 0.5);
  double cross = 0;
  for (std::size_t k = 0; k < g.grid().size(); ++k)
    if (centre(k))
      for (int q = 0; q < R.R.ncomp(); ++q) cross = std::max(cross, std::abs(R.R(k, q) - D.sum.R(k, q)));
  json j;
  j["schema"] = "harmo-curvature/1";
  j["input"] = in;
  j["dim"] = n;
  j["grid"] = g.grid().describe();
  j["ellipticity"] = g.ellipticity();
  j["riemann_sup"] = riemann_norm(g, R).max_abs();
  j["riemann_lorentz_n2_1"] = riemann_lorentz_norm(g, R, LorentzExponent::make(n / 2.0, 1));
  j["symmetry_central"] = symmetry_json(riemann_symmetry(R, centre));
  j["cross_formula_central"] = cross;
  j["harmonic_defect_sup"] = harmonic_defect(g).max_abs();
  if (!riem_out.empty()) write_hgf(riem_out, R.R);
  emit(report, j.dump(1));
  return 0;
}

int run_gauge(const std::string& in, bool coulomb, int steps, const std::string& out, const std::string& report) {
  const MetricField g = load_metric(in);
  CoframeField W = gram_schmidt_coframe(g);
  const ConnectionForms c0 = connection_forms(g, W);
  const CoulombResidual r0 = coulomb_residual(c0);
  json j;
  j["schema"] = "harmo-gauge/1";
  j["input"] = in;
  j["orthonormality"] = orthonormality_residual(g, W);
  j["coulomb_before"] = {{"interior", r0.interior}, {"boundary", r0.boundary}};
  j["objective_initial"] = connection_objective(c0);
  if (coulomb) {
    RelaxOptions opt;
    opt.steps = steps;
    const RelaxResult rr = coulomb_relax(g, W, opt);
    W = rr.W;
    const CoulombResidual r1 = coulomb_residual(connection_forms(g, W));
    j["relax"] = {{"status", rr.status},
                  {"steps", rr.steps},
                  {"accepted", rr.accepted},
                  {"objective_final", rr.final_objective},
                  {"history", rr.history}};
    j["coulomb_after"] = {{"interior", r1.interior}, {"boundary", r1.boundary}, {"status", r1.status}};
  }
  j["min_det"] = min_det(W);
  if (!out.empty()) write_hgf(out, W.W);
  emit(report, j.dump(1));
  return 0;
}

int run_coords(const std::string& in, const RunConfig& cfg, const std::string& out, const std::string& report) {
  const MetricField g = load_metric(in);
  const PipelineResult res = run_pipeline(g, cfg.pipeline());
  if (!out.empty()) write_hgf(out, res.correction.z.components());
  emit(report, res.report.to_json());
  return 0;
}

json ledger_json(const BoundaryLedger& L) {
  return {{"K", L.K},
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

int run_analyze(const std::string& in, const std::string& report) {
  const ImmersionField f = load_immersion(in);
  json j;
  j["schema"] = "harmo-immersion/1";
  j["input"] = in;
  j["dim"] = f.dim();
  j["ambient"] = f.ambient();
  j["ellipticity"] = f.ellipticity();
  j["ii_sup_interior"] = interior_max(f.ii_norm(), 2);
  const TensorField& H = f.mean_curvature();
  TensorField Hn = TensorField::scalar(f.grid());
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    double s = 0;
    for (int c = 0; c < H.ncomp(); ++c) s += H(k, c) * H(k, c);
    Hn(k, 0) = std::sqrt(s);
  }
  j["mean_curvature_sup_interior"] = interior_max(Hn, 2);
  j["gauss_codazzi_interior"] = interior_max(gauss_codazzi_residual(f), 2);
  j["ii_tangential_defect"] = f.ii_tangential_defect();
  const CurvatureFromII c = riemann_lorentz_from_II(f);
  j["ii_lorentz_n_2"] = c.ii;
  j["riemann_lorentz_n2_1"] = c.riemann;
  j["riemann_slack"] = c.slack;
  if (f.dim() == 2 || f.dim() == 4) {
    const EnergyReport E = energy_En(f);
    j["energy"] = {{"terms", E.terms}, {"total", E.total}};
  } else {
    j["energy"] = nullptr;
  }
  emit(report, j.dump(1));
  return 0;
}

int run_extend(const std::string& in, const std::vector<double>& q, int sphere_nodes, const ExtensionConfig& cfg,
               const std::string& out, int box_nodes, double box_half_width, const std::string& report) {
  const ImmersionField f = load_immersion(in);
  const GluedImmersion gl = glue_extension(f, q, sphere_grid(f.dim(), sphere_nodes), cfg);
  const JunctionReport jr = junction_report(gl);
  json j;
  j["schema"] = "harmo-extension/1";
  j["input"] = in;
  j["ledger"] = ledger_json(gl.data.ledger);
  j["rho"] = gl.data.rho;
  j["ii_norm"] = gl.ii_norm;
  j["ii_norm_inner"] = gl.ii_norm_inner;
  j["ii_norm_annulus"] = gl.ii_norm_annulus;
  j["three_layer"] = gl.three_layer;
  j["three_layer_over_eps_root"] = finite(gl.three_layer / std::pow(gl.data.ledger.eps, 1.0 / f.dim()));
  j["flat_defect"] = gl.flat_defect;
  j["ii_outside"] = gl.ii_outside;
  j["junction"] = {{"value", jr.value_jump},
                   {"tangential", jr.tangential_jump},
                   {"normal", jr.normal_jump},
                   {"radial_kink", jr.radial_jump}};
  if (!out.empty()) {
    const double w = box_half_width > 0 ? box_half_width : std::ceil(gl.annulus.grid().upper(0)) + 0.5;
    const GridSpec box = GridSpec::cube(f.dim(), box_nodes, -w, w);
    write_hgf(out, glued_on_box(gl, box));
    j["output_box"] = box.describe();
  }
  emit(report, j.dump(1));
  return 0;
}

int run_sobolev(const std::string& in, const std::string& test, const std::string& report) {
  const ImmersionField f = load_immersion(in);
  SobolevCheck s;
  if (test == "one") {
    s = isoperimetric_check(f);
  } else {
    const GridSpec& g = f.grid();
    const TensorField t = sample_scalar(g, [&](const std::vector<double>& x) {
      double r2 = 0;
      for (int a = 0; a < g.dim(); ++a) {
        const double h = 0.5 * g.length(a);
        r2 += (x[a] - g.center(a)) * (x[a] - g.center(a)) / (h * h);
      }
      return r2 < 1 ? std::pow(1 - r2, 3) : 0.0;
    });
    s = brendle_sobolev_check(f, t);
  }
  json j{{"schema", "harmo-sobolev/1"},
         {"input", in},
         {"test", test},
         {"ambient", s.ambient},
         {"ambient_used", s.ambient_used},
         {"constant", s.constant},
         {"constant_used", s.constant_used},
         {"lhs", s.lhs},
         {"boundary", s.boundary},
         {"bulk", s.bulk},
         {"rhs", s.rhs},
         {"margin", s.margin},
         {"margin_literal", s.margin_literal},
         {"holds", s.holds}};
  emit(report, j.dump(1));
  return s.holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmo: harmonic coordinates and immersion extension toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string report;

  // generate
  GeneratorSpec gen;
  std::string gen_out, sidecar;
  auto* g = app.add_subcommand("generate", "write a test case as HGF-1 plus a JSON sidecar");
  g->add_option("--kind", gen.kind, "flat | conformal | pullback | stereographic | graph-immersion | sphere-cap")
      ->required();
  g->add_option("--dim", gen.dim);
  g->add_option("--nodes", gen.nodes);
  g->add_option("--lo", gen.lo);
  g->add_option("--hi", gen.hi);
  g->add_option("--eps", gen.eps, "amplitude");
  g->add_option("--radius", gen.radius, "sphere-cap radius");
  g->add_option("--scale", gen.scale, "stereographic chart scale");
  g->add_option("--ambient", gen.ambient);
  g->add_option("--modes", gen.modes);
  g->add_option("--seed", gen.seed);
  g->add_option("-o,--output", gen_out)->required();
  g->add_option("--sidecar", sidecar, "default <output>.json");

  // curvature / gauge / coords
  std::string input, output, riem_out;
  auto* cv = app.add_subcommand("curvature", "curvature report of a metric file");
  cv->add_option("-i,--input", input)->required();
  cv->add_option("--report", report);
  cv->add_option("--riemann", riem_out, "write R_ijkl as HGF-1");

  int steps = 50;
  bool no_coulomb = false;
  auto* ga = app.add_subcommand("gauge", "Gram-Schmidt coframe and Coulomb relaxation");
  ga->add_option("-i,--input", input)->required();
  ga->add_option("-o,--output", output, "coframe as HGF-1");
  ga->add_option("--report", report);
  ga->add_option("--steps", steps);
  ga->add_flag("--no-coulomb", no_coulomb);

  auto* co = app.add_subcommand("coords", "full pipeline to harmonic coordinates");
  co->add_option("-i,--input", input)->required();
  co->add_option("-o,--output", output, "z as HGF-1");
  co->add_option("--report", report);
  co->add_flag("--no-coulomb", no_coulomb);
  co->add_option("--solver-tol", cfg.solver_tol);
  co->add_option("--certificate-tol", cfg.certificate_tol);
  co->add_option("--admission", cfg.admission_threshold);

  // immersion
  auto* im = app.add_subcommand("immersion", "immersion tools");
  im->require_subcommand(1);
  auto* an = im->add_subcommand("analyze", "second fundamental form, Gauss-Codazzi, energy");
  an->add_option("-i,--input", input)->required();
  an->add_option("--report", report);
  std::vector<double> q;
  int sphere_nodes = 16;
  ExtensionConfig ecfg;
  auto* ex = im->add_subcommand("extend", "glue the Hermite trace extension beyond the unit ball");
  ex->add_option("-i,--input", input)->required();
  int box_nodes = 49;
  double box_half_width = 0;
  ex->add_option("-o,--output", output, "Psi sampled on a box grid, HGF-1");
  ex->add_option("--box-nodes", box_nodes, "output nodes per axis")->check(CLI::Range(5, 513));
  ex->add_option("--box-half-width", box_half_width, "output box [-w, w]^n; default covers the annulus");
  ex->add_option("--report", report);
  ex->add_option("--q", q, "plane offset, normal to R^n x 0")->delimiter(',');
  ex->add_option("--sphere-nodes", sphere_nodes);
  ex->add_option("--radial-nodes", ecfg.radial_nodes);
  ex->add_option("--K", ecfg.K);
  ex->add_option("--eps-max", ecfg.eps_max);
  std::string test = "one";
  auto* so = im->add_subcommand("check-sobolev", "Sobolev inequality on the immersed patch");
  so->add_option("-i,--input", input)->required();
  so->add_option("--report", report);
  so->add_option("--test", test, "one | bump")->check(CLI::IsMember({"one", "bump"}));

  // verify / sweep
  std::string suite, json_out;
  auto* ve = app.add_subcommand("verify", "run an invariant suite");
  ve->add_option("--suite", suite)->required()->check(CLI::IsMember(suite_names()));
  ve->add_option("-i,--input", input);
  ve->add_option("--json", json_out, "JSON report path, '-' for stdout (table goes to stderr)");
  ve->add_option("--levels", cfg.levels)->delimiter(',');
  ve->add_option("--dim", cfg.dim);
  ve->add_option("--seed", cfg.seed);
  ve->add_flag("--no-coulomb", no_coulomb);
  ve->add_option("--admission", cfg.admission_threshold);

  std::string study, summary;
  auto* sw = app.add_subcommand("sweep", "parameter sweep as CSV");
  sw->add_option("--study", study)->required()->check(CLI::IsMember(study_names()));
  sw->add_option("--eps", cfg.eps)->delimiter(',');
  sw->add_option("--dim", cfg.dim);
  sw->add_option("--nodes", cfg.nodes);
  sw->add_option("--lo", cfg.lo);
  sw->add_option("--hi", cfg.hi);
  sw->add_option("--admission", cfg.admission_threshold);
  sw->add_option("--solver-tol", cfg.solver_tol);
  sw->add_option("--certificate-tol", cfg.certificate_tol);
  sw->add_flag("--no-coulomb", no_coulomb);
  sw->add_option("-o,--output", output, "CSV path, default stdout");
  sw->add_option("--summary", summary, "summary JSON path, default stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::Config);
  }
  cfg.coulomb = !no_coulomb;

  try {
    if (*g) {
      const Generated out = generate_case(gen);
      write_hgf(gen_out, out.field);
      emit(sidecar.empty() ? gen_out + ".json" : sidecar, out.sidecar);
      return 0;
    }
    if (*cv) return run_curvature(input, report, riem_out);
    if (*ga) return run_gauge(input, !no_coulomb, steps, output, report);
    if (*co) {
      cfg.validate();
      return run_coords(input, cfg, output, report);
    }
    if (*an) return run_analyze(input, report);
    if (*ex) return run_extend(input, q, sphere_nodes, ecfg, output, box_nodes, box_half_width, report);
    if (*so) return run_sobolev(input, test, report);
    if (*ve) {
      TensorField in;
      if (!input.empty()) in = load(input);
      const SuiteReport r = verify_suite(suite, cfg, input.empty() ? nullptr : &in);
      if (json_out == "-") {
        std::cerr << r.table();
        std::cout << r.to_json() << "\n";
      } else {
        std::cout << r.table();
        if (!json_out.empty()) emit(json_out, r.to_json());
      }
      return r.passed() ? 0 : static_cast<int>(ExitCode::Assertion);
    }
    if (*sw) {
      const SweepTable t = sweep_study(study, cfg);
      if (output.empty()) std::cout << t.to_csv();
      else emit(output, t.to_csv().substr(0, t.to_csv().size() - 1));
      if (summary.empty()) std::cerr << t.summary << "\n";
      else emit(summary, t.summary);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "harmo: " << e.what();
    if (!e.stage().empty()) std::cerr << " [stage " << e.stage() << "]";
    std::cerr << "\n";
    return static_cast<int>(exit_code_for(e.code()));
  } catch (const std::exception& e) {
    std::cerr << "harmo: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Numerical);
  }
  return static_cast<int>(ExitCode::Config);
}
