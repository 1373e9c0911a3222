#pragma once

#include <string>

#include "harmo/coordinates.hpp"

namespace harmo {

struct PipelineConfig {
  bool coulomb = true;
  RelaxOptions relax{};
  SolveOptions solver{};
  double certificate_tol = 1e-6;
  double admission_threshold = 0.1;  // on ||Riem||_(n/2,1)
};

struct PipelineReport {
  int dim = 0;
  std::size_t nodes = 0;
  double curvature_norm = 0;

  bool coulomb = false;
  std::string relax_status = "skipped";
  double objective_initial = 0, objective_final = 0;
  double coulomb_interior_before = 0, coulomb_interior_after = 0;
  double coulomb_boundary_before = 0, coulomb_boundary_after = 0;

  ResidualReport residual;  // layers of dy - omega
  int y_iterations = 0;     // summed over components

  double pullback_deviation_sup = 0;   // max |(y^-1)^* g - delta| over covered nodes
  double pullback_deviation_barw = 0;  // barW-type layers over covered nodes
  double coverage = 0;
  std::size_t unresolved = 0;

  double harmonic_defect = 0;     // certified discrete |Gamma^r|
  double harmonic_defect_fd = 0;  // nested-difference |Gamma^r|, central region
  int harmonic_rounds = 0;
  int z_iterations = 0;
  double deviation_sup = 0;   // max |z^* g - delta|
  double deviation_barw = 0;  // ||z^* g - delta|| in barW, z coordinates
  double c_emp = 0;           // deviation_barw / curvature_norm, 0 when flat

  BiLipschitz y_bilipschitz, z_bilipschitz;

  std::string to_json() const;
};

struct PipelineResult {
  PipelineReport report;
  CoframeField coframe;
  CoordinateMap y;
  PullbackResult pullback;
  HarmonicCorrection correction;
};

// gram_schmidt -> optional coulomb_relax -> build_y -> pullback ->
// harmonic correction. The correction solves Delta_g z = 0 on the source
// grid with z = y on the boundary, i.e. z~ o y for Delta_h z~ = 0, z~ = id on
// the image boundary. Errors carry the failing stage (Error::stage()).
PipelineResult run_pipeline(const MetricField& g, const PipelineConfig& cfg = {});

}  // namespace harmo
