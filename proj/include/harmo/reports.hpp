#pragma once

#include <string>
#include <vector>

#include "harmo/error.hpp"
#include "harmo/field.hpp"
#include "harmo/pipeline.hpp"

namespace harmo {

// Shared configuration of the command-line verbs.
struct RunConfig {
  std::string command;
  std::string input, output;
  int dim = 3;
  int nodes = 17;  // per axis, cube [lo, hi]^n
  double lo = -1.0, hi = 1.0;
  double solver_tol = 1e-10;
  double certificate_tol = 1e-6;
  double admission_threshold = 0.1;
  std::vector<double> eps{1e-3, 5e-3, 1e-2, 5e-2};
  std::vector<int> levels{33, 65};
  bool coulomb = true;
  unsigned seed = 1;

  // Config error on non-positive tolerances, empty sweep lists, bad n.
  void validate() const;
  PipelineConfig pipeline() const;
};

// Exit-status contract of the CLI.
enum class ExitCode { Pass = 0, Assertion = 1, Config = 2, Numerical = 3 };
// Error codes that describe bad input or configuration map to Config,
// everything else to Numerical.
ExitCode exit_code_for(ErrorCode c);

struct GeneratorSpec {
  std::string kind;  // see generator_kinds()
  int dim = 3;
  int nodes = 17;
  double lo = -1.0, hi = 1.0;
  double eps = 0.0;     // amplitude (conformal, pullback, graph)
  double radius = 8.0;  // sphere radius (sphere-cap)
  double scale = 1.0;   // chart scale s (stereographic)
  int ambient = 0;      // immersions; 0 means dim + 1
  int modes = 4;        // graph
  unsigned seed = 1;
};

struct Generated {
  TensorField field;    // metric (rank 2,0) or immersion (rank 0,d)
  std::string sidecar;  // JSON with the closed-form ground truth
  bool immersion = false;
};

// flat, conformal, pullback, stereographic, graph-immersion, sphere-cap.
const std::vector<std::string>& generator_kinds();
// Generation error when the parameters leave the documented ranges.
Generated generate_case(const GeneratorSpec& spec);

struct CheckRow {
  std::string name;
  double value = 0, bound = 0;
  bool pass = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckRow> checks;
  bool passed() const;
  std::string to_json() const;
  std::string table() const;
};

// curvature-symmetries | cross-formula | lorentz | pipeline | immersion |
// extension | convergence. `input` (may be null) replaces the built-in
// families where the suite accepts a file: a metric for the first four,
// an immersion for `immersion`.
const std::vector<std::string>& suite_names();
SuiteReport verify_suite(const std::string& suite, const RunConfig& cfg, const TensorField* input = nullptr);

// One CSV row per instance; failing instances keep their row with the error tag.
struct SweepTable {
  std::string study;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string summary;  // JSON: ratios and slopes across the rows
  std::string to_csv() const;
};

// flat | conformal | pullback | extension | metric-extension. Instances run
// on worker_count() threads; rows keep the sweep order.
const std::vector<std::string>& study_names();
SweepTable sweep_study(const std::string& study, const RunConfig& cfg);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace harmo
