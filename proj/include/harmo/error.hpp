#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace harmo {

enum class ErrorCode {
  StencilWidth,
  InvalidGrid,
  InvalidVolume,
  OutOfDomain,
  InvalidSample,
  InvalidExponent,
  UnsupportedDimension,
  ShapeMismatch,
  Symmetry,
  EllipticityViolation,
  NonConvergence,
  Compatibility,
  ImmersionFailure,
  InversionFailure,
  PullbackDegeneracy,
  CertificationFailure,
  AdmissionExceeded,
  Degeneracy,
  HypothesisFailure,
  ExtensionDegeneracy,
  Precondition,
  Format,
  Config,
  Generation,
};

const char* to_string(ErrorCode c);

// Numerical or contract failure. `data` carries the payload some errors
// promise (offending point, residual curve, best iterate, defect values).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg, std::vector<double> data = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + msg),
        code_(code),
        data_(std::move(data)) {}

  ErrorCode code() const { return code_; }
  const std::vector<double>& data() const { return data_; }
  const std::string& stage() const { return stage_; }
  void set_stage(std::string s) { stage_ = std::move(s); }

 private:
  ErrorCode code_;
  std::vector<double> data_;
  std::string stage_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& msg, std::vector<double> data = {});

}  // namespace harmo
