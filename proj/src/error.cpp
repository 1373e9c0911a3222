#include "harmo/error.hpp"

namespace harmo {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::StencilWidth: return "stencil-width";
    case ErrorCode::InvalidGrid: return "invalid-grid";
    case ErrorCode::InvalidVolume: return "invalid-volume-element";
    case ErrorCode::OutOfDomain: return "out-of-domain";
    case ErrorCode::InvalidSample: return "invalid-sample";
    case ErrorCode::InvalidExponent: return "invalid-exponent";
    case ErrorCode::UnsupportedDimension: return "unsupported-dimension";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::Symmetry: return "symmetry";
    case ErrorCode::EllipticityViolation: return "ellipticity-violation";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::Compatibility: return "compatibility";
    case ErrorCode::ImmersionFailure: return "immersion-failure";
    case ErrorCode::InversionFailure: return "inversion-failure";
    case ErrorCode::PullbackDegeneracy: return "pullback-degeneracy";
    case ErrorCode::CertificationFailure: return "certification-failure";
    case ErrorCode::AdmissionExceeded: return "admission-exceeded";
    case ErrorCode::Degeneracy: return "degeneracy";
    case ErrorCode::HypothesisFailure: return "hypothesis-failure";
    case ErrorCode::ExtensionDegeneracy: return "extension-degeneracy";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::Format: return "format";
    case ErrorCode::Config: return "config";
    case ErrorCode::Generation: return "generation";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& msg, std::vector<double> data) {
  throw Error(code, msg, std::move(data));
}

}  // namespace harmo
