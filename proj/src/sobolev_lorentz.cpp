#include "harmo/curvature.hpp"
#include "harmo/error.hpp"
#include "harmo/fd.hpp"
#include "harmo/lorentz.hpp"

namespace harmo {

SobolevLorentzTerms sobolev_lorentz_norm(const TensorField& f, const MetricField& g, int k, LorentzExponent e) {
  e.validate();
  if (k < 0 || k > 2) fail(ErrorCode::Precondition, "derivative order must be 0, 1 or 2");
  if (f.ncomp() != 1) fail(ErrorCode::ShapeMismatch, "scalar field expected");
  const int n = g.dim();
  const TensorField vol = volume_density(g);
  const TensorField ginv = g.inverse();
  SobolevLorentzTerms out;
  out.per_order.push_back(lorentz_norm(sample_of(f, &vol), e));
  if (k >= 1) {
    const TensorField df = gradient(f);
    out.per_order.push_back(lorentz_norm(sample_of(covariant_norm(ginv, df, 1), &vol), e));
    if (k == 2) {
      const TensorField G = christoffel(g);
      TensorField hess = gradient(df);
      for (std::size_t node = 0; node < hess.nodes(); ++node)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            for (int m = 0; m < n; ++m) hess(node, i * n + j) -= G(node, (m * n + i) * n + j) * df(node, m);
      out.per_order.push_back(lorentz_norm(sample_of(covariant_norm(ginv, hess, 2), &vol), e));
    }
  }
  for (double v : out.per_order) out.total += v;
  return out;
}

}  // namespace harmo
