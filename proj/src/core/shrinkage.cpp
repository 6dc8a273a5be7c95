#include "core/shrinkage.hpp"

#include <limits>

#include "core/error.hpp"

namespace extnet {

ShrunkChi shrink(const ChiMatrix& cm, const ChiCurve& curve, const Tau2Fn& tau2,
                 const BootstrapSummary& boot, const DistanceMatrix& dm) {
  const std::size_t d = cm.size();
  if (dm.size() != d || boot.d != d)
    fail(ErrorCode::invalid_argument, "shrink: inputs disagree on station count");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  ShrunkChi out;
  out.d = d;
  out.chi_tilde.assign(d * d, nan);
  out.lambda.assign(d * d, nan);
  for (std::size_t i = 0; i < d; ++i) {
    out.chi_tilde[i * d + i] = 1.0;
    out.lambda[i * d + i] = 1.0;
  }

  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (cm.is_missing(i, j) || boot.is_missing(i, j)) continue;
      const double h = dm(i, j);
      const double t2 = tau2(h);
      const double sd = boot.sd_at(i, j);
      const double s2 = sd * sd;
      const double denom = t2 + s2;
      const double lambda = denom > 0.0 ? t2 / denom : 0.0;
      const double chi = lambda * cm.chi(i, j) + (1.0 - lambda) * curve(h);
      out.chi_tilde[i * d + j] = chi;
      out.chi_tilde[j * d + i] = chi;
      out.lambda[i * d + j] = lambda;
      out.lambda[j * d + i] = lambda;
    }
  }
  return out;
}

}  // namespace extnet
