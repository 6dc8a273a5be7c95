#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "core/bootstrap.hpp"
#include "core/chicurve.hpp"
#include "core/madogram.hpp"
#include "core/network.hpp"
#include "core/types.hpp"

namespace extnet {

// Empirical-Bayes corrected chi estimates: per pair a convex combination of
// the raw estimate and the distance-decay curve's value,
//
//   chi_tilde = lambda * chi_hat + (1 - lambda) * curve(h),
//   lambda    = tau2(h) / (tau2(h) + sd^2),
//
// so noisy pairs (large bootstrap variance) are pulled toward the spatial
// prior. Both matrices are d x d symmetric with NaN for missing pairs; the
// diagonal is chi_tilde = 1, lambda = 1.
struct ShrunkChi {
  std::size_t d = 0;
  std::vector<double> chi_tilde;
  std::vector<double> lambda;

  double chi_at(std::size_t i, std::size_t j) const { return chi_tilde[i * d + j]; }
  double lambda_at(std::size_t i, std::size_t j) const { return lambda[i * d + j]; }
  bool is_missing(std::size_t i, std::size_t j) const { return std::isnan(chi_tilde[i * d + j]); }
};

// A pair is carried as missing when either its chi estimate or its bootstrap
// sd is missing. When tau2(h) and sd are both exactly 0 the weight is defined
// as 0 (the prior wins; the data carry no information either way).
ShrunkChi shrink(const ChiMatrix& cm, const ChiCurve& curve, const Tau2Fn& tau2,
                 const BootstrapSummary& boot, const DistanceMatrix& dm);

}  // namespace extnet
