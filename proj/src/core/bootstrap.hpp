#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "core/madogram.hpp"
#include "core/types.hpp"

namespace extnet {

// Per-pair sampling variability of the chi estimator under temporal
// resampling of whole cross-sectional block vectors. `sd` is d x d symmetric,
// NaN where a pair could not be summarized, 0 on the diagonal.
struct BootstrapSummary {
  std::size_t d = 0;
  std::vector<double> sd;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;

  double sd_at(std::size_t i, std::size_t j) const { return sd[i * d + j]; }
  bool is_missing(std::size_t i, std::size_t j) const { return std::isnan(sd[i * d + j]); }
};

// For each of B replicates: draw m block indices with replacement, re-rank
// the resampled panel, recompute the full chi matrix, then reduce to a
// per-pair sample standard deviation (taken over the replicates where the
// pair was estimable, in fixed replicate order). A pair is reported missing
// when it was unestimable in more than half of the replicates, or when fewer
// than two replicates produced a value.
//
// Deterministic given the seed and independent of worker count: replicate b
// consumes its own counter-RNG stream and writes to a preallocated slot.
BootstrapSummary bootstrap_sd(const MaximaMatrix& maxima, RankConvention convention,
                              const PairChiOptions& options, std::size_t B, std::uint64_t seed,
                              int threads = 0);

}  // namespace extnet
