#include "core/annualnet.hpp"

#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace extnet {

AnnualNetworkSeries annual_networks(const RankMatrix& ranks, double u_star) {
  if (!(u_star > 0.0) || !(u_star < 1.0))
    fail(ErrorCode::invalid_argument, "annual_networks: u_star must lie in (0, 1)");
  const std::size_t m = ranks.blocks();
  const std::size_t d = ranks.stations();

  AnnualNetworkSeries out;
  out.d = d;
  out.blocks = m;
  out.u_star = u_star;
  out.convention = ranks.convention();
  out.station_valid = ranks.valid();
  out.per_block.resize(m);

  std::vector<std::size_t> exceed;
  for (std::size_t t = 0; t < m; ++t) {
    out.per_block[t].label = ranks.block_label(t);
    exceed.clear();
    for (std::size_t i = 0; i < d; ++i) {
      if (ranks.is_valid(t, i) && ranks.value(t, i) > u_star) exceed.push_back(i);
    }
    auto& edges = out.per_block[t].edges;
    for (std::size_t a = 0; a < exceed.size(); ++a) {
      for (std::size_t b = a + 1; b < exceed.size(); ++b) {
        edges.emplace_back(exceed[a], exceed[b]);
      }
    }
  }
  return out;
}

LongDistanceSeries long_distance_series(const AnnualNetworkSeries& annual,
                                        const DistanceMatrix& distances, double min_distance,
                                        const LongDistanceOptions& options) {
  if (!(min_distance >= 0.0))
    fail(ErrorCode::invalid_argument, "long_distance_series: distance cutoff must be >= 0");
  const std::size_t d = annual.d;
  if (distances.size() != d)
    fail(ErrorCode::invalid_argument, "long_distance_series: distance matrix size mismatch");

  std::size_t global_eligible = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (distances(i, j) > min_distance) ++global_eligible;
    }
  }
  if (global_eligible == 0)
    fail(ErrorCode::unestimable,
         "long_distance_series: no station pair lies beyond the distance cutoff");

  LongDistanceSeries out;
  out.min_distance = min_distance;
  out.per_block_eligible = options.per_block_eligible;
  out.continuity = options.continuity;
  out.entries.resize(annual.blocks);

  for (std::size_t t = 0; t < annual.blocks; ++t) {
    LongDistanceSeries::Entry& e = out.entries[t];
    e.label = annual.per_block[t].label;

    std::size_t n_long = 0;
    for (const auto& [i, j] : annual.per_block[t].edges) {
      if (distances(i, j) > min_distance) ++n_long;
    }
    e.n_long = n_long;

    if (options.per_block_eligible) {
      std::size_t eligible = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (!annual.is_valid(t, i)) continue;
        for (std::size_t j = i + 1; j < d; ++j) {
          if (annual.is_valid(t, j) && distances(i, j) > min_distance) ++eligible;
        }
      }
      e.eligible = eligible;
    } else {
      e.eligible = global_eligible;
    }

    const double num =
        options.continuity ? static_cast<double>(n_long) + 0.5 : static_cast<double>(n_long);
    if (e.eligible > 0 && num > 0.0) {
      e.log_ratio = std::log(num / static_cast<double>(e.eligible));
      e.defined = true;
    } else {
      e.log_ratio = std::numeric_limits<double>::quiet_NaN();
      e.defined = false;
    }
  }
  return out;
}

}  // namespace extnet
