#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "core/types.hpp"

namespace extnet {

// Per-block co-exceedance networks: within block t, stations i and j connect
// when both rank values exceed u_star (strictly). Invalid cells never
// connect. The station-validity mask is retained because downstream
// eligible-pair counts depend on which stations had data in each block.
struct AnnualNetworkSeries {
  struct BlockEdges {
    long long label = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // i < j
  };

  std::size_t d = 0;
  std::size_t blocks = 0;
  double u_star = 0.0;
  RankConvention convention = RankConvention::over_m_plus_1;
  std::vector<BlockEdges> per_block;
  std::vector<unsigned char> station_valid;  // blocks x d mask

  bool is_valid(std::size_t t, std::size_t i) const { return station_valid[t * d + i] != 0; }
};

// u_star must lie in (0,1). The rank convention is taken from the RankMatrix;
// over_m_plus_1 keeps every rank strictly below 1 so u_star acts as a real
// quantile (with plain over_m ranks the block maximum always has rank 1 and
// exceeds any threshold).
AnnualNetworkSeries annual_networks(const RankMatrix& ranks, double u_star);

struct LongDistanceOptions {
  // Count eligible pairs per block over the stations valid in that block
  // (default), or over all stations regardless of data availability.
  bool per_block_eligible = true;
  // Replace log(N/P) by log((N+0.5)/P) so zero-count blocks stay defined.
  bool continuity = false;
};

// Per-block count of long-distance edges and the log of its ratio to the
// eligible long-distance pair total.
struct LongDistanceSeries {
  struct Entry {
    long long label = 0;
    std::size_t n_long = 0;    // edges with distance > min_distance
    std::size_t eligible = 0;  // station pairs with distance > min_distance
    double log_ratio = 0.0;    // NaN when undefined
    bool defined = false;
  };

  double min_distance = 0.0;
  bool per_block_eligible = true;
  bool continuity = false;
  std::vector<Entry> entries;
};

// min_distance >= 0; fails when no station pair at all lies beyond it.
// Without the continuity correction, blocks with zero long-distance edges
// (or zero eligible pairs) carry an undefined log-ratio.
LongDistanceSeries long_distance_series(const AnnualNetworkSeries& annual,
                                        const DistanceMatrix& distances, double min_distance,
                                        const LongDistanceOptions& options = {});

}  // namespace extnet
