#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace extnet {

// Undirected edge list over a station set. No self loops, each unordered
// pair at most once, every weight strictly above chi_min.
struct Network {
  enum class Tag { empirical, corrected, truth };

  struct Edge {
    std::size_t i = 0;  // i < j
    std::size_t j = 0;
    double weight = 0.0;  // the chi estimate that created the edge
    double distance = 0.0;
  };

  std::size_t node_count = 0;
  double chi_min = 0.0;
  Tag tag = Tag::empirical;
  std::vector<Edge> edges;
};

const char* network_tag_name(Network::Tag tag);

// Edges are exactly the pairs with chi > chi_min (strictly greater than,
// which matters because ties do occur with rounded inputs). NaN cells
// are missing pairs and never connect. `chi` is a d*d row-major symmetric
// matrix.
Network threshold_network(const std::vector<double>& chi, std::size_t d,
                          const DistanceMatrix& distances, double chi_min, Network::Tag tag);

struct NetMetrics {
  double tpr = 0.0;
  double ppv = 0.0;
  bool tpr_defined = false;  // false when the truth has no edges
  bool ppv_defined = false;  // false when the estimate has no edges
  std::size_t true_edges = 0;
  std::size_t estimated_edges = 0;
  std::size_t overlap = 0;
};

NetMetrics tpr_ppv(const Network& estimated, const Network& truth);

struct DegreeSummary {
  std::vector<std::size_t> degree;        // per node
  std::size_t edge_count = 0;
  std::vector<double> edge_distances;     // sorted ascending
};

DegreeSummary degree_summary(const Network& network);

}  // namespace extnet
