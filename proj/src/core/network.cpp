#include "core/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>

#include "core/error.hpp"

namespace extnet {

const char* network_tag_name(Network::Tag tag) {
  switch (tag) {
    case Network::Tag::empirical: return "empirical";
    case Network::Tag::corrected: return "corrected";
    case Network::Tag::truth: return "truth";
  }
  return "unknown";
}

Network threshold_network(const std::vector<double>& chi, std::size_t d,
                          const DistanceMatrix& distances, double chi_min, Network::Tag tag) {
  if (d < 2) fail(ErrorCode::invalid_argument, "threshold_network: need at least 2 nodes");
  if (chi.size() != d * d)
    fail(ErrorCode::invalid_argument, "threshold_network: chi matrix size does not match node count");
  if (distances.size() != d)
    fail(ErrorCode::invalid_argument, "threshold_network: distance matrix size does not match node count");
  if (!std::isfinite(chi_min))
    fail(ErrorCode::invalid_argument, "threshold_network: chi_min must be finite");

  Network net;
  net.node_count = d;
  net.chi_min = chi_min;
  net.tag = tag;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double value = chi[i * d + j];
      if (std::isnan(value)) continue;  // missing pair
      if (value > chi_min) {
        net.edges.push_back({i, j, value, distances(i, j)});
      }
    }
  }
  return net;
}

NetMetrics tpr_ppv(const Network& estimated, const Network& truth) {
  if (estimated.node_count != truth.node_count)
    fail(ErrorCode::invalid_argument, "tpr_ppv: networks are over different node counts");

  auto key = [](const Network::Edge& e) -> std::uint64_t {
    return (static_cast<std::uint64_t>(e.i) << 32) | static_cast<std::uint64_t>(e.j);
  };
  std::set<std::uint64_t> true_set;
  for (const auto& e : truth.edges) true_set.insert(key(e));

  NetMetrics m;
  m.true_edges = truth.edges.size();
  m.estimated_edges = estimated.edges.size();
  for (const auto& e : estimated.edges) {
    if (true_set.count(key(e)) != 0) ++m.overlap;
  }
  if (m.true_edges > 0) {
    m.tpr_defined = true;
    m.tpr = static_cast<double>(m.overlap) / static_cast<double>(m.true_edges);
  }
  if (m.estimated_edges > 0) {
    m.ppv_defined = true;
    m.ppv = static_cast<double>(m.overlap) / static_cast<double>(m.estimated_edges);
  }
  return m;
}

DegreeSummary degree_summary(const Network& network) {
  DegreeSummary s;
  s.degree.assign(network.node_count, 0);
  s.edge_count = network.edges.size();
  s.edge_distances.reserve(network.edges.size());
  for (const auto& e : network.edges) {
    ++s.degree[e.i];
    ++s.degree[e.j];
    s.edge_distances.push_back(e.distance);
  }
  std::sort(s.edge_distances.begin(), s.edge_distances.end());
  return s;
}

}  // namespace extnet
