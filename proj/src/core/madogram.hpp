#pragma once

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace extnet {

// Pairwise tail-dependence estimates. Missing pairs (fewer than two common
// valid blocks) are stored as NaN and excluded downstream; the diagonal is
// fixed at 1. Estimates are not clamped: values below 0 are legitimate
// (weaker-than-independence association) and thresholding removes them.
class ChiMatrix {
 public:
  ChiMatrix(std::size_t d, std::vector<double> chi, std::vector<long long> n_common);

  std::size_t size() const { return d_; }
  double chi(std::size_t i, std::size_t j) const { return chi_[i * d_ + j]; }
  long long pairs_used(std::size_t i, std::size_t j) const { return n_common_[i * d_ + j]; }
  bool is_missing(std::size_t i, std::size_t j) const;
  const std::vector<double>& values() const { return chi_; }
  const std::vector<long long>& pair_counts() const { return n_common_; }

 private:
  std::size_t d_;
  std::vector<double> chi_;
  std::vector<long long> n_common_;
};

// F-madogram of two EDF columns observed on the same blocks:
//   nu = (1/2) (1/m) sum |u1_t - u2_t|.
// Inputs must already be ranks on their common blocks.
double f_madogram(const std::vector<double>& u1, const std::vector<double>& u2);

// Madogram -> extremal coefficient -> chi:
//   theta = (1 + 2 nu) / (1 - 2 nu),  chi = 2 - theta.
// Requires nu in [0, 1/2).
double nu_to_chi(double nu);

struct PairChiOptions {
  // Re-rank each column within the pair's common valid blocks (keeps the
  // margins uniform on the sample actually used). When false, the original
  // full-column ranks are used as-is on the intersection.
  bool rerank_common = true;
};

// chi-hat for one station pair; returns NaN (and n_common) when fewer than
// two common valid blocks exist.
struct PairChi {
  double chi = 0.0;
  double nu = 0.0;
  long long n_common = 0;
  bool estimable = false;
};
PairChi chi_pair(const RankMatrix& ranks, std::size_t i, std::size_t j,
                 const PairChiOptions& options = {});

// chi-hat for every pair; cells are computed independently so the result is
// identical for any worker count.
ChiMatrix chi_matrix(const RankMatrix& ranks, const PairChiOptions& options = {}, int threads = 1);

// Empirical conditional exceedance curve chi(u), the finite-u diagnostic:
//   chi(u) = #{t: u1_t > u and u2_t > u} / #{t: u1_t > u}.
// Grid points with an empty denominator are flagged undefined.
struct ChiUCurve {
  std::vector<double> u;
  std::vector<double> chi;
  std::vector<unsigned char> defined;
};
ChiUCurve chi_u_curve(const RankMatrix& ranks, std::size_t i, std::size_t j,
                      const std::vector<double>& u_grid, const PairChiOptions& options = {});

}  // namespace extnet
