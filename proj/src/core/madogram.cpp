#include "core/madogram.hpp"

#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/parallel.hpp"

namespace extnet {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ChiMatrix::ChiMatrix(std::size_t d, std::vector<double> chi, std::vector<long long> n_common)
    : d_(d), chi_(std::move(chi)), n_common_(std::move(n_common)) {
  if (chi_.size() != d_ * d_ || n_common_.size() != d_ * d_) {
    fail(ErrorCode::invalid_argument, "ChiMatrix: size mismatch");
  }
}

bool ChiMatrix::is_missing(std::size_t i, std::size_t j) const {
  return std::isnan(chi_[i * d_ + j]);
}

double f_madogram(const std::vector<double>& u1, const std::vector<double>& u2) {
  if (u1.size() != u2.size() || u1.size() < 2) {
    fail(ErrorCode::invalid_argument, "f_madogram: need two columns of equal length >= 2");
  }
  double sum = 0.0;
  for (std::size_t t = 0; t < u1.size(); ++t) sum += std::fabs(u1[t] - u2[t]);
  return 0.5 * sum / static_cast<double>(u1.size());
}

double nu_to_chi(double nu) {
  if (!(nu >= 0.0 && nu < 0.5)) {
    fail(ErrorCode::invalid_argument, "nu_to_chi: nu must lie in [0, 1/2)");
  }
  const double theta = (1.0 + 2.0 * nu) / (1.0 - 2.0 * nu);
  return 2.0 - theta;
}

PairChi chi_pair(const RankMatrix& ranks, std::size_t i, std::size_t j,
                 const PairChiOptions& options) {
  const std::size_t m = ranks.blocks();
  std::vector<std::size_t> common;
  common.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    if (ranks.is_valid(t, i) && ranks.is_valid(t, j)) common.push_back(t);
  }
  PairChi result;
  result.n_common = static_cast<long long>(common.size());
  if (common.size() < 2) {
    result.chi = kNaN;
    result.nu = kNaN;
    return result;
  }

  std::vector<double> ui(common.size()), uj(common.size());
  if (options.rerank_common && common.size() < m) {
    // Ranking the ranks over the intersection equals ranking the underlying
    // values there: the per-column map is monotone and preserves ties.
    std::vector<double> column(m);
    for (std::size_t t = 0; t < m; ++t) column[t] = ranks.value(t, i);
    ranks_of_subset(column, common, ranks.convention(), &ui);
    for (std::size_t t = 0; t < m; ++t) column[t] = ranks.value(t, j);
    ranks_of_subset(column, common, ranks.convention(), &uj);
  } else {
    for (std::size_t k = 0; k < common.size(); ++k) {
      ui[k] = ranks.value(common[k], i);
      uj[k] = ranks.value(common[k], j);
    }
  }

  result.nu = f_madogram(ui, uj);
  result.chi = nu_to_chi(result.nu);
  result.estimable = true;
  return result;
}

ChiMatrix chi_matrix(const RankMatrix& ranks, const PairChiOptions& options, int threads) {
  const std::size_t d = ranks.stations();
  if (d < 2) fail(ErrorCode::invalid_argument, "chi_matrix: need at least 2 stations");
  std::vector<double> chi(d * d, kNaN);
  std::vector<long long> n_common(d * d, 0);
  const std::size_t m = ranks.blocks();
  for (std::size_t i = 0; i < d; ++i) {
    chi[i * d + i] = 1.0;
    long long n_valid = 0;
    for (std::size_t t = 0; t < m; ++t) {
      if (ranks.is_valid(t, i)) ++n_valid;
    }
    n_common[i * d + i] = n_valid;
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(d * (d - 1) / 2);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    const PairChi pc = chi_pair(ranks, i, j, options);
    chi[i * d + j] = pc.chi;
    chi[j * d + i] = pc.chi;
    n_common[i * d + j] = pc.n_common;
    n_common[j * d + i] = pc.n_common;
  });
  return ChiMatrix(d, std::move(chi), std::move(n_common));
}

ChiUCurve chi_u_curve(const RankMatrix& ranks, std::size_t i, std::size_t j,
                      const std::vector<double>& u_grid, const PairChiOptions& options) {
  const std::size_t m = ranks.blocks();
  std::vector<std::size_t> common;
  for (std::size_t t = 0; t < m; ++t) {
    if (ranks.is_valid(t, i) && ranks.is_valid(t, j)) common.push_back(t);
  }
  if (common.size() < 2) {
    fail(ErrorCode::unestimable, "chi_u_curve: fewer than 2 common valid blocks");
  }
  std::vector<double> ui(common.size()), uj(common.size());
  if (options.rerank_common && common.size() < m) {
    std::vector<double> column(m);
    for (std::size_t t = 0; t < m; ++t) column[t] = ranks.value(t, i);
    ranks_of_subset(column, common, ranks.convention(), &ui);
    for (std::size_t t = 0; t < m; ++t) column[t] = ranks.value(t, j);
    ranks_of_subset(column, common, ranks.convention(), &uj);
  } else {
    for (std::size_t k = 0; k < common.size(); ++k) {
      ui[k] = ranks.value(common[k], i);
      uj[k] = ranks.value(common[k], j);
    }
  }

  ChiUCurve curve;
  curve.u = u_grid;
  curve.chi.assign(u_grid.size(), kNaN);
  curve.defined.assign(u_grid.size(), 0);
  for (std::size_t g = 0; g < u_grid.size(); ++g) {
    const double u = u_grid[g];
    if (!(u > 0.0 && u < 1.0)) {
      fail(ErrorCode::invalid_argument, "chi_u_curve: grid values must lie in (0,1)");
    }
    std::size_t denom = 0, numer = 0;
    for (std::size_t k = 0; k < common.size(); ++k) {
      if (ui[k] > u) {
        ++denom;
        if (uj[k] > u) ++numer;
      }
    }
    if (denom > 0) {
      curve.chi[g] = static_cast<double>(numer) / static_cast<double>(denom);
      curve.defined[g] = 1;
    }
  }
  return curve;
}

}  // namespace extnet
