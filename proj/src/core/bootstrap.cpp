#include "core/bootstrap.hpp"

#include <algorithm>
#include <limits>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

namespace extnet {

BootstrapSummary bootstrap_sd(const MaximaMatrix& maxima, RankConvention convention,
                              const PairChiOptions& options, std::size_t B, std::uint64_t seed,
                              int threads) {
  if (B < 2) fail(ErrorCode::invalid_argument, "bootstrap_sd: need at least 2 replicates");
  const std::size_t m = maxima.blocks();
  const std::size_t d = maxima.stations();
  const std::size_t pairs = d * (d - 1) / 2;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // Replicate-major buffer of packed upper triangles, filled in parallel and
  // reduced serially in replicate order so the result never depends on the
  // worker count.
  std::vector<double> draws(B * pairs);
  parallel_for(B, threads, [&](std::size_t b) {
    CounterRng rng(seed, CounterRng::stream_id(stream::bootstrap, b));
    std::vector<double> values(m * d);
    std::vector<unsigned char> valid(m * d);
    for (std::size_t t = 0; t < m; ++t) {
      const std::size_t src = static_cast<std::size_t>(rng.next_u64() % m);
      std::copy_n(maxima.values().begin() + src * d, d, values.begin() + t * d);
      std::copy_n(maxima.valid().begin() + src * d, d, valid.begin() + t * d);
    }
    const RankMatrix ranks = edf_ranks(m, d, values, valid, convention);
    const ChiMatrix cm = chi_matrix(ranks, options, /*threads=*/1);
    double* slot = draws.data() + b * pairs;
    std::size_t p = 0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        slot[p++] = cm.is_missing(i, j) ? nan : cm.chi(i, j);
      }
    }
  });

  BootstrapSummary out;
  out.d = d;
  out.replicates = B;
  out.seed = seed;
  out.sd.assign(d * d, 0.0);
  std::size_t p = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j, ++p) {
      std::size_t n = 0;
      double sum = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        const double v = draws[b * pairs + p];
        if (!std::isnan(v)) {
          ++n;
          sum += v;
        }
      }
      const std::size_t n_missing = B - n;
      double sd = nan;
      if (2 * n_missing <= B && n >= 2) {
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
          const double v = draws[b * pairs + p];
          if (!std::isnan(v)) {
            const double c = v - mean;
            ss += c * c;
          }
        }
        sd = std::sqrt(ss / static_cast<double>(n - 1));
      }
      out.sd[i * d + j] = sd;
      out.sd[j * d + i] = sd;
    }
  }
  return out;
}

}  // namespace extnet
