// C boundary for the extnet core. Every entry point translates exceptions
// into status codes and keeps the message in a thread-local slot for
// extnet_last_error(). Handles own their core object by value.

#include "extnet/extnet.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "core/annualnet.hpp"
#include "core/bootstrap.hpp"
#include "core/brsim.hpp"
#include "core/chicurve.hpp"
#include "core/error.hpp"
#include "core/ingest.hpp"
#include "core/madogram.hpp"
#include "core/network.hpp"
#include "core/regress.hpp"
#include "core/shrinkage.hpp"
#include "core/types.hpp"

struct extnet_stations {
  extnet::StationSet impl;
};
struct extnet_maxima {
  extnet::MaximaMatrix impl;
};
struct extnet_ranks {
  extnet::RankMatrix impl;
};
struct extnet_chi {
  extnet::ChiMatrix impl;
};
struct extnet_boot {
  extnet::BootstrapSummary impl;
};
struct extnet_bins {
  extnet::BinnedChi impl;
};
struct extnet_curve {
  extnet::ChiCurve impl;
};
struct extnet_tau2 {
  extnet::Tau2Fn impl;
};
struct extnet_shrunk {
  extnet::ShrunkChi impl;
};
struct extnet_network {
  extnet::Network impl;
};
struct extnet_annual {
  extnet::AnnualNetworkSeries impl;
};
struct extnet_longdist {
  extnet::LongDistanceSeries impl;
};
struct extnet_daily {
  extnet::DailyParseResult impl;
};
struct extnet_sst {
  extnet::SstParseResult impl;
};

namespace {

thread_local std::string g_last_error;

extnet_status set_error(extnet_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

template <typename Fn>
extnet_status guarded(Fn&& fn) noexcept {
  try {
    return fn();
  } catch (const extnet::Error& e) {
    return set_error(static_cast<extnet_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(EXTNET_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(EXTNET_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(EXTNET_ERR_INTERNAL, "unknown error");
  }
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

#define EXTNET_REQUIRE(ptr)                                                    \
  do {                                                                         \
    if ((ptr) == nullptr)                                                      \
      return set_error(EXTNET_ERR_NULL_ARGUMENT, "null argument: " #ptr);      \
  } while (0)

extern "C" {

const char* extnet_last_error(void) { return g_last_error.c_str(); }

const char* extnet_version(void) { return "0.1.0"; }

/* ---------- stations ---------- */

extnet_status extnet_stations_uniform(size_t count, uint64_t seed, extnet_stations** out) {
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    *out = new extnet_stations{extnet::StationSet::uniform_planar(count, seed)};
    return EXTNET_OK;
  });
}

extnet_status extnet_stations_create(const char* const* ids, const double* x, const double* y,
                                     size_t count, int geographic, extnet_stations** out) {
  EXTNET_REQUIRE(ids);
  EXTNET_REQUIRE(x);
  EXTNET_REQUIRE(y);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<extnet::Station> stations(count);
    for (size_t i = 0; i < count; ++i) {
      if (ids[i] == nullptr)
        return set_error(EXTNET_ERR_NULL_ARGUMENT, "null station id at index " + std::to_string(i));
      stations[i] = extnet::Station{ids[i], x[i], y[i]};
    }
    const auto system =
        geographic ? extnet::CoordSystem::geographic : extnet::CoordSystem::planar;
    *out = new extnet_stations{extnet::StationSet(std::move(stations), system)};
    return EXTNET_OK;
  });
}

extnet_status extnet_stations_subset(const extnet_stations* stations, const char* const* ids,
                                     size_t count, extnet_stations** out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(ids);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<std::string> wanted;
    wanted.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (ids[i] == nullptr)
        return set_error(EXTNET_ERR_NULL_ARGUMENT, "null station id at index " + std::to_string(i));
      wanted.emplace_back(ids[i]);
    }
    *out = new extnet_stations{stations->impl.subset(wanted)};
    return EXTNET_OK;
  });
}

extnet_status extnet_stations_count(const extnet_stations* stations, size_t* out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  *out = stations->impl.size();
  return EXTNET_OK;
}

extnet_status extnet_stations_is_geographic(const extnet_stations* stations, int* out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  *out = stations->impl.coord_system() == extnet::CoordSystem::geographic ? 1 : 0;
  return EXTNET_OK;
}

extnet_status extnet_stations_get(const extnet_stations* stations, size_t index, const char** id,
                                  double* x, double* y) {
  EXTNET_REQUIRE(stations);
  if (index >= stations->impl.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "station index " + std::to_string(index) + " out of range");
  const extnet::Station& s = stations->impl[index];
  if (id != nullptr) *id = s.id.c_str();
  if (x != nullptr) *x = s.x;
  if (y != nullptr) *y = s.y;
  return EXTNET_OK;
}

extnet_status extnet_stations_distances(const extnet_stations* stations, double* out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    std::memcpy(out, dm.data().data(), dm.data().size() * sizeof(double));
    return EXTNET_OK;
  });
}

void extnet_stations_free(extnet_stations* stations) { delete stations; }

/* ---------- block-maximum panels ---------- */

extnet_status extnet_maxima_create(size_t blocks, size_t stations, const double* values,
                                   const unsigned char* valid, const long long* labels,
                                   const char* const* ids, extnet_maxima** out) {
  EXTNET_REQUIRE(values);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<double> v(values, values + blocks * stations);
    std::vector<unsigned char> mask;
    if (valid != nullptr) {
      mask.assign(valid, valid + blocks * stations);
    } else {
      mask.assign(blocks * stations, 1);
    }
    std::vector<long long> lab;
    lab.reserve(blocks);
    if (labels != nullptr) {
      lab.assign(labels, labels + blocks);
    } else {
      for (size_t t = 0; t < blocks; ++t) lab.push_back(static_cast<long long>(t) + 1);
    }
    std::vector<std::string> names;
    names.reserve(stations);
    if (ids != nullptr) {
      for (size_t i = 0; i < stations; ++i) {
        if (ids[i] == nullptr)
          return set_error(EXTNET_ERR_NULL_ARGUMENT,
                           "null station id at index " + std::to_string(i));
        names.emplace_back(ids[i]);
      }
    } else {
      for (size_t i = 0; i < stations; ++i) names.push_back("S" + std::to_string(i + 1));
    }
    *out = new extnet_maxima{extnet::MaximaMatrix(blocks, stations, std::move(v), std::move(mask),
                                                  std::move(lab), std::move(names))};
    return EXTNET_OK;
  });
}

extnet_status extnet_maxima_dims(const extnet_maxima* maxima, size_t* blocks, size_t* stations) {
  EXTNET_REQUIRE(maxima);
  if (blocks != nullptr) *blocks = maxima->impl.blocks();
  if (stations != nullptr) *stations = maxima->impl.stations();
  return EXTNET_OK;
}

extnet_status extnet_maxima_values(const extnet_maxima* maxima, double* out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  const size_t m = maxima->impl.blocks(), d = maxima->impl.stations();
  for (size_t t = 0; t < m; ++t)
    for (size_t i = 0; i < d; ++i)
      out[t * d + i] = maxima->impl.is_valid(t, i) ? maxima->impl.value(t, i) : kNaN;
  return EXTNET_OK;
}

extnet_status extnet_maxima_labels(const extnet_maxima* maxima, long long* out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  const auto& labels = maxima->impl.block_labels();
  std::memcpy(out, labels.data(), labels.size() * sizeof(long long));
  return EXTNET_OK;
}

extnet_status extnet_maxima_station_id(const extnet_maxima* maxima, size_t index,
                                       const char** out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  if (index >= maxima->impl.stations())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "station index " + std::to_string(index) + " out of range");
  *out = maxima->impl.station_id(index).c_str();
  return EXTNET_OK;
}

extnet_status extnet_maxima_slice(const extnet_maxima* maxima, size_t first, size_t count,
                                  extnet_maxima** out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const size_t m = maxima->impl.blocks(), d = maxima->impl.stations();
    if (first > m || count > m - first)
      return set_error(EXTNET_ERR_INVALID_ARGUMENT, "slice [" + std::to_string(first) + ", " +
                                                        std::to_string(first + count) +
                                                        ") exceeds " + std::to_string(m) +
                                                        " blocks");
    const auto& values = maxima->impl.values();
    const auto& valid = maxima->impl.valid();
    const auto& labels = maxima->impl.block_labels();
    std::vector<double> v(values.begin() + first * d, values.begin() + (first + count) * d);
    std::vector<unsigned char> mask(valid.begin() + first * d, valid.begin() + (first + count) * d);
    std::vector<long long> lab(labels.begin() + first, labels.begin() + first + count);
    *out = new extnet_maxima{extnet::MaximaMatrix(count, d, std::move(v), std::move(mask),
                                                  std::move(lab), maxima->impl.station_ids())};
    return EXTNET_OK;
  });
}

void extnet_maxima_free(extnet_maxima* maxima) { delete maxima; }

/* ---------- Brown-Resnick simulator ---------- */

extnet_status extnet_br_true_chi(double h, double rho, double kappa, double* out) {
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::BRParams params;
    params.rho = rho;
    params.kappa = kappa;
    extnet::validate(params);
    if (!(h >= 0.0) || !std::isfinite(h))
      return set_error(EXTNET_ERR_INVALID_ARGUMENT, "distance must be finite and nonnegative");
    *out = extnet::br_true_chi(h, params);
    return EXTNET_OK;
  });
}

extnet_status extnet_br_simulate(const extnet_stations* stations, double rho, double kappa,
                                 uint64_t seed, size_t blocks, int approximate,
                                 size_t approx_points, int threads, extnet_maxima** out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::BRParams params;
    params.rho = rho;
    params.kappa = kappa;
    params.seed = seed;
    const auto mode = approximate ? extnet::SimMode::approximate : extnet::SimMode::exact;
    *out = new extnet_maxima{
        extnet::br_simulate(stations->impl, params, blocks, mode, approx_points, threads)};
    return EXTNET_OK;
  });
}

extnet_status extnet_true_chi_matrix(const extnet_stations* stations, double rho, double kappa,
                                     double* out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::BRParams params;
    params.rho = rho;
    params.kappa = kappa;
    extnet::validate(params);
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    const size_t d = dm.size();
    for (size_t i = 0; i < d; ++i) {
      out[i * d + i] = 1.0;
      for (size_t j = i + 1; j < d; ++j) {
        const double chi = extnet::br_true_chi(dm(i, j), params);
        out[i * d + j] = chi;
        out[j * d + i] = chi;
      }
    }
    return EXTNET_OK;
  });
}

/* ---------- ranks and pairwise chi ---------- */

extnet_status extnet_ranks_compute(const extnet_maxima* maxima, int over_m_plus_1,
                                   extnet_ranks** out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const auto convention = over_m_plus_1 ? extnet::RankConvention::over_m_plus_1
                                          : extnet::RankConvention::over_m;
    *out = new extnet_ranks{extnet::edf_ranks(maxima->impl, convention)};
    return EXTNET_OK;
  });
}

extnet_status extnet_ranks_dims(const extnet_ranks* ranks, size_t* blocks, size_t* stations) {
  EXTNET_REQUIRE(ranks);
  if (blocks != nullptr) *blocks = ranks->impl.blocks();
  if (stations != nullptr) *stations = ranks->impl.stations();
  return EXTNET_OK;
}

extnet_status extnet_ranks_values(const extnet_ranks* ranks, double* out) {
  EXTNET_REQUIRE(ranks);
  EXTNET_REQUIRE(out);
  const size_t m = ranks->impl.blocks(), d = ranks->impl.stations();
  for (size_t t = 0; t < m; ++t)
    for (size_t i = 0; i < d; ++i)
      out[t * d + i] = ranks->impl.is_valid(t, i) ? ranks->impl.value(t, i) : kNaN;
  return EXTNET_OK;
}

void extnet_ranks_free(extnet_ranks* ranks) { delete ranks; }

extnet_status extnet_chi_estimate(const extnet_ranks* ranks, int rerank_common, int threads,
                                  extnet_chi** out) {
  EXTNET_REQUIRE(ranks);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::PairChiOptions options;
    options.rerank_common = rerank_common != 0;
    *out = new extnet_chi{extnet::chi_matrix(ranks->impl, options, threads)};
    return EXTNET_OK;
  });
}

extnet_status extnet_chi_dims(const extnet_chi* chi, size_t* d) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(d);
  *d = chi->impl.size();
  return EXTNET_OK;
}

extnet_status extnet_chi_values(const extnet_chi* chi, double* out) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(out);
  const auto& values = chi->impl.values();
  std::memcpy(out, values.data(), values.size() * sizeof(double));
  return EXTNET_OK;
}

extnet_status extnet_chi_common_counts(const extnet_chi* chi, long long* out) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(out);
  const auto& counts = chi->impl.pair_counts();
  std::memcpy(out, counts.data(), counts.size() * sizeof(long long));
  return EXTNET_OK;
}

void extnet_chi_free(extnet_chi* chi) { delete chi; }

extnet_status extnet_chi_u_curve(const extnet_ranks* ranks, size_t i, size_t j, const double* u,
                                 size_t count, int rerank_common, double* out) {
  EXTNET_REQUIRE(ranks);
  EXTNET_REQUIRE(u);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::PairChiOptions options;
    options.rerank_common = rerank_common != 0;
    std::vector<double> grid(u, u + count);
    const extnet::ChiUCurve curve = extnet::chi_u_curve(ranks->impl, i, j, grid, options);
    for (size_t k = 0; k < count; ++k) out[k] = curve.defined[k] ? curve.chi[k] : kNaN;
    return EXTNET_OK;
  });
}

/* ---------- bootstrap ---------- */

extnet_status extnet_bootstrap_sd(const extnet_maxima* maxima, int over_m_plus_1,
                                  int rerank_common, size_t replicates, uint64_t seed,
                                  int threads, extnet_boot** out) {
  EXTNET_REQUIRE(maxima);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const auto convention = over_m_plus_1 ? extnet::RankConvention::over_m_plus_1
                                          : extnet::RankConvention::over_m;
    extnet::PairChiOptions options;
    options.rerank_common = rerank_common != 0;
    *out = new extnet_boot{
        extnet::bootstrap_sd(maxima->impl, convention, options, replicates, seed, threads)};
    return EXTNET_OK;
  });
}

extnet_status extnet_boot_dims(const extnet_boot* boot, size_t* d) {
  EXTNET_REQUIRE(boot);
  EXTNET_REQUIRE(d);
  *d = boot->impl.d;
  return EXTNET_OK;
}

extnet_status extnet_boot_values(const extnet_boot* boot, double* out) {
  EXTNET_REQUIRE(boot);
  EXTNET_REQUIRE(out);
  std::memcpy(out, boot->impl.sd.data(), boot->impl.sd.size() * sizeof(double));
  return EXTNET_OK;
}

void extnet_boot_free(extnet_boot* boot) { delete boot; }

/* ---------- distance bins, decay curve, tau^2 ---------- */

extnet_status extnet_bin_chi(const extnet_chi* chi, const extnet_stations* stations, size_t bins,
                             int equal_count, extnet_bins** out) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    if (stations->impl.size() != chi->impl.size())
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "station count does not match the chi matrix dimension");
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    *out = new extnet_bins{extnet::bin_chi(chi->impl, dm, bins, equal_count != 0)};
    return EXTNET_OK;
  });
}

extnet_status extnet_bins_count(const extnet_bins* bins, size_t* out) {
  EXTNET_REQUIRE(bins);
  EXTNET_REQUIRE(out);
  *out = bins->impl.size();
  return EXTNET_OK;
}

extnet_status extnet_bins_get(const extnet_bins* bins, size_t index, double* h_mean,
                              double* chi_mean, double* chi_var, size_t* count, double* lo,
                              double* hi) {
  EXTNET_REQUIRE(bins);
  if (index >= bins->impl.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "bin index " + std::to_string(index) + " out of range");
  const auto& bin = bins->impl.bins[index];
  if (h_mean != nullptr) *h_mean = bin.h_mean;
  if (chi_mean != nullptr) *chi_mean = bin.chi_mean;
  if (chi_var != nullptr) *chi_var = bin.chi_var;
  if (count != nullptr) *count = bin.count;
  if (lo != nullptr) *lo = bin.lo;
  if (hi != nullptr) *hi = bin.hi;
  return EXTNET_OK;
}

void extnet_bins_free(extnet_bins* bins) { delete bins; }

extnet_status extnet_fit_curve(const extnet_bins* bins, int weighted, double lambda,
                               extnet_curve** out) {
  EXTNET_REQUIRE(bins);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::SplineOptions options;
    options.weighted = weighted != 0;
    options.lambda = lambda;
    *out = new extnet_curve{extnet::fit_chi_curve(bins->impl, options)};
    return EXTNET_OK;
  });
}

extnet_status extnet_curve_eval(const extnet_curve* curve, const double* h, size_t count,
                                double* out) {
  EXTNET_REQUIRE(curve);
  EXTNET_REQUIRE(h);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    for (size_t k = 0; k < count; ++k) out[k] = curve->impl(h[k]);
    return EXTNET_OK;
  });
}

extnet_status extnet_curve_info(const extnet_curve* curve, double* lambda, double* edf) {
  EXTNET_REQUIRE(curve);
  if (lambda != nullptr) *lambda = curve->impl.lambda();
  if (edf != nullptr) *edf = curve->impl.edf();
  return EXTNET_OK;
}

void extnet_curve_free(extnet_curve* curve) { delete curve; }

extnet_status extnet_tau2_logistic(double a, double b, double c, extnet_tau2** out) {
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    *out = new extnet_tau2{extnet::Tau2Fn::logistic(a, b, c)};
    return EXTNET_OK;
  });
}

extnet_status extnet_tau2_estimated(const extnet_bins* bins, const extnet_boot* boot,
                                    const extnet_stations* stations, int weighted, double lambda,
                                    extnet_tau2** out) {
  EXTNET_REQUIRE(bins);
  EXTNET_REQUIRE(boot);
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    if (stations->impl.size() != boot->impl.d)
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "station count does not match the bootstrap dimension");
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    extnet::SplineOptions options;
    options.weighted = weighted != 0;
    options.lambda = lambda;
    *out = new extnet_tau2{extnet::Tau2Fn::estimated(bins->impl, boot->impl, dm, options)};
    return EXTNET_OK;
  });
}

extnet_status extnet_tau2_eval(const extnet_tau2* tau2, const double* h, size_t count,
                               double* out) {
  EXTNET_REQUIRE(tau2);
  EXTNET_REQUIRE(h);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    for (size_t k = 0; k < count; ++k) out[k] = tau2->impl(h[k]);
    return EXTNET_OK;
  });
}

extnet_status extnet_tau2_mode(const extnet_tau2* tau2, const char** out) {
  EXTNET_REQUIRE(tau2);
  EXTNET_REQUIRE(out);
  *out = tau2->impl.mode_name();
  return EXTNET_OK;
}

void extnet_tau2_free(extnet_tau2* tau2) { delete tau2; }

/* ---------- empirical-Bayes correction ---------- */

extnet_status extnet_shrink(const extnet_chi* chi, const extnet_curve* curve,
                            const extnet_tau2* tau2, const extnet_boot* boot,
                            const extnet_stations* stations, extnet_shrunk** out) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(curve);
  EXTNET_REQUIRE(tau2);
  EXTNET_REQUIRE(boot);
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    if (stations->impl.size() != chi->impl.size())
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "station count does not match the chi matrix dimension");
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    *out = new extnet_shrunk{
        extnet::shrink(chi->impl, curve->impl, tau2->impl, boot->impl, dm)};
    return EXTNET_OK;
  });
}

extnet_status extnet_shrunk_dims(const extnet_shrunk* shrunk, size_t* d) {
  EXTNET_REQUIRE(shrunk);
  EXTNET_REQUIRE(d);
  *d = shrunk->impl.d;
  return EXTNET_OK;
}

extnet_status extnet_shrunk_values(const extnet_shrunk* shrunk, double* chi_tilde,
                                   double* lambda) {
  EXTNET_REQUIRE(shrunk);
  if (chi_tilde != nullptr)
    std::memcpy(chi_tilde, shrunk->impl.chi_tilde.data(),
                shrunk->impl.chi_tilde.size() * sizeof(double));
  if (lambda != nullptr)
    std::memcpy(lambda, shrunk->impl.lambda.data(), shrunk->impl.lambda.size() * sizeof(double));
  return EXTNET_OK;
}

void extnet_shrunk_free(extnet_shrunk* shrunk) { delete shrunk; }

/* ---------- networks ---------- */

namespace {

extnet_status tag_from_int(int tag, extnet::Network::Tag* out) {
  switch (tag) {
    case EXTNET_TAG_EMPIRICAL:
      *out = extnet::Network::Tag::empirical;
      return EXTNET_OK;
    case EXTNET_TAG_CORRECTED:
      *out = extnet::Network::Tag::corrected;
      return EXTNET_OK;
    case EXTNET_TAG_TRUTH:
      *out = extnet::Network::Tag::truth;
      return EXTNET_OK;
    default:
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "network tag must be 0 (empirical), 1 (corrected), or 2 (truth)");
  }
}

}  // namespace

extnet_status extnet_network_threshold(const double* chi, size_t d,
                                       const extnet_stations* stations, double chi_min, int tag,
                                       extnet_network** out) {
  EXTNET_REQUIRE(chi);
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::Network::Tag core_tag;
    const extnet_status rc = tag_from_int(tag, &core_tag);
    if (rc != EXTNET_OK) return rc;
    if (stations->impl.size() != d)
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "station count does not match the chi matrix dimension");
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    std::vector<double> values(chi, chi + d * d);
    *out = new extnet_network{extnet::threshold_network(values, d, dm, chi_min, core_tag)};
    return EXTNET_OK;
  });
}

extnet_status extnet_network_true(const extnet_stations* stations, double rho, double kappa,
                                  double chi_min, extnet_network** out) {
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::BRParams params;
    params.rho = rho;
    params.kappa = kappa;
    *out = new extnet_network{extnet::true_network(stations->impl, params, chi_min)};
    return EXTNET_OK;
  });
}

extnet_status extnet_network_node_count(const extnet_network* network, size_t* out) {
  EXTNET_REQUIRE(network);
  EXTNET_REQUIRE(out);
  *out = network->impl.node_count;
  return EXTNET_OK;
}

extnet_status extnet_network_edge_count(const extnet_network* network, size_t* out) {
  EXTNET_REQUIRE(network);
  EXTNET_REQUIRE(out);
  *out = network->impl.edges.size();
  return EXTNET_OK;
}

extnet_status extnet_network_edges(const extnet_network* network, size_t* i, size_t* j,
                                   double* weight, double* distance) {
  EXTNET_REQUIRE(network);
  const auto& edges = network->impl.edges;
  for (size_t k = 0; k < edges.size(); ++k) {
    if (i != nullptr) i[k] = edges[k].i;
    if (j != nullptr) j[k] = edges[k].j;
    if (weight != nullptr) weight[k] = edges[k].weight;
    if (distance != nullptr) distance[k] = edges[k].distance;
  }
  return EXTNET_OK;
}

extnet_status extnet_network_degrees(const extnet_network* network, size_t* out) {
  EXTNET_REQUIRE(network);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const extnet::DegreeSummary summary = extnet::degree_summary(network->impl);
    std::memcpy(out, summary.degree.data(), summary.degree.size() * sizeof(size_t));
    return EXTNET_OK;
  });
}

extnet_status extnet_network_compare(const extnet_network* estimated,
                                     const extnet_network* truth, double* tpr, double* ppv,
                                     int* tpr_defined, int* ppv_defined, size_t* true_edges,
                                     size_t* estimated_edges, size_t* overlap) {
  EXTNET_REQUIRE(estimated);
  EXTNET_REQUIRE(truth);
  return guarded([&]() -> extnet_status {
    const extnet::NetMetrics metrics = extnet::tpr_ppv(estimated->impl, truth->impl);
    if (tpr != nullptr) *tpr = metrics.tpr_defined ? metrics.tpr : kNaN;
    if (ppv != nullptr) *ppv = metrics.ppv_defined ? metrics.ppv : kNaN;
    if (tpr_defined != nullptr) *tpr_defined = metrics.tpr_defined ? 1 : 0;
    if (ppv_defined != nullptr) *ppv_defined = metrics.ppv_defined ? 1 : 0;
    if (true_edges != nullptr) *true_edges = metrics.true_edges;
    if (estimated_edges != nullptr) *estimated_edges = metrics.estimated_edges;
    if (overlap != nullptr) *overlap = metrics.overlap;
    return EXTNET_OK;
  });
}

void extnet_network_free(extnet_network* network) { delete network; }

/* ---------- annual networks and long-distance series ---------- */

extnet_status extnet_annual_networks(const extnet_ranks* ranks, double u_star,
                                     extnet_annual** out) {
  EXTNET_REQUIRE(ranks);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    *out = new extnet_annual{extnet::annual_networks(ranks->impl, u_star)};
    return EXTNET_OK;
  });
}

extnet_status extnet_annual_block_count(const extnet_annual* annual, size_t* out) {
  EXTNET_REQUIRE(annual);
  EXTNET_REQUIRE(out);
  *out = annual->impl.blocks;
  return EXTNET_OK;
}

extnet_status extnet_annual_label(const extnet_annual* annual, size_t block, long long* out) {
  EXTNET_REQUIRE(annual);
  EXTNET_REQUIRE(out);
  if (block >= annual->impl.per_block.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "block index " + std::to_string(block) + " out of range");
  *out = annual->impl.per_block[block].label;
  return EXTNET_OK;
}

extnet_status extnet_annual_edge_count(const extnet_annual* annual, size_t block, size_t* out) {
  EXTNET_REQUIRE(annual);
  EXTNET_REQUIRE(out);
  if (block >= annual->impl.per_block.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "block index " + std::to_string(block) + " out of range");
  *out = annual->impl.per_block[block].edges.size();
  return EXTNET_OK;
}

extnet_status extnet_annual_edges(const extnet_annual* annual, size_t block, size_t* i,
                                  size_t* j) {
  EXTNET_REQUIRE(annual);
  if (block >= annual->impl.per_block.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "block index " + std::to_string(block) + " out of range");
  const auto& edges = annual->impl.per_block[block].edges;
  for (size_t k = 0; k < edges.size(); ++k) {
    if (i != nullptr) i[k] = edges[k].first;
    if (j != nullptr) j[k] = edges[k].second;
  }
  return EXTNET_OK;
}

void extnet_annual_free(extnet_annual* annual) { delete annual; }

extnet_status extnet_long_distance(const extnet_annual* annual, const extnet_stations* stations,
                                   double min_distance, int per_block_eligible, int continuity,
                                   extnet_longdist** out) {
  EXTNET_REQUIRE(annual);
  EXTNET_REQUIRE(stations);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    if (stations->impl.size() != annual->impl.d)
      return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                       "station count does not match the annual-network dimension");
    const extnet::DistanceMatrix dm = extnet::pairwise_distances(stations->impl);
    extnet::LongDistanceOptions options;
    options.per_block_eligible = per_block_eligible != 0;
    options.continuity = continuity != 0;
    *out = new extnet_longdist{
        extnet::long_distance_series(annual->impl, dm, min_distance, options)};
    return EXTNET_OK;
  });
}

extnet_status extnet_longdist_count(const extnet_longdist* series, size_t* out) {
  EXTNET_REQUIRE(series);
  EXTNET_REQUIRE(out);
  *out = series->impl.entries.size();
  return EXTNET_OK;
}

extnet_status extnet_longdist_get(const extnet_longdist* series, size_t index, long long* label,
                                  size_t* n_long, size_t* eligible, double* log_ratio) {
  EXTNET_REQUIRE(series);
  if (index >= series->impl.entries.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "entry index " + std::to_string(index) + " out of range");
  const auto& entry = series->impl.entries[index];
  if (label != nullptr) *label = entry.label;
  if (n_long != nullptr) *n_long = entry.n_long;
  if (eligible != nullptr) *eligible = entry.eligible;
  if (log_ratio != nullptr) *log_ratio = entry.defined ? entry.log_ratio : kNaN;
  return EXTNET_OK;
}

void extnet_longdist_free(extnet_longdist* series) { delete series; }

/* ---------- regressions ---------- */

namespace {

void fill_fit(const extnet::RegressionFit& fit, extnet_fit* out) {
  out->family = fit.family == extnet::Family::gaussian_identity
                    ? EXTNET_FAMILY_GAUSSIAN_IDENTITY
                    : EXTNET_FAMILY_POISSON_LOG;
  out->has_slope = fit.has_slope ? 1 : 0;
  out->intercept = fit.intercept;
  out->slope = fit.slope;
  out->se_intercept = fit.se_intercept;
  out->se_slope = fit.se_slope;
  out->stat_intercept = fit.stat_intercept;
  out->stat_slope = fit.stat_slope;
  out->p_intercept = fit.p_intercept;
  out->p_slope = fit.p_slope;
  out->n = fit.n;
  out->iterations = fit.iterations;
}

}  // namespace

extnet_status extnet_ols_fit(const double* x, const double* y, size_t n, extnet_fit* out) {
  EXTNET_REQUIRE(x);
  EXTNET_REQUIRE(y);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<double> xv(x, x + n), yv(y, y + n);
    fill_fit(extnet::ols_fit(xv, yv), out);
    return EXTNET_OK;
  });
}

extnet_status extnet_poisson_fit(const double* x, const double* counts, size_t n,
                                 const double* log_exposure, extnet_fit* out) {
  EXTNET_REQUIRE(counts);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<double> cv(counts, counts + n);
    std::vector<double> offset;
    const std::vector<double>* offset_ptr = nullptr;
    if (log_exposure != nullptr) {
      offset.assign(log_exposure, log_exposure + n);
      offset_ptr = &offset;
    }
    if (x == nullptr) {
      fill_fit(extnet::poisson_glm_fit(cv, offset_ptr), out);
    } else {
      std::vector<double> xv(x, x + n);
      fill_fit(extnet::poisson_glm_fit(xv, cv, offset_ptr), out);
    }
    return EXTNET_OK;
  });
}

/* ---------- daily-precipitation and SST ingestion ---------- */

extnet_status extnet_daily_read(const char* path, int dly_format, extnet_daily** out) {
  EXTNET_REQUIRE(path);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    *out = new extnet_daily{dly_format ? extnet::parse_daily_dly(path)
                                       : extnet::parse_daily_csv(path)};
    return EXTNET_OK;
  });
}

extnet_status extnet_daily_record_count(const extnet_daily* daily, size_t* out) {
  EXTNET_REQUIRE(daily);
  EXTNET_REQUIRE(out);
  *out = daily->impl.table.records.size();
  return EXTNET_OK;
}

extnet_status extnet_daily_reject_count(const extnet_daily* daily, size_t* out) {
  EXTNET_REQUIRE(daily);
  EXTNET_REQUIRE(out);
  *out = daily->impl.rejects.size();
  return EXTNET_OK;
}

extnet_status extnet_daily_reject_get(const extnet_daily* daily, size_t index, size_t* line,
                                      const char** content, const char** reason) {
  EXTNET_REQUIRE(daily);
  if (index >= daily->impl.rejects.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "reject index " + std::to_string(index) + " out of range");
  const auto& reject = daily->impl.rejects[index];
  if (line != nullptr) *line = reject.line;
  if (content != nullptr) *content = reject.content.c_str();
  if (reason != nullptr) *reason = reject.reason.c_str();
  return EXTNET_OK;
}

extnet_status extnet_daily_filter(const extnet_daily* daily, double min_fraction, int year_first,
                                  int year_last, int record_span_basis, extnet_daily** out) {
  EXTNET_REQUIRE(daily);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    const auto basis = record_span_basis ? extnet::CoverageBasis::record_span
                                         : extnet::CoverageBasis::full_period;
    extnet::DailyParseResult result;
    result.table =
        extnet::filter_stations(daily->impl.table, min_fraction, year_first, year_last, basis);
    *out = new extnet_daily{std::move(result)};
    return EXTNET_OK;
  });
}

extnet_status extnet_daily_write(const extnet_daily* daily, const char* path) {
  EXTNET_REQUIRE(daily);
  EXTNET_REQUIRE(path);
  return guarded([&]() -> extnet_status {
    extnet::write_daily_csv(daily->impl.table, path);
    return EXTNET_OK;
  });
}

extnet_status extnet_seasonal_maxima(const extnet_daily* daily, const int* months,
                                     size_t month_count, int year_first, int year_last,
                                     double completeness, extnet_maxima** out) {
  EXTNET_REQUIRE(daily);
  EXTNET_REQUIRE(months);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    std::vector<int> window(months, months + month_count);
    *out = new extnet_maxima{extnet::seasonal_maxima(daily->impl.table, window, year_first,
                                                     year_last, completeness)};
    return EXTNET_OK;
  });
}

void extnet_daily_free(extnet_daily* daily) { delete daily; }

extnet_status extnet_sst_read(const char* path, double lon_min, double lon_max, double lat_min,
                              double lat_max, int year_first, int year_last,
                              int window_start_month, extnet_sst** out) {
  EXTNET_REQUIRE(path);
  EXTNET_REQUIRE(out);
  return guarded([&]() -> extnet_status {
    extnet::SstBox box;
    box.lon_min = lon_min;
    box.lon_max = lon_max;
    box.lat_min = lat_min;
    box.lat_max = lat_max;
    *out = new extnet_sst{
        extnet::sst_area_average(path, box, year_first, year_last, window_start_month)};
    return EXTNET_OK;
  });
}

extnet_status extnet_sst_count(const extnet_sst* sst, size_t* out) {
  EXTNET_REQUIRE(sst);
  EXTNET_REQUIRE(out);
  *out = sst->impl.series.years.size();
  return EXTNET_OK;
}

extnet_status extnet_sst_get(const extnet_sst* sst, size_t index, long long* year,
                             double* value) {
  EXTNET_REQUIRE(sst);
  if (index >= sst->impl.series.years.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "year index " + std::to_string(index) + " out of range");
  if (year != nullptr) *year = sst->impl.series.years[index];
  if (value != nullptr) *value = sst->impl.series.value[index];
  return EXTNET_OK;
}

extnet_status extnet_sst_reject_count(const extnet_sst* sst, size_t* out) {
  EXTNET_REQUIRE(sst);
  EXTNET_REQUIRE(out);
  *out = sst->impl.rejects.size();
  return EXTNET_OK;
}

extnet_status extnet_sst_reject_get(const extnet_sst* sst, size_t index, size_t* line,
                                    const char** content, const char** reason) {
  EXTNET_REQUIRE(sst);
  if (index >= sst->impl.rejects.size())
    return set_error(EXTNET_ERR_INVALID_ARGUMENT,
                     "reject index " + std::to_string(index) + " out of range");
  const auto& reject = sst->impl.rejects[index];
  if (line != nullptr) *line = reject.line;
  if (content != nullptr) *content = reject.content.c_str();
  if (reason != nullptr) *reason = reject.reason.c_str();
  return EXTNET_OK;
}

void extnet_sst_free(extnet_sst* sst) { delete sst; }

} /* extern "C" */
