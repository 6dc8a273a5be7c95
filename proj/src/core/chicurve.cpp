#include "core/chicurve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace extnet {
namespace {

struct PairSample {
  double h = 0.0;
  double chi = 0.0;
};

std::vector<PairSample> estimable_pairs(const ChiMatrix& cm, const DistanceMatrix& dm) {
  const std::size_t d = cm.size();
  if (dm.size() != d)
    fail(ErrorCode::invalid_argument, "bin_chi: chi and distance matrices disagree on size");
  std::vector<PairSample> out;
  out.reserve(d * (d - 1) / 2);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (cm.is_missing(i, j)) continue;
      const double h = dm(i, j);
      if (!(h > 0.0)) continue;  // binning covers (0, max h] only
      out.push_back({h, cm.chi(i, j)});
    }
  }
  if (out.empty())
    fail(ErrorCode::unestimable, "bin_chi: no estimable pair at a positive distance");
  return out;
}

// First edge >= h wins; bin k spans (edges[k], edges[k+1]].
std::size_t edge_bin(const std::vector<double>& edges, double h) {
  const std::size_t idx =
      static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), h) - edges.begin());
  return idx - 1;
}

}  // namespace

std::ptrdiff_t BinnedChi::find_bin(double h) const {
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (h > bins[k].lo && h <= bins[k].hi) return static_cast<std::ptrdiff_t>(k);
  }
  return -1;
}

BinnedChi bin_chi(const ChiMatrix& cm, const DistanceMatrix& dm, std::size_t K,
                  bool equal_count) {
  if (K < 2) fail(ErrorCode::invalid_argument, "bin_chi: need at least 2 bins");
  std::vector<PairSample> pairs = estimable_pairs(cm, dm);
  const double max_h = dm.max_distance();

  std::vector<double> edges;
  edges.reserve(K + 1);
  if (!equal_count) {
    for (std::size_t k = 0; k <= K; ++k)
      edges.push_back(max_h * static_cast<double>(k) / static_cast<double>(K));
  } else {
    std::vector<double> hs(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) hs[p] = pairs[p].h;
    std::sort(hs.begin(), hs.end());
    edges.push_back(0.0);
    for (std::size_t k = 1; k < K; ++k)
      edges.push_back(
          quantile_type7(hs.data(), hs.size(), static_cast<double>(k) / static_cast<double>(K)));
    edges.push_back(max_h);
    // Quantiles can coincide under heavy ties; the duplicates would only
    // create empty bins, which get dropped below, but keep edges sorted.
    std::sort(edges.begin(), edges.end());
  }

  struct Acc {
    double h_sum = 0.0;
    double chi_sum = 0.0;
    double chi_sq_sum = 0.0;
    std::size_t count = 0;
  };
  std::vector<Acc> acc(K);
  for (const PairSample& p : pairs) {
    Acc& a = acc[edge_bin(edges, p.h)];
    a.h_sum += p.h;
    a.chi_sum += p.chi;
    a.chi_sq_sum += p.chi * p.chi;
    ++a.count;
  }

  BinnedChi out;
  out.requested_bins = K;
  out.equal_count = equal_count;
  out.max_h = max_h;
  for (std::size_t k = 0; k < K; ++k) {
    if (acc[k].count == 0) continue;
    const double n = static_cast<double>(acc[k].count);
    BinnedChi::Bin bin;
    bin.h_mean = acc[k].h_sum / n;
    bin.chi_mean = acc[k].chi_sum / n;
    bin.chi_var = 0.0;
    if (acc[k].count > 1) {
      const double ss = acc[k].chi_sq_sum - n * bin.chi_mean * bin.chi_mean;
      bin.chi_var = std::max(0.0, ss / (n - 1.0));
    }
    bin.count = acc[k].count;
    bin.lo = edges[k];
    bin.hi = edges[k + 1];
    out.bins.push_back(bin);
  }
  return out;
}

ChiCurve::ChiCurve(const BinnedChi& bins, const SplineOptions& options) {
  if (bins.size() < 4)
    fail(ErrorCode::invalid_argument, "fit_chi_curve: need at least 4 non-empty bins");
  std::vector<double> x, y;
  x.reserve(bins.size());
  y.reserve(bins.size());
  SmoothingSpline::Options sopt;
  sopt.lambda = options.lambda;
  for (const auto& b : bins.bins) {
    x.push_back(b.h_mean);
    y.push_back(b.chi_mean);
    if (options.weighted) sopt.weights.push_back(static_cast<double>(b.count));
  }
  spline_ = std::make_shared<const SmoothingSpline>(std::move(x), std::move(y), std::move(sopt));
}

ChiCurve fit_chi_curve(const BinnedChi& bins, const SplineOptions& options) {
  return ChiCurve(bins, options);
}

Tau2Fn Tau2Fn::logistic(double a, double b, double c) {
  if (!(a >= 0.0) || !std::isfinite(a))
    fail(ErrorCode::invalid_argument, "Tau2Fn: logistic amplitude must be >= 0");
  if (!std::isfinite(b) || !std::isfinite(c))
    fail(ErrorCode::invalid_argument, "Tau2Fn: logistic parameters must be finite");
  Tau2Fn fn;
  fn.mode_ = Mode::parametric_logistic;
  fn.a_ = a;
  fn.b_ = b;
  fn.c_ = c;
  return fn;
}

Tau2Fn Tau2Fn::estimated(const BinnedChi& bins, const BootstrapSummary& boot,
                         const DistanceMatrix& dm, const SplineOptions& options) {
  const std::size_t d = dm.size();
  if (boot.d != d)
    fail(ErrorCode::invalid_argument, "Tau2Fn: bootstrap and distance matrices disagree on size");

  // Mean bootstrap variance per bin, using the same membership rule the bins
  // were built with.
  std::vector<double> var_sum(bins.size(), 0.0);
  std::vector<std::size_t> var_count(bins.size(), 0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (boot.is_missing(i, j)) continue;
      const std::ptrdiff_t k = bins.find_bin(dm(i, j));
      if (k < 0) continue;
      const double sd = boot.sd_at(i, j);
      var_sum[static_cast<std::size_t>(k)] += sd * sd;
      ++var_count[static_cast<std::size_t>(k)];
    }
  }

  std::vector<double> x, y;
  SmoothingSpline::Options sopt;
  sopt.lambda = options.lambda;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (var_count[k] == 0) continue;  // no variability information in this bin
    const double mean_var = var_sum[k] / static_cast<double>(var_count[k]);
    x.push_back(bins.bins[k].h_mean);
    y.push_back(std::max(0.0, bins.bins[k].chi_var - mean_var));
    if (options.weighted) sopt.weights.push_back(static_cast<double>(bins.bins[k].count));
  }
  if (x.size() < 4)
    fail(ErrorCode::unestimable,
         "Tau2Fn: fewer than 4 bins carry both a chi variance and bootstrap variances");

  Tau2Fn fn;
  fn.mode_ = Mode::estimated;
  fn.spline_ =
      std::make_shared<const SmoothingSpline>(std::move(x), std::move(y), std::move(sopt));
  return fn;
}

double Tau2Fn::operator()(double h) const {
  if (mode_ == Mode::parametric_logistic) {
    return a_ / (1.0 + std::exp(-b_ * (h - c_)));
  }
  return std::max(0.0, (*spline_)(h));
}

const char* Tau2Fn::mode_name() const {
  return mode_ == Mode::parametric_logistic ? "parametric-logistic" : "estimated";
}

}  // namespace extnet
