#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "core/bootstrap.hpp"
#include "core/madogram.hpp"
#include "core/spline.hpp"
#include "core/types.hpp"

namespace extnet {

// Pairwise chi estimates grouped into distance bins over (0, max h]. Bins are
// ordered by distance and empty bins are dropped, so `count >= 1` throughout.
struct BinnedChi {
  struct Bin {
    double h_mean = 0.0;    // mean pair distance inside the bin
    double chi_mean = 0.0;  // mean chi estimate
    double chi_var = 0.0;   // within-bin sample variance (0 when count == 1)
    std::size_t count = 0;
    double lo = 0.0;  // membership interval (lo, hi]
    double hi = 0.0;
  };

  std::vector<Bin> bins;
  std::size_t requested_bins = 0;
  bool equal_count = false;
  double max_h = 0.0;

  std::size_t size() const { return bins.size(); }
  // Index of the bin whose (lo, hi] interval contains h, or -1.
  std::ptrdiff_t find_bin(double h) const;
};

// Group the estimable pairs by distance. Default: K equal-width bins over
// (0, max h]. equal_count instead places bin edges at distance quantiles, so
// counts are near-equal (exactly equal only without ties). Pairs with a
// missing chi estimate are skipped; if none remain the call fails.
BinnedChi bin_chi(const ChiMatrix& cm, const DistanceMatrix& dm, std::size_t K,
                  bool equal_count = false);

struct SplineOptions {
  bool weighted = false;   // weight bins by pair count
  double lambda = -1.0;    // < 0: choose by generalized cross-validation
};

// Distance-decay curve: cubic smoothing spline through the bin summaries
// (h_mean, chi_mean). Needs at least 4 bins. Evaluation extends linearly
// beyond the knot range.
class ChiCurve {
 public:
  ChiCurve(const BinnedChi& bins, const SplineOptions& options = {});

  double operator()(double h) const { return (*spline_)(h); }
  double lambda() const { return spline_->lambda(); }
  double edf() const { return spline_->edf(); }
  const SmoothingSpline& spline() const { return *spline_; }

 private:
  std::shared_ptr<const SmoothingSpline> spline_;
};

ChiCurve fit_chi_curve(const BinnedChi& bins, const SplineOptions& options = {});

// Distance-dependent variance of the true chi around the distance-decay
// curve. Either a parametric logistic a/(1+exp(-b(h-c))) or estimated from
// the data as the smoothed per-bin excess of var(chi) over the mean
// bootstrap variance. Nonnegative everywhere by construction.
class Tau2Fn {
 public:
  enum class Mode { parametric_logistic, estimated };

  static Tau2Fn logistic(double a, double b, double c);
  // Per bin: tau2_k = max(0, chi_var_k - mean of sd^2 over the bin's pairs);
  // the points (h_mean_k, tau2_k) are then smoothed with the same spline
  // machinery as the chi curve and clamped at 0. Bins where no pair carries a
  // bootstrap value are skipped; at least 4 usable bins are required.
  static Tau2Fn estimated(const BinnedChi& bins, const BootstrapSummary& boot,
                          const DistanceMatrix& dm, const SplineOptions& options = {});

  double operator()(double h) const;
  Mode mode() const { return mode_; }
  const char* mode_name() const;

 private:
  Tau2Fn() = default;

  Mode mode_ = Mode::parametric_logistic;
  double a_ = 0.0, b_ = 0.0, c_ = 0.0;
  std::shared_ptr<const SmoothingSpline> spline_;
};

}  // namespace extnet
