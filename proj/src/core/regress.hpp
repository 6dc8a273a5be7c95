#pragma once

#include <cstddef>
#include <vector>

namespace extnet {

enum class Family { gaussian_identity, poisson_log };

struct RegressionFit {
  Family family = Family::gaussian_identity;
  bool has_slope = true;
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double stat_intercept = 0.0;  // t (OLS) or z (GLM)
  double stat_slope = 0.0;
  double p_intercept = 0.0;
  double p_slope = 0.0;
  std::size_t n = 0;
  int iterations = 0;  // 0 for the closed-form OLS fit
};

const char* family_name(Family family);

// Simple linear regression y = a + b*x with classical standard errors and
// two-sided t(n-2) p-values. Needs n >= 3 finite observations and a
// non-constant covariate. A perfect fit drives the standard errors to zero;
// the statistics then become +/-inf (p = 0) or NaN for a zero coefficient.
RegressionFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

// Poisson log-linear model counts ~ Poisson(exp(a + b*x [+ offset])), fitted
// by iteratively reweighted least squares (converged when max |delta beta| <
// 1e-10, at most 100 iterations; non-convergence raises an error carrying the
// last iterate and score norm). Wald standard errors and normal p-values.
// Counts must be nonnegative integers, not all zero, with n >= 3.
// `log_exposure`, when non-null, is a per-observation additive offset on the
// log scale (so the coefficients model a rate).
RegressionFit poisson_glm_fit(const std::vector<double>& x, const std::vector<double>& counts,
                              const std::vector<double>* log_exposure = nullptr);

// Intercept-only Poisson fit (the MLE intercept is log of the weighted mean
// count); same validation and convergence rules.
RegressionFit poisson_glm_fit(const std::vector<double>& counts,
                              const std::vector<double>* log_exposure = nullptr);

}  // namespace extnet
