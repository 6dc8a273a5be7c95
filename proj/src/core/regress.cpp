#include "core/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"
#include "core/stats.hpp"

namespace extnet {
namespace {

constexpr int kIrlsMaxIterations = 100;
constexpr double kIrlsTolerance = 1e-10;
constexpr double kEtaClamp = 700.0;  // exp stays finite

void check_finite(const std::vector<double>& v, const char* what) {
  for (const double value : v) {
    if (!std::isfinite(value))
      fail(ErrorCode::invalid_argument, std::string("regression: non-finite ") + what);
  }
}

bool is_constant(const std::vector<double>& x) {
  for (const double v : x) {
    if (v != x.front()) return false;
  }
  return true;
}

// stat = coef / se with the degenerate cases pinned down: a zero standard
// error means a perfect fit, so a nonzero coefficient is infinitely
// significant and a zero one carries no evidence either way.
void wald_stat(double coef, double se, double (*p_of_stat)(double, double), double df,
               double* stat, double* p) {
  if (se > 0.0) {
    *stat = coef / se;
    *p = p_of_stat(*stat, df);
  } else if (coef != 0.0) {
    *stat = coef > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
    *p = 0.0;
  } else {
    *stat = std::numeric_limits<double>::quiet_NaN();
    *p = std::numeric_limits<double>::quiet_NaN();
  }
}

double t_p(double stat, double df) { return student_t_two_sided_p(stat, df); }
double z_p(double stat, double) { return normal_two_sided_p(stat); }

struct IrlsResult {
  double b0 = 0.0;
  double b1 = 0.0;
  int iterations = 0;
};

// IRLS for the Poisson log link on the design (1 [, x]). When with_slope is
// false the x values are ignored.
IrlsResult poisson_irls(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>* offset, bool with_slope) {
  const std::size_t n = y.size();
  double b0 = 0.0, b1 = 0.0;
  {
    // Common initialization: working response from mu = y + 0.5.
    double sw = 0, swx = 0, swxx = 0, swz = 0, swxz = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double mu = y[i] + 0.5;
      const double off = offset ? (*offset)[i] : 0.0;
      const double z = std::log(mu) - off;  // (y - mu)/mu term is 0 at init by construction
      const double w = mu;
      const double xi = with_slope ? x[i] : 0.0;
      sw += w;
      swx += w * xi;
      swxx += w * xi * xi;
      swz += w * z;
      swxz += w * xi * z;
    }
    if (with_slope) {
      const double det = sw * swxx - swx * swx;
      if (!(std::fabs(det) > 0.0))
        fail(ErrorCode::numeric, "poisson_glm_fit: singular weighted design at initialization");
      b0 = (swxx * swz - swx * swxz) / det;
      b1 = (sw * swxz - swx * swz) / det;
    } else {
      b0 = swz / sw;
    }
  }

  for (int iter = 1; iter <= kIrlsMaxIterations; ++iter) {
    double sw = 0, swx = 0, swxx = 0, swz = 0, swxz = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = with_slope ? x[i] : 0.0;
      const double off = offset ? (*offset)[i] : 0.0;
      const double eta = std::clamp(b0 + b1 * xi + off, -kEtaClamp, kEtaClamp);
      const double mu = std::exp(eta);
      const double z = (eta - off) + (y[i] - mu) / mu;
      const double w = mu;
      sw += w;
      swx += w * xi;
      swxx += w * xi * xi;
      swz += w * z;
      swxz += w * xi * z;
    }
    double nb0, nb1 = 0.0;
    if (with_slope) {
      const double det = sw * swxx - swx * swx;
      if (!(std::fabs(det) > 0.0))
        fail(ErrorCode::numeric, "poisson_glm_fit: singular weighted design during IRLS");
      nb0 = (swxx * swz - swx * swxz) / det;
      nb1 = (sw * swxz - swx * swz) / det;
    } else {
      nb0 = swz / sw;
    }
    const double step = std::max(std::fabs(nb0 - b0), std::fabs(nb1 - b1));
    b0 = nb0;
    b1 = nb1;
    if (step < kIrlsTolerance) return {b0, b1, iter};
  }

  // Report the score norm at the last iterate so the failure is diagnosable.
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = with_slope ? x[i] : 0.0;
    const double off = offset ? (*offset)[i] : 0.0;
    const double mu = std::exp(std::clamp(b0 + b1 * xi + off, -kEtaClamp, kEtaClamp));
    s0 += y[i] - mu;
    s1 += xi * (y[i] - mu);
  }
  fail(ErrorCode::nonconvergence,
       "poisson_glm_fit: IRLS did not converge in " + std::to_string(kIrlsMaxIterations) +
           " iterations; last iterate (" + std::to_string(b0) + ", " + std::to_string(b1) +
           "), score norm " + std::to_string(std::hypot(s0, s1)));
}

RegressionFit poisson_fit_impl(const std::vector<double>& x, const std::vector<double>& counts,
                               const std::vector<double>* log_exposure, bool with_slope) {
  const std::size_t n = counts.size();
  if (n < 3) fail(ErrorCode::invalid_argument, "poisson_glm_fit: need at least 3 observations");
  if (with_slope && x.size() != n)
    fail(ErrorCode::invalid_argument, "poisson_glm_fit: covariate/count length mismatch");
  if (log_exposure && log_exposure->size() != n)
    fail(ErrorCode::invalid_argument, "poisson_glm_fit: offset length mismatch");
  if (with_slope) check_finite(x, "covariate");
  check_finite(counts, "count");
  if (log_exposure) check_finite(*log_exposure, "offset");
  bool any_positive = false;
  for (const double c : counts) {
    if (!(c >= 0.0) || c != std::floor(c))
      fail(ErrorCode::invalid_argument, "poisson_glm_fit: counts must be nonnegative integers");
    if (c > 0.0) any_positive = true;
  }
  if (!any_positive) fail(ErrorCode::invalid_argument, "poisson_glm_fit: all counts are zero");
  if (with_slope && is_constant(x))
    fail(ErrorCode::invalid_argument, "poisson_glm_fit: constant covariate (slope unidentifiable)");

  const IrlsResult r = poisson_irls(x, counts, log_exposure, with_slope);

  // Observed (= expected) information at the solution.
  double i00 = 0, i01 = 0, i11 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = with_slope ? x[i] : 0.0;
    const double off = log_exposure ? (*log_exposure)[i] : 0.0;
    const double mu = std::exp(std::clamp(r.b0 + r.b1 * xi + off, -kEtaClamp, kEtaClamp));
    i00 += mu;
    i01 += mu * xi;
    i11 += mu * xi * xi;
  }

  RegressionFit fit;
  fit.family = Family::poisson_log;
  fit.has_slope = with_slope;
  fit.intercept = r.b0;
  fit.n = n;
  fit.iterations = r.iterations;
  if (with_slope) {
    const double det = i00 * i11 - i01 * i01;
    if (!(det > 0.0))
      fail(ErrorCode::numeric, "poisson_glm_fit: singular information matrix at the solution");
    fit.slope = r.b1;
    fit.se_intercept = std::sqrt(i11 / det);
    fit.se_slope = std::sqrt(i00 / det);
    wald_stat(fit.slope, fit.se_slope, z_p, 0.0, &fit.stat_slope, &fit.p_slope);
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    fit.slope = nan;
    fit.se_slope = nan;
    fit.stat_slope = nan;
    fit.p_slope = nan;
    fit.se_intercept = std::sqrt(1.0 / i00);
  }
  wald_stat(fit.intercept, fit.se_intercept, z_p, 0.0, &fit.stat_intercept, &fit.p_intercept);
  return fit;
}

}  // namespace

const char* family_name(Family family) {
  return family == Family::gaussian_identity ? "gaussian-identity" : "poisson-log";
}

RegressionFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3) fail(ErrorCode::invalid_argument, "ols_fit: need at least 3 observations");
  if (y.size() != n) fail(ErrorCode::invalid_argument, "ols_fit: x/y length mismatch");
  check_finite(x, "covariate");
  check_finite(y, "response");
  if (is_constant(x))
    fail(ErrorCode::invalid_argument, "ols_fit: constant covariate (slope unidentifiable)");

  double x_mean = 0, y_mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }

  RegressionFit fit;
  fit.family = Family::gaussian_identity;
  fit.has_slope = true;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  fit.n = n;
  fit.iterations = 0;

  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = y[i] - fit.intercept - fit.slope * x[i];
    rss += resid * resid;
  }
  const double df = static_cast<double>(n - 2);
  const double sigma2 = rss / df;
  fit.se_slope = std::sqrt(sigma2 / sxx);
  fit.se_intercept =
      std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + x_mean * x_mean / sxx));
  wald_stat(fit.slope, fit.se_slope, t_p, df, &fit.stat_slope, &fit.p_slope);
  wald_stat(fit.intercept, fit.se_intercept, t_p, df, &fit.stat_intercept, &fit.p_intercept);
  return fit;
}

RegressionFit poisson_glm_fit(const std::vector<double>& x, const std::vector<double>& counts,
                              const std::vector<double>* log_exposure) {
  return poisson_fit_impl(x, counts, log_exposure, /*with_slope=*/true);
}

RegressionFit poisson_glm_fit(const std::vector<double>& counts,
                              const std::vector<double>* log_exposure) {
  return poisson_fit_impl({}, counts, log_exposure, /*with_slope=*/false);
}

}  // namespace extnet
