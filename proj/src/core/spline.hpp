#pragma once

#include <cstddef>
#include <vector>

namespace extnet {

// Weighted natural cubic smoothing spline: the minimizer over twice
// continuously differentiable functions of
//
//   sum_i w_i (y_i - f(x_i))^2 + lambda * integral f''(t)^2 dt,
//
// which is a natural cubic spline with knots at the x_i (Green & Silverman,
// "Nonparametric Regression and Generalized Linear Models", 1994, ch. 2-3).
//
// The fit is computed in the Demmler-Reinsch basis: with K the penalty matrix
// assembled from the band matrices Q and R (K = Q R^-1 Q^T) and W the weight
// matrix, the eigendecomposition of W^-1/2 K W^-1/2 turns the solve for any
// lambda into independent scalar shrinkages 1/(1 + lambda d_i). That makes
// lambda = +infinity exact (projection onto the penalty's null space, i.e.
// the weighted least-squares line) and keeps the generalized cross-validation
// scan cheap.
class SmoothingSpline {
 public:
  struct Options {
    // Penalty weight. Negative means "choose by generalized cross-validation
    // over a log-spaced grid"; +infinity is accepted and gives the weighted
    // least-squares line.
    double lambda = -1.0;
    // Per-point weights (empty = all ones). Must be positive; they are
    // normalized to mean 1 so the lambda scale is comparable across callers.
    std::vector<double> weights;
  };

  // x must be strictly increasing with at least 4 points; y finite.
  SmoothingSpline(std::vector<double> x, std::vector<double> y, Options options);
  SmoothingSpline(std::vector<double> x, std::vector<double> y)
      : SmoothingSpline(std::move(x), std::move(y), Options()) {}

  // Value of the fitted spline; linear continuation beyond the knot range
  // (a natural spline has zero second derivative at and beyond the ends).
  double operator()(double x) const;

  double lambda() const { return lambda_; }
  // Trace of the hat matrix at the chosen lambda.
  double edf() const { return edf_; }
  // Generalized cross-validation score at the chosen lambda (NaN when lambda
  // was given explicitly).
  double gcv() const { return gcv_; }
  std::size_t size() const { return x_.size(); }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& fitted() const { return g_; }

 private:
  std::vector<double> x_;
  std::vector<double> g_;      // fitted values at the knots
  std::vector<double> gamma_;  // second derivatives at the knots (ends are 0)
  double slope_left_ = 0.0;
  double slope_right_ = 0.0;
  double lambda_ = 0.0;
  double edf_ = 0.0;
  double gcv_ = 0.0;
};

}  // namespace extnet
