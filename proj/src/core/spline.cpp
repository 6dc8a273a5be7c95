#include "core/spline.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace extnet {
namespace {

constexpr double kNullEigenvalueRatio = 1e-12;
constexpr int kGcvGridSize = 401;

// Second-difference band matrix Q (n x (n-2)) and the tridiagonal R
// ((n-2) x (n-2)) of the natural-spline penalty K = Q R^-1 Q^T.
void penalty_bands(const std::vector<double>& x, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  q.setZero(n, n - 2);
  r.setZero(n - 2, n - 2);
  for (Eigen::Index c = 0; c < n - 2; ++c) {
    const double h0 = x[static_cast<std::size_t>(c) + 1] - x[static_cast<std::size_t>(c)];
    const double h1 = x[static_cast<std::size_t>(c) + 2] - x[static_cast<std::size_t>(c) + 1];
    q(c, c) = 1.0 / h0;
    q(c + 1, c) = -1.0 / h0 - 1.0 / h1;
    q(c + 2, c) = 1.0 / h1;
    r(c, c) = (h0 + h1) / 3.0;
    if (c + 1 < n - 2) {
      r(c, c + 1) = h1 / 6.0;
      r(c + 1, c) = h1 / 6.0;
    }
  }
}

double shrink_factor(double lambda, double d) {
  if (d <= 0.0) return 1.0;
  if (std::isinf(lambda)) return 0.0;
  return 1.0 / (1.0 + lambda * d);
}

}  // namespace

SmoothingSpline::SmoothingSpline(std::vector<double> x, std::vector<double> y, Options options)
    : x_(std::move(x)) {
  const std::size_t n = x_.size();
  if (n < 4) fail(ErrorCode::invalid_argument, "SmoothingSpline: need at least 4 points");
  if (y.size() != n) fail(ErrorCode::invalid_argument, "SmoothingSpline: x/y length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y[i]))
      fail(ErrorCode::invalid_argument, "SmoothingSpline: non-finite input");
    if (i > 0 && !(x_[i] > x_[i - 1]))
      fail(ErrorCode::invalid_argument, "SmoothingSpline: x must be strictly increasing");
  }
  std::vector<double> w = options.weights;
  if (w.empty()) w.assign(n, 1.0);
  if (w.size() != n) fail(ErrorCode::invalid_argument, "SmoothingSpline: weight length mismatch");
  double w_sum = 0.0;
  for (const double wi : w) {
    if (!(wi > 0.0) || !std::isfinite(wi))
      fail(ErrorCode::invalid_argument, "SmoothingSpline: weights must be positive");
    w_sum += wi;
  }
  const double w_scale = static_cast<double>(n) / w_sum;
  for (double& wi : w) wi *= w_scale;
  if (!(options.lambda >= 0.0) && !(options.lambda < 0.0))
    fail(ErrorCode::invalid_argument, "SmoothingSpline: lambda must not be NaN");

  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd q, r;
  penalty_bands(x_, q, r);

  Eigen::LLT<Eigen::MatrixXd> r_llt(r);
  if (r_llt.info() != Eigen::Success)
    fail(ErrorCode::numeric, "SmoothingSpline: penalty band matrix is not positive definite");
  // K = Q R^-1 Q^T, scaled into the weighted metric.
  Eigen::MatrixXd k = q * r_llt.solve(q.transpose());
  Eigen::VectorXd w_isqrt(ni);
  Eigen::VectorXd w_sqrt(ni);
  for (Eigen::Index i = 0; i < ni; ++i) {
    w_sqrt(i) = std::sqrt(w[static_cast<std::size_t>(i)]);
    w_isqrt(i) = 1.0 / w_sqrt(i);
  }
  Eigen::MatrixXd k_tilde = w_isqrt.asDiagonal() * k * w_isqrt.asDiagonal();
  k_tilde = 0.5 * (k_tilde + k_tilde.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_tilde);
  if (eig.info() != Eigen::Success)
    fail(ErrorCode::numeric, "SmoothingSpline: eigendecomposition of the penalty failed");
  Eigen::VectorXd d = eig.eigenvalues();
  const Eigen::MatrixXd& u = eig.eigenvectors();
  const double d_max = d.maxCoeff();
  if (!(d_max > 0.0))
    fail(ErrorCode::numeric, "SmoothingSpline: penalty has no positive curvature direction");
  double d_min_pos = d_max;
  for (Eigen::Index i = 0; i < ni; ++i) {
    if (d(i) < kNullEigenvalueRatio * d_max) {
      d(i) = 0.0;
    } else {
      d_min_pos = std::min(d_min_pos, d(i));
    }
  }

  Eigen::VectorXd y_vec(ni);
  for (Eigen::Index i = 0; i < ni; ++i) y_vec(i) = y[static_cast<std::size_t>(i)];
  const Eigen::VectorXd y_tilde = u.transpose() * (w_sqrt.asDiagonal() * y_vec);

  double lambda = options.lambda;
  double gcv_best = std::numeric_limits<double>::quiet_NaN();
  if (lambda < 0.0) {
    // Log-spaced grid wide enough that both ends behave like the lambda -> 0
    // and lambda -> infinity limits.
    const double lo = std::log(1e-8 / d_max);
    const double hi = std::log(1e8 / d_min_pos);
    for (int kidx = 0; kidx < kGcvGridSize; ++kidx) {
      const double cand =
          std::exp(lo + (hi - lo) * static_cast<double>(kidx) / (kGcvGridSize - 1));
      double rss = 0.0;
      double tr = 0.0;
      for (Eigen::Index i = 0; i < ni; ++i) {
        const double f = shrink_factor(cand, d(i));
        const double resid = (1.0 - f) * y_tilde(i);
        rss += resid * resid;
        tr += f;
      }
      const double denom = static_cast<double>(n) - tr;
      const double score = static_cast<double>(n) * rss / (denom * denom);
      if (std::isnan(gcv_best) || score < gcv_best) {
        gcv_best = score;
        lambda = cand;
      }
    }
  }

  Eigen::VectorXd c(ni);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < ni; ++i) {
    const double f = shrink_factor(lambda, d(i));
    c(i) = f * y_tilde(i);
    tr += f;
  }
  const Eigen::VectorXd g = w_isqrt.asDiagonal() * (u * c);
  if (!g.allFinite())
    fail(ErrorCode::numeric, "SmoothingSpline: fit produced non-finite values");

  g_.assign(n, 0.0);
  for (Eigen::Index i = 0; i < ni; ++i) g_[static_cast<std::size_t>(i)] = g(i);
  lambda_ = lambda;
  edf_ = tr;
  gcv_ = gcv_best;

  // Second derivatives at the interior knots: R gamma = Q^T g defines the
  // natural cubic spline with values g.
  const Eigen::VectorXd gamma_int = r_llt.solve(q.transpose() * g);
  gamma_.assign(n, 0.0);
  for (Eigen::Index i = 0; i < ni - 2; ++i)
    gamma_[static_cast<std::size_t>(i) + 1] = gamma_int(i);

  const double h_first = x_[1] - x_[0];
  const double h_last = x_[n - 1] - x_[n - 2];
  slope_left_ = (g_[1] - g_[0]) / h_first - h_first * gamma_[1] / 6.0;
  slope_right_ = (g_[n - 1] - g_[n - 2]) / h_last + h_last * gamma_[n - 2] / 6.0;
}

double SmoothingSpline::operator()(double x) const {
  const std::size_t n = x_.size();
  if (x <= x_[0]) return g_[0] + (x - x_[0]) * slope_left_;
  if (x >= x_[n - 1]) return g_[n - 1] + (x - x_[n - 1]) * slope_right_;
  const std::size_t hi =
      static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double a = x - x_[lo];
  const double b = x_[hi] - x;
  // Piecewise-cubic form of a natural spline from values and second
  // derivatives at the knots.
  return (a * g_[hi] + b * g_[lo]) / h -
         a * b / 6.0 * ((1.0 + a / h) * gamma_[hi] + (1.0 + b / h) * gamma_[lo]);
}

}  // namespace extnet
