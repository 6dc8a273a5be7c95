#include "core/brsim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"

namespace extnet {
namespace {

constexpr double kCholeskyJitter = 1e-10;

// Law of one spectral (extremal) function anchored at site `n`: the function
// equals 1 at the anchor and exp(B(x_j) - g(h_jn)) elsewhere, with B centered
// Gaussian, Cov(B_j, B_k) = g(h_jn) + g(h_kn) - g(h_jk) for the semivariogram
// g. Stored as the Cholesky factor of that covariance over the d-1 non-anchor
// sites plus the drift vector g(h_jn).
struct AnchorFactor {
  Eigen::MatrixXd chol;   // (d-1) x (d-1) lower triangular
  Eigen::VectorXd drift;  // g(h_jn), reduced index order
};

AnchorFactor make_anchor_factor(const DistanceMatrix& distances, const BRParams& params,
                                std::size_t anchor) {
  const std::size_t d = distances.size();
  const Eigen::Index r = static_cast<Eigen::Index>(d - 1);
  Eigen::MatrixXd cov(r, r);
  Eigen::VectorXd drift(r);

  // Reduced index a walks the non-anchor sites in increasing full index.
  std::vector<std::size_t> full(d - 1);
  std::size_t a = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j != anchor) full[a++] = j;
  }
  for (Eigen::Index p = 0; p < r; ++p) {
    const double gp = br_semivariogram(distances(full[p], anchor), params);
    drift(p) = gp;
    for (Eigen::Index q = 0; q <= p; ++q) {
      const double gq = br_semivariogram(distances(full[q], anchor), params);
      const double gpq = br_semivariogram(distances(full[p], full[q]), params);
      double c = gp + gq - gpq;
      if (p == q) c += kCholeskyJitter;
      cov(p, q) = c;
      cov(q, p) = c;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::numeric,
         "br_simulate: spectral covariance is not positive definite at site " +
             std::to_string(anchor));
  AnchorFactor f;
  f.chol = llt.matrixL();
  f.drift = std::move(drift);
  return f;
}

// Draw one spectral function for the given anchor into y (length d; the
// anchor coordinate is set to 1).
void draw_spectral(const AnchorFactor& factor, std::size_t anchor, std::size_t d, CounterRng& rng,
                   Eigen::VectorXd& eps, Eigen::VectorXd& gauss, std::vector<double>& y) {
  const Eigen::Index r = static_cast<Eigen::Index>(d - 1);
  for (Eigen::Index p = 0; p < r; ++p) eps(p) = rng.normal();
  gauss.noalias() = factor.chol.triangularView<Eigen::Lower>() * eps;
  std::size_t a = 0;
  for (std::size_t j = 0; j < d; ++j) {
    if (j == anchor) {
      y[j] = 1.0;
    } else {
      y[j] = std::exp(gauss(static_cast<Eigen::Index>(a)) - factor.drift(static_cast<Eigen::Index>(a)));
      ++a;
    }
  }
}

// Exact record-breaking construction: for each site in turn, walk the Poisson
// points 1/E1 > 1/(E1+E2) > ... and keep the spectral functions that do not
// exceed the already-settled coordinates.
void simulate_exact_one(const std::vector<AnchorFactor>& factors, std::size_t d, CounterRng& rng,
                        Eigen::VectorXd& eps, Eigen::VectorXd& gauss, std::vector<double>& y,
                        double* out_row) {
  for (std::size_t j = 0; j < d; ++j) out_row[j] = 0.0;
  for (std::size_t n = 0; n < d; ++n) {
    double inv_zeta = rng.exponential();
    double zeta = 1.0 / inv_zeta;
    while (zeta > out_row[n]) {
      draw_spectral(factors[n], n, d, rng, eps, gauss, y);
      bool ok = true;
      for (std::size_t j = 0; j < n; ++j) {
        if (zeta * y[j] >= out_row[j]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (std::size_t j = 0; j < d; ++j) {
          const double v = zeta * y[j];
          if (v > out_row[j]) out_row[j] = v;
        }
      }
      inv_zeta += rng.exponential();
      zeta = 1.0 / inv_zeta;
    }
  }
}

// Pointwise max over a fixed number of spectral points, all anchored at site
// 0. Converges to the exact law as the point count grows, but any fixed count
// truncates the Poisson series and biases the result low far from the anchor.
void simulate_approx_one(const AnchorFactor& factor, std::size_t d, std::size_t points,
                         CounterRng& rng, Eigen::VectorXd& eps, Eigen::VectorXd& gauss,
                         std::vector<double>& y, double* out_row) {
  for (std::size_t j = 0; j < d; ++j) out_row[j] = 0.0;
  double inv_zeta = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    inv_zeta += rng.exponential();
    const double zeta = 1.0 / inv_zeta;
    draw_spectral(factor, 0, d, rng, eps, gauss, y);
    for (std::size_t j = 0; j < d; ++j) {
      const double v = zeta * y[j];
      if (v > out_row[j]) out_row[j] = v;
    }
  }
}

}  // namespace

void validate(const BRParams& params) {
  if (!(params.rho > 0.0) || !std::isfinite(params.rho))
    fail(ErrorCode::invalid_argument, "BRParams: rho must be a positive finite number");
  if (!(params.kappa > 0.0) || !(params.kappa <= 2.0))
    fail(ErrorCode::invalid_argument, "BRParams: kappa must lie in (0, 2]");
}

double br_semivariogram(double h, const BRParams& params) {
  return std::pow(h, params.kappa) / params.rho;
}

double br_true_chi(double h, const BRParams& params) {
  validate(params);
  if (!(h >= 0.0))
    fail(ErrorCode::invalid_argument, "br_true_chi: distance must be nonnegative");
  return 2.0 - 2.0 * norm_cdf(std::sqrt(br_semivariogram(h, params) / 2.0));
}

MaximaMatrix br_simulate(const StationSet& stations, const BRParams& params, std::size_t m,
                         SimMode mode, std::size_t approx_points, int threads) {
  validate(params);
  if (stations.coord_system() != CoordSystem::planar)
    fail(ErrorCode::invalid_argument, "br_simulate: requires a planar station set");
  if (m < 1) fail(ErrorCode::invalid_argument, "br_simulate: need at least one block");
  if (mode == SimMode::approximate && approx_points < 1)
    fail(ErrorCode::invalid_argument, "br_simulate: approximate mode needs at least one spectral point");

  const std::size_t d = stations.size();
  const DistanceMatrix distances = pairwise_distances(stations);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      if (!(distances(i, j) > 0.0))
        fail(ErrorCode::invalid_argument, "br_simulate: stations " + stations[i].id + " and " +
                                              stations[j].id + " share a location");
    }
  }

  std::vector<AnchorFactor> factors;
  if (mode == SimMode::exact) {
    factors.reserve(d);
    for (std::size_t n = 0; n < d; ++n) factors.push_back(make_anchor_factor(distances, params, n));
  } else {
    factors.push_back(make_anchor_factor(distances, params, 0));
  }

  std::vector<double> values(m * d, 0.0);
  parallel_for(m, threads, [&](std::size_t r) {
    CounterRng rng(params.seed, CounterRng::stream_id(stream::simulate, r));
    Eigen::VectorXd eps(static_cast<Eigen::Index>(d - 1));
    Eigen::VectorXd gauss(static_cast<Eigen::Index>(d - 1));
    std::vector<double> y(d);
    double* row = values.data() + r * d;
    if (mode == SimMode::exact) {
      simulate_exact_one(factors, d, rng, eps, gauss, y, row);
    } else {
      simulate_approx_one(factors[0], d, approx_points, rng, eps, gauss, y, row);
    }
  });

  std::vector<unsigned char> valid(m * d, 1);
  std::vector<long long> labels(m);
  for (std::size_t t = 0; t < m; ++t) labels[t] = static_cast<long long>(t + 1);
  std::vector<std::string> ids;
  ids.reserve(d);
  for (std::size_t i = 0; i < d; ++i) ids.push_back(stations[i].id);
  return MaximaMatrix(m, d, std::move(values), std::move(valid), std::move(labels), std::move(ids));
}

Network true_network(const StationSet& stations, const BRParams& params, double chi_min) {
  validate(params);
  // chi at a positive distance is strictly inside (0,1), so any threshold of
  // 1 or more simply yields the empty network.
  if (!(chi_min > 0.0) || !std::isfinite(chi_min))
    fail(ErrorCode::invalid_argument, "true_network: chi_min must be a positive finite number");

  const std::size_t d = stations.size();
  const DistanceMatrix distances = pairwise_distances(stations);
  Network net;
  net.node_count = d;
  net.chi_min = chi_min;
  net.tag = Network::Tag::truth;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const double chi = br_true_chi(distances(i, j), params);
      if (chi > chi_min) net.edges.push_back({i, j, chi, distances(i, j)});
    }
  }
  return net;
}

}  // namespace extnet
