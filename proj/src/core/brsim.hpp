#pragma once

#include <cstddef>
#include <cstdint>

#include "core/network.hpp"
#include "core/types.hpp"

namespace extnet {

// Range/smoothness of the Brown–Resnick dependence model. The driving
// Gaussian increment process has semivariogram g(h) = h^kappa / rho, which is
// exactly the calibration under which the pairwise upper tail dependence is
// chi(h) = 2 - 2*Phi(sqrt(h^kappa / (2*rho))).
struct BRParams {
  double rho = 0.05;
  double kappa = 1.0;
  std::uint64_t seed = 0;
};

void validate(const BRParams& params);

// Semivariogram of the increment process: h^kappa / rho.
double br_semivariogram(double h, const BRParams& params);

// Closed-form pairwise chi at distance h >= 0. Strictly decreasing, chi(0)=1.
double br_true_chi(double h, const BRParams& params);

enum class SimMode {
  exact,        // extremal-functions construction; distribution is exact
  approximate,  // max over a fixed number of spectral points; biased low
};

// m independent replicates of the process at the given planar stations, on
// the unit Fréchet scale. Deterministic for a given seed and independent of
// worker count: replicate r consumes its own counter-RNG stream.
//
// `approx_points` is only read in approximate mode (number of spectral
// points whose pointwise max forms each replicate).
MaximaMatrix br_simulate(const StationSet& stations, const BRParams& params, std::size_t m,
                         SimMode mode = SimMode::exact, std::size_t approx_points = 1000,
                         int threads = 0);

// Edges are exactly the pairs whose closed-form chi exceeds chi_min
// (chi_min must be positive; thresholds >= 1 give an empty network since chi
// at a positive distance is strictly below 1); edge weight is that chi value.
Network true_network(const StationSet& stations, const BRParams& params, double chi_min);

}  // namespace extnet
