#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blockade/lindblad.hpp"
#include "blockade/model.hpp"

namespace blockade {

// Interior local maxima of a sampled curve, refined by a parabola through
// the three samples around each peak. Returned as delay positions.
std::vector<double> local_maxima(std::span<const G2Point> curve);

// Mean distance between successive maxima; NaN with fewer than two.
double mean_peak_spacing(std::span<const double> maxima);

struct OptimumSearch {
  double drive_E;
  double theta;
  double g2_zero;
  std::size_t evaluations;
};

// Numerically minimizes the stationary g2(0) over (E, theta) at fixed U,
// delta and kappa. Nested Brent searches: theta inside, E outside. The
// search brackets E in [E_lo, E_hi] and theta within +-pi/2 of theta_guess.
OptimumSearch minimize_g2_zero(double parametric_U, double delta, double kappa, std::size_t dim,
                               double e_lo, double e_hi, double theta_guess);

}  // namespace blockade
