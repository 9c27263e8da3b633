#include "blockade/analysis.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "blockade/error.hpp"

namespace blockade {

std::vector<double> local_maxima(std::span<const G2Point> curve) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double y0 = curve[i - 1].g2;
    const double y1 = curve[i].g2;
    const double y2 = curve[i + 1].g2;
    if (!(y1 > y0 && y1 >= y2)) continue;
    const double h = curve[i].tau - curve[i - 1].tau;
    const double denom = y0 - 2.0 * y1 + y2;
    const double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    out.push_back(curve[i].tau + shift * h);
  }
  return out;
}

double mean_peak_spacing(std::span<const double> maxima) {
  if (maxima.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return (maxima.back() - maxima.front()) / static_cast<double>(maxima.size() - 1);
}

OptimumSearch minimize_g2_zero(double parametric_U, double delta, double kappa, std::size_t dim,
                               double e_lo, double e_hi, double theta_guess) {
  if (!(e_lo > 0.0) || !(e_hi > e_lo)) {
    throw Error(ErrorCode::kInvalidArgument, "drive bracket must satisfy 0 < E_lo < E_hi");
  }
  constexpr int kBits = 30;
  constexpr double kHalfPi = 0.5 * units::kPi;
  std::size_t evaluations = 0;

  auto g2_at = [&](double e, double theta) {
    ++evaluations;
    return g2_zero_cw({delta, kappa, e, parametric_U, theta}, dim);
  };
  auto best_theta = [&](double e) {
    return boost::math::tools::brent_find_minima(
        [&](double theta) { return g2_at(e, theta); }, theta_guess - kHalfPi, theta_guess + kHalfPi,
        kBits);
  };
  const auto [e_best, g2_best] = boost::math::tools::brent_find_minima(
      [&](double e) { return best_theta(e).second; }, e_lo, e_hi, kBits);
  const auto [theta_best, g2_final] = best_theta(e_best);
  (void)g2_best;
  return {e_best, theta_best, g2_final, evaluations};
}

}  // namespace blockade
