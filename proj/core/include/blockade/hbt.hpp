#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "blockade/mcwf.hpp"

// Hanbury Brown-Twiss statistics on emission records.

namespace blockade {

struct CoincidenceHistogram {
  double bin_width = 0.0;
  double max_delay = 0.0;
  // counts[j]: ordered click pairs with delay in [j bin_width, (j + 1) bin_width).
  std::vector<std::uint64_t> counts;
  std::uint64_t total_clicks = 0;
  double duration = 0.0;  // summed record durations
  std::size_t record_count = 0;
  bool empty_input = false;  // built from an empty record list

  std::size_t bins() const { return counts.size(); }
  double bin_lower(std::size_t j) const { return static_cast<double>(j) * bin_width; }
  double bin_center(std::size_t j) const { return (static_cast<double>(j) + 0.5) * bin_width; }

  // Elementwise sum; binning must match.
  void merge(const CoincidenceHistogram& other);
};

// Counts every ordered pair 0 < t' - t < max_delay inside each record. Pairs
// are never formed across records.
CoincidenceHistogram build_histogram(std::span<const EmissionRecord> records, double bin_width,
                                     double max_delay);

struct G2Bin {
  double tau_lower;
  double tau_upper;
  double g2;
  double std_error;
  std::uint64_t counts;
};

// g2(tau_j) = (counts_j / N) / (N bin_width / T) with Poisson error bars.
std::vector<G2Bin> g2_estimate(const CoincidenceHistogram& hist);

struct PulsedG2 {
  double g2_zero;
  double std_error;
  std::uint64_t zero_peak_counts;      // one-sided, delays in [0, period/2)
  std::uint64_t adjacent_peak_counts;  // delays in [period/2, 3 period/2)
};

// Zero-delay peak area over adjacent peak area. The histogram holds positive
// delays only, so the zero-delay peak's one-sided area is doubled to cover
// (-period/2, period/2).
PulsedG2 pulsed_g2_zero(const CoincidenceHistogram& hist, double pulse_period);

struct Brightness {
  double mean_photons_per_pulse;
  double mean_photons_std_error;
  double count_rate_per_s;
  double efficiency;  // photons per excitation pulse, as a fraction
  double efficiency_percent() const { return 100.0 * efficiency; }
};

Brightness brightness_and_efficiency(std::span<const EmissionRecord> records,
                                     std::size_t pulse_count, double pulse_period);

}  // namespace blockade
