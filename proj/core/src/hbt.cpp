#include "blockade/hbt.hpp"

#include <cmath>
#include <sstream>

#include "blockade/error.hpp"

namespace blockade {

void CoincidenceHistogram::merge(const CoincidenceHistogram& other) {
  if (other.counts.size() != counts.size() || other.bin_width != bin_width) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot merge histograms with different binning");
  }
  for (std::size_t j = 0; j < counts.size(); ++j) counts[j] += other.counts[j];
  total_clicks += other.total_clicks;
  duration += other.duration;
  record_count += other.record_count;
  empty_input = empty_input && other.empty_input;
}

CoincidenceHistogram build_histogram(std::span<const EmissionRecord> records, double bin_width,
                                     double max_delay) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bin_width must be positive");
  if (!(max_delay >= bin_width)) {
    throw Error(ErrorCode::kInvalidArgument, "max_delay must be at least one bin");
  }
  // Whole bins only; max_delay is rounded up to a bin boundary.
  const auto bins = static_cast<std::size_t>(std::ceil(max_delay / bin_width - 1e-9));

  CoincidenceHistogram hist;
  hist.bin_width = bin_width;
  hist.max_delay = static_cast<double>(bins) * bin_width;
  hist.counts.assign(bins, 0);
  hist.empty_input = records.empty();
  hist.record_count = records.size();

  const double limit = hist.max_delay;
  for (const auto& rec : records) {
    const auto& t = rec.click_times;
    hist.total_clicks += t.size();
    hist.duration += rec.duration;
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t k = i + 1; k < t.size(); ++k) {
        const double delay = t[k] - t[i];
        if (delay >= limit) break;
        if (!(delay > 0.0)) continue;
        const auto j = static_cast<std::size_t>(delay / bin_width);
        if (j < bins) ++hist.counts[j];
      }
    }
  }
  return hist;
}

std::vector<G2Bin> g2_estimate(const CoincidenceHistogram& hist) {
  if (hist.total_clicks < 2) {
    throw Error(ErrorCode::kUndefinedEstimator,
                "g2 estimator needs at least two clicks, got " + std::to_string(hist.total_clicks));
  }
  if (!(hist.duration > 0.0)) throw Error(ErrorCode::kUndefinedEstimator, "zero counting time");

  const auto n_total = static_cast<double>(hist.total_clicks);
  const double mean_per_bin = n_total * hist.bin_width / hist.duration;
  std::vector<G2Bin> out;
  out.reserve(hist.bins());
  for (std::size_t j = 0; j < hist.bins(); ++j) {
    const auto c = hist.counts[j];
    const double g2 = (static_cast<double>(c) / n_total) / mean_per_bin;
    // An empty bin gets the one-count value as its error bar.
    const double err = c > 0 ? g2 / std::sqrt(static_cast<double>(c)) : (1.0 / n_total) / mean_per_bin;
    out.push_back({hist.bin_lower(j), hist.bin_lower(j + 1), g2, err, c});
  }
  return out;
}

PulsedG2 pulsed_g2_zero(const CoincidenceHistogram& hist, double pulse_period) {
  if (!(pulse_period > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pulse period must be positive");
  if (hist.max_delay + 1e-9 < 1.5 * pulse_period) {
    std::ostringstream os;
    os << "histogram max_delay " << hist.max_delay << " must cover 1.5 periods ("
       << 1.5 * pulse_period << ")";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  std::uint64_t zero = 0;
  std::uint64_t adjacent = 0;
  for (std::size_t j = 0; j < hist.bins(); ++j) {
    const double c = hist.bin_center(j);
    if (c < 0.5 * pulse_period) {
      zero += hist.counts[j];
    } else if (c < 1.5 * pulse_period) {
      adjacent += hist.counts[j];
    }
  }
  if (adjacent == 0) {
    throw Error(ErrorCode::kUndefinedEstimator, "adjacent peak is empty; g2(0) ratio undefined");
  }
  const auto a = static_cast<double>(adjacent);
  const auto z = static_cast<double>(zero);
  const double ratio = 2.0 * z / a;
  const double err = zero > 0 ? ratio * std::sqrt(1.0 / z + 1.0 / a) : 2.0 / a;
  return {ratio, err, zero, adjacent};
}

Brightness brightness_and_efficiency(std::span<const EmissionRecord> records,
                                     std::size_t pulse_count, double pulse_period) {
  if (pulse_count < 1) throw Error(ErrorCode::kInvalidArgument, "pulse_count must be >= 1");
  if (!(pulse_period > 0.0)) throw Error(ErrorCode::kInvalidArgument, "pulse period must be positive");
  std::uint64_t clicks = 0;
  for (const auto& rec : records) clicks += rec.click_times.size();
  const auto pulses = static_cast<double>(pulse_count);
  const double mean = static_cast<double>(clicks) / pulses;
  constexpr double kNsPerSecond = 1e9;
  return {mean, std::sqrt(static_cast<double>(clicks)) / pulses, mean / pulse_period * kNsPerSecond,
          mean};
}

}  // namespace blockade
