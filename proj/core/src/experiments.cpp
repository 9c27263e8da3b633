#include "blockade/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "blockade/analysis.hpp"
#include "blockade/error.hpp"
#include "blockade/parallel.hpp"
#include "blockade/rng.hpp"

namespace blockade {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Regression g2 averaged over each histogram bin (trapezoid rule on a fine
// sub-grid), so it compares like-for-like with binned trajectory counts.
std::vector<double> bin_averaged_regression(const SystemParams& params, std::size_t dim,
                                            double bin_width, std::size_t bins) {
  constexpr std::size_t kSub = 16;
  const double h = bin_width / static_cast<double>(kSub);
  const auto grid = uniform_grid(static_cast<double>(bins * kSub) * h, h);
  const auto curve = g2_delay(params, grid, dim);
  std::vector<double> out(bins, 0.0);
  for (std::size_t j = 0; j < bins; ++j) {
    double acc = 0.0;
    for (std::size_t s = 0; s < kSub; ++s) {
      const std::size_t i = j * kSub + s;
      acc += 0.5 * (curve[i].g2 + curve[i + 1].g2);
    }
    out[j] = acc / static_cast<double>(kSub);
  }
  return out;
}

// Homogeneous Poisson click stream, used as the coherent-light reference.
EmissionRecord poisson_record(double rate, double duration, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::exponential_distribution<double> gap(rate);
  EmissionRecord rec;
  rec.seed = seed;
  rec.duration = duration;
  for (double t = gap(rng.engine()); t < duration; t += gap(rng.engine())) {
    rec.click_times.push_back(t);
  }
  return rec;
}

}  // namespace

bool CwCurve::oracle_agreement() const {
  if (!has_trajectory()) return true;
  const double expected = params.kappa * mean_photon_number;
  const bool rate_ok = std::abs(trajectory_click_rate - expected) <= 3.0 * trajectory_click_rate_error;
  return bins_outside_3sigma == 0 && rate_ok;
}

bool CwResult::all_agree() const {
  return std::all_of(curves.begin(), curves.end(), [](const CwCurve& c) { return c.oracle_agreement(); });
}

CwResult run_cw_experiment(const ExperimentConfig& config) {
  const auto start = Clock::now();
  const std::size_t dim = config.trajectory.dim;
  CwResult result;
  for (double delta : config.cw_detunings()) {
    CwCurve curve;
    curve.params = config.model.resolve(delta);
    const CwSteadyState ss = cw_steady_state(curve.params, dim);
    if (!(ss.mean_photon_number > kTolerances.min_mean_photon_number)) {
      std::ostringstream os;
      os << "mean photon number vanishes at delta=" << delta << " (E=" << curve.params.drive_E
         << ", U=" << curve.params.parametric_U << "); g2 is undefined";
      throw Error(ErrorCode::kUndefinedCorrelation, os.str());
    }
    curve.mean_photon_number = ss.mean_photon_number;
    curve.g2_zero = ss.g2_zero;

    const auto grid = uniform_grid(config.tau_max(), config.tau_step());
    curve.regression = g2_delay(curve.params, grid, dim);
    curve.maxima = local_maxima(curve.regression);
    curve.peak_spacing = mean_peak_spacing(curve.maxima);
    curve.expected_period = delta != 0.0 ? 2.0 * units::kPi / std::abs(delta)
                                         : std::numeric_limits<double>::infinity();
    curve.max_g2 = 0.0;
    for (const auto& p : curve.regression) curve.max_g2 = std::max(curve.max_g2, p.g2);

    if (config.cw.trajectories > 0) {
      const Drive drive = ContinuousDrive{curve.params};
      std::vector<EmissionRecord> records(config.cw.trajectories);
      const std::size_t groups = (records.size() + kBatchLanes - 1) / kBatchLanes;
      parallel_for(groups, config.worker_count(), [&](std::size_t g) {
        std::vector<std::uint64_t> streams;
        for (std::size_t k = g * kBatchLanes; k < std::min(records.size(), (g + 1) * kBatchLanes); ++k) {
          streams.push_back(k);
        }
        auto recs = run_trajectory_batch(drive, config.trajectory, streams);
        for (std::size_t i = 0; i < recs.size(); ++i) records[g * kBatchLanes + i] = std::move(recs[i]);
      });
      const auto hist = build_histogram(records, config.bin_width(), config.max_delay());
      curve.trajectory_clicks = hist.total_clicks;
      curve.trajectory_click_rate = static_cast<double>(hist.total_clicks) / hist.duration;
      curve.trajectory_click_rate_error =
          std::sqrt(static_cast<double>(std::max<std::uint64_t>(hist.total_clicks, 1))) / hist.duration;
      curve.trajectory_bins = g2_estimate(hist);
      curve.regression_bin_average =
          bin_averaged_regression(curve.params, dim, hist.bin_width, hist.bins());
      for (std::size_t j = 0; j < hist.bins(); ++j) {
        const auto& b = curve.trajectory_bins[j];
        if (std::abs(b.g2 - curve.regression_bin_average[j]) > 3.0 * b.std_error) {
          ++curve.bins_outside_3sigma;
        }
      }
    }
    result.curves.push_back(std::move(curve));
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

PulsedResult run_pulsed_experiment(const ExperimentConfig& config) {
  if (config.mode != Mode::kPulsed) {
    throw Error(ErrorCode::kConfig, "mode: pulsed experiment needs mode: pulsed");
  }
  const auto start = Clock::now();
  const PulsedDrive base = config.pulsed_drive();
  const PulseTrain train = base.train;
  const std::size_t per_block = config.pulses.pulses_per_block;
  const std::size_t blocks = (train.pulse_count + per_block - 1) / per_block;

  PulsedResult result;
  result.blocks = blocks;
  result.workers = config.worker_count();
  result.records.resize(blocks);

  // Full blocks run kBatchLanes at a time; a trailing partial block runs alone.
  // Batched and single runs give identical records, so grouping is immaterial.
  const std::size_t full = train.pulse_count / per_block;
  const std::size_t groups = (full + kBatchLanes - 1) / kBatchLanes;
  const std::size_t tasks = groups + (blocks > full ? 1 : 0);
  parallel_for(tasks, result.workers, [&](std::size_t task) {
    PulsedDrive drive = base;
    TrajectoryConfig tc = config.trajectory;
    const std::size_t first = task * kBatchLanes;
    try {
      if (task < groups) {
        drive.train.pulse_count = per_block;
        tc.duration = drive.train.end_time();
        std::vector<std::uint64_t> streams;
        for (std::size_t b = first; b < std::min(full, first + kBatchLanes); ++b) streams.push_back(b);
        auto recs = run_trajectory_batch(drive, tc, streams);
        for (std::size_t i = 0; i < recs.size(); ++i) result.records[first + i] = std::move(recs[i]);
      } else {
        drive.train.pulse_count = train.pulse_count - full * per_block;
        tc.duration = drive.train.end_time();
        result.records[full] = run_trajectory(drive, tc, full);
      }
    } catch (const Error& e) {
      std::ostringstream os;
      os << "blocks of " << per_block << " pulses: " << e.what();
      throw Error(e.code(), os.str());
    }
  });

  result.histogram = build_histogram(result.records, config.bin_width(), config.max_delay());
  result.brightness = brightness_and_efficiency(result.records, train.pulse_count, train.period);
  if (result.histogram.total_clicks == 0) {
    result.warnings.push_back("no photons were emitted; g2(0) is undefined");
  }
  try {
    result.g2 = pulsed_g2_zero(result.histogram, train.period);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUndefinedEstimator) throw;
    result.warnings.push_back(e.what());
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw Error(ErrorCode::kConfig, "sweep: no sweep axis configured");
  const auto start = Clock::now();
  SweepResult result;
  result.parameter = config.sweep->parameter;
  for (double value : config.sweep->values) {
    SweepRow row;
    row.value = value;
    try {
      const ExperimentConfig point = config.with_parameter(config.sweep->parameter, value);
      const PulsedResult r = run_pulsed_experiment(point);
      row.mean_photons_per_pulse = r.brightness.mean_photons_per_pulse;
      row.mean_photons_error = r.brightness.mean_photons_std_error;
      row.clicks = r.histogram.total_clicks;
      if (r.g2) {
        row.g2_zero = r.g2->g2_zero;
        row.g2_zero_error = r.g2->std_error;
        row.zero_peak_counts = r.g2->zero_peak_counts;
        row.adjacent_peak_counts = r.g2->adjacent_peak_counts;
      } else {
        row.error = r.warnings.empty() ? "g2(0) undefined" : r.warnings.back();
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
    result.rows.push_back(std::move(row));
  }
  result.wall_seconds = seconds_since(start);
  return result;
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

ValidationReport run_validation(const ExperimentConfig& config) {
  ValidationReport report;
  SystemParams params;
  if (config.mode == Mode::kCw) {
    params = config.model.resolve(config.cw_detunings().front());
  } else {
    const PulsedDrive d = config.pulsed_drive();
    params = d.base;
    params.drive_E = d.train.amplitude_E0;
    params.parametric_U = config.peak_parametric_U();
  }
  const std::size_t dim = config.trajectory.dim;
  const double kappa = params.kappa;

  {
    const std::vector<std::size_t> dims{4, 6, 8, 10, 12};
    const auto scan = truncation_scan(params, Observable::kMeanPhotonNumber, dims, 1e-8);
    std::ostringstream os;
    os << "mean_n converged at dim="
       << (scan.converged() ? std::to_string(*scan.converged_dim) : std::string("none"));
    const bool ok = scan.converged() && *scan.converged_dim <= dim;
    if (scan.converged() && !ok) os << " (above configured dim " << dim << ")";
    report.checks.push_back({"truncation_scan", ok, os.str()});
  }

  const CwSteadyState ss = cw_steady_state(params, dim);
  const Drive drive = ContinuousDrive{params};

  {
    TrajectoryConfig tc = config.trajectory;
    const double t_sample = 20.0 / kappa;
    tc.duration = t_sample;
    const std::vector<double> times{t_sample};
    const auto est = ensemble_expectation(drive, tc, 400, times, number_operator(dim),
                                          config.worker_count());
    const double diff = std::abs(est[0].mean - ss.mean_photon_number);
    std::ostringstream os;
    os << "ensemble <n>=" << est[0].mean << " +- " << est[0].std_error
       << ", master equation <n>=" << ss.mean_photon_number;
    report.checks.push_back({"mcwf_vs_master_equation", diff <= 3.0 * est[0].std_error, os.str()});
  }

  {
    TrajectoryConfig tc = config.trajectory;
    tc.duration = 2e5 / kappa;
    const EmissionRecord rec = run_trajectory(drive, tc, 0);
    const auto clicks = static_cast<double>(rec.click_times.size());
    const double rate = clicks / tc.duration;
    const double err = std::sqrt(std::max(clicks, 1.0)) / tc.duration;
    const double expected = kappa * ss.mean_photon_number;
    std::ostringstream os;
    os << "click rate " << rate << " +- " << err << " /ns, kappa <n> = " << expected;
    report.checks.push_back({"click_rate", std::abs(rate - expected) <= 3.0 * err, os.str()});
  }

  {
    const double rate = 0.05 * kappa;
    const EmissionRecord rec = poisson_record(rate, 4e5 / kappa, config.trajectory.seed);
    const std::vector<EmissionRecord> recs{rec};
    const auto bins = g2_estimate(build_histogram(recs, 0.5 / kappa, 10.0 / kappa));
    std::size_t outside = 0;
    double sum = 0.0;
    double var = 0.0;
    for (const auto& b : bins) {
      if (std::abs(b.g2 - 1.0) > 3.0 * b.std_error) ++outside;
      sum += b.g2;
      var += b.std_error * b.std_error;
    }
    const double mean = sum / static_cast<double>(bins.size());
    const double mean_err = std::sqrt(var) / static_cast<double>(bins.size());
    std::ostringstream os;
    os << bins.size() << " bins, " << outside << " outside 3 sigma, mean g2 " << mean << " +- "
       << mean_err;
    report.checks.push_back(
        {"poisson_flatness", outside == 0 && std::abs(mean - 1.0) <= 3.0 * mean_err, os.str()});
  }
  return report;
}

}  // namespace blockade
