#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "blockade/config.hpp"
#include "blockade/hbt.hpp"
#include "blockade/lindblad.hpp"
#include "blockade/truncation.hpp"

namespace blockade {

struct CwCurve {
  SystemParams params;
  double mean_photon_number;
  double g2_zero;
  std::vector<G2Point> regression;  // quantum-regression g2(tau)
  std::vector<double> maxima;
  double peak_spacing;  // NaN with fewer than two maxima
  double expected_period;  // 2 pi / |delta|, inf at zero detuning
  double max_g2;

  // Trajectory estimator, present when cw.trajectories > 0.
  std::vector<G2Bin> trajectory_bins;
  std::vector<double> regression_bin_average;  // regression g2 averaged per bin
  std::size_t bins_outside_3sigma = 0;
  double trajectory_click_rate = 0.0;
  double trajectory_click_rate_error = 0.0;
  std::uint64_t trajectory_clicks = 0;

  bool has_trajectory() const { return !trajectory_bins.empty(); }
  // Trajectory and regression curves agree within 3 sigma in every bin, and
  // the click rate matches kappa <n> within 3 sigma.
  bool oracle_agreement() const;
};

struct CwResult {
  std::vector<CwCurve> curves;
  double wall_seconds = 0.0;

  bool all_agree() const;
};

CwResult run_cw_experiment(const ExperimentConfig& config);

struct PulsedResult {
  std::vector<EmissionRecord> records;
  CoincidenceHistogram histogram;
  std::optional<PulsedG2> g2;  // empty when the adjacent peak has no counts
  Brightness brightness{};
  std::size_t blocks = 0;
  std::size_t workers = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

// Shards the pulse train into fixed blocks of pulses_per_block pulses. Block b
// starts from vacuum and draws from random stream b, so the merged result is
// identical for any worker count.
PulsedResult run_pulsed_experiment(const ExperimentConfig& config);

struct SweepRow {
  double value;
  double mean_photons_per_pulse = 0.0;
  double mean_photons_error = 0.0;
  double g2_zero = 0.0;
  double g2_zero_error = 0.0;
  std::uint64_t clicks = 0;
  std::uint64_t zero_peak_counts = 0;
  std::uint64_t adjacent_peak_counts = 0;
  std::string error;  // non-empty when the point failed

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  std::string parameter;
  std::vector<SweepRow> rows;
  double wall_seconds = 0.0;
};

// One full pulsed experiment per sweep value, emitted in axis order. A failing
// point is recorded in its row and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& config);

struct ValidationCheck {
  std::string name;
  bool passed;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

// Cross-module oracle suite at the configuration's CW parameters: truncation
// scan, MCWF ensemble versus master equation, trajectory click rate versus
// kappa <n>, and Poisson flatness of the HBT estimator.
ValidationReport run_validation(const ExperimentConfig& config);

}  // namespace blockade
