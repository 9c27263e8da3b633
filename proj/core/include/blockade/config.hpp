#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blockade/mcwf.hpp"
#include "blockade/model.hpp"

// Experiment configuration, read from a YAML file. Frequencies are angular,
// in rad/ns (1 GHz == 1 rad/ns); times are in ns. Unknown keys are errors.

namespace blockade {

enum class Mode { kCw, kPulsed };

std::string_view to_string(Mode mode);

struct ModelConfig {
  double delta = 0.0;
  double kappa = 1.0;
  // nullopt means "optimal": resolved from the optimum-antibunching relations.
  std::optional<double> drive_E = 0.05;
  std::optional<double> parametric_U;
  std::optional<double> theta;
  std::optional<PumpParams> pump;  // derives parametric_U and theta when set

  // Concrete CW parameters at the given detuning.
  SystemParams resolve(double at_delta) const;
};

struct PulsesConfig {
  double amplitude_E0 = 0.05;
  double width_dt = 2.0;
  std::optional<double> period;  // nullopt: period_factor * width_dt
  double period_factor = PulseTrain::kDefaultPeriodFactor;
  std::size_t pulse_count = 1'000'000;
  std::optional<double> center_t0;  // nullopt: half a period
  std::size_t pulses_per_block = 1000;

  PulseTrain train() const;
};

struct CwConfig {
  std::vector<double> detunings;  // empty: {model.delta}
  std::optional<double> tau_max;  // default 20 / kappa
  std::optional<double> tau_step;  // default 0.02 / kappa
  std::size_t trajectories = 0;   // 0 disables the trajectory estimator
};

struct AnalysisConfig {
  std::optional<double> bin_width;  // default 0.5 ns pulsed, 0.2 / kappa CW
  std::optional<double> max_delay;  // default 2 periods pulsed, 10 / kappa CW
};

struct SweepConfig {
  std::string parameter;
  std::vector<double> values;
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  std::string format = "csv";
  bool save_records = false;
};

struct ExperimentConfig {
  Mode mode = Mode::kCw;
  ModelConfig model;
  PulsesConfig pulses;
  CwConfig cw;
  TrajectoryConfig trajectory;
  bool step_dt_explicit = false;
  AnalysisConfig analysis;
  std::optional<SweepConfig> sweep;
  OutputConfig output;
  std::size_t workers = 0;  // 0: default_worker_count()

  // Non-fatal notices gathered during validation (weak-drive regime etc.).
  std::vector<std::string> warnings;

  // Checks every module invariant; throws Error(kConfig) naming the key.
  void validate();

  std::size_t worker_count() const;
  double bin_width() const;
  double max_delay() const;
  std::vector<double> cw_detunings() const;
  double tau_max() const;
  double tau_step() const;

  // Pulsed-mode drive (U(t) from the optimum law, theta from the model).
  PulsedDrive pulsed_drive() const;
  // Peak of U(t) over the pulse train.
  double peak_parametric_U() const;

  // Copy with one sweepable parameter replaced.
  ExperimentConfig with_parameter(std::string_view name, double value) const;

  // Resolved configuration as YAML; loading it back reproduces this config.
  std::string to_yaml() const;
  std::vector<std::string> describe() const;
};

// Names accepted by sweep.parameter.
const std::vector<std::string>& sweepable_parameters();

ExperimentConfig parse_config(std::string_view yaml_text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace blockade
