#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blockade/config.hpp"
#include "blockade/error.hpp"
#include "blockade/experiments.hpp"
#include "blockade/output.hpp"
#include "blockade/truncation.hpp"

namespace {

enum Exit : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kOracleViolation = 4 };

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::optional<std::size_t> pulses;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "YAML experiment configuration")->required();
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--workers", o.workers, "worker threads (default: $BLOCKADE_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--pulses", o.pulses, "override pulses.pulse_count")->check(CLI::PositiveNumber);
}

blockade::ExperimentConfig load(const Overrides& o) {
  blockade::ExperimentConfig cfg = blockade::load_config(o.config_path);
  if (o.seed) cfg.trajectory.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.out) cfg.output.directory = *o.out;
  if (o.pulses) cfg.pulses.pulse_count = *o.pulses;
  cfg.validate();
  return cfg;
}

void echo(const blockade::ExperimentConfig& cfg) {
  std::cerr << "blockade " << blockade::library_version() << '\n';
  for (const auto& line : cfg.describe()) std::cerr << "  " << line << '\n';
  std::cerr << "  workers=" << cfg.worker_count() << " seed=" << cfg.trajectory.seed
            << " out=" << cfg.output.directory.string() << '\n';
}

void list_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
}

int cmd_g2tau(const Overrides& o) {
  const auto cfg = load(o);
  if (cfg.mode != blockade::Mode::kCw) {
    throw blockade::Error(blockade::ErrorCode::kConfig, "mode: g2tau requires mode: cw");
  }
  echo(cfg);
  const auto result = blockade::run_cw_experiment(cfg);
  list_files(blockade::write_cw_outputs(cfg, result, cfg.output.directory));
  bool agree = true;
  for (const auto& c : result.curves) {
    std::printf("delta=%g  <n>=%.6g  g2(0)=%.6g  max g2=%.6g  peak spacing=%.6g ns",
                c.params.delta, c.mean_photon_number, c.g2_zero, c.max_g2, c.peak_spacing);
    if (c.has_trajectory()) {
      std::printf("  trajectory: %zu bins outside 3 sigma, click rate %.6g +- %.2g",
                  c.bins_outside_3sigma, c.trajectory_click_rate, c.trajectory_click_rate_error);
      agree = agree && c.oracle_agreement();
    }
    std::printf("\n");
  }
  if (!agree) {
    std::cerr << "error: trajectory estimator disagrees with quantum regression\n";
    return kOracleViolation;
  }
  return kOk;
}

int cmd_pulsed(const Overrides& o) {
  const auto cfg = load(o);
  if (cfg.mode != blockade::Mode::kPulsed) {
    throw blockade::Error(blockade::ErrorCode::kConfig, "mode: pulsed requires mode: pulsed");
  }
  echo(cfg);
  const auto r = blockade::run_pulsed_experiment(cfg);
  list_files(blockade::write_pulsed_outputs(cfg, r, cfg.output.directory));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::printf("pulses=%zu clicks=%llu\n", cfg.pulses.pulse_count,
              static_cast<unsigned long long>(r.histogram.total_clicks));
  std::printf("<n> per pulse = %.6g +- %.2g\n", r.brightness.mean_photons_per_pulse,
              r.brightness.mean_photons_std_error);
  std::printf("count rate = %.6g /s  efficiency = %.4g %%\n", r.brightness.count_rate_per_s,
              r.brightness.efficiency_percent());
  if (r.g2) {
    std::printf("g2(0) = %.4g +- %.2g  (zero peak %llu, adjacent peak %llu)\n", r.g2->g2_zero,
                r.g2->std_error, static_cast<unsigned long long>(r.g2->zero_peak_counts),
                static_cast<unsigned long long>(r.g2->adjacent_peak_counts));
  } else {
    std::printf("g2(0) undefined\n");
  }
  std::printf("wall time %.3g s on %zu workers\n", r.wall_seconds, r.workers);
  return kOk;
}

int cmd_sweep(const Overrides& o) {
  const auto cfg = load(o);
  if (!cfg.sweep) throw blockade::Error(blockade::ErrorCode::kConfig, "sweep: missing sweep section");
  echo(cfg);
  const auto r = blockade::run_sweep(cfg);
  list_files(blockade::write_sweep_outputs(cfg, r, cfg.output.directory));
  bool failed = false;
  std::printf("%-12s %-22s %-22s\n", r.parameter.c_str(), "<n>", "g2(0)");
  for (const auto& row : r.rows) {
    if (!row.ok()) {
      std::printf("%-12g failed: %s\n", row.value, row.error.c_str());
      failed = true;
      continue;
    }
    std::printf("%-12g %.5g +- %-10.2g %.4g +- %.2g\n", row.value, row.mean_photons_per_pulse,
                row.mean_photons_error, row.g2_zero, row.g2_zero_error);
  }
  return failed ? kNumericalError : kOk;
}

int cmd_validate(const Overrides& o) {
  const auto cfg = load(o);
  echo(cfg);
  const auto report = blockade::run_validation(cfg);
  for (const auto& c : report.checks) {
    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  }
  if (!report.passed()) {
    std::cerr << "error: oracle suite failed\n";
    return kOracleViolation;
  }
  return kOk;
}

int cmd_scan(const Overrides& o, const std::string& observable, std::vector<std::size_t> dims,
             double tol) {
  const auto cfg = load(o);
  blockade::SystemParams params;
  if (cfg.mode == blockade::Mode::kCw) {
    params = cfg.model.resolve(cfg.cw_detunings().front());
  } else {
    const auto d = cfg.pulsed_drive();
    params = d.base;
    params.drive_E = d.train.amplitude_E0;
    params.parametric_U = cfg.peak_parametric_U();
  }
  const auto scan =
      blockade::truncation_scan(params, blockade::parse_observable(observable), dims, tol);
  std::cout << scan.report();
  if (!scan.converged()) return kNumericalError;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsed single-photon source simulator (unconventional photon blockade)"};
  app.set_version_flag("--version", std::string(blockade::library_version()));
  app.require_subcommand(1);

  Overrides g2o, po, so, vo, to;
  auto* g2 = app.add_subcommand("g2tau", "CW g2(tau) from quantum regression, optionally trajectories");
  add_common(g2, g2o);
  auto* pulsed = app.add_subcommand("pulsed", "pulsed trajectory run with HBT analysis");
  add_common(pulsed, po);
  auto* sweep = app.add_subcommand("sweep", "pulsed parameter sweep");
  add_common(sweep, so);
  auto* validate = app.add_subcommand("validate", "cross-module oracle suite");
  add_common(validate, vo);
  auto* scan = app.add_subcommand("scan-truncation", "Fock truncation convergence scan");
  add_common(scan, to);
  std::string observable = "mean_n";
  std::vector<std::size_t> dims{4, 6, 8, 10, 12};
  double tol = 1e-8;
  scan->add_option("--observable", observable, "mean_n or g2_zero")->capture_default_str();
  scan->add_option("--dims", dims, "increasing truncation dimensions")->capture_default_str();
  scan->add_option("--tol", tol, "convergence tolerance")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*g2) return cmd_g2tau(g2o);
    if (*pulsed) return cmd_pulsed(po);
    if (*sweep) return cmd_sweep(so);
    if (*validate) return cmd_validate(vo);
    if (*scan) return cmd_scan(to, observable, dims, tol);
  } catch (const blockade::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_config_error() ? kConfigError : kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kOk;
}
