#include "blockade/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "blockade/error.hpp"
#include "blockade/records.hpp"

#ifndef BLOCKADE_VERSION
#define BLOCKADE_VERSION "dev"
#endif

namespace blockade {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// JSON has no NaN/inf; map them to null.
json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_header(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << '\n';
}

std::string label_for(double delta) {
  std::string s = num(delta);
  for (char& c : s) {
    if (c == '-') c = 'm';
    if (c == '.') c = 'p';
  }
  return "delta_" + s;
}

fs::path prepare(const ExperimentConfig& config, const fs::path& dir, std::vector<fs::path>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const fs::path resolved = dir / "config.resolved.yaml";
  auto out = open_out(resolved);
  out << "# blockade " << library_version()
      << " resolved configuration; frequencies in rad/ns (1 GHz == 1 rad/ns), times in ns\n";
  out << config.to_yaml();
  files.push_back(resolved);
  return dir;
}

json manifest_base(const ExperimentConfig& config, std::string_view command) {
  json m;
  m["version"] = std::string(library_version());
  m["command"] = std::string(command);
  m["seed"] = config.trajectory.seed;
  m["step_dt_ns"] = config.trajectory.step_dt;
  m["dim"] = config.trajectory.dim;
  m["workers"] = config.worker_count();
  m["config_yaml"] = config.to_yaml();
  m["warnings"] = config.warnings;
  return m;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace

std::string_view library_version() { return BLOCKADE_VERSION; }

std::vector<std::string> provenance_lines(const ExperimentConfig& config, std::string_view command) {
  std::vector<std::string> lines;
  lines.push_back("blockade " + std::string(library_version()) + " " + std::string(command));
  lines.push_back("units: frequencies rad/ns (1 GHz == 1 rad/ns), times ns");
  lines.push_back("config:");
  std::istringstream yaml(config.to_yaml());
  for (std::string line; std::getline(yaml, line);) lines.push_back("  " + line);
  return lines;
}

std::vector<fs::path> write_cw_outputs(const ExperimentConfig& config, const CwResult& result,
                                       const fs::path& dir) {
  std::vector<fs::path> files;
  prepare(config, dir, files);
  const auto header = provenance_lines(config, "g2tau");

  json curves = json::array();
  const fs::path summary_path = dir / "cw_summary.csv";
  auto summary = open_out(summary_path);
  write_header(summary, header);
  summary << "delta,drive_E,parametric_U,theta,mean_n,g2_zero,max_g2,n_maxima,peak_spacing,"
             "expected_period,trajectory_clicks,click_rate,click_rate_error,bins_outside_3sigma,"
             "oracle_agreement\n";

  for (const auto& c : result.curves) {
    const std::string label = label_for(c.params.delta);
    const fs::path g2_path = dir / ("g2tau_" + label + ".csv");
    auto out = open_out(g2_path);
    write_header(out, header);
    out << "tau,g2_regression\n";
    for (const auto& p : c.regression) out << num(p.tau) << ',' << num(p.g2) << '\n';
    files.push_back(g2_path);

    if (c.has_trajectory()) {
      const fs::path traj_path = dir / ("g2traj_" + label + ".csv");
      auto t = open_out(traj_path);
      write_header(t, header);
      t << "tau_lower,tau_upper,counts,g2_trajectory,std_error,g2_regression_bin_average\n";
      for (std::size_t j = 0; j < c.trajectory_bins.size(); ++j) {
        const auto& b = c.trajectory_bins[j];
        t << num(b.tau_lower) << ',' << num(b.tau_upper) << ',' << b.counts << ',' << num(b.g2)
          << ',' << num(b.std_error) << ',' << num(c.regression_bin_average[j]) << '\n';
      }
      files.push_back(traj_path);
    }

    summary << num(c.params.delta) << ',' << num(c.params.drive_E) << ','
            << num(c.params.parametric_U) << ',' << num(c.params.theta) << ','
            << num(c.mean_photon_number) << ',' << num(c.g2_zero) << ',' << num(c.max_g2) << ','
            << c.maxima.size() << ',' << num(c.peak_spacing) << ',' << num(c.expected_period) << ','
            << c.trajectory_clicks << ',' << num(c.trajectory_click_rate) << ','
            << num(c.trajectory_click_rate_error) << ',' << c.bins_outside_3sigma << ','
            << (c.oracle_agreement() ? "true" : "false") << '\n';

    curves.push_back({{"delta", c.params.delta},
                      {"drive_E", c.params.drive_E},
                      {"parametric_U", c.params.parametric_U},
                      {"theta", c.params.theta},
                      {"mean_n", c.mean_photon_number},
                      {"g2_zero", jnum(c.g2_zero)},
                      {"max_g2", c.max_g2},
                      {"peak_spacing", jnum(c.peak_spacing)},
                      {"expected_period", jnum(c.expected_period)},
                      {"trajectory", c.has_trajectory()},
                      {"oracle_agreement", c.oracle_agreement()}});
  }
  files.push_back(summary_path);

  json m = manifest_base(config, "g2tau");
  m["curves"] = curves;
  m["wall_seconds"] = result.wall_seconds;
  write_json(dir / "metrics.json", m);
  files.push_back(dir / "metrics.json");
  return files;
}

std::vector<fs::path> write_pulsed_outputs(const ExperimentConfig& config, const PulsedResult& result,
                                           const fs::path& dir) {
  std::vector<fs::path> files;
  prepare(config, dir, files);
  const auto header = provenance_lines(config, "pulsed");
  const PulseTrain train = config.pulses.train();
  const auto& hist = result.histogram;

  // Normalized to the mean bin count inside the adjacent peak.
  double adjacent_mean = 0.0;
  std::size_t adjacent_bins = 0;
  for (std::size_t j = 0; j < hist.bins(); ++j) {
    const double c = hist.bin_center(j);
    if (c >= 0.5 * train.period && c < 1.5 * train.period) {
      adjacent_mean += static_cast<double>(hist.counts[j]);
      ++adjacent_bins;
    }
  }
  if (adjacent_bins > 0) adjacent_mean /= static_cast<double>(adjacent_bins);

  const fs::path hist_path = dir / "histogram.csv";
  auto out = open_out(hist_path);
  write_header(out, header);
  out << "# total_clicks=" << hist.total_clicks << " duration_ns=" << num(hist.duration)
      << " records=" << hist.record_count << '\n';
  out << "delay_lower,delay_upper,counts,normalized\n";
  for (std::size_t j = 0; j < hist.bins(); ++j) {
    const double norm = adjacent_mean > 0.0 ? static_cast<double>(hist.counts[j]) / adjacent_mean
                                            : std::nan("");
    out << num(hist.bin_lower(j)) << ',' << num(hist.bin_lower(j + 1)) << ',' << hist.counts[j]
        << ',' << num(norm) << '\n';
  }
  files.push_back(hist_path);

  json m = manifest_base(config, "pulsed");
  m["pulse_count"] = train.pulse_count;
  m["pulse_period_ns"] = train.period;
  m["pulse_width_ns"] = train.width_dt;
  m["amplitude_E0"] = train.amplitude_E0;
  m["peak_parametric_U"] = config.peak_parametric_U();
  m["blocks"] = result.blocks;
  m["total_clicks"] = hist.total_clicks;
  m["mean_photons_per_pulse"] = result.brightness.mean_photons_per_pulse;
  m["mean_photons_std_error"] = result.brightness.mean_photons_std_error;
  m["count_rate_per_s"] = result.brightness.count_rate_per_s;
  m["efficiency_percent"] = result.brightness.efficiency_percent();
  if (result.g2) {
    m["g2_zero"] = result.g2->g2_zero;
    m["g2_zero_std_error"] = result.g2->std_error;
    m["zero_peak_counts"] = result.g2->zero_peak_counts;
    m["adjacent_peak_counts"] = result.g2->adjacent_peak_counts;
  } else {
    m["g2_zero"] = nullptr;
  }
  m["run_warnings"] = result.warnings;
  m["wall_seconds"] = result.wall_seconds;
  write_json(dir / "metrics.json", m);
  files.push_back(dir / "metrics.json");

  if (config.output.save_records) {
    const fs::path rec_path = dir / "records.txt";
    save_records(rec_path, result.records, header);
    files.push_back(rec_path);
  }
  return files;
}

std::vector<fs::path> write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result,
                                          const fs::path& dir) {
  std::vector<fs::path> files;
  prepare(config, dir, files);
  const auto header = provenance_lines(config, "sweep");
  const fs::path path = dir / "sweep.csv";
  auto out = open_out(path);
  write_header(out, header);
  out << result.parameter
      << ",mean_n,mean_n_error,g2_zero,g2_zero_error,clicks,zero_peak_counts,adjacent_peak_counts,"
         "error\n";
  json rows = json::array();
  for (const auto& r : result.rows) {
    out << num(r.value) << ',' << num(r.mean_photons_per_pulse) << ',' << num(r.mean_photons_error)
        << ',' << num(r.g2_zero) << ',' << num(r.g2_zero_error) << ',' << r.clicks << ','
        << r.zero_peak_counts << ',' << r.adjacent_peak_counts << ",\"" << r.error << "\"\n";
    rows.push_back({{"value", r.value},
                    {"mean_n", r.mean_photons_per_pulse},
                    {"mean_n_error", r.mean_photons_error},
                    {"g2_zero", r.g2_zero},
                    {"g2_zero_error", r.g2_zero_error},
                    {"clicks", r.clicks},
                    {"error", r.error}});
  }
  files.push_back(path);
  json m = manifest_base(config, "sweep");
  m["parameter"] = result.parameter;
  m["rows"] = rows;
  m["wall_seconds"] = result.wall_seconds;
  write_json(dir / "metrics.json", m);
  files.push_back(dir / "metrics.json");
  return files;
}

}  // namespace blockade
