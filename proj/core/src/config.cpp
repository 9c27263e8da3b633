#include "blockade/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "blockade/error.hpp"
#include "blockade/parallel.hpp"

namespace blockade {

namespace {

constexpr std::string_view kOptimal = "optimal";

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
  throw Error(ErrorCode::kConfig, key + ": " + what);
}

void reject_unknown(const YAML::Node& node, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) config_error(path, "expected a mapping");
  for (auto it = node.begin(); it != node.end(); ++it) {
    const auto key = it->first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

double as_double(const YAML::Node& node, const std::string& key) {
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) config_error(key, "must be finite");
    return v;
  } catch (const YAML::Exception&) {
    config_error(key, "expected a number");
  }
}

template <typename T>
T as_integer(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    config_error(key, "expected a non-negative integer");
  }
}

// A number, or the keyword "optimal" (returned as nullopt).
std::optional<double> as_rule(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar() && node.Scalar() == kOptimal) return std::nullopt;
  return as_double(node, key);
}

void read_double(const YAML::Node& map, const std::string& path, std::string_view key, double& out) {
  if (const auto n = map[std::string(key)]) out = as_double(n, join(path, key));
}

void read_optional(const YAML::Node& map, const std::string& path, std::string_view key,
                   std::optional<double>& out) {
  if (const auto n = map[std::string(key)]) out = as_double(n, join(path, key));
}

std::vector<double> as_list(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) config_error(key, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    out.push_back(as_double(node[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Runs a module validator and rethrows its message under a config key.
template <typename F>
void check(const std::string& key, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    config_error(key, e.what());
  }
}

void emit_rule(YAML::Emitter& out, std::string_view key, const std::optional<double>& v) {
  out << YAML::Key << std::string(key) << YAML::Value;
  if (v) {
    out << *v;
  } else {
    out << std::string(kOptimal);
  }
}

}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::kCw ? "cw" : "pulsed"; }

SystemParams ModelConfig::resolve(double at_delta) const {
  SystemParams p;
  p.delta = at_delta;
  p.kappa = kappa;
  if (pump) {
    const EffectiveGain gain = effective_pump_params(*pump, at_delta);
    p.parametric_U = gain.parametric_U;
    p.theta = gain.theta;
    p.drive_E = drive_E ? *drive_E : optimal_drive_conditions(p.parametric_U, at_delta, kappa).drive_E;
    return p;
  }
  const double half_width = std::sqrt(at_delta * at_delta + 0.25 * kappa * kappa);
  if (drive_E && parametric_U) {
    p.drive_E = *drive_E;
    p.parametric_U = *parametric_U;
  } else if (drive_E) {
    p.drive_E = *drive_E;
    p.parametric_U = *drive_E * *drive_E / half_width;
  } else if (parametric_U) {
    p.parametric_U = *parametric_U;
    p.drive_E = optimal_drive_conditions(*parametric_U, at_delta, kappa).drive_E;
  } else {
    throw Error(ErrorCode::kConfig, "model: drive_E and parametric_U cannot both be 'optimal'");
  }
  p.theta = theta ? *theta : std::atan2(kappa, 2.0 * at_delta);
  return p;
}

PulseTrain PulsesConfig::train() const {
  PulseTrain t;
  t.amplitude_E0 = amplitude_E0;
  t.width_dt = width_dt;
  t.period = period ? *period : period_factor * width_dt;
  t.pulse_count = pulse_count;
  t.center_t0 = center_t0 ? *center_t0 : 0.5 * t.period;
  return t;
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names{"width_dt", "amplitude_E0", "delta", "kappa",
                                              "period"};
  return names;
}

std::size_t ExperimentConfig::worker_count() const {
  return workers > 0 ? workers : default_worker_count();
}

double ExperimentConfig::bin_width() const {
  if (analysis.bin_width) return *analysis.bin_width;
  return mode == Mode::kPulsed ? 0.5 : 0.2 / model.kappa;
}

double ExperimentConfig::max_delay() const {
  if (analysis.max_delay) return *analysis.max_delay;
  return mode == Mode::kPulsed ? 2.0 * pulses.train().period : 10.0 / model.kappa;
}

std::vector<double> ExperimentConfig::cw_detunings() const {
  return cw.detunings.empty() ? std::vector<double>{model.delta} : cw.detunings;
}

double ExperimentConfig::tau_max() const { return cw.tau_max ? *cw.tau_max : 20.0 / model.kappa; }
double ExperimentConfig::tau_step() const { return cw.tau_step ? *cw.tau_step : 0.02 / model.kappa; }

PulsedDrive ExperimentConfig::pulsed_drive() const {
  PulsedDrive drive;
  drive.base.delta = model.delta;
  drive.base.kappa = model.kappa;
  drive.base.theta = model.theta ? *model.theta : std::atan2(model.kappa, 2.0 * model.delta);
  drive.train = pulses.train();
  return drive;
}

double ExperimentConfig::peak_parametric_U() const {
  const double e0 = pulses.amplitude_E0;
  return e0 * e0 / std::sqrt(model.delta * model.delta + 0.25 * model.kappa * model.kappa);
}

ExperimentConfig ExperimentConfig::with_parameter(std::string_view name, double value) const {
  ExperimentConfig copy = *this;
  copy.sweep.reset();
  copy.warnings.clear();
  if (name == "width_dt") copy.pulses.width_dt = value;
  else if (name == "amplitude_E0") copy.pulses.amplitude_E0 = value;
  else if (name == "delta") copy.model.delta = value;
  else if (name == "kappa") copy.model.kappa = value;
  else if (name == "period") copy.pulses.period = value;
  else config_error("sweep.parameter", "'" + std::string(name) + "' is not sweepable");
  copy.validate();
  return copy;
}

void ExperimentConfig::validate() {
  warnings.clear();
  check("model.kappa", [&] {
    if (!(model.kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "must be positive");
  });
  if (model.pump) {
    check("model.pump", [&] { model.pump->validate(); });
    if (model.parametric_U) config_error("model.parametric_U", "cannot be combined with model.pump");
    if (model.theta) config_error("model.theta", "cannot be combined with model.pump");
  }

  if (!step_dt_explicit) {
    trajectory.step_dt = TrajectoryConfig::kDefaultKappaStep / model.kappa;
  }

  if (mode == Mode::kCw) {
    if (!model.drive_E && !model.parametric_U && !model.pump) {
      config_error("model", "drive_E and parametric_U cannot both be 'optimal'");
    }
    for (double d : cw_detunings()) {
      SystemParams p;
      check("model", [&] { p = model.resolve(d); p.validate(); });
      for (auto& w : p.weak_drive_warnings()) warnings.push_back("delta=" + std::to_string(d) + ": " + w);
    }
    if (!(tau_max() > 0.0)) config_error("cw.tau_max", "must be positive");
    if (!(tau_step() > 0.0) || tau_step() > tau_max()) {
      config_error("cw.tau_step", "must be positive and below tau_max");
    }
    if (cw.trajectories == 1) config_error("cw.trajectories", "use 0 (off) or at least 2");
    if (sweep) config_error("sweep", "sweeps run pulsed experiments; set mode: pulsed");
  } else {
    if (model.pump) config_error("model.pump", "pulsed mode derives U(t) from the drive envelope");
    if (model.parametric_U) {
      config_error("model.parametric_U", "pulsed mode derives U(t) from the drive envelope");
    }
    check("pulses", [&] { pulses.train().validate(); });
    if (pulses.pulses_per_block < 1) config_error("pulses.pulses_per_block", "must be >= 1");
    if (max_delay() + 1e-9 < 1.5 * pulses.train().period) {
      config_error("analysis.max_delay", "must cover 1.5 pulse periods");
    }
    SystemParams peak{model.delta, model.kappa, pulses.amplitude_E0, peak_parametric_U(), 0.0};
    for (auto& w : peak.weak_drive_warnings()) warnings.push_back("pulse peak: " + w);
  }

  if (!(bin_width() > 0.0)) config_error("analysis.bin_width", "must be positive");
  if (max_delay() < bin_width()) config_error("analysis.max_delay", "must be at least one bin");

  check("trajectory", [&] {
    TrajectoryConfig probe = trajectory;
    if (mode == Mode::kPulsed) probe.duration = std::max(probe.duration, 1.0);
    probe.validate(model.kappa);
  });

  if (sweep) {
    const auto& names = sweepable_parameters();
    if (std::find(names.begin(), names.end(), sweep->parameter) == names.end()) {
      config_error("sweep.parameter", "'" + sweep->parameter + "' is not a sweepable parameter");
    }
    if (sweep->values.empty()) config_error("sweep.values", "must not be empty");
    for (double v : sweep->values) {
      try {
        (void)with_parameter(sweep->parameter, v);
      } catch (const Error& e) {
        config_error("sweep.values", "value " + std::to_string(v) + " invalid: " + e.what());
      }
    }
  }
  if (output.format != "csv") config_error("output.format", "only 'csv' is supported");
}

std::string ExperimentConfig::to_yaml() const {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << std::string(to_string(mode));

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "delta" << YAML::Value << model.delta;
  out << YAML::Key << "kappa" << YAML::Value << model.kappa;
  if (mode == Mode::kCw) {
    emit_rule(out, "drive_E", model.drive_E);
    if (!model.pump) emit_rule(out, "parametric_U", model.parametric_U);
  }
  if (!model.pump) emit_rule(out, "theta", model.theta);
  if (model.pump) {
    out << YAML::Key << "pump" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "pump_F" << YAML::Value << model.pump->pump_F;
    out << YAML::Key << "chi" << YAML::Value << model.pump->chi;
    out << YAML::Key << "gamma" << YAML::Value << model.pump->gamma;
    out << YAML::Key << "theta0" << YAML::Value << model.pump->theta0;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;

  if (mode == Mode::kPulsed) {
    out << YAML::Key << "pulses" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "amplitude_E0" << YAML::Value << pulses.amplitude_E0;
    out << YAML::Key << "width_dt" << YAML::Value << pulses.width_dt;
    if (pulses.period) out << YAML::Key << "period" << YAML::Value << *pulses.period;
    out << YAML::Key << "period_factor" << YAML::Value << pulses.period_factor;
    out << YAML::Key << "pulse_count" << YAML::Value << pulses.pulse_count;
    if (pulses.center_t0) out << YAML::Key << "center_t0" << YAML::Value << *pulses.center_t0;
    out << YAML::Key << "pulses_per_block" << YAML::Value << pulses.pulses_per_block;
    out << YAML::EndMap;
  } else {
    out << YAML::Key << "cw" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "detunings" << YAML::Value << YAML::Flow << cw_detunings();
    out << YAML::Key << "tau_max" << YAML::Value << tau_max();
    out << YAML::Key << "tau_step" << YAML::Value << tau_step();
    out << YAML::Key << "trajectories" << YAML::Value << cw.trajectories;
    out << YAML::EndMap;
  }

  out << YAML::Key << "trajectory" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "step_dt" << YAML::Value << trajectory.step_dt;
  out << YAML::Key << "duration" << YAML::Value << trajectory.duration;
  out << YAML::Key << "seed" << YAML::Value << trajectory.seed;
  out << YAML::Key << "dim" << YAML::Value << trajectory.dim;
  out << YAML::Key << "max_jump_prob" << YAML::Value << trajectory.max_jump_prob;
  out << YAML::EndMap;

  out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "bin_width" << YAML::Value << bin_width();
  if (analysis.max_delay || mode == Mode::kCw) {
    out << YAML::Key << "max_delay" << YAML::Value << max_delay();
  }
  out << YAML::EndMap;

  if (sweep) {
    out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "parameter" << YAML::Value << sweep->parameter;
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << sweep->values;
    out << YAML::EndMap;
  }

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << output.directory.string();
  out << YAML::Key << "format" << YAML::Value << output.format;
  out << YAML::Key << "save_records" << YAML::Value << output.save_records;
  out << YAML::EndMap;

  out << YAML::Key << "workers" << YAML::Value << workers;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<std::string> ExperimentConfig::describe() const {
  std::vector<std::string> lines;
  std::ostringstream os;
  os.precision(10);
  os << "mode=" << to_string(mode) << " kappa=" << model.kappa << " rad/ns delta=" << model.delta
     << " rad/ns dim=" << trajectory.dim << " step_dt=" << trajectory.step_dt << " ns";
  lines.push_back(os.str());
  if (mode == Mode::kPulsed) {
    const PulseTrain t = pulses.train();
    std::ostringstream p;
    p.precision(10);
    p << "pulses: E0=" << t.amplitude_E0 << " rad/ns (" << units::to_mhz(t.amplitude_E0)
      << " MHz) width=" << t.width_dt << " ns period=" << t.period << " ns count=" << t.pulse_count;
    lines.push_back(p.str());
    std::ostringstream u;
    u.precision(10);
    u << "derived peak U(t)=" << peak_parametric_U() << " rad/ns ("
      << units::to_mhz(peak_parametric_U()) << " MHz), theta=" << pulsed_drive().base.theta;
    lines.push_back(u.str());
  } else {
    for (double d : cw_detunings()) {
      const SystemParams p = model.resolve(d);
      std::ostringstream c;
      c.precision(10);
      c << "cw delta=" << d << ": E=" << p.drive_E << " U=" << p.parametric_U
        << " theta=" << p.theta;
      lines.push_back(c.str());
    }
  }
  for (const auto& w : warnings) lines.push_back("warning: " + w);
  return lines;
}

ExperimentConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::kConfig, std::string("parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  if (!root || root.IsNull()) {
    cfg.validate();
    return cfg;
  }
  reject_unknown(root, "",
                 {"mode", "model", "pulses", "cw", "trajectory", "analysis", "sweep", "output",
                  "workers"});

  if (const auto m = root["mode"]) {
    const auto mode = m.as<std::string>();
    if (mode == "cw") cfg.mode = Mode::kCw;
    else if (mode == "pulsed") cfg.mode = Mode::kPulsed;
    else config_error("mode", "expected 'cw' or 'pulsed', got '" + mode + "'");
  }

  if (const auto m = root["model"]) {
    reject_unknown(m, "model", {"delta", "kappa", "drive_E", "parametric_U", "theta", "pump"});
    read_double(m, "model", "delta", cfg.model.delta);
    read_double(m, "model", "kappa", cfg.model.kappa);
    if (const auto n = m["drive_E"]) {
      if (cfg.mode == Mode::kPulsed) {
        config_error("model.drive_E", "pulsed mode takes its drive from pulses.amplitude_E0");
      }
      cfg.model.drive_E = as_rule(n, "model.drive_E");
    }
    if (const auto n = m["parametric_U"]) cfg.model.parametric_U = as_rule(n, "model.parametric_U");
    if (const auto n = m["theta"]) cfg.model.theta = as_rule(n, "model.theta");
    if (const auto p = m["pump"]) {
      reject_unknown(p, "model.pump", {"pump_F", "chi", "gamma", "theta0"});
      PumpParams pump;
      read_double(p, "model.pump", "pump_F", pump.pump_F);
      read_double(p, "model.pump", "chi", pump.chi);
      read_double(p, "model.pump", "gamma", pump.gamma);
      read_double(p, "model.pump", "theta0", pump.theta0);
      cfg.model.pump = pump;
    }
  }

  if (const auto p = root["pulses"]) {
    reject_unknown(p, "pulses",
                   {"amplitude_E0", "width_dt", "period", "period_factor", "pulse_count", "center_t0",
                    "pulses_per_block"});
    read_double(p, "pulses", "amplitude_E0", cfg.pulses.amplitude_E0);
    read_double(p, "pulses", "width_dt", cfg.pulses.width_dt);
    read_optional(p, "pulses", "period", cfg.pulses.period);
    read_double(p, "pulses", "period_factor", cfg.pulses.period_factor);
    if (const auto n = p["pulse_count"]) {
      cfg.pulses.pulse_count = as_integer<std::size_t>(n, "pulses.pulse_count");
    }
    read_optional(p, "pulses", "center_t0", cfg.pulses.center_t0);
    if (const auto n = p["pulses_per_block"]) {
      cfg.pulses.pulses_per_block = as_integer<std::size_t>(n, "pulses.pulses_per_block");
    }
  }

  if (const auto c = root["cw"]) {
    reject_unknown(c, "cw", {"detunings", "tau_max", "tau_step", "trajectories"});
    if (const auto n = c["detunings"]) cfg.cw.detunings = as_list(n, "cw.detunings");
    read_optional(c, "cw", "tau_max", cfg.cw.tau_max);
    read_optional(c, "cw", "tau_step", cfg.cw.tau_step);
    if (const auto n = c["trajectories"]) {
      cfg.cw.trajectories = as_integer<std::size_t>(n, "cw.trajectories");
    }
  }

  if (const auto t = root["trajectory"]) {
    reject_unknown(t, "trajectory", {"step_dt", "duration", "seed", "dim", "max_jump_prob"});
    if (const auto n = t["step_dt"]) {
      cfg.trajectory.step_dt = as_double(n, "trajectory.step_dt");
      cfg.step_dt_explicit = true;
    }
    read_double(t, "trajectory", "duration", cfg.trajectory.duration);
    if (const auto n = t["seed"]) cfg.trajectory.seed = as_integer<std::uint64_t>(n, "trajectory.seed");
    if (const auto n = t["dim"]) cfg.trajectory.dim = as_integer<std::size_t>(n, "trajectory.dim");
    read_double(t, "trajectory", "max_jump_prob", cfg.trajectory.max_jump_prob);
  }

  if (const auto a = root["analysis"]) {
    reject_unknown(a, "analysis", {"bin_width", "max_delay"});
    read_optional(a, "analysis", "bin_width", cfg.analysis.bin_width);
    read_optional(a, "analysis", "max_delay", cfg.analysis.max_delay);
  }

  if (const auto s = root["sweep"]) {
    reject_unknown(s, "sweep", {"parameter", "values"});
    SweepConfig sweep;
    if (!s["parameter"]) config_error("sweep.parameter", "required");
    sweep.parameter = s["parameter"].as<std::string>();
    if (!s["values"]) config_error("sweep.values", "required");
    sweep.values = as_list(s["values"], "sweep.values");
    cfg.sweep = sweep;
  }

  if (const auto o = root["output"]) {
    reject_unknown(o, "output", {"directory", "format", "save_records"});
    if (const auto n = o["directory"]) cfg.output.directory = n.as<std::string>();
    if (const auto n = o["format"]) cfg.output.format = n.as<std::string>();
    if (const auto n = o["save_records"]) {
      try {
        cfg.output.save_records = n.as<bool>();
      } catch (const YAML::Exception&) {
        config_error("output.save_records", "expected true or false");
      }
    }
  }

  if (const auto w = root["workers"]) cfg.workers = as_integer<std::size_t>(w, "workers");

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace blockade
