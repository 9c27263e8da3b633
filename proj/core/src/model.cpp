#include "blockade/model.hpp"

#include <cmath>
#include <sstream>

#include "blockade/error.hpp"

namespace blockade {

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be finite");
  }
}

double detuned_half_width(double delta, double kappa) {
  return std::sqrt(delta * delta + 0.25 * kappa * kappa);
}

}  // namespace

void SystemParams::validate() const {
  require_finite(delta, "delta");
  require_finite(kappa, "kappa");
  require_finite(drive_E, "drive_E");
  require_finite(parametric_U, "parametric_U");
  require_finite(theta, "theta");
  if (!(kappa > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  }
}

std::vector<std::string> SystemParams::weak_drive_warnings() const {
  std::vector<std::string> out;
  const double limit = kappa / 10.0;
  if (std::abs(drive_E) >= limit) {
    std::ostringstream os;
    os << "drive_E=" << drive_E << " is not << kappa (>= kappa/10); optimum conditions may not hold";
    out.push_back(os.str());
  }
  if (std::abs(parametric_U) >= limit) {
    std::ostringstream os;
    os << "parametric_U=" << parametric_U
       << " is not << kappa (>= kappa/10); optimum conditions may not hold";
    out.push_back(os.str());
  }
  return out;
}

void PumpParams::validate() const {
  require_finite(pump_F, "pump_F");
  require_finite(chi, "chi");
  require_finite(gamma, "gamma");
  require_finite(theta0, "theta0");
  if (!(gamma > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma must be positive");
  if (pump_F < 0.0) throw Error(ErrorCode::kInvalidArgument, "pump_F must be non-negative");
  if (chi < 0.0) throw Error(ErrorCode::kInvalidArgument, "chi must be non-negative");
}

PulseTrain PulseTrain::with_default_spacing(double amplitude_E0, double width_dt,
                                            std::size_t pulse_count) {
  PulseTrain train;
  train.amplitude_E0 = amplitude_E0;
  train.width_dt = width_dt;
  train.period = kDefaultPeriodFactor * width_dt;
  train.pulse_count = pulse_count;
  train.center_t0 = 0.5 * train.period;
  return train;
}

void PulseTrain::validate() const {
  require_finite(amplitude_E0, "amplitude_E0");
  require_finite(width_dt, "width_dt");
  require_finite(period, "period");
  require_finite(center_t0, "center_t0");
  if (!(width_dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "width_dt must be positive");
  if (period < kMinPeriodFactor * width_dt) {
    std::ostringstream os;
    os << "period=" << period << " must be at least " << kMinPeriodFactor
       << " x width_dt=" << width_dt << " so adjacent pulses do not overlap";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (pulse_count < 1) throw Error(ErrorCode::kInvalidArgument, "pulse_count must be >= 1");
  if (center_t0 < 0.0) throw Error(ErrorCode::kInvalidArgument, "center_t0 must be >= 0");
}

double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * units::kPi;
  double wrapped = std::fmod(angle, two_pi);
  if (wrapped <= -units::kPi) wrapped += two_pi;
  if (wrapped > units::kPi) wrapped -= two_pi;
  return wrapped;
}

EffectiveGain effective_pump_params(const PumpParams& pump, double delta) {
  pump.validate();
  require_finite(delta, "delta");
  const double denom = std::sqrt(4.0 * delta * delta + 0.25 * pump.gamma * pump.gamma);
  return {pump.pump_F * pump.chi / denom,
          wrap_phase(std::atan2(pump.gamma, 4.0 * delta) - pump.theta0)};
}

DriveConditions optimal_drive_conditions(double parametric_U, double delta, double kappa) {
  if (parametric_U < 0.0) throw Error(ErrorCode::kInvalidArgument, "U must be non-negative");
  if (!(kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  return {std::sqrt(parametric_U * detuned_half_width(delta, kappa)),
          std::atan2(kappa, 2.0 * delta)};
}

double drive_envelope(const PulseTrain& train, double t) {
  if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "drive envelope needs t >= 0");
  // Only the two pulses bracketing t contribute above machine precision.
  const double rel = (t - train.center_t0) / train.period;
  const double last = static_cast<double>(train.pulse_count) - 1.0;
  const double lower = std::floor(rel);
  double sum = 0.0;
  for (double n : {lower, lower + 1.0}) {
    if (n < 0.0 || n > last) continue;
    const double x = (t - (train.center_t0 + n * train.period)) / train.width_dt;
    sum += std::exp(-x * x);
  }
  return train.amplitude_E0 * sum;
}

double parametric_envelope(const PulseTrain& train, double delta, double kappa, double t) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  const double e = drive_envelope(train, t);
  return e * e / detuned_half_width(delta, kappa);
}

OperatorMatrix build_hamiltonian(const SystemParams& params, std::size_t dim) {
  if (dim < 3) {
    throw Error(ErrorCode::kInvalidDimension,
                "the two-photon term needs at least 3 levels, got " + std::to_string(dim));
  }
  params.validate();
  const auto d = static_cast<Eigen::Index>(dim);
  const Complex phase = std::polar(1.0, params.theta);
  CMatrix h = CMatrix::Zero(d, d);
  for (Eigen::Index n = 0; n < d; ++n) {
    h(n, n) = params.delta * static_cast<double>(n);
    if (n + 1 < d) {
      const double s = std::sqrt(static_cast<double>(n + 1));
      h(n + 1, n) = params.drive_E * s;  // a^dagger
      h(n, n + 1) = params.drive_E * s;  // a
    }
    if (n + 2 < d) {
      const double s = std::sqrt(static_cast<double>((n + 1) * (n + 2)));
      h(n + 2, n) = params.parametric_U * phase * s;             // a^dagger^2
      h(n, n + 2) = params.parametric_U * std::conj(phase) * s;  // a^2
    }
  }
  return OperatorMatrix(std::move(h));
}

double cavity_linewidth(double wavelength_m, double quality_factor) {
  if (!(wavelength_m > 0.0) || !(quality_factor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "wavelength and quality factor must be positive");
  }
  return 2.0 * units::kPi * units::kSpeedOfLightMetersPerNs / wavelength_m / quality_factor;
}

}  // namespace blockade
