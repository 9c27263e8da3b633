#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "blockade/fock.hpp"

// Physical model of a weakly driven cavity with a degenerate parametric term.
//
// Units: every frequency or rate is an angular frequency in rad/ns, so a
// "1 GHz" linewidth is kappa = 1. Times are in ns.

namespace blockade {

namespace units {

inline constexpr double kSpeedOfLightMetersPerNs = 0.299792458;
inline constexpr double kPi = 3.14159265358979323846;

// 1 MHz in the rad/ns convention used throughout.
inline constexpr double kMHz = 1e-3;
inline constexpr double kGHz = 1.0;

inline constexpr double from_mhz(double mhz) { return mhz * kMHz; }
inline constexpr double to_mhz(double rad_per_ns) { return rad_per_ns / kMHz; }
// Ordinary frequency (cycles/ns) <-> angular frequency (rad/ns).
inline constexpr double cycles_to_angular(double f) { return 2.0 * kPi * f; }
inline constexpr double angular_to_cycles(double w) { return w / (2.0 * kPi); }

}  // namespace units

struct SystemParams {
  double delta = 0.0;         // cavity-drive detuning
  double kappa = 1.0;         // cavity decay rate
  double drive_E = 0.0;       // coherent drive strength
  double parametric_U = 0.0;  // effective two-photon gain
  double theta = 0.0;         // phase of the two-photon term

  // Throws kInvalidArgument when kappa <= 0 or a value is not finite.
  void validate() const;
  // Non-fatal notices for parameters outside the weak-drive regime in which
  // the optimum conditions hold (E or U at or above kappa/10).
  std::vector<std::string> weak_drive_warnings() const;
};

struct PumpParams {
  double pump_F = 0.0;
  double chi = 0.0;
  double gamma = 1.0;  // second-harmonic decay rate
  double theta0 = 0.0;

  void validate() const;
};

struct PulseTrain {
  double amplitude_E0 = 0.05;
  double width_dt = 2.0;
  double period = 24.0;
  std::size_t pulse_count = 1;
  double center_t0 = 12.0;

  static constexpr double kDefaultPeriodFactor = 12.0;
  static constexpr double kMinPeriodFactor = 4.0;

  // Pulse train with period = 12 width and the first pulse centred at half a
  // period, so pulse n owns the window [n period, (n + 1) period).
  static PulseTrain with_default_spacing(double amplitude_E0, double width_dt,
                                         std::size_t pulse_count);

  double center(std::size_t n) const { return center_t0 + static_cast<double>(n) * period; }
  double end_time() const { return static_cast<double>(pulse_count) * period; }

  void validate() const;
};

struct EffectiveGain {
  double parametric_U;
  double theta;
};

struct DriveConditions {
  double drive_E;
  double theta;
};

// Adiabatic elimination of the pumped second-harmonic mode.
EffectiveGain effective_pump_params(const PumpParams& pump, double delta);

// Weak-drive optimum for destructive two-photon interference:
// E^2 = U sqrt(delta^2 + kappa^2 / 4), theta = atan2(kappa, 2 delta).
DriveConditions optimal_drive_conditions(double parametric_U, double delta, double kappa);

double drive_envelope(const PulseTrain& train, double t);
// U(t) = E(t)^2 / sqrt(delta^2 + kappa^2 / 4), which keeps the optimum
// condition satisfied instant by instant.
double parametric_envelope(const PulseTrain& train, double delta, double kappa, double t);

// H = delta n + E (a^dagger + a) + U (e^{i theta} a^dagger^2 + e^{-i theta} a^2).
OperatorMatrix build_hamiltonian(const SystemParams& params, std::size_t dim);

// kappa = (2 pi c / lambda) / Q in rad/ns; wavelength in metres.
double cavity_linewidth(double wavelength_m, double quality_factor);

// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

}  // namespace blockade
