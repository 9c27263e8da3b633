#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "blockade/fock.hpp"
#include "blockade/model.hpp"

// Monte Carlo wave-function trajectories. Each step applies the first-order
// non-unitary update (1 - i H_eff dt), then either renormalizes or collapses
// with the jump operator J = sqrt(kappa) a. Jumps are photon detections.

namespace blockade {

struct TrajectoryConfig {
  double step_dt = 0.005;
  double duration = 1000.0;
  std::uint64_t seed = 1;
  std::size_t dim = 10;
  double max_jump_prob = 0.01;

  static constexpr double kMaxKappaStep = 0.01;
  static constexpr double kDefaultKappaStep = 0.005;

  // Defaults with step_dt = 0.005 / kappa.
  static TrajectoryConfig defaults_for(double kappa);

  void validate(double kappa) const;
  std::size_t step_count() const;
};

struct EmissionRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> click_times;
  double duration = 0.0;
  std::size_t pulse_count = 0;  // 0 for CW

  // click_times strictly increasing inside [0, duration].
  void validate() const;
};

struct ContinuousDrive {
  SystemParams params;
};

// Gaussian pulse train. E(t) follows drive_envelope and U(t) follows
// parametric_envelope; drive_E and parametric_U in `base` are ignored.
struct PulsedDrive {
  SystemParams base;
  PulseTrain train;
};

using Drive = std::variant<ContinuousDrive, PulsedDrive>;

double drive_kappa(const Drive& drive);

// H - i (kappa / 2) a^dagger a.
OperatorMatrix effective_hamiltonian(const OperatorMatrix& hamiltonian, double kappa);

struct StepResult {
  StateVector state;
  bool jumped;
  double jump_probability;
};

// One trajectory step with a dense H_eff. The jump probability is
// dt <psi|J^dagger J|psi> on the pre-step state, with J^dagger J recovered as
// i (H_eff - H_eff^dagger). Throws kStepSizeViolation when it reaches
// max_jump_prob.
StepResult mcwf_step(const StateVector& state, const OperatorMatrix& h_eff, double step_dt,
                     double random_r, double max_jump_prob = 0.01);

// Banded fast path of mcwf_step for the cavity Hamiltonian: H_eff only couples
// |n> to |n +- 1> and |n +- 2>, so a step costs O(D).
class BandedStepper {
 public:
  BandedStepper(std::size_t dim, double delta, double kappa, double theta, double step_dt);

  std::size_t dim() const { return dim_; }

  void reset_to_vacuum();
  void set_state(const StateVector& psi);
  StateVector state() const;

  // Jump probability of the current state.
  double jump_probability() const;

  // Advances one step with the given drive and gain; returns true on a jump.
  // Throws kStepSizeViolation when the jump probability reaches max_jump_prob.
  bool step(double drive_E, double parametric_U, double random_r, double max_jump_prob);

 private:
  std::size_t dim_;
  double step_dt_;
  double kappa_;
  double jump_prob_ = 0.0;         // of the current state
  std::vector<double> diag_a_;     // 1 - dt kappa n / 2
  std::vector<double> diag_b_;     // -dt delta n
  std::vector<double> sqrt_n_;     // sqrt(n), padded
  std::vector<double> up_c_, up_s_;  // sqrt(n (n - 1)) (cos, sin) theta
  std::vector<double> dn_c_, dn_s_;  // sqrt((n + 2) (n + 1)) (cos, sin) theta
  std::vector<double> weight_;     // dt kappa n
  std::vector<double> re_, im_;    // state, padded by two zeros on each side
  std::vector<double> tre_, tim_;
};

// Runs one trajectory from vacuum. CW drives run for config.duration; pulsed
// drives need config.duration >= pulse_count * period. The random stream is
// (config.seed, stream). Clicks are stamped at the end of their step.
EmissionRecord run_trajectory(const Drive& drive, const TrajectoryConfig& config,
                              std::uint64_t stream = 0);

// Trajectories stepped together by run_trajectory_batch.
inline constexpr std::size_t kBatchLanes = 16;

// One trajectory per stream, stepped kBatchLanes at a time. Each record is
// bitwise identical to run_trajectory(drive, config, stream).
std::vector<EmissionRecord> run_trajectory_batch(const Drive& drive, const TrajectoryConfig& config,
                                                 std::span<const std::uint64_t> streams);

struct SampledTrajectory {
  EmissionRecord record;
  std::vector<StateVector> samples;
};

// As run_trajectory, additionally capturing the state at each sample time
// (rounded to the nearest step boundary).
SampledTrajectory run_trajectory_sampled(const Drive& drive, const TrajectoryConfig& config,
                                         std::uint64_t stream, std::span<const double> sample_times);

// Average of |psi><psi| over n_traj trajectories (streams 0..n_traj-1) at each
// sample time.
std::vector<DensityMatrix> ensemble_density(const Drive& drive, const TrajectoryConfig& config,
                                            std::size_t n_traj, std::span<const double> sample_times,
                                            std::size_t workers = 1);

struct EnsembleEstimate {
  double time;
  double mean;
  double std_error;
};

// Trajectory average of <psi|op|psi> (real part) at each sample time with its
// standard error across trajectories.
std::vector<EnsembleEstimate> ensemble_expectation(const Drive& drive, const TrajectoryConfig& config,
                                                   std::size_t n_traj,
                                                   std::span<const double> sample_times,
                                                   const OperatorMatrix& op, std::size_t workers = 1);

}  // namespace blockade
