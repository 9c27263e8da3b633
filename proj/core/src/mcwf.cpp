#include "blockade/mcwf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "blockade/error.hpp"
#include "blockade/parallel.hpp"
#include "blockade/rng.hpp"

namespace blockade {

namespace {

constexpr std::size_t kPad = 2;

[[noreturn]] void throw_step_violation(double jump_prob, double max_jump_prob) {
  std::ostringstream os;
  os << "jump probability " << jump_prob << " reached the cap " << max_jump_prob
     << "; reduce step_dt";
  throw Error(ErrorCode::kStepSizeViolation, os.str());
}

// E(t), U(t) at step midpoints.
class DriveSchedule {
 public:
  DriveSchedule(const Drive& drive, double step_dt) : step_dt_(step_dt) {
    if (const auto* cw = std::get_if<ContinuousDrive>(&drive)) {
      constant_E_ = cw->params.drive_E;
      constant_U_ = cw->params.parametric_U;
      return;
    }
    const auto& pulsed = std::get<PulsedDrive>(drive);
    pulsed_ = true;
    train_ = pulsed.train;
    delta_ = pulsed.base.delta;
    kappa_ = pulsed.base.kappa;
    half_width_ = std::sqrt(delta_ * delta_ + 0.25 * kappa_ * kappa_);

    // When the period is a whole number of steps every pulse sees the same
    // midpoint offsets, so one Gaussian table serves the whole train.
    const double ratio = train_.period / step_dt;
    const double rounded = std::round(ratio);
    if (rounded >= 1.0 && std::abs(ratio - rounded) <= 1e-9 * ratio) {
      steps_per_period_ = static_cast<long long>(rounded);
      const double t0 = train_.center_t0;
      const double p = train_.period;
      j_min_ = static_cast<long long>(std::floor((t0 - p) / step_dt - 0.5)) - 2;
      const auto j_max = static_cast<long long>(std::ceil((t0 + p) / step_dt)) + 2;
      gauss_.resize(static_cast<std::size_t>(j_max - j_min_ + 1));
      for (long long j = j_min_; j <= j_max; ++j) {
        const double x = ((static_cast<double>(j) + 0.5) * step_dt - t0) / train_.width_dt;
        gauss_[static_cast<std::size_t>(j - j_min_)] = std::exp(-x * x);
      }
    }
  }

  void at_step(std::size_t k, double& e, double& u) const {
    if (!pulsed_) {
      e = constant_E_;
      u = constant_U_;
      return;
    }
    const double t = (static_cast<double>(k) + 0.5) * step_dt_;
    if (steps_per_period_ == 0) {
      e = drive_envelope(train_, t);
      u = e * e / half_width_;
      return;
    }
    const double lower = std::floor((t - train_.center_t0) / train_.period);
    const double last = static_cast<double>(train_.pulse_count) - 1.0;
    double sum = 0.0;
    for (double n : {lower, lower + 1.0}) {
      if (n < 0.0 || n > last) continue;
      const long long j = static_cast<long long>(k) - static_cast<long long>(n) * steps_per_period_;
      const long long slot = j - j_min_;
      if (slot >= 0 && slot < static_cast<long long>(gauss_.size())) {
        sum += gauss_[static_cast<std::size_t>(slot)];
      }
    }
    e = train_.amplitude_E0 * sum;
    u = e * e / half_width_;
  }

 private:
  double step_dt_;
  bool pulsed_ = false;
  double constant_E_ = 0.0;
  double constant_U_ = 0.0;
  PulseTrain train_{};
  double delta_ = 0.0;
  double kappa_ = 1.0;
  double half_width_ = 0.5;
  long long steps_per_period_ = 0;
  long long j_min_ = 0;
  std::vector<double> gauss_;
};

const SystemParams& base_params(const Drive& drive) {
  if (const auto* cw = std::get_if<ContinuousDrive>(&drive)) return cw->params;
  return std::get<PulsedDrive>(drive).base;
}

void validate_drive(const Drive& drive, const TrajectoryConfig& config) {
  base_params(drive).validate();
  config.validate(drive_kappa(drive));
  if (const auto* pulsed = std::get_if<PulsedDrive>(&drive)) {
    pulsed->train.validate();
    if (config.duration + 1e-9 * config.duration < pulsed->train.end_time()) {
      std::ostringstream os;
      os << "duration " << config.duration << " does not cover " << pulsed->train.pulse_count
         << " pulses of period " << pulsed->train.period;
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
  }
}

// Shared loop for run_trajectory and run_trajectory_sampled.
EmissionRecord run_impl(const Drive& drive, const TrajectoryConfig& config, std::uint64_t stream,
                        std::span<const std::size_t> sample_steps, std::vector<StateVector>* samples) {
  validate_drive(drive, config);
  const SystemParams& p = base_params(drive);
  BandedStepper stepper(config.dim, p.delta, p.kappa, p.theta, config.step_dt);
  const DriveSchedule schedule(drive, config.step_dt);
  RandomStream rng(config.seed, stream);

  EmissionRecord record;
  record.seed = config.seed;
  record.stream = stream;
  record.duration = config.duration;
  if (const auto* pulsed = std::get_if<PulsedDrive>(&drive)) {
    record.pulse_count = pulsed->train.pulse_count;
  }

  const std::size_t steps = config.step_count();
  std::size_t next_sample = 0;
  auto take_samples = [&](std::size_t k) {
    while (samples != nullptr && next_sample < sample_steps.size() && sample_steps[next_sample] == k) {
      samples->push_back(stepper.state());
      ++next_sample;
    }
  };

  double e = 0.0;
  double u = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    take_samples(k);
    schedule.at_step(k, e, u);
    const double r = rng.uniform();
    bool jumped = false;
    try {
      jumped = stepper.step(e, u, r, config.max_jump_prob);
    } catch (const Error& err) {
      std::ostringstream os;
      os << err.what() << " (t=" << static_cast<double>(k) * config.step_dt << " ns";
      if (const auto* pulsed = std::get_if<PulsedDrive>(&drive)) {
        os << ", pulse " << static_cast<std::size_t>(static_cast<double>(k) * config.step_dt /
                                                     pulsed->train.period);
      }
      os << ")";
      throw Error(err.code(), os.str());
    }
    if (jumped) record.click_times.push_back(static_cast<double>(k + 1) * config.step_dt);
  }
  take_samples(steps);
  return record;
}

}  // namespace

TrajectoryConfig TrajectoryConfig::defaults_for(double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  TrajectoryConfig config;
  config.step_dt = kDefaultKappaStep / kappa;
  return config;
}

void TrajectoryConfig::validate(double kappa) const {
  if (!(step_dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step_dt must be positive");
  if (kappa * step_dt > kMaxKappaStep * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "kappa * step_dt = " << kappa * step_dt << " exceeds " << kMaxKappaStep;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  if (!(duration > 0.0)) throw Error(ErrorCode::kInvalidArgument, "duration must be positive");
  if (dim < 3) throw Error(ErrorCode::kInvalidDimension, "trajectory dim must be >= 3");
  if (!(max_jump_prob > 0.0) || max_jump_prob > 0.01) {
    throw Error(ErrorCode::kInvalidArgument, "max_jump_prob must lie in (0, 0.01]");
  }
}

std::size_t TrajectoryConfig::step_count() const {
  return static_cast<std::size_t>(std::floor(duration / step_dt + 1e-9));
}

void EmissionRecord::validate() const {
  for (std::size_t i = 0; i < click_times.size(); ++i) {
    const double t = click_times[i];
    if (t < 0.0 || t > duration) {
      throw Error(ErrorCode::kInvalidArgument, "click time outside [0, duration]");
    }
    if (i > 0 && !(t > click_times[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "click times must be strictly increasing");
    }
  }
}

double drive_kappa(const Drive& drive) { return base_params(drive).kappa; }

OperatorMatrix effective_hamiltonian(const OperatorMatrix& hamiltonian, double kappa) {
  if (!hamiltonian.is_hermitian(kTolerances.hamiltonian_hermiticity)) {
    throw Error(ErrorCode::kNonHermitian, "H must be Hermitian to build H_eff");
  }
  const OperatorMatrix n = number_operator(hamiltonian.dim());
  return hamiltonian - Complex(0.0, 0.5 * kappa) * n;
}

StepResult mcwf_step(const StateVector& state, const OperatorMatrix& h_eff, double step_dt,
                     double random_r, double max_jump_prob) {
  if (state.dim() != h_eff.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "state and H_eff differ in dimension");
  }
  const CMatrix& h = h_eff.elements();
  const CVector& psi = state.amplitudes();
  const CMatrix jump_rate = Complex(0.0, 1.0) * (h - h.adjoint());  // J^dagger J
  const double jump_prob = step_dt * psi.dot(jump_rate * psi).real();
  if (jump_prob >= max_jump_prob) throw_step_violation(jump_prob, max_jump_prob);

  const CVector evolved = psi - Complex(0.0, step_dt) * (h * psi);
  if (!(random_r < jump_prob)) {
    return {StateVector(evolved / evolved.norm()), false, jump_prob};
  }
  const CVector collapsed = annihilation_operator(state.dim()).elements() * evolved;
  const double norm = collapsed.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jump from a state with no photons");
  }
  return {StateVector(collapsed / norm), true, jump_prob};
}

BandedStepper::BandedStepper(std::size_t dim, double delta, double kappa, double theta,
                             double step_dt)
    : dim_(dim),
      step_dt_(step_dt),
      kappa_(kappa),
      diag_a_(dim),
      diag_b_(dim),
      sqrt_n_(dim + 2 * kPad, 0.0),
      up_c_(dim),
      up_s_(dim),
      dn_c_(dim),
      dn_s_(dim),
      weight_(dim),
      re_(dim + 2 * kPad, 0.0),
      im_(dim + 2 * kPad, 0.0),
      tre_(dim, 0.0),
      tim_(dim, 0.0) {
  if (dim < 3) throw Error(ErrorCode::kInvalidDimension, "stepper needs dim >= 3");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto sqrt_nn = [dim](std::size_t n) {
    if (n >= dim) return 0.0;
    const auto x = static_cast<double>(n);
    return std::sqrt(x * (x - 1.0));
  };
  for (std::size_t n = 0; n < dim; ++n) {
    const auto x = static_cast<double>(n);
    // 1 - i dt (delta n - i kappa n / 2)
    diag_a_[n] = 1.0 - 0.5 * step_dt * kappa * x;
    diag_b_[n] = -step_dt * delta * x;
    sqrt_n_[n + kPad] = std::sqrt(x);
    up_c_[n] = sqrt_nn(n) * c;
    up_s_[n] = sqrt_nn(n) * s;
    dn_c_[n] = sqrt_nn(n + 2) * c;
    dn_s_[n] = sqrt_nn(n + 2) * s;
    weight_[n] = step_dt * kappa * x;
  }
  reset_to_vacuum();
}

void BandedStepper::reset_to_vacuum() {
  std::fill(re_.begin(), re_.end(), 0.0);
  std::fill(im_.begin(), im_.end(), 0.0);
  re_[kPad] = 1.0;
  jump_prob_ = 0.0;
}

void BandedStepper::set_state(const StateVector& psi) {
  if (psi.dim() != dim_) throw Error(ErrorCode::kDimensionMismatch, "stepper state dimension");
  std::fill(re_.begin(), re_.end(), 0.0);
  std::fill(im_.begin(), im_.end(), 0.0);
  for (std::size_t n = 0; n < dim_; ++n) {
    re_[n + kPad] = psi[n].real();
    im_[n + kPad] = psi[n].imag();
  }
  jump_prob_ = 0.0;
  for (std::size_t n = 0; n < dim_; ++n) {
    jump_prob_ += weight_[n] * (re_[n + kPad] * re_[n + kPad] + im_[n + kPad] * im_[n + kPad]);
  }
}

StateVector BandedStepper::state() const {
  CVector v(static_cast<Eigen::Index>(dim_));
  for (std::size_t n = 0; n < dim_; ++n) {
    v[static_cast<Eigen::Index>(n)] = Complex(re_[n + kPad], im_[n + kPad]);
  }
  return StateVector(std::move(v));
}

double BandedStepper::jump_probability() const { return jump_prob_; }

bool BandedStepper::step(double drive_E, double parametric_U, double random_r,
                         double max_jump_prob) {
  const double jump_prob = jump_prob_;
  if (jump_prob >= max_jump_prob) throw_step_violation(jump_prob, max_jump_prob);

  const std::size_t dim = dim_;
  const double* __restrict re = re_.data() + kPad;
  const double* __restrict im = im_.data() + kPad;
  const double* __restrict s1 = sqrt_n_.data() + kPad;
  const double* __restrict da = diag_a_.data();
  const double* __restrict db = diag_b_.data();
  const double* __restrict uc = up_c_.data();
  const double* __restrict us = up_s_.data();
  const double* __restrict dc = dn_c_.data();
  const double* __restrict ds = dn_s_.data();
  double* __restrict tre = tre_.data();
  double* __restrict tim = tim_.data();
  const double ce = step_dt_ * drive_E;
  const double cu = step_dt_ * parametric_U;

  // psi~ = psi - i dt H_eff psi. The padding keeps the band loops free of
  // boundary checks: the state vanishes outside [0, dim).
  for (std::size_t n = 0; n < dim; ++n) {
    const double er = s1[n + 1] * re[n + 1] + s1[n] * re[n - 1];
    const double ei = s1[n + 1] * im[n + 1] + s1[n] * im[n - 1];
    const double pr = uc[n] * re[n - 2] - us[n] * im[n - 2] + dc[n] * re[n + 2] + ds[n] * im[n + 2];
    const double pi = uc[n] * im[n - 2] + us[n] * re[n - 2] + dc[n] * im[n + 2] - ds[n] * re[n + 2];
    tre[n] = da[n] * re[n] - db[n] * im[n] + ce * ei + cu * pi;
    tim[n] = da[n] * im[n] + db[n] * re[n] - ce * er - cu * pr;
  }

  double* __restrict out_re = re_.data() + kPad;
  double* __restrict out_im = im_.data() + kPad;
  const double* __restrict w = weight_.data();
  if (!(random_r < jump_prob)) {
    double norm2 = 0.0;
    double mean = 0.0;
    for (std::size_t n = 0; n < dim; ++n) {
      const double p = tre[n] * tre[n] + tim[n] * tim[n];
      norm2 += p;
      mean += w[n] * p;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t n = 0; n < dim; ++n) {
      out_re[n] = tre[n] * inv;
      out_im[n] = tim[n] * inv;
    }
    jump_prob_ = mean / norm2;
    return false;
  }

  // a psi~ / |a psi~|
  double jnorm2 = 0.0;
  for (std::size_t n = 0; n + 1 < dim; ++n) {
    const double f = s1[n + 1];
    out_re[n] = f * tre[n + 1];
    out_im[n] = f * tim[n + 1];
    jnorm2 += out_re[n] * out_re[n] + out_im[n] * out_im[n];
  }
  out_re[dim - 1] = 0.0;
  out_im[dim - 1] = 0.0;
  if (!(jnorm2 > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "jump from a state with no photons");
  }
  const double inv = 1.0 / std::sqrt(jnorm2);
  double mean = 0.0;
  for (std::size_t n = 0; n < dim; ++n) {
    out_re[n] *= inv;
    out_im[n] *= inv;
    mean += w[n] * (out_re[n] * out_re[n] + out_im[n] * out_im[n]);
  }
  jump_prob_ = mean;
  return true;
}

namespace {

// kBatchLanes trajectories stepped in lockstep, state stored lane-minor so the
// inner loops run over lanes. Per lane the arithmetic is exactly that of
// BandedStepper::step, so each lane reproduces run_trajectory bit for bit.
class LaneStepper {
 public:
  static constexpr std::size_t L = kBatchLanes;

  LaneStepper(std::size_t dim, double delta, double kappa, double theta, double step_dt)
      : dim_(dim), step_dt_(step_dt), diag_a_(dim), diag_b_(dim), sqrt_n_(dim + 2 * kPad, 0.0),
        up_c_(dim), up_s_(dim), dn_c_(dim), dn_s_(dim), weight_(dim),
        re_((dim + 2 * kPad) * L, 0.0), im_((dim + 2 * kPad) * L, 0.0), tre_(dim * L), tim_(dim * L) {
    // Same coefficient expressions as BandedStepper.
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    auto sqrt_nn = [dim](std::size_t n) {
      if (n >= dim) return 0.0;
      const auto x = static_cast<double>(n);
      return std::sqrt(x * (x - 1.0));
    };
    for (std::size_t n = 0; n < dim; ++n) {
      const auto x = static_cast<double>(n);
      diag_a_[n] = 1.0 - 0.5 * step_dt * kappa * x;
      diag_b_[n] = -step_dt * delta * x;
      sqrt_n_[n + kPad] = std::sqrt(x);
      up_c_[n] = sqrt_nn(n) * c;
      up_s_[n] = sqrt_nn(n) * s;
      dn_c_[n] = sqrt_nn(n + 2) * c;
      dn_s_[n] = sqrt_nn(n + 2) * s;
      weight_[n] = step_dt * kappa * x;
    }
    for (std::size_t l = 0; l < L; ++l) re_[kPad * L + l] = 1.0;
    jump_prob_.fill(0.0);
  }

  double jump_probability(std::size_t lane) const { return jump_prob_[lane]; }

  // Advances all lanes; jumped[l] reports a jump in lane l.
  void step(double drive_E, double parametric_U, const std::array<double, L>& r,
            std::array<bool, L>& jumped) {
    const std::size_t dim = dim_;
    const double* __restrict re = re_.data() + kPad * L;
    const double* __restrict im = im_.data() + kPad * L;
    double* __restrict tre = tre_.data();
    double* __restrict tim = tim_.data();
    const double ce = step_dt_ * drive_E;
    const double cu = step_dt_ * parametric_U;
    const std::ptrdiff_t stride = L;

    for (std::size_t n = 0; n < dim; ++n) {
      const double s1p = sqrt_n_[n + 1 + kPad];
      const double s1n = sqrt_n_[n + kPad];
      const double da = diag_a_[n];
      const double db = diag_b_[n];
      const double uc = up_c_[n];
      const double us = up_s_[n];
      const double dc = dn_c_[n];
      const double ds = dn_s_[n];
      const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) * stride;
      for (std::size_t l = 0; l < L; ++l) {
        const std::ptrdiff_t j = i + static_cast<std::ptrdiff_t>(l);
        const double er = s1p * re[j + stride] + s1n * re[j - stride];
        const double ei = s1p * im[j + stride] + s1n * im[j - stride];
        const double pr = uc * re[j - 2 * stride] - us * im[j - 2 * stride] +
                          dc * re[j + 2 * stride] + ds * im[j + 2 * stride];
        const double pi = uc * im[j - 2 * stride] + us * re[j - 2 * stride] +
                          dc * im[j + 2 * stride] - ds * re[j + 2 * stride];
        tre[j] = da * re[j] - db * im[j] + ce * ei + cu * pi;
        tim[j] = da * im[j] + db * re[j] - ce * er - cu * pr;
      }
    }

    std::array<double, L> norm2{};
    std::array<double, L> mean{};
    for (std::size_t n = 0; n < dim; ++n) {
      const double w = weight_[n];
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t j = n * L + l;
        const double p = tre[j] * tre[j] + tim[j] * tim[j];
        norm2[l] += p;
        mean[l] += w * p;
      }
    }
    std::array<double, L> inv{};
    for (std::size_t l = 0; l < L; ++l) {
      jumped[l] = r[l] < jump_prob_[l];
      inv[l] = 1.0 / std::sqrt(norm2[l]);
      jump_prob_[l] = mean[l] / norm2[l];
    }
    double* __restrict out_re = re_.data() + kPad * L;
    double* __restrict out_im = im_.data() + kPad * L;
    for (std::size_t n = 0; n < dim; ++n) {
      for (std::size_t l = 0; l < L; ++l) {
        const std::size_t j = n * L + l;
        out_re[j] = tre[j] * inv[l];
        out_im[j] = tim[j] * inv[l];
      }
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (jumped[l]) collapse(l);
    }
  }

 private:
  void collapse(std::size_t l) {
    const double* tre = tre_.data();
    const double* tim = tim_.data();
    double* out_re = re_.data() + kPad * L;
    double* out_im = im_.data() + kPad * L;
    double jnorm2 = 0.0;
    for (std::size_t n = 0; n + 1 < dim_; ++n) {
      const double f = sqrt_n_[n + 1 + kPad];
      out_re[n * L + l] = f * tre[(n + 1) * L + l];
      out_im[n * L + l] = f * tim[(n + 1) * L + l];
      jnorm2 += out_re[n * L + l] * out_re[n * L + l] + out_im[n * L + l] * out_im[n * L + l];
    }
    out_re[(dim_ - 1) * L + l] = 0.0;
    out_im[(dim_ - 1) * L + l] = 0.0;
    if (!(jnorm2 > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "jump from a state with no photons");
    }
    const double inv = 1.0 / std::sqrt(jnorm2);
    double mean = 0.0;
    for (std::size_t n = 0; n < dim_; ++n) {
      const std::size_t j = n * L + l;
      out_re[j] *= inv;
      out_im[j] *= inv;
      mean += weight_[n] * (out_re[j] * out_re[j] + out_im[j] * out_im[j]);
    }
    jump_prob_[l] = mean;
  }

  std::size_t dim_;
  double step_dt_;
  std::vector<double> diag_a_, diag_b_, sqrt_n_, up_c_, up_s_, dn_c_, dn_s_, weight_;
  std::vector<double> re_, im_, tre_, tim_;
  std::array<double, L> jump_prob_{};
};

void run_lanes(const Drive& drive, const TrajectoryConfig& config,
               std::span<const std::uint64_t> streams, std::span<EmissionRecord> out) {
  constexpr std::size_t L = kBatchLanes;
  const SystemParams& p = base_params(drive);
  LaneStepper stepper(config.dim, p.delta, p.kappa, p.theta, config.step_dt);
  const DriveSchedule schedule(drive, config.step_dt);
  std::vector<RandomStream> rngs;
  rngs.reserve(L);
  // Idle lanes replay the first stream and are discarded.
  for (std::size_t l = 0; l < L; ++l) rngs.emplace_back(config.seed, streams[l < streams.size() ? l : 0]);

  const std::size_t used = streams.size();
  for (std::size_t l = 0; l < used; ++l) {
    out[l].seed = config.seed;
    out[l].stream = streams[l];
    out[l].duration = config.duration;
    out[l].click_times.clear();
    if (const auto* pulsed = std::get_if<PulsedDrive>(&drive)) out[l].pulse_count = pulsed->train.pulse_count;
  }

  const std::size_t steps = config.step_count();
  std::array<double, L> r{};
  std::array<bool, L> jumped{};
  double e = 0.0;
  double u = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    schedule.at_step(k, e, u);
    for (std::size_t l = 0; l < L; ++l) {
      r[l] = rngs[l].uniform();
      const double jp = stepper.jump_probability(l);
      if (jp >= config.max_jump_prob && l < used) {
        std::ostringstream os;
        os << "jump probability " << jp << " reached the cap " << config.max_jump_prob
           << "; reduce step_dt (stream " << streams[l] << ", t=" << static_cast<double>(k) * config.step_dt << " ns";
        if (const auto* pulsed = std::get_if<PulsedDrive>(&drive)) {
          os << ", pulse " << static_cast<std::size_t>(static_cast<double>(k) * config.step_dt /
                                                       pulsed->train.period);
        }
        os << ")";
        throw Error(ErrorCode::kStepSizeViolation, os.str());
      }
    }
    stepper.step(e, u, r, jumped);
    for (std::size_t l = 0; l < used; ++l) {
      if (jumped[l]) out[l].click_times.push_back(static_cast<double>(k + 1) * config.step_dt);
    }
  }
}

}  // namespace

std::vector<EmissionRecord> run_trajectory_batch(const Drive& drive, const TrajectoryConfig& config,
                                                 std::span<const std::uint64_t> streams) {
  validate_drive(drive, config);
  std::vector<EmissionRecord> out(streams.size());
  for (std::size_t first = 0; first < streams.size(); first += kBatchLanes) {
    const std::size_t count = std::min(kBatchLanes, streams.size() - first);
    run_lanes(drive, config, streams.subspan(first, count), std::span(out).subspan(first, count));
  }
  return out;
}

EmissionRecord run_trajectory(const Drive& drive, const TrajectoryConfig& config,
                              std::uint64_t stream) {
  return run_impl(drive, config, stream, {}, nullptr);
}

SampledTrajectory run_trajectory_sampled(const Drive& drive, const TrajectoryConfig& config,
                                         std::uint64_t stream, std::span<const double> sample_times) {
  std::vector<std::size_t> steps;
  steps.reserve(sample_times.size());
  const std::size_t total = config.step_count();
  for (double t : sample_times) {
    if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "sample times must be >= 0");
    const auto k = static_cast<std::size_t>(std::llround(t / config.step_dt));
    if (k > total) throw Error(ErrorCode::kInvalidArgument, "sample time beyond duration");
    if (!steps.empty() && k < steps.back()) {
      throw Error(ErrorCode::kInvalidArgument, "sample times must be non-decreasing");
    }
    steps.push_back(k);
  }
  SampledTrajectory out;
  out.samples.reserve(steps.size());
  out.record = run_impl(drive, config, stream, steps, &out.samples);
  return out;
}

std::vector<DensityMatrix> ensemble_density(const Drive& drive, const TrajectoryConfig& config,
                                            std::size_t n_traj, std::span<const double> sample_times,
                                            std::size_t workers) {
  if (n_traj < 1) throw Error(ErrorCode::kInvalidArgument, "ensemble needs at least one trajectory");
  std::vector<std::vector<StateVector>> per_traj(n_traj);
  parallel_for(n_traj, workers, [&](std::size_t k) {
    per_traj[k] = run_trajectory_sampled(drive, config, k, sample_times).samples;
  });

  const auto d = static_cast<Eigen::Index>(config.dim);
  std::vector<DensityMatrix> out;
  out.reserve(sample_times.size());
  for (std::size_t s = 0; s < sample_times.size(); ++s) {
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < n_traj; ++k) {
      const CVector& v = per_traj[k][s].amplitudes();
      sum += v * v.adjoint();
    }
    sum /= static_cast<double>(n_traj);
    out.emplace_back(std::move(sum));
  }
  return out;
}

std::vector<EnsembleEstimate> ensemble_expectation(const Drive& drive, const TrajectoryConfig& config,
                                                   std::size_t n_traj,
                                                   std::span<const double> sample_times,
                                                   const OperatorMatrix& op, std::size_t workers) {
  if (n_traj < 2) throw Error(ErrorCode::kInvalidArgument, "standard errors need two trajectories");
  if (op.dim() != config.dim) throw Error(ErrorCode::kDimensionMismatch, "observable dimension");
  std::vector<std::vector<double>> values(n_traj);
  parallel_for(n_traj, workers, [&](std::size_t k) {
    const auto samples = run_trajectory_sampled(drive, config, k, sample_times).samples;
    values[k].reserve(samples.size());
    for (const auto& psi : samples) values[k].push_back(expectation(op, psi).real());
  });

  std::vector<EnsembleEstimate> out;
  const auto n = static_cast<double>(n_traj);
  for (std::size_t s = 0; s < sample_times.size(); ++s) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n_traj; ++k) sum += values[k][s];
    const double mean = sum / n;
    double ss = 0.0;
    for (std::size_t k = 0; k < n_traj; ++k) ss += (values[k][s] - mean) * (values[k][s] - mean);
    out.push_back({sample_times[s], mean, std::sqrt(ss / (n - 1.0) / n)});
  }
  return out;
}

}  // namespace blockade
