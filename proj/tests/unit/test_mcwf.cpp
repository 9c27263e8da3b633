#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "blockade/error.hpp"
#include "blockade/lindblad.hpp"
#include "blockade/mcwf.hpp"
#include "blockade/rng.hpp"

using namespace blockade;

namespace {

constexpr double kHalfPi = 1.5707963267948966;
const SystemParams kOptimum{0.0, 1.0, 0.05, 0.005, kHalfPi};

PulsedDrive reference_pulses(std::size_t count) {
  PulseTrain t;
  t.pulse_count = count;
  t.center_t0 = 12.0;
  return {SystemParams{0.0, 1.0, 0.0, 0.0, kHalfPi}, t};
}

}  // namespace

TEST_CASE("effective Hamiltonian") {
  const auto h0 = effective_hamiltonian(OperatorMatrix::zero(2), 0.8);
  CHECK(h0(0, 0) == Complex(0.0, 0.0));
  CHECK(h0(1, 1) == Complex(0.0, -0.4));
  CHECK(h0(0, 1) == Complex(0.0, 0.0));

  const auto h = build_hamiltonian(kOptimum, 8);
  const auto heff = effective_hamiltonian(h, 1.3);
  const CMatrix anti = 0.5 * (heff.elements() - heff.elements().adjoint());
  CHECK((anti - Complex(0.0, -0.65) * number_operator(8).elements()).norm() == 0.0);
  CHECK((effective_hamiltonian(h, 0.0).elements() - h.elements()).norm() == 0.0);

  CMatrix bad = CMatrix::Zero(3, 3);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(effective_hamiltonian(OperatorMatrix(bad), 1.0), Error);
}

TEST_CASE("vacuum never emits") {
  const auto heff = effective_hamiltonian(OperatorMatrix::zero(4), 1.0);
  for (double r : {0.0, 1e-300, 0.5, 0.999999}) {
    const auto s = mcwf_step(StateVector::vacuum(4), heff, 0.005, r);
    CHECK_FALSE(s.jumped);
    CHECK(s.jump_probability == 0.0);
    CHECK((s.state.amplitudes() - StateVector::vacuum(4).amplitudes()).norm() == 0.0);
  }
}

TEST_CASE("single photon jumps to vacuum") {
  const auto heff = effective_hamiltonian(OperatorMatrix::zero(4), 1.0);
  const auto s = mcwf_step(StateVector::basis(4, 1), heff, 0.005, 0.001);
  CHECK(s.jump_probability == doctest::Approx(0.005));
  CHECK(s.jumped);
  CHECK(std::abs(s.state[0]) == doctest::Approx(1.0));
  const auto t = mcwf_step(StateVector::basis(4, 1), heff, 0.005, 0.5);
  CHECK_FALSE(t.jumped);
  CHECK(std::abs(t.state[1]) == doctest::Approx(1.0));
}

TEST_CASE("jump frequency from a single photon is kappa dt") {
  const double dt = 0.005;
  const auto heff = effective_hamiltonian(OperatorMatrix::zero(4), 1.0);
  RandomStream rng(21, 0);
  const int trials = 400000;
  int jumps = 0;
  for (int i = 0; i < trials; ++i) jumps += mcwf_step(StateVector::basis(4, 1), heff, dt, rng.uniform()).jumped;
  const double p = dt;
  const double sigma = std::sqrt(trials * p * (1.0 - p));
  CHECK(std::abs(jumps - trials * p) < 3.0 * sigma);
}

TEST_CASE("step size violation") {
  const auto heff = effective_hamiltonian(OperatorMatrix::zero(8), 1.0);
  CHECK_THROWS_AS(mcwf_step(StateVector::basis(8, 5), heff, 0.005, 0.5), Error);
  try {
    mcwf_step(StateVector::basis(8, 5), heff, 0.005, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kStepSizeViolation);
  }
  BandedStepper stepper(8, 0.0, 1.0, 0.0, 0.005);
  stepper.set_state(StateVector::basis(8, 5));
  CHECK_THROWS_AS(stepper.step(0.0, 0.0, 0.5, 0.01), Error);
}

TEST_CASE("banded stepper agrees with the dense step") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const SystemParams p{u(gen), 1.0, 0.2 * u(gen), 0.1 * u(gen), 3.0 * u(gen)};
    const std::size_t dim = 6 + static_cast<std::size_t>(trial % 4);
    const auto heff = effective_hamiltonian(build_hamiltonian(p, dim), p.kappa);
    BandedStepper banded(dim, p.delta, p.kappa, p.theta, 0.005);
    StateVector psi = StateVector::vacuum(dim);
    RandomStream rng(trial, 1);
    for (int k = 0; k < 3000; ++k) {
      // Raise the jump rate so both branches are exercised.
      const double r = 0.02 * rng.uniform();
      const double jp = banded.jump_probability();
      const auto dense = mcwf_step(psi, heff, 0.005, r);
      CHECK(jp == doctest::Approx(dense.jump_probability).epsilon(1e-10));
      const bool jumped = banded.step(p.drive_E, p.parametric_U, r, 0.01);
      REQUIRE(jumped == dense.jumped);
      psi = dense.state;
    }
    CHECK((banded.state().amplitudes() - psi.amplitudes()).norm() < 1e-10);
    CHECK(std::abs(banded.state().norm_squared() - 1.0) < 1e-12);
  }
}

TEST_CASE("state stays normalized over long runs") {
  BandedStepper s(10, 0.3, 1.0, 0.5, 0.005);
  RandomStream rng(4, 4);
  for (int k = 0; k < 200000; ++k) s.step(0.05, 0.005, rng.uniform(), 0.01);
  CHECK(std::abs(s.state().norm_squared() - 1.0) < 1e-12);
}

TEST_CASE("undriven trajectory emits nothing") {
  TrajectoryConfig c;
  c.duration = 500.0;
  const auto rec = run_trajectory(ContinuousDrive{{0.0, 1.0, 0.0, 0.0, 0.0}}, c);
  CHECK(rec.click_times.empty());
  auto pulsed = reference_pulses(5);
  pulsed.train.amplitude_E0 = 0.0;
  c.duration = pulsed.train.end_time();
  CHECK(run_trajectory(pulsed, c).click_times.empty());
}

TEST_CASE("trajectory configuration checks") {
  TrajectoryConfig c;
  c.step_dt = 0.02;
  CHECK_THROWS_AS(c.validate(1.0), Error);
  c.step_dt = 0.005;
  CHECK_NOTHROW(c.validate(1.0));
  CHECK_THROWS_AS(c.validate(4.0), Error);
  CHECK(TrajectoryConfig::defaults_for(4.0).step_dt == doctest::Approx(0.00125));
  auto pulsed = reference_pulses(10);
  c.duration = 100.0;
  CHECK_THROWS_AS(run_trajectory(pulsed, c), Error);
}

TEST_CASE("click rate matches kappa <n>") {
  TrajectoryConfig c;
  c.duration = 2e5;
  c.seed = 17;
  const auto rec = run_trajectory(ContinuousDrive{kOptimum}, c);
  CHECK_NOTHROW(rec.validate());
  const double n_ss = cw_steady_state(kOptimum, 10).mean_photon_number;
  const double expected = kOptimum.kappa * n_ss * c.duration;
  // Antibunched counts are sub-Poissonian, so sqrt(N) over-covers.
  CHECK(std::abs(static_cast<double>(rec.click_times.size()) - expected) < 3.0 * std::sqrt(expected));
  for (std::size_t i = 0; i < rec.click_times.size(); ++i) {
    const double k = rec.click_times[i] / c.step_dt;
    CHECK(std::abs(k - std::round(k)) < 1e-6);
  }
}

TEST_CASE("trajectories are reproducible per stream") {
  TrajectoryConfig c;
  c.duration = 20000.0;
  const auto a = run_trajectory(ContinuousDrive{kOptimum}, c, 3);
  const auto b = run_trajectory(ContinuousDrive{kOptimum}, c, 3);
  const auto other = run_trajectory(ContinuousDrive{kOptimum}, c, 4);
  CHECK(a.click_times == b.click_times);
  CHECK(a.click_times != other.click_times);
  CHECK(a.stream == 3);
}

TEST_CASE("batched trajectories equal single runs bit for bit") {
  SUBCASE("pulsed, partial final batch") {
    const auto drive = reference_pulses(300);
    TrajectoryConfig c;
    c.duration = drive.train.end_time();
    std::vector<std::uint64_t> streams(kBatchLanes + 3);
    std::iota(streams.begin(), streams.end(), 40);
    const auto batch = run_trajectory_batch(drive, c, streams);
    REQUIRE(batch.size() == streams.size());
    std::size_t clicks = 0;
    for (std::size_t i = 0; i < streams.size(); ++i) {
      const auto single = run_trajectory(drive, c, streams[i]);
      CHECK(single.click_times == batch[i].click_times);
      CHECK(batch[i].stream == streams[i]);
      CHECK(batch[i].pulse_count == 300);
      clicks += single.click_times.size();
    }
    CHECK(clicks > 0);
  }
  SUBCASE("continuous drive") {
    TrajectoryConfig c;
    c.duration = 3000.0;
    const std::vector<std::uint64_t> streams{5, 1, 9};
    const auto batch = run_trajectory_batch(ContinuousDrive{kOptimum}, c, streams);
    for (std::size_t i = 0; i < streams.size(); ++i) {
      CHECK(run_trajectory(ContinuousDrive{kOptimum}, c, streams[i]).click_times == batch[i].click_times);
    }
  }
}

TEST_CASE("sampled trajectory captures states") {
  TrajectoryConfig c;
  c.duration = 10.0;
  const std::vector<double> times{0.0, 5.0, 10.0};
  const auto s = run_trajectory_sampled(ContinuousDrive{kOptimum}, c, 0, times);
  REQUIRE(s.samples.size() == 3);
  CHECK(std::abs(s.samples[0][0] - 1.0) == 0.0);
  for (const auto& psi : s.samples) CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-12);
  CHECK_THROWS_AS(run_trajectory_sampled(ContinuousDrive{kOptimum}, c, 0, std::vector<double>{11.0}), Error);
}

TEST_CASE("ensemble density") {
  TrajectoryConfig c;
  c.duration = 5.0;
  const std::vector<double> times{5.0};
  SUBCASE("one trajectory is a pure state") {
    const auto rho = ensemble_density(ContinuousDrive{kOptimum}, c, 1, times);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho[0].elements());
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(es.eigenvalues().sum() - 1.0) < 1e-12);
  }
  SUBCASE("undriven cavity stays in vacuum") {
    const auto rho = ensemble_density(ContinuousDrive{{0.2, 1.0, 0.0, 0.0, 0.0}}, c, 8, times, 2);
    CHECK(std::abs(rho[0](0, 0) - 1.0) < 1e-14);
  }
  SUBCASE("needs at least one trajectory") {
    CHECK_THROWS_AS(ensemble_density(ContinuousDrive{kOptimum}, c, 0, times), Error);
  }
}

TEST_CASE("ensemble photon number relaxes to the stationary value") {
  TrajectoryConfig c;
  c.duration = 20.0;
  c.seed = 2;
  const std::vector<double> times{20.0};
  const auto est = ensemble_expectation(ContinuousDrive{kOptimum}, c, 2000, times, number_operator(10), 2);
  const double n_ss = cw_steady_state(kOptimum, 10).mean_photon_number;
  CHECK(std::abs(est[0].mean - n_ss) < 3.0 * est[0].std_error);
  CHECK(est[0].std_error > 0.0);
}
