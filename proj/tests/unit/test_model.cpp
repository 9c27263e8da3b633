#include <doctest.h>

#include <cmath>

#include "blockade/error.hpp"
#include "blockade/model.hpp"

using namespace blockade;
using units::kPi;

TEST_CASE("unit conventions") {
  CHECK(units::from_mhz(50.0) == doctest::Approx(0.05));
  CHECK(units::to_mhz(0.005) == doctest::Approx(5.0));
  CHECK(units::cycles_to_angular(1.0) == doctest::Approx(2.0 * kPi));
}

TEST_CASE("pump elimination") {
  const auto g0 = effective_pump_params({1.0, 0.01, 1.0, 0.0}, 0.0);
  CHECK(g0.parametric_U == doctest::Approx(0.02));
  CHECK(g0.theta == doctest::Approx(kPi / 2));

  const auto g1 = effective_pump_params({1.0, 0.01, 1.0, 0.0}, 0.25);
  CHECK(g1.parametric_U == doctest::Approx(0.0141421356).epsilon(1e-8));
  CHECK(g1.theta == doctest::Approx(kPi / 4));

  CHECK(effective_pump_params({0.0, 0.3, 2.0, 1.0}, 0.7).parametric_U == 0.0);
}

TEST_CASE("optimum drive conditions") {
  const auto c = optimal_drive_conditions(0.005, 0.0, 1.0);
  CHECK(c.drive_E == doctest::Approx(0.05));
  CHECK(c.theta == doctest::Approx(kPi / 2));
  CHECK(optimal_drive_conditions(0.003, 0.5, 1.0).theta == doctest::Approx(kPi / 4));
  CHECK(optimal_drive_conditions(0.2, 0.5, 1.0).theta == doctest::Approx(kPi / 4));
  CHECK(optimal_drive_conditions(0.0, 0.3, 1.0).drive_E == 0.0);
  CHECK_THROWS_AS(optimal_drive_conditions(0.005, 0.0, 0.0), Error);
}

TEST_CASE("drive envelope") {
  PulseTrain t;
  t.amplitude_E0 = 0.05;
  t.width_dt = 2.0;
  t.period = 24.0;
  t.pulse_count = 3;
  t.center_t0 = 12.0;
  CHECK(drive_envelope(t, 12.0) == doctest::Approx(0.05));
  CHECK(drive_envelope(t, 14.0) == doctest::Approx(0.05 * 0.36787944117));
  CHECK(drive_envelope(t, 36.0) == doctest::Approx(0.05));
  const double between = drive_envelope(t, 24.0);
  CHECK(between == doctest::Approx(2.0 * 0.05 * std::exp(-36.0)).epsilon(1e-10));
  CHECK(between < 1e-16);
  CHECK(drive_envelope(t, 1e6) == 0.0);
}

TEST_CASE("parametric envelope follows the optimum law") {
  PulseTrain t;
  CHECK(parametric_envelope(t, 0.0, 1.0, t.center_t0) == doctest::Approx(0.005));
  PulseTrain off = t;
  off.amplitude_E0 = 0.0;
  CHECK(parametric_envelope(off, 0.0, 1.0, t.center_t0) == 0.0);
  CHECK(parametric_envelope(t, 0.0, 1.0, t.center_t0 + t.width_dt) ==
        doctest::Approx(std::exp(-2.0) * 0.005));
}

TEST_CASE("pulse train validation") {
  auto t = PulseTrain::with_default_spacing(0.05, 2.0, 10);
  CHECK(t.period == doctest::Approx(24.0));
  CHECK(t.center_t0 == doctest::Approx(12.0));
  CHECK_NOTHROW(t.validate());
  t.period = 4.0;
  CHECK_THROWS_AS(t.validate(), Error);
  t.period = 24.0;
  t.width_dt = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("Hamiltonian construction") {
  const auto bare = build_hamiltonian({1.0, 1.0, 0.0, 0.0, 0.0}, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(bare(i, j) == Complex(i == j ? static_cast<double>(i) : 0.0, 0.0));

  const auto two = build_hamiltonian({0.0, 1.0, 0.0, 1.0, 0.0}, 3);
  CHECK(two(0, 2).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(two(2, 0).real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(two.elements().cwiseAbs().sum() == doctest::Approx(2.0 * std::sqrt(2.0)));

  const auto full = build_hamiltonian({0.0, 1.0, 0.05, 0.005, kPi / 2}, 10);
  CHECK(full.hermiticity_defect() < 1e-12);
  CHECK_THROWS_AS(build_hamiltonian({0.0, 1.0, 0.05, 0.005, 0.0}, 2), Error);
}

TEST_CASE("phase convention of the two-photon term") {
  const auto h = build_hamiltonian({0.0, 1.0, 0.0, 1.0, 0.3}, 3);
  // U e^{i theta} (a^dagger)^2 puts e^{i theta} sqrt(2) at <2|H|0>.
  CHECK(h(2, 0).real() == doctest::Approx(std::sqrt(2.0) * std::cos(0.3)));
  CHECK(h(2, 0).imag() == doctest::Approx(std::sqrt(2.0) * std::sin(0.3)));
}

TEST_CASE("cavity linewidth") {
  // 2 pi c / lambda / Q with c = 299792458 m/s, in rad/ns.
  CHECK(cavity_linewidth(1.5e-6, 1e6) == doctest::Approx(2.0 * M_PI * 299792458.0 / 1.5e-6 / 1e6 * 1e-9).epsilon(1e-12));
  CHECK(cavity_linewidth(1.5e-6, 1e6) == doctest::Approx(1.25577).epsilon(1e-5));
  CHECK(cavity_linewidth(1.5e-6, 2e6) == doctest::Approx(0.5 * cavity_linewidth(1.5e-6, 1e6)));
  CHECK(cavity_linewidth(3e-6, 1e6) == doctest::Approx(0.5 * cavity_linewidth(1.5e-6, 1e6)));
  CHECK_THROWS_AS(cavity_linewidth(0.0, 1e6), Error);
}

TEST_CASE("system parameter validation and warnings") {
  CHECK_THROWS_AS((SystemParams{0.0, 0.0, 0.05, 0.005, 0.0}.validate()), Error);
  CHECK_THROWS_AS((SystemParams{0.0, -1.0, 0.05, 0.005, 0.0}.validate()), Error);
  CHECK((SystemParams{0.0, 1.0, 0.05, 0.005, 0.0}.weak_drive_warnings().empty()));
  CHECK((SystemParams{0.0, 1.0, 0.1, 0.005, 0.0}.weak_drive_warnings().size() == 1));
  CHECK((SystemParams{0.0, 1.0, 0.2, 0.2, 0.0}.weak_drive_warnings().size() == 2));
}

TEST_CASE("phase wrapping") {
  CHECK(wrap_phase(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_phase(0.25) == doctest::Approx(0.25));
}
