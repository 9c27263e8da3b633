#pragma once

namespace blockade {

// Numerical tolerances shared by every module. Validation code and tests read
// these instead of hard-coding their own thresholds.
struct Tolerances {
  double state_norm = 1e-12;
  double hermiticity = 1e-10;
  double unit_trace = 1e-10;
  double positivity = 1e-8;
  double hamiltonian_hermiticity = 1e-12;
  double trace_preservation = 1e-10;
  double steady_state_residual = 1e-10;
  double propagation_trace = 1e-9;
  double imaginary_expectation = 1e-10;
  // Smallest mean photon number for which g2 is considered defined.
  double min_mean_photon_number = 1e-14;
};

inline constexpr Tolerances kTolerances{};

}  // namespace blockade
