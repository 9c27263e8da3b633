#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "blockade/fock.hpp"
#include "blockade/model.hpp"

// Master-equation layer: Liouvillian, stationary state, propagation and the
// regression-theorem two-time correlation g2(tau).
//
// Density matrices are column-stacked into vectors of length D^2, so that
// vec(A X B) = (B^T (x) A) vec(X).

namespace blockade {

CVector vectorize(const CMatrix& m);
CMatrix unvectorize(const CVector& v, std::size_t dim);

class Superoperator {
 public:
  Superoperator(std::size_t dim, CMatrix elements);

  std::size_t dim() const { return dim_; }
  const CMatrix& elements() const { return elements_; }

  CMatrix apply(const CMatrix& rho) const;

 private:
  std::size_t dim_;
  CMatrix elements_;
};

// rho -> -i[H, rho] + kappa (a rho a^dagger - {a^dagger a, rho} / 2).
Superoperator build_liouvillian(const OperatorMatrix& hamiltonian, double kappa);

// Solves L rho = 0 with the trace condition replacing the first row.
DensityMatrix steady_state(const Superoperator& liouvillian);

// e^{L tau} rho0 by Pade scaling-and-squaring. rho0 need not be trace-one.
CMatrix propagate(const Superoperator& liouvillian, const CMatrix& rho0, double tau);
DensityMatrix propagate(const Superoperator& liouvillian, const DensityMatrix& rho0, double tau);

// Cached e^{L h} for repeated stepping on a uniform grid.
class Propagator {
 public:
  Propagator(const Superoperator& liouvillian, double step);

  double step() const { return step_; }
  CVector advance(const CVector& vec_rho) const { return map_ * vec_rho; }
  const CMatrix& matrix() const { return map_; }

 private:
  double step_;
  CMatrix map_;
};

struct G2Point {
  double tau;
  double g2;
};

// Stationary quantities of a CW-driven cavity.
struct CwSteadyState {
  DensityMatrix rho;
  double mean_photon_number;
  double g2_zero;  // NaN when the mean photon number vanishes
};

CwSteadyState cw_steady_state(const SystemParams& params, std::size_t dim);

// g2(tau) = Tr{n e^{L tau}[a rho_ss a^dagger]} / Tr(n rho_ss)^2 for each tau.
// Uniform grids reuse a single step propagator.
std::vector<G2Point> g2_delay(const SystemParams& params, std::span<const double> tau_grid,
                              std::size_t dim);

// Tr(a^dagger a^dagger a a rho_ss) / <n>^2.
double g2_zero_cw(const SystemParams& params, std::size_t dim);

// tau grid 0, step, 2 step, ..., up to and including tau_max.
std::vector<double> uniform_grid(double tau_max, double step);

}  // namespace blockade
