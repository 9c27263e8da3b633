#include "blockade/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "blockade/error.hpp"

namespace blockade {

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

// Kronecker product; D^2 stays small enough that dense is fine.
CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void require_dim_match(const Superoperator& l, Eigen::Index rows) {
  if (idx(l.dim()) != rows) {
    throw Error(ErrorCode::kDimensionMismatch, "density matrix and Liouvillian differ in dimension");
  }
}

bool is_uniform(std::span<const double> grid, double& step) {
  if (grid.size() < 3) return false;
  step = grid[1] - grid[0];
  if (!(step > 0.0)) return false;
  for (std::size_t i = 2; i < grid.size(); ++i) {
    const double expected = grid[0] + static_cast<double>(i) * step;
    if (std::abs(grid[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) return false;
  }
  return true;
}

}  // namespace

CVector vectorize(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvectorize(const CVector& v, std::size_t dim) {
  if (v.size() != idx(dim * dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "vectorized matrix has the wrong length");
  }
  return Eigen::Map<const CMatrix>(v.data(), idx(dim), idx(dim));
}

Superoperator::Superoperator(std::size_t dim, CMatrix elements)
    : dim_(dim), elements_(std::move(elements)) {
  if (elements_.rows() != idx(dim * dim) || elements_.cols() != idx(dim * dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "superoperator must be D^2 x D^2");
  }
}

CMatrix Superoperator::apply(const CMatrix& rho) const {
  require_dim_match(*this, rho.rows());
  return unvectorize(elements_ * vectorize(rho), dim_);
}

Superoperator build_liouvillian(const OperatorMatrix& hamiltonian, double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be positive");
  const double defect = hamiltonian.hermiticity_defect();
  if (defect > kTolerances.hamiltonian_hermiticity * std::max(1.0, hamiltonian.elements().cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "Hamiltonian is not Hermitian (max |H - H^dagger| = " << defect << ")";
    throw Error(ErrorCode::kNonHermitian, os.str());
  }
  const std::size_t dim = hamiltonian.dim();
  const auto d = idx(dim);
  const CMatrix id = CMatrix::Identity(d, d);
  const CMatrix& h = hamiltonian.elements();
  const CMatrix a = annihilation_operator(dim).elements();
  const CMatrix n = a.adjoint() * a;

  const Complex i1(0.0, 1.0);
  CMatrix l = -i1 * (kron(id, h) - kron(h.transpose(), id));
  l += kappa * (kron(a.conjugate(), a) - 0.5 * kron(id, n) - 0.5 * kron(n.transpose(), id));
  return Superoperator(dim, std::move(l));
}

DensityMatrix steady_state(const Superoperator& liouvillian) {
  const std::size_t dim = liouvillian.dim();
  const auto d = idx(dim);
  const auto d2 = d * d;

  CMatrix system = liouvillian.elements();
  system.row(0).setZero();
  for (Eigen::Index k = 0; k < d; ++k) system(0, k * d + k) = 1.0;
  CVector rhs = CVector::Zero(d2);
  rhs[0] = 1.0;

  Eigen::FullPivLU<CMatrix> lu(system);
  if (lu.rank() < d2) {
    std::ostringstream os;
    os << "Liouvillian null space exceeds one dimension (rank " << lu.rank() << " of " << d2
       << " after trace replacement)";
    throw Error(ErrorCode::kDegenerateSteadyState, os.str());
  }
  const CVector x = lu.solve(rhs);

  const double scale = std::max(1.0, liouvillian.elements().cwiseAbs().maxCoeff());
  const double residual = (liouvillian.elements() * x).cwiseAbs().maxCoeff();
  if (residual > kTolerances.steady_state_residual * scale) {
    std::ostringstream os;
    os << "stationary residual " << residual << " exceeds tolerance";
    throw Error(ErrorCode::kDegenerateSteadyState, os.str());
  }
  CMatrix rho = unvectorize(x, dim);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace();
  return DensityMatrix(std::move(rho));
}

CMatrix propagate(const Superoperator& liouvillian, const CMatrix& rho0, double tau) {
  if (tau < 0.0) throw Error(ErrorCode::kInvalidArgument, "propagation time must be >= 0");
  require_dim_match(liouvillian, rho0.rows());
  if (tau == 0.0) return rho0;
  const CMatrix map = (liouvillian.elements() * tau).exp();
  return unvectorize(map * vectorize(rho0), liouvillian.dim());
}

DensityMatrix propagate(const Superoperator& liouvillian, const DensityMatrix& rho0, double tau) {
  return DensityMatrix::unchecked(propagate(liouvillian, rho0.elements(), tau));
}

Propagator::Propagator(const Superoperator& liouvillian, double step) : step_(step) {
  if (step < 0.0) throw Error(ErrorCode::kInvalidArgument, "propagation step must be >= 0");
  map_ = (liouvillian.elements() * step).exp();
}

CwSteadyState cw_steady_state(const SystemParams& params, std::size_t dim) {
  const OperatorMatrix h = build_hamiltonian(params, dim);
  DensityMatrix rho = steady_state(build_liouvillian(h, params.kappa));
  const CMatrix& r = rho.elements();
  double mean_n = 0.0;
  double pair = 0.0;
  for (Eigen::Index k = 0; k < r.rows(); ++k) {
    const double p = r(k, k).real();
    mean_n += static_cast<double>(k) * p;
    pair += static_cast<double>(k) * static_cast<double>(k - 1) * p;
  }
  const double g2 = mean_n > kTolerances.min_mean_photon_number
                        ? pair / (mean_n * mean_n)
                        : std::numeric_limits<double>::quiet_NaN();
  return {std::move(rho), mean_n, g2};
}

double g2_zero_cw(const SystemParams& params, std::size_t dim) {
  const CwSteadyState ss = cw_steady_state(params, dim);
  if (!(ss.mean_photon_number > kTolerances.min_mean_photon_number)) {
    throw Error(ErrorCode::kUndefinedCorrelation, "mean photon number vanishes; g2 is undefined");
  }
  return ss.g2_zero;
}

std::vector<G2Point> g2_delay(const SystemParams& params, std::span<const double> tau_grid,
                              std::size_t dim) {
  for (double t : tau_grid) {
    if (t < 0.0) throw Error(ErrorCode::kInvalidArgument, "delays must be >= 0");
  }
  const OperatorMatrix h = build_hamiltonian(params, dim);
  const Superoperator l = build_liouvillian(h, params.kappa);
  const DensityMatrix rho = steady_state(l);
  const CMatrix a = annihilation_operator(dim).elements();
  const CMatrix n = a.adjoint() * a;

  const double mean_n = expectation(OperatorMatrix(n), rho).real();
  if (!(mean_n > kTolerances.min_mean_photon_number)) {
    throw Error(ErrorCode::kUndefinedCorrelation, "mean photon number vanishes; g2 is undefined");
  }
  const double norm = mean_n * mean_n;

  // Tr(n X) as a row vector acting on vec(X). The seed a rho a^dagger is
  // propagated as-is; its trace is <n>, not one.
  const CVector n_row = vectorize(n.transpose());
  const CVector seed = vectorize(a * rho.elements() * a.adjoint());
  auto correlate = [&](const CVector& v) { return (n_row.transpose() * v)(0).real() / norm; };

  std::vector<G2Point> out;
  out.reserve(tau_grid.size());
  double step = 0.0;
  if (is_uniform(tau_grid, step)) {
    const Propagator stepper(l, step);
    CVector v = tau_grid[0] > 0.0 ? vectorize(propagate(l, unvectorize(seed, dim), tau_grid[0]))
                                  : seed;
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
      if (i > 0) v = stepper.advance(v);
      out.push_back({tau_grid[i], correlate(v)});
    }
  } else {
    const CMatrix seed_m = unvectorize(seed, dim);
    for (double t : tau_grid) {
      out.push_back({t, correlate(vectorize(propagate(l, seed_m, t)))});
    }
  }
  return out;
}

std::vector<double> uniform_grid(double tau_max, double step) {
  if (!(step > 0.0) || tau_max < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "grid needs step > 0 and tau_max >= 0");
  }
  const auto count = static_cast<std::size_t>(std::floor(tau_max / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = static_cast<double>(i) * step;
  return grid;
}

}  // namespace blockade
