#include "blockade/fock.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "blockade/error.hpp"

namespace blockade {

namespace {

void require_dim(std::size_t dim) {
  if (dim < 2) {
    throw Error(ErrorCode::kInvalidDimension,
                "Fock truncation must be at least 2, got " + std::to_string(dim));
  }
}

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": " << a << " vs " << b;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

StateVector::StateVector(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() < 1) {
    throw Error(ErrorCode::kInvalidDimension, "state vector must be non-empty");
  }
}

StateVector StateVector::basis(std::size_t dim, std::size_t n) {
  if (n >= dim) {
    throw Error(ErrorCode::kInvalidArgument, "basis index outside truncation");
  }
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(n)] = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::normalized() const {
  const double norm = amplitudes_.norm();
  if (!(norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero state");
  }
  return StateVector(amplitudes_ / norm);
}

OperatorMatrix::OperatorMatrix(CMatrix elements) : elements_(std::move(elements)) {
  if (elements_.rows() != elements_.cols() || elements_.rows() < 1) {
    throw Error(ErrorCode::kInvalidDimension, "operator must be a non-empty square matrix");
  }
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return OperatorMatrix(CMatrix::Identity(d, d));
}

OperatorMatrix OperatorMatrix::zero(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return OperatorMatrix(CMatrix::Zero(d, d));
}

double OperatorMatrix::hermiticity_defect() const {
  return max_abs(elements_ - elements_.adjoint());
}

bool OperatorMatrix::is_hermitian(double tol) const { return hermiticity_defect() <= tol; }

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.dim(), b.dim(), "operator sum");
  return OperatorMatrix(a.elements_ + b.elements_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.dim(), b.dim(), "operator difference");
  return OperatorMatrix(a.elements_ - b.elements_);
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same(a.dim(), b.dim(), "operator product");
  return OperatorMatrix(a.elements_ * b.elements_);
}

OperatorMatrix operator*(Complex s, const OperatorMatrix& a) {
  return OperatorMatrix(s * a.elements_);
}

StateVector operator*(const OperatorMatrix& a, const StateVector& psi) {
  require_same(a.dim(), psi.dim(), "operator on state");
  return StateVector(a.elements_ * psi.amplitudes());
}

DensityMatrix::DensityMatrix(CMatrix elements) : elements_(std::move(elements)) {
  if (elements_.rows() != elements_.cols() || elements_.rows() < 1) {
    throw Error(ErrorCode::kInvalidDimension, "density matrix must be square");
  }
  const auto& tol = kTolerances;
  if (hermiticity_defect() > tol.hermiticity) {
    throw Error(ErrorCode::kInvalidArgument, "density matrix is not Hermitian");
  }
  if (std::abs(trace() - Complex(1.0)) > tol.unit_trace) {
    throw Error(ErrorCode::kInvalidArgument, "density matrix trace differs from one");
  }
  if (min_eigenvalue() < -tol.positivity) {
    throw Error(ErrorCode::kInvalidArgument, "density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::unchecked(CMatrix elements) {
  return DensityMatrix(std::move(elements), NoCheck{});
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const CVector& v = psi.amplitudes();
  return DensityMatrix(v * v.adjoint(), NoCheck{});
}

double DensityMatrix::hermiticity_defect() const {
  return max_abs(elements_ - elements_.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  // Eigenvalues of the Hermitian part; the anti-Hermitian part is bounded
  // separately by hermiticity_defect().
  const CMatrix herm = 0.5 * (elements_ + elements_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

OperatorMatrix annihilation_operator(std::size_t dim) {
  require_dim(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix a = CMatrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return OperatorMatrix(std::move(a));
}

OperatorMatrix creation_operator(std::size_t dim) { return annihilation_operator(dim).adjoint(); }

OperatorMatrix number_operator(std::size_t dim) {
  require_dim(dim);
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix n = CMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    n(k, k) = static_cast<double>(k);
  }
  return OperatorMatrix(std::move(n));
}

Complex expectation(const OperatorMatrix& op, const StateVector& psi) {
  require_same(op.dim(), psi.dim(), "expectation");
  const CVector& v = psi.amplitudes();
  return v.dot(op.elements() * v);
}

Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho) {
  require_same(op.dim(), rho.dim(), "expectation");
  // Tr(A rho) without forming the product.
  return (op.elements().transpose().cwiseProduct(rho.elements())).sum();
}

}  // namespace blockade
