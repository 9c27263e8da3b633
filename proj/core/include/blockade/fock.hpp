#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "blockade/tolerances.hpp"

// Truncated Fock-space linear algebra for a single bosonic mode.
//
// All objects are dense: the truncation never exceeds a few dozen levels, so
// sparse storage would only add bookkeeping.

namespace blockade {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

class StateVector {
 public:
  // |n> in a space of dimension dim.
  static StateVector basis(std::size_t dim, std::size_t n);
  static StateVector vacuum(std::size_t dim) { return basis(dim, 0); }

  explicit StateVector(CVector amplitudes);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }
  Complex operator[](std::size_t n) const { return amplitudes_[static_cast<Eigen::Index>(n)]; }

  double norm_squared() const { return amplitudes_.squaredNorm(); }

  // Returns a copy with unit norm. A zero vector cannot be normalized.
  StateVector normalized() const;

 private:
  CVector amplitudes_;
};

class OperatorMatrix {
 public:
  explicit OperatorMatrix(CMatrix elements);

  static OperatorMatrix identity(std::size_t dim);
  static OperatorMatrix zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(elements_.rows()); }
  const CMatrix& elements() const { return elements_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return elements_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  OperatorMatrix adjoint() const { return OperatorMatrix(elements_.adjoint()); }
  bool is_hermitian(double tol) const;
  // Largest elementwise |A - A^dagger|.
  double hermiticity_defect() const;

  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& a);
  friend StateVector operator*(const OperatorMatrix& a, const StateVector& psi);

 private:
  CMatrix elements_;
};

class DensityMatrix {
 public:
  // Validates the density-matrix invariants (Hermitian, unit trace, positive)
  // against kTolerances and throws on violation.
  explicit DensityMatrix(CMatrix elements);

  // Skips validation; for intermediate results such as a rho a^dagger that
  // are not trace-one by construction.
  static DensityMatrix unchecked(CMatrix elements);
  static DensityMatrix pure(const StateVector& psi);

  std::size_t dim() const { return static_cast<std::size_t>(elements_.rows()); }
  const CMatrix& elements() const { return elements_; }
  Complex operator()(std::size_t row, std::size_t col) const {
    return elements_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
  }

  Complex trace() const { return elements_.trace(); }
  double min_eigenvalue() const;
  double hermiticity_defect() const;

 private:
  struct NoCheck {};
  DensityMatrix(CMatrix elements, NoCheck) : elements_(std::move(elements)) {}

  CMatrix elements_;
};

// a with a[n-1, n] = sqrt(n).
OperatorMatrix annihilation_operator(std::size_t dim);
OperatorMatrix creation_operator(std::size_t dim);
// diag(0, 1, ..., dim-1), identical to a^dagger a.
OperatorMatrix number_operator(std::size_t dim);

Complex expectation(const OperatorMatrix& op, const StateVector& psi);
Complex expectation(const OperatorMatrix& op, const DensityMatrix& rho);

}  // namespace blockade
