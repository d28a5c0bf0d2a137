#pragma once

// Dense complex linear algebra over the composite ion (x) ion (x) cavity (x) cavity space.
//
// Basis ordering is fixed: (ion1, ion2, cav1, cav2), row-major, so the last
// subsystem varies fastest. Ion levels are ordered a=0, b=1, c=2.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace hom {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;
using CompressedOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t total_dim(const Dims& dims);

class StateVector {
 public:
  StateVector(Eigen::VectorXcd amplitudes, Dims dims);

  /// Unit vector on a single flattened basis index.
  static StateVector basis(Dims dims, std::size_t index);
  static StateVector zero(Dims dims);

  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() { return amplitudes_; }
  const Dims& dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }
  cplx operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

 private:
  Eigen::VectorXcd amplitudes_;
  Dims dims_;
};

class OperatorMatrix {
 public:
  OperatorMatrix(Eigen::MatrixXcd entries, Dims dims);

  static OperatorMatrix identity(Dims dims);
  static OperatorMatrix zero(Dims dims);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::MatrixXcd& entries() { return entries_; }
  const Dims& dims() const { return dims_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  cplx operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  OperatorMatrix adjoint() const;

  OperatorMatrix& operator+=(const OperatorMatrix& other);
  OperatorMatrix& operator-=(const OperatorMatrix& other);
  OperatorMatrix& operator*=(cplx scale);

 private:
  Eigen::MatrixXcd entries_;
  Dims dims_;
};

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs);
OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(cplx scale, OperatorMatrix op);

enum class IonLevel : int { kA = 0, kB = 1, kC = 2 };

/// Labels of one product basis state.
struct BasisIndex {
  IonLevel ion1 = IonLevel::kA;
  IonLevel ion2 = IonLevel::kA;
  std::size_t cav1 = 0;
  std::size_t cav2 = 0;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

/// Dimension list [3, 3, n_max+1, n_max+1].
Dims protocol_dims(std::size_t n_max);
std::size_t flatten(const BasisIndex& index, std::size_t n_max);
BasisIndex unflatten(std::size_t flat, std::size_t n_max);

/// entries[(i*dB + k), (j*dB + l)] = A[i,j] * B[k,l].
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

/// Lifts a single-subsystem operator to the full space, identity elsewhere.
OperatorMatrix embed(const OperatorMatrix& op, std::size_t subsystem, const Dims& dims);

/// exp(scale * A). Scaling and squaring with a degree-13 Pade approximant.
OperatorMatrix matrix_exp(const OperatorMatrix& a, cplx scale);

StateVector apply(const OperatorMatrix& op, const StateVector& psi);
cplx inner(const StateVector& psi, const StateVector& chi);
double norm2(const StateVector& psi);
StateVector normalize(const StateVector& psi);
cplx expectation(const StateVector& psi, const OperatorMatrix& op);

/// Sparse copy that keeps only entries which are not exactly zero.
CompressedOperator compress(const OperatorMatrix& op);

/// Max-abs entry of A - A^dagger.
double hermiticity_defect(const Eigen::MatrixXcd& a);

}  // namespace hom
