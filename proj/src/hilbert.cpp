#include "hom/hilbert.hpp"

#include <functional>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace hom {
namespace {

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) throw DimensionError(std::string(what) + ": subsystem dimensions differ");
}

}  // namespace

std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

StateVector::StateVector(Eigen::VectorXcd amplitudes, Dims dims)
    : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != total_dim(dims_)) {
    throw DimensionError("StateVector: length " + std::to_string(amplitudes_.size()) +
                         " does not match product of dims " + std::to_string(total_dim(dims_)));
  }
}

StateVector StateVector::basis(Dims dims, std::size_t index) {
  const auto d = total_dim(dims);
  if (index >= d) throw DimensionError("StateVector::basis: index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {std::move(v), std::move(dims)};
}

StateVector StateVector::zero(Dims dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return {Eigen::VectorXcd::Zero(d), std::move(dims)};
}

OperatorMatrix::OperatorMatrix(Eigen::MatrixXcd entries, Dims dims)
    : entries_(std::move(entries)), dims_(std::move(dims)) {
  const auto d = total_dim(dims_);
  if (entries_.rows() != entries_.cols() || static_cast<std::size_t>(entries_.rows()) != d) {
    throw DimensionError("OperatorMatrix: shape " + std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()) + " does not match dims product " +
                         std::to_string(d));
  }
}

OperatorMatrix OperatorMatrix::identity(Dims dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return {Eigen::MatrixXcd::Identity(d, d), std::move(dims)};
}

OperatorMatrix OperatorMatrix::zero(Dims dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return {Eigen::MatrixXcd::Zero(d, d), std::move(dims)};
}

OperatorMatrix OperatorMatrix::adjoint() const { return {entries_.adjoint(), dims_}; }

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& other) {
  require_same_dims(dims_, other.dims_, "operator+");
  entries_ += other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& other) {
  require_same_dims(dims_, other.dims_, "operator-");
  entries_ -= other.entries_;
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx scale) {
  entries_ *= scale;
  return *this;
}

OperatorMatrix operator+(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs += rhs; }
OperatorMatrix operator-(OperatorMatrix lhs, const OperatorMatrix& rhs) { return lhs -= rhs; }

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_dims(lhs.dims(), rhs.dims(), "operator*");
  return {lhs.entries() * rhs.entries(), lhs.dims()};
}

OperatorMatrix operator*(cplx scale, OperatorMatrix op) { return op *= scale; }

Dims protocol_dims(std::size_t n_max) { return {3, 3, n_max + 1, n_max + 1}; }

std::size_t flatten(const BasisIndex& index, std::size_t n_max) {
  const std::size_t nc = n_max + 1;
  if (index.cav1 >= nc || index.cav2 >= nc) throw DimensionError("flatten: photon number above n_max");
  const auto i1 = static_cast<std::size_t>(index.ion1);
  const auto i2 = static_cast<std::size_t>(index.ion2);
  return ((i1 * 3 + i2) * nc + index.cav1) * nc + index.cav2;
}

BasisIndex unflatten(std::size_t flat, std::size_t n_max) {
  const std::size_t nc = n_max + 1;
  if (flat >= 9 * nc * nc) throw DimensionError("unflatten: index out of range");
  BasisIndex out;
  out.cav2 = flat % nc;
  flat /= nc;
  out.cav1 = flat % nc;
  flat /= nc;
  out.ion2 = static_cast<IonLevel>(flat % 3);
  out.ion1 = static_cast<IonLevel>(flat / 3);
  return out;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  const Eigen::Index da = ea.rows();
  const Eigen::Index db = eb.rows();
  Eigen::MatrixXcd out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i) {
    for (Eigen::Index j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = ea(i, j) * eb;
    }
  }
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return {std::move(out), std::move(dims)};
}

OperatorMatrix embed(const OperatorMatrix& op, std::size_t subsystem, const Dims& dims) {
  if (subsystem >= dims.size()) throw DimensionError("embed: subsystem index out of range");
  if (op.size() != dims[subsystem]) {
    throw DimensionError("embed: operator dimension " + std::to_string(op.size()) +
                         " does not match subsystem dimension " + std::to_string(dims[subsystem]));
  }
  std::size_t left = 1;
  for (std::size_t k = 0; k < subsystem; ++k) left *= dims[k];
  std::size_t right = 1;
  for (std::size_t k = subsystem + 1; k < dims.size(); ++k) right *= dims[k];

  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto r = static_cast<Eigen::Index>(right);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index l = 0; l < static_cast<Eigen::Index>(left); ++l) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const cplx v = op.entries()(i, j);
        if (v == cplx{}) continue;
        const Eigen::Index row0 = (l * n + i) * r;
        const Eigen::Index col0 = (l * n + j) * r;
        for (Eigen::Index k = 0; k < r; ++k) out(row0 + k, col0 + k) = v;
      }
    }
  }
  return {std::move(out), dims};
}

OperatorMatrix matrix_exp(const OperatorMatrix& a, cplx scale) {
  const Eigen::MatrixXcd scaled = scale * a.entries();
  return {scaled.exp(), a.dims()};
}

StateVector apply(const OperatorMatrix& op, const StateVector& psi) {
  require_same_dims(op.dims(), psi.dims(), "apply");
  return {op.entries() * psi.amplitudes(), psi.dims()};
}

cplx inner(const StateVector& psi, const StateVector& chi) {
  require_same_dims(psi.dims(), chi.dims(), "inner");
  return psi.amplitudes().dot(chi.amplitudes());
}

double norm2(const StateVector& psi) { return psi.amplitudes().squaredNorm(); }

StateVector normalize(const StateVector& psi) {
  const double n2 = norm2(psi);
  if (!(n2 > 0.0)) throw std::domain_error("normalize: zero vector");
  return {psi.amplitudes() / std::sqrt(n2), psi.dims()};
}

cplx expectation(const StateVector& psi, const OperatorMatrix& op) {
  require_same_dims(op.dims(), psi.dims(), "expectation");
  return psi.amplitudes().dot(op.entries() * psi.amplitudes());
}

CompressedOperator compress(const OperatorMatrix& op) {
  const auto& e = op.entries();
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    for (Eigen::Index j = 0; j < e.cols(); ++j) {
      if (e(i, j) != cplx{}) triplets.emplace_back(i, j, e(i, j));
    }
  }
  CompressedOperator out(e.rows(), e.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  out.makeCompressed();
  return out;
}

double hermiticity_defect(const Eigen::MatrixXcd& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace hom
