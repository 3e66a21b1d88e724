#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ptm/pauli.hpp"

namespace ptm {

namespace detail {

inline double max_abs(const Matrix& m) {
  return m.cwiseAbs().maxCoeff();
}

// Trace of a matrix product without forming the product.
inline Complex trace_product(const Matrix& a, const Matrix& b) {
  return (a.transpose().cwiseProduct(b)).sum();
}

// Coefficients Tr[P_k M] for every Pauli basis element, computed by the
// recursive block split
//   Tr[(I (x) Q) M] = Tr[Q (M00 + M11)]      Tr[(X (x) Q) M] = Tr[Q (M01 + M10)]
//   Tr[(Y (x) Q) M] = Tr[Q i(M01 - M10)]     Tr[(Z (x) Q) M] = Tr[Q (M00 - M11)]
// which costs O(d^2 log d) instead of 4^n dense traces.
inline void pauli_transform_rec(const Matrix& m, Complex* out, std::size_t len) {
  const auto d = m.rows();
  if (d == 1) {
    out[0] = m(0, 0);
    return;
  }
  const auto h = d / 2;
  const std::size_t q = len / 4;
  const Matrix m00 = m.topLeftCorner(h, h);
  const Matrix m01 = m.topRightCorner(h, h);
  const Matrix m10 = m.bottomLeftCorner(h, h);
  const Matrix m11 = m.bottomRightCorner(h, h);
  pauli_transform_rec(m00 + m11, out, q);
  pauli_transform_rec(m01 + m10, out + q, q);
  pauli_transform_rec(Complex(0, 1) * (m01 - m10), out + 2 * q, q);
  pauli_transform_rec(m00 - m11, out + 3 * q, q);
}

// Inverse transform: sum_k c_k P_k assembled from the block structure.
inline Matrix pauli_assemble_rec(const Complex* c, std::size_t len,
                                 std::size_t dim) {
  if (dim == 1) {
    return (Matrix(1, 1) << c[0]).finished();
  }
  const std::size_t q = len / 4;
  const std::size_t h = dim / 2;
  const Matrix ni = pauli_assemble_rec(c, q, h);
  const Matrix nx = pauli_assemble_rec(c + q, q, h);
  const Matrix ny = pauli_assemble_rec(c + 2 * q, q, h);
  const Matrix nz = pauli_assemble_rec(c + 3 * q, q, h);
  Matrix out(dim, dim);
  out.topLeftCorner(h, h) = ni + nz;
  out.topRightCorner(h, h) = nx - Complex(0, 1) * ny;
  out.bottomLeftCorner(h, h) = nx + Complex(0, 1) * ny;
  out.bottomRightCorner(h, h) = ni - nz;
  return out;
}

}  // namespace detail

/// Coefficients r_k = Tr[P_k M] of a Hermitian operator in the Pauli basis
/// (no 1/d normalization). Throws if the imaginary residue exceeds the
/// Hermiticity tolerance, which signals a non-Hermitian input.
inline RealVector pauli_coefficients(const Matrix& op, std::size_t num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("operator dimension does not match qubit count");
  }
  const std::size_t len = basis_size(num_qubits);
  Eigen::VectorXcd c(len);
  detail::pauli_transform_rec(op, c.data(), len);
  const double imag_residue = c.imag().cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, detail::max_abs(op));
  if (imag_residue > hermiticity_tol * scale) {
    throw std::runtime_error("Pauli coefficients have imaginary residue " +
                             std::to_string(imag_residue) +
                             "; operator is not Hermitian");
  }
  return c.real();
}

/// Reassembles (1/d) sum_k r_k P_k from Pauli coefficients.
inline Matrix matrix_from_pauli_coefficients(const RealVector& coeffs,
                                             std::size_t num_qubits) {
  const std::size_t len = basis_size(num_qubits);
  if (static_cast<std::size_t>(coeffs.size()) != len) {
    throw std::invalid_argument("coefficient vector has wrong length");
  }
  const std::size_t d = dimension(num_qubits);
  Eigen::VectorXcd c = coeffs.cast<Complex>();
  return detail::pauli_assemble_rec(c.data(), len, d) / static_cast<double>(d);
}

/// A d x d complex density operator: Hermitian, unit trace, positive
/// semidefinite (all within tolerance). Validation happens at construction,
/// so downstream code can assume a valid state. Immutable.
class DensityMatrix {
 public:
  DensityMatrix(std::size_t num_qubits, Matrix entries)
      : num_qubits_(num_qubits), entries_(std::move(entries)) {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
    if (entries_.rows() != d || entries_.cols() != d) {
      throw std::invalid_argument("density matrix has wrong dimension");
    }
    const double herm_residue = detail::max_abs(entries_ - entries_.adjoint());
    if (herm_residue > hermiticity_tol) {
      throw std::invalid_argument("density matrix is not Hermitian (residue " +
                                  std::to_string(herm_residue) + ")");
    }
    const Complex tr = entries_.trace();
    if (std::abs(tr - Complex(1, 0)) > hermiticity_tol) {
      throw std::invalid_argument("density matrix trace differs from 1 by " +
                                  std::to_string(std::abs(tr - Complex(1, 0))));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_,
                                                 Eigen::EigenvaluesOnly);
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -psd_tol) {
      throw std::invalid_argument(
          "density matrix has negative eigenvalue " + std::to_string(min_eig));
    }
  }

  static DensityMatrix pure(std::size_t num_qubits, const Vector& ket) {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
    if (ket.size() != d) {
      throw std::invalid_argument("ket has wrong dimension");
    }
    const double norm = ket.norm();
    if (std::abs(norm - 1.0) > hermiticity_tol) {
      throw std::invalid_argument("ket is not normalized");
    }
    return DensityMatrix(num_qubits, ket * ket.adjoint());
  }

  static DensityMatrix maximally_mixed(std::size_t num_qubits) {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
    return DensityMatrix(num_qubits,
                         Matrix::Identity(d, d) / static_cast<double>(d));
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const Matrix& matrix() const { return entries_; }

  double purity() const {
    return detail::trace_product(entries_, entries_).real();
  }

 private:
  std::size_t num_qubits_;
  Matrix entries_;
};

/// Pauli coefficient vector of a state, r_k = Tr[P_k rho]. The first
/// component is 1 for any unit-trace operator.
class PauliVector {
 public:
  PauliVector(std::size_t num_qubits, RealVector coeffs)
      : num_qubits_(num_qubits), coeffs_(std::move(coeffs)) {
    if (static_cast<std::size_t>(coeffs_.size()) != basis_size(num_qubits)) {
      throw std::invalid_argument("Pauli vector has wrong length");
    }
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const RealVector& coefficients() const { return coeffs_; }
  double operator[](std::size_t k) const {
    return coeffs_(static_cast<Eigen::Index>(k));
  }

 private:
  std::size_t num_qubits_;
  RealVector coeffs_;
};

inline PauliVector vectorize(const DensityMatrix& rho) {
  return PauliVector(rho.num_qubits(),
                     pauli_coefficients(rho.matrix(), rho.num_qubits()));
}

inline DensityMatrix devectorize(const PauliVector& r) {
  if (std::abs(r[0] - 1.0) > hermiticity_tol) {
    throw std::invalid_argument("Pauli vector has r_0 != 1 (non-unit trace)");
  }
  return DensityMatrix(
      r.num_qubits(),
      matrix_from_pauli_coefficients(r.coefficients(), r.num_qubits()));
}

/// Expectation value Tr[P rho] via a dense trace. This is an independent
/// code path from vectorize(); the two agree to high precision and tests
/// hold them to that.
inline double pauli_expectation(const PauliString& p, const DensityMatrix& rho) {
  if (p.num_qubits() != rho.num_qubits()) {
    throw std::invalid_argument("Pauli string and state act on different "
                                "qubit counts");
  }
  const Complex value = detail::trace_product(p.matrix(), rho.matrix());
  if (std::abs(value.imag()) > hermiticity_tol) {
    throw std::runtime_error("Pauli expectation has imaginary part " +
                             std::to_string(value.imag()));
  }
  return value.real();
}

}  // namespace ptm
