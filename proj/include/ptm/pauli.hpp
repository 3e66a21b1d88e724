#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace ptm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Numerical tolerances used across the library.
inline constexpr double hermiticity_tol = 1e-10;  // Hermiticity / trace checks
inline constexpr double psd_tol = 1e-9;           // eigenvalue positivity slack
inline constexpr double tp_tol = 1e-9;            // trace-preservation residual

// Dense-only representation; the transfer matrix is 4096x4096 at six qubits,
// which is the practical ceiling for this storage scheme.
inline constexpr std::size_t max_qubits = 6;

inline std::size_t dimension(std::size_t num_qubits) {
  if (num_qubits < 1 || num_qubits > max_qubits) {
    throw std::invalid_argument("qubit count must be in [1, " +
                                std::to_string(max_qubits) + "], got " +
                                std::to_string(num_qubits));
  }
  return std::size_t{1} << num_qubits;
}

// Number of Pauli basis elements, 4^n.
inline std::size_t basis_size(std::size_t num_qubits) {
  return std::size_t{1} << (2 * num_qubits);
}

// Single-qubit operator basis: index 0..3 maps to I, X, Y, Z.
inline const Matrix& sigma(int digit) {
  static const Matrix table[4] = {
      (Matrix(2, 2) << 1, 0, 0, 1).finished(),
      (Matrix(2, 2) << 0, 1, 1, 0).finished(),
      (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(),
      (Matrix(2, 2) << 1, 0, 0, -1).finished()};
  if (digit < 0 || digit > 3) {
    throw std::invalid_argument("Pauli digit must be in {0,1,2,3}");
  }
  return table[digit];
}

inline Matrix hadamard_gate() {
  const double s = 1.0 / std::sqrt(2.0);
  return (Matrix(2, 2) << s, s, s, -s).finished();
}

inline Matrix phase_gate() {
  return (Matrix(2, 2) << 1, 0, 0, Complex(0, 1)).finished();
}

// Control on the first (most significant) qubit, target on the second.
inline Matrix cnot_gate() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
  return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// An element of the n-qubit Pauli basis, addressed by its lexicographic
/// index k in [0, 4^n). The base-4 digits of k select the tensor factors,
/// with the most significant digit acting on qubit 1. Index 0 is the
/// identity on all qubits.
class PauliString {
 public:
  PauliString(std::size_t num_qubits, std::size_t index)
      : num_qubits_(num_qubits), index_(index) {
    dimension(num_qubits);  // range-checks the qubit count
    if (index >= ptm::basis_size(num_qubits)) {
      throw std::invalid_argument("Pauli index " + std::to_string(index) +
                                  " out of range for " +
                                  std::to_string(num_qubits) + " qubit(s)");
    }
  }

  static PauliString from_digits(const std::vector<int>& digits) {
    std::size_t index = 0;
    for (int d : digits) {
      if (d < 0 || d > 3) {
        throw std::invalid_argument("Pauli digit must be in {0,1,2,3}");
      }
      index = 4 * index + static_cast<std::size_t>(d);
    }
    return PauliString(digits.size(), index);
  }

  // Labels use one character per qubit, e.g. "XY" for X (x) Y.
  static PauliString from_label(std::string_view label) {
    std::vector<int> digits;
    digits.reserve(label.size());
    for (char c : label) {
      switch (c) {
        case 'I': digits.push_back(0); break;
        case 'X': digits.push_back(1); break;
        case 'Y': digits.push_back(2); break;
        case 'Z': digits.push_back(3); break;
        default:
          throw std::invalid_argument(std::string("invalid Pauli label char '") +
                                      c + "'");
      }
    }
    return from_digits(digits);
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t index() const { return index_; }

  int digit(std::size_t qubit) const {
    return static_cast<int>((index_ >> (2 * (num_qubits_ - 1 - qubit))) & 3);
  }

  std::vector<int> digits() const {
    std::vector<int> out(num_qubits_);
    for (std::size_t q = 0; q < num_qubits_; ++q) out[q] = digit(q);
    return out;
  }

  std::string label() const {
    static constexpr char chars[] = {'I', 'X', 'Y', 'Z'};
    std::string out(num_qubits_, 'I');
    for (std::size_t q = 0; q < num_qubits_; ++q) out[q] = chars[digit(q)];
    return out;
  }

  bool is_identity() const { return index_ == 0; }

  // Dense Kronecker product of the single-qubit factors.
  Matrix matrix() const {
    Matrix out = sigma(digit(0));
    for (std::size_t q = 1; q < num_qubits_; ++q) out = kron(out, sigma(digit(q)));
    return out;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.num_qubits_ == b.num_qubits_ && a.index_ == b.index_;
  }

 private:
  std::size_t num_qubits_;
  std::size_t index_;
};

}  // namespace ptm
