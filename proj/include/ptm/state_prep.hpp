#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "ptm/channel.hpp"
#include "ptm/density_matrix.hpp"
#include "ptm/pauli.hpp"

namespace ptm {

enum class Protocol { dptm, sqpt };

inline std::string to_string(Protocol p) {
  return p == Protocol::dptm ? "dptm" : "sqpt";
}

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "dptm") return Protocol::dptm;
  if (s == "sqpt") return Protocol::sqpt;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

/// Input state j of the direct reconstruction protocol: the maximally
/// mixed state for j = 0 and (1 + P_j)/d otherwise. All of them are valid
/// density operators, and the index matches the transfer-matrix column
/// they probe. The mixed members are built directly as density matrices;
/// preparing them by entangling and tracing out an ancilla, or by random
/// pure-state draws, yields the same operator at this level.
inline DensityMatrix dptm_state(std::size_t j, std::size_t num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  if (j >= basis_size(num_qubits)) {
    throw std::invalid_argument("state index out of range");
  }
  if (j == 0) return DensityMatrix::maximally_mixed(num_qubits);
  Matrix m = (Matrix::Identity(d, d) + PauliString(num_qubits, j).matrix()) /
             static_cast<double>(d);
  return DensityMatrix(num_qubits, std::move(m));
}

namespace detail {

// Single-qubit standard-tomography input states, in the fixed order
// |1>, |+>, |i>, |0>. The order is part of the contract: permuting it
// changes the reconstruction matrix and every recombination formula.
inline Matrix sqpt_single_state(int digit) {
  switch (digit) {
    case 0: return (sigma(0) - sigma(3)) / 2.0;  // |1><1|
    case 1: return (sigma(0) + sigma(1)) / 2.0;  // |+><+|
    case 2: return (sigma(0) + sigma(2)) / 2.0;  // |i><i|
    case 3: return (sigma(0) + sigma(3)) / 2.0;  // |0><0|
    default: throw std::invalid_argument("state digit must be in {0,1,2,3}");
  }
}

}  // namespace detail

/// Input state j of standard process tomography: the Kronecker product of
/// single-qubit states selected by the base-4 digits of j.
inline DensityMatrix sqpt_state(std::size_t j, std::size_t num_qubits) {
  if (j >= basis_size(num_qubits)) {
    throw std::invalid_argument("state index out of range");
  }
  const PauliString digits(num_qubits, j);
  Matrix m = detail::sqpt_single_state(digits.digit(0));
  for (std::size_t q = 1; q < num_qubits; ++q) {
    m = kron(m, detail::sqpt_single_state(digits.digit(q)));
  }
  return DensityMatrix(num_qubits, std::move(m));
}

namespace detail {

// beta_Q and its inverse for one qubit, exact rational entries.
inline RealMatrix sqpt_beta_one_qubit() {
  RealMatrix b(4, 4);
  b << 1, 1, 1, 1,
       0, 1, 0, 0,
       0, 0, 1, 0,
      -1, 0, 0, 1;
  return b;
}

inline RealMatrix sqpt_beta_inv_one_qubit() {
  RealMatrix b(4, 4);
  b << 1, -1, -1, -1,
       0,  2,  0,  0,
       0,  0,  2,  0,
       1, -1, -1,  1;
  return b / 2.0;
}

inline RealMatrix kron_real(const RealMatrix& a, const RealMatrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

inline RealMatrix kron_power(const RealMatrix& a, std::size_t n) {
  RealMatrix out = a;
  for (std::size_t q = 1; q < n; ++q) out = kron_real(out, a);
  return out;
}

}  // namespace detail

/// One sparse entry of a reconstruction-matrix column.
struct SparseEntry {
  std::size_t row;
  double value;
};

/// Nonzero entries of column j of the n-fold Kronecker power of the
/// single-qubit inverse sQPT reconstruction matrix. Each measurement row k
/// listed here contributes value * M_ik to the entry Gamma_ij. Computed
/// from the base-4 digits of j, so it stays cheap at qubit counts far
/// beyond the dense-simulation range.
inline std::vector<SparseEntry> sqpt_beta_inv_column(std::size_t j,
                                                     std::size_t num_qubits) {
  // Per-digit sparse columns of the single-qubit inverse.
  struct DigitEntry {
    std::size_t row;
    double value;
  };
  static const std::vector<DigitEntry> columns[4] = {
      {{0, 0.5}, {3, 0.5}},
      {{0, -0.5}, {1, 1.0}, {3, -0.5}},
      {{0, -0.5}, {2, 1.0}, {3, -0.5}},
      {{0, -0.5}, {3, 0.5}}};
  if (j >= basis_size(num_qubits)) {
    throw std::invalid_argument("column index out of range");
  }
  std::vector<SparseEntry> result{{0, 1.0}};
  for (std::size_t q = 0; q < num_qubits; ++q) {
    const int digit =
        static_cast<int>((j >> (2 * (num_qubits - 1 - q))) & 3);
    std::vector<SparseEntry> next;
    next.reserve(result.size() * columns[digit].size());
    for (const SparseEntry& acc : result) {
      for (const DigitEntry& e : columns[digit]) {
        next.push_back({4 * acc.row + e.row, acc.value * e.value});
      }
    }
    result = std::move(next);
  }
  return result;
}

/// Number of measurements combined into a single sQPT entry of column j.
inline std::size_t sqpt_column_nonzeros(std::size_t j, std::size_t num_qubits) {
  static constexpr std::size_t per_digit[4] = {2, 3, 3, 2};
  if (j >= basis_size(num_qubits)) {
    throw std::invalid_argument("column index out of range");
  }
  std::size_t count = 1;
  for (std::size_t q = 0; q < num_qubits; ++q) {
    count *= per_digit[(j >> (2 * (num_qubits - 1 - q))) & 3];
  }
  return count;
}

/// The matrix beta_ij = Tr[P_i rho_j] of a state family together with its
/// inverse. For the two protocol families both are built from exact closed
/// forms; custom families go through LU inversion with a singularity check.
class ReconstructionMatrix {
 public:
  ReconstructionMatrix(RealMatrix beta, RealMatrix inverse)
      : beta_(std::move(beta)), inverse_(std::move(inverse)) {
    const auto len = beta_.rows();
    if (beta_.cols() != len || inverse_.rows() != len ||
        inverse_.cols() != len) {
      throw std::invalid_argument("reconstruction matrix must be square");
    }
    const double residue =
        (beta_ * inverse_ - RealMatrix::Identity(len, len)).cwiseAbs().maxCoeff();
    if (residue > 1e-10) {
      throw std::runtime_error(
          "reconstruction matrix inverse check failed (residue " +
          std::to_string(residue) + ")");
    }
  }

  static ReconstructionMatrix from_beta(RealMatrix beta) {
    Eigen::FullPivLU<RealMatrix> lu(beta);
    if (!lu.isInvertible()) {
      throw std::invalid_argument(
          "state family is linearly dependent: beta is singular");
    }
    RealMatrix inverse = lu.inverse();
    return ReconstructionMatrix(std::move(beta), std::move(inverse));
  }

  const RealMatrix& beta() const { return beta_; }
  const RealMatrix& inverse() const { return inverse_; }

 private:
  RealMatrix beta_;
  RealMatrix inverse_;
};

inline ReconstructionMatrix dptm_reconstruction_matrix(std::size_t num_qubits) {
  const auto len = static_cast<Eigen::Index>(basis_size(num_qubits));
  RealMatrix beta = RealMatrix::Identity(len, len);
  RealMatrix inverse = RealMatrix::Identity(len, len);
  beta.row(0).setOnes();
  inverse.row(0).setConstant(-1.0);
  inverse(0, 0) = 1.0;
  return ReconstructionMatrix(std::move(beta), std::move(inverse));
}

inline ReconstructionMatrix sqpt_reconstruction_matrix(std::size_t num_qubits) {
  return ReconstructionMatrix(
      detail::kron_power(detail::sqpt_beta_one_qubit(), num_qubits),
      detail::kron_power(detail::sqpt_beta_inv_one_qubit(), num_qubits));
}

/// An indexed collection of d^2 input states with its reconstruction
/// matrix. Protocol families generate states on demand from closed forms;
/// custom families hold explicit states and are validated for linear
/// independence. Immutable and safe to share.
class StateFamily {
 public:
  static StateFamily dptm(std::size_t num_qubits) {
    return StateFamily(Protocol::dptm, num_qubits,
                       dptm_reconstruction_matrix(num_qubits), {});
  }

  static StateFamily sqpt(std::size_t num_qubits) {
    return StateFamily(Protocol::sqpt, num_qubits,
                       sqpt_reconstruction_matrix(num_qubits), {});
  }

  static StateFamily of(Protocol protocol, std::size_t num_qubits) {
    return protocol == Protocol::dptm ? dptm(num_qubits) : sqpt(num_qubits);
  }

  static StateFamily custom(std::size_t num_qubits,
                            std::vector<DensityMatrix> states) {
    const std::size_t len = basis_size(num_qubits);
    if (states.size() != len) {
      throw std::invalid_argument("state family must contain d^2 states");
    }
    RealMatrix beta(static_cast<Eigen::Index>(len),
                    static_cast<Eigen::Index>(len));
    for (std::size_t j = 0; j < len; ++j) {
      if (states[j].num_qubits() != num_qubits) {
        throw std::invalid_argument("state family has mixed qubit counts");
      }
      beta.col(static_cast<Eigen::Index>(j)) =
          pauli_coefficients(states[j].matrix(), num_qubits);
    }
    return StateFamily(std::nullopt, num_qubits,
                       ReconstructionMatrix::from_beta(std::move(beta)),
                       std::move(states));
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t size() const { return basis_size(num_qubits_); }
  std::optional<Protocol> protocol() const { return protocol_; }

  DensityMatrix state(std::size_t j) const {
    if (!protocol_) {
      if (j >= states_.size()) {
        throw std::invalid_argument("state index out of range");
      }
      return states_[j];
    }
    return *protocol_ == Protocol::dptm ? dptm_state(j, num_qubits_)
                                        : sqpt_state(j, num_qubits_);
  }

  const ReconstructionMatrix& beta() const { return beta_; }

 private:
  StateFamily(std::optional<Protocol> protocol, std::size_t num_qubits,
              ReconstructionMatrix beta, std::vector<DensityMatrix> states)
      : protocol_(protocol),
        num_qubits_(num_qubits),
        beta_(std::move(beta)),
        states_(std::move(states)) {}

  std::optional<Protocol> protocol_;
  std::size_t num_qubits_;
  ReconstructionMatrix beta_;
  std::vector<DensityMatrix> states_;
};

/// Result of solving for the preparation map that sends each pure seed to
/// the corresponding target state. The map satisfies the defining relation
/// by construction; whether it is a physical channel is reported, not
/// assumed, and no projection onto the CPTP set is attempted.
struct PrepChannelSolution {
  PauliTransferMatrix lambda;
  CptpReport report;
  double max_defining_residual;
};

/// Solves lambda = pi B^{-1} with B the seed and pi the target coefficient
/// matrices. Seeds must be pure; the solve itself only needs them linearly
/// independent.
inline PrepChannelSolution prep_channel_solve(
    const StateFamily& targets, const std::vector<DensityMatrix>& seeds) {
  const std::size_t n = targets.num_qubits();
  const std::size_t len = basis_size(n);
  if (seeds.size() != len) {
    throw std::invalid_argument("need d^2 seed states");
  }
  RealMatrix b(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len));
  for (std::size_t j = 0; j < len; ++j) {
    const DensityMatrix& seed = seeds[j];
    if (seed.num_qubits() != n) {
      throw std::invalid_argument("seed state has wrong qubit count");
    }
    if (seed.purity() < 1.0 - psd_tol) {
      throw std::invalid_argument("seed state " + std::to_string(j) +
                                  " is not pure (purity " +
                                  std::to_string(seed.purity()) + ")");
    }
    b.col(static_cast<Eigen::Index>(j)) =
        pauli_coefficients(seed.matrix(), n);
  }
  Eigen::FullPivLU<RealMatrix> lu(b);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("seed states are linearly dependent");
  }
  const RealMatrix& pi = targets.beta().beta();
  RealMatrix lambda = pi * lu.inverse();

  double residual = 0.0;
  for (Eigen::Index j = 0; j < b.cols(); ++j) {
    residual = std::max(
        residual, (lambda * b.col(j) - pi.col(j)).cwiseAbs().maxCoeff());
  }
  if (residual > 1e-9) {
    throw std::runtime_error(
        "preparation-channel solve is ill-conditioned (residual " +
        std::to_string(residual) + ")");
  }
  PauliTransferMatrix map(n, std::move(lambda));
  CptpReport report = validate_cptp(ptm_to_choi(map));
  return PrepChannelSolution{std::move(map), report, residual};
}

inline PrepChannelSolution prep_channel_solve(const StateFamily& targets,
                                              const StateFamily& seeds) {
  std::vector<DensityMatrix> seed_states;
  seed_states.reserve(seeds.size());
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    seed_states.push_back(seeds.state(j));
  }
  return prep_channel_solve(targets, seed_states);
}

enum class PrepChannel { e0, e1, e2 };

/// Built-in preparation channels:
///   e0  mixes one qubit, psi -> psi/2 + X psi X/2
///   e1  applies e0 to the second of two qubits
///   e2  prepares (1 + X (x) Y)/4 from |00><00| via a randomized unitary pair
inline KrausChannel prep_channel_builtin(PrepChannel name) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (name) {
    case PrepChannel::e0:
      return KrausChannel(1, {s * sigma(0), s * sigma(1)});
    case PrepChannel::e1:
      return KrausChannel(
          2, {s * Matrix::Identity(4, 4), s * kron(sigma(0), sigma(1))});
    case PrepChannel::e2: {
      const Matrix u =
          cnot_gate() * kron(phase_gate(), sigma(0)) * kron(hadamard_gate(), sigma(0));
      const Matrix v = kron(sigma(0), sigma(3)) * kron(sigma(0), sigma(1));
      return KrausChannel(2, {s * u, s * (v * u)});
    }
  }
  throw std::invalid_argument("unknown preparation channel");
}

}  // namespace ptm
