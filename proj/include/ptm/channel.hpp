#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "ptm/density_matrix.hpp"
#include "ptm/pauli.hpp"

namespace ptm {

/// A channel in Kraus form: rho -> sum_i A_i rho A_i^dag. Construction
/// checks trace preservation (sum A_i^dag A_i = 1) unless the unchecked
/// factory is used; the residual stays queryable either way so diagnostic
/// callers can probe non-physical operator sets.
class KrausChannel {
 public:
  KrausChannel(std::size_t num_qubits, std::vector<Matrix> operators)
      : KrausChannel(num_qubits, std::move(operators), /*check_tp=*/true) {}

  static KrausChannel unchecked(std::size_t num_qubits,
                                std::vector<Matrix> operators) {
    return KrausChannel(num_qubits, std::move(operators), /*check_tp=*/false);
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const std::vector<Matrix>& operators() const { return operators_; }

  // Frobenius norm of sum A_i^dag A_i - 1.
  double tp_residual() const { return tp_residual_; }
  bool trace_preserving(double tol = tp_tol) const {
    return tp_residual_ <= tol;
  }

 private:
  KrausChannel(std::size_t num_qubits, std::vector<Matrix> operators,
               bool check_tp)
      : num_qubits_(num_qubits), operators_(std::move(operators)) {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
    const std::size_t max_ops = basis_size(num_qubits);
    if (operators_.empty() || operators_.size() > max_ops) {
      throw std::invalid_argument("Kraus operator count must be in [1, d^2]");
    }
    for (const Matrix& op : operators_) {
      if (op.rows() != d || op.cols() != d) {
        throw std::invalid_argument("Kraus operator has wrong dimension");
      }
    }
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& op : operators_) sum += op.adjoint() * op;
    tp_residual_ = (sum - Matrix::Identity(d, d)).norm();
    if (check_tp && tp_residual_ > tp_tol) {
      throw std::invalid_argument(
          "Kraus operators are not trace preserving (residual " +
          std::to_string(tp_residual_) + ")");
    }
  }

  std::size_t num_qubits_;
  std::vector<Matrix> operators_;
  double tp_residual_;
};

/// Raw image sum_i A_i M A_i^dag of an arbitrary operator, no validity
/// checks on either side. This is the diagnostics route for operator sets
/// that fail trace preservation (raw preparation-solver output and the
/// like); the result is then generally not a state.
inline Matrix kraus_apply_unchecked(const KrausChannel& ch, const Matrix& op) {
  const auto d = static_cast<Eigen::Index>(dimension(ch.num_qubits()));
  if (op.rows() != d || op.cols() != d) {
    throw std::invalid_argument("operator dimension does not match channel");
  }
  Matrix out = Matrix::Zero(d, d);
  for (const Matrix& a : ch.operators()) out += a * op * a.adjoint();
  return out;
}

/// Applies the channel: sum_i A_i rho A_i^dag. Rejects channels that fail
/// trace preservation; the output is a validated state.
inline DensityMatrix kraus_apply(const KrausChannel& ch,
                                 const DensityMatrix& rho) {
  if (ch.num_qubits() != rho.num_qubits()) {
    throw std::invalid_argument("channel and state qubit counts differ");
  }
  if (!ch.trace_preserving()) {
    throw std::invalid_argument("channel is not trace preserving (residual " +
                                std::to_string(ch.tp_residual()) + ")");
  }
  return DensityMatrix(rho.num_qubits(), kraus_apply_unchecked(ch, rho.matrix()));
}

/// The transfer matrix Gamma_ij = (1/d) Tr[P_i Phi(P_j)], a real d^2 x d^2
/// matrix acting on Pauli coefficient vectors by plain multiplication.
/// Trace preservation pins the first row to (1, 0, ..., 0); construction
/// enforces that much. Complete positivity is not assumed here (the
/// preparation-channel solver legitimately produces non-CP instances), so
/// entry bounds are a diagnostic concern, not a constructor one.
class PauliTransferMatrix {
 public:
  PauliTransferMatrix(std::size_t num_qubits, RealMatrix gamma)
      : num_qubits_(num_qubits), gamma_(std::move(gamma)) {
    const auto len = static_cast<Eigen::Index>(basis_size(num_qubits));
    dimension(num_qubits);
    if (gamma_.rows() != len || gamma_.cols() != len) {
      throw std::invalid_argument("transfer matrix has wrong dimension");
    }
    if (!gamma_.allFinite()) {
      throw std::invalid_argument("transfer matrix has non-finite entries");
    }
    RealVector row0 = gamma_.row(0);
    row0(0) -= 1.0;
    if (row0.cwiseAbs().maxCoeff() > tp_tol) {
      throw std::invalid_argument(
          "transfer matrix first row must be (1, 0, ..., 0); the map does "
          "not preserve trace");
    }
  }

  static PauliTransferMatrix identity(std::size_t num_qubits) {
    const auto len = static_cast<Eigen::Index>(basis_size(num_qubits));
    return PauliTransferMatrix(num_qubits, RealMatrix::Identity(len, len));
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const RealMatrix& gamma() const { return gamma_; }
  double operator()(std::size_t i, std::size_t j) const {
    return gamma_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  std::size_t num_qubits_;
  RealMatrix gamma_;
};

inline PauliTransferMatrix kraus_to_ptm(const KrausChannel& ch) {
  const std::size_t n = ch.num_qubits();
  const std::size_t len = basis_size(n);
  const double d = static_cast<double>(dimension(n));
  RealMatrix gamma(len, len);
  for (std::size_t j = 0; j < len; ++j) {
    const Matrix image =
        kraus_apply_unchecked(ch, PauliString(n, j).matrix());
    gamma.col(static_cast<Eigen::Index>(j)) = pauli_coefficients(image, n) / d;
  }
  return PauliTransferMatrix(n, std::move(gamma));
}

inline DensityMatrix ptm_apply(const PauliTransferMatrix& ptm,
                               const DensityMatrix& rho) {
  if (ptm.num_qubits() != rho.num_qubits()) {
    throw std::invalid_argument("transfer matrix and state qubit counts differ");
  }
  const RealVector out = ptm.gamma() * vectorize(rho).coefficients();
  return devectorize(PauliVector(rho.num_qubits(), out));
}

/// Composition as superoperators: applies g1 first, then g2.
inline PauliTransferMatrix compose_ptm(const PauliTransferMatrix& g2,
                                       const PauliTransferMatrix& g1) {
  if (g2.num_qubits() != g1.num_qubits()) {
    throw std::invalid_argument("cannot compose transfer matrices of "
                                "different qubit counts");
  }
  return PauliTransferMatrix(g2.num_qubits(), g2.gamma() * g1.gamma());
}

/// Choi operator C = (Phi (x) Id)(|Omega><Omega|) with |Omega> the
/// maximally entangled state sum_k |kk> / sqrt(d). The map is completely
/// positive iff C >= 0, and trace preserving iff the partial trace over
/// the output factor equals 1/d.
class ChoiMatrix {
 public:
  ChoiMatrix(std::size_t num_qubits, Matrix entries)
      : num_qubits_(num_qubits), entries_(std::move(entries)) {
    const auto d2 = static_cast<Eigen::Index>(basis_size(num_qubits));
    dimension(num_qubits);
    if (entries_.rows() != d2 || entries_.cols() != d2) {
      throw std::invalid_argument("Choi matrix has wrong dimension");
    }
    const double herm_residue =
        detail::max_abs(entries_ - entries_.adjoint());
    if (herm_residue > hermiticity_tol) {
      throw std::invalid_argument("Choi matrix is not Hermitian (residue " +
                                  std::to_string(herm_residue) + ")");
    }
  }

  std::size_t num_qubits() const { return num_qubits_; }
  const Matrix& matrix() const { return entries_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_,
                                                 Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  // Partial trace over the output (first) tensor factor.
  Matrix trace_out_output() const {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits_));
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      out += entries_.block(a * d, a * d, d, d);
    }
    return out;
  }

  // Partial trace over the ancilla (second) factor; equals Phi(1)/d.
  Matrix trace_out_ancilla() const {
    const auto d = static_cast<Eigen::Index>(dimension(num_qubits_));
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index c = 0; c < d; ++c) {
        out(a, c) = entries_.block(a * d, c * d, d, d).trace();
      }
    }
    return out;
  }

 private:
  std::size_t num_qubits_;
  Matrix entries_;
};

/// Basis change from the transfer matrix:
///   C = (1/d^2) sum_ij Gamma_ij P_i (x) P_j^T.
inline ChoiMatrix ptm_to_choi(const PauliTransferMatrix& ptm) {
  const std::size_t n = ptm.num_qubits();
  const std::size_t len = basis_size(n);
  const auto d2 = static_cast<Eigen::Index>(len);
  Matrix choi = Matrix::Zero(d2, d2);
  for (std::size_t i = 0; i < len; ++i) {
    const Matrix pi = PauliString(n, i).matrix();
    for (std::size_t j = 0; j < len; ++j) {
      const double g = ptm(i, j);
      if (g == 0.0) continue;
      choi += g * kron(pi, PauliString(n, j).matrix().transpose());
    }
  }
  choi /= static_cast<double>(len);
  return ChoiMatrix(n, std::move(choi));
}

/// Inverse basis change, Gamma_ij = Tr[C (P_i (x) P_j^T)].
inline PauliTransferMatrix choi_to_ptm(const ChoiMatrix& choi) {
  const std::size_t n = choi.num_qubits();
  const std::size_t len = basis_size(n);
  RealMatrix gamma(len, len);
  for (std::size_t i = 0; i < len; ++i) {
    const Matrix pi = PauliString(n, i).matrix();
    for (std::size_t j = 0; j < len; ++j) {
      const Matrix pjt = PauliString(n, j).matrix().transpose();
      const Complex value =
          detail::trace_product(kron(pi, pjt), choi.matrix());
      if (std::abs(value.imag()) > hermiticity_tol) {
        throw std::runtime_error("Choi matrix does not represent a "
                                 "Hermiticity-preserving map");
      }
      gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          value.real();
    }
  }
  return PauliTransferMatrix(n, std::move(gamma));
}

/// Kraus operators from the Choi eigendecomposition. Eigenvalues in
/// (-psd_tol, psd_tol) are dropped as numerical zeros; anything more
/// negative means the map is not completely positive and is an error.
inline KrausChannel choi_to_kraus(const ChoiMatrix& choi) {
  const std::size_t n = choi.num_qubits();
  const auto d = static_cast<Eigen::Index>(dimension(n));
  Eigen::SelfAdjointEigenSolver<Matrix> solver(choi.matrix());
  const RealVector evals = solver.eigenvalues();
  if (evals.minCoeff() < -psd_tol) {
    throw std::invalid_argument(
        "Choi matrix has eigenvalue " + std::to_string(evals.minCoeff()) +
        "; the map is not completely positive");
  }
  std::vector<Matrix> ops;
  for (Eigen::Index q = 0; q < evals.size(); ++q) {
    if (evals(q) <= psd_tol) continue;
    // Eigenvectors are row-major flattenings of the operators, scaled so
    // that C = sum_i |A_i>><<A_i| / d.
    const double scale = std::sqrt(evals(q) * static_cast<double>(d));
    Matrix op(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        op(r, c) = scale * solver.eigenvectors()(r * d + c, q);
      }
    }
    ops.push_back(std::move(op));
  }
  if (ops.empty()) {
    throw std::invalid_argument("Choi matrix is numerically zero");
  }
  return KrausChannel(n, std::move(ops));
}

/// Structural report on a channel: trace preservation, complete
/// positivity, and unitality. Purely diagnostic; accepts raw operator
/// sets that would fail KrausChannel construction.
struct CptpReport {
  double tp_residual = 0.0;
  double min_choi_eigenvalue = 0.0;
  double unitality_residual = 0.0;
  bool trace_preserving = false;
  bool completely_positive = false;
  bool unital = false;
};

inline CptpReport validate_cptp(const std::vector<Matrix>& operators,
                                std::size_t num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  CptpReport report;
  Matrix tp_sum = Matrix::Zero(d, d);
  Matrix image_of_identity = Matrix::Zero(d, d);
  for (const Matrix& op : operators) {
    if (op.rows() != d || op.cols() != d) {
      throw std::invalid_argument("Kraus operator has wrong dimension");
    }
    tp_sum += op.adjoint() * op;
    image_of_identity += op * op.adjoint();
  }
  report.tp_residual = (tp_sum - Matrix::Identity(d, d)).norm();
  report.trace_preserving = report.tp_residual <= tp_tol;
  report.unitality_residual =
      (image_of_identity - Matrix::Identity(d, d)).norm();
  report.unital = report.unitality_residual <= tp_tol;

  // Choi from the operator set directly: C = sum_i v_i v_i^dag with v_i
  // the row-major flattening of A_i / sqrt(d).
  const auto d2 = d * d;
  Matrix choi = Matrix::Zero(d2, d2);
  for (const Matrix& op : operators) {
    Vector v(d2);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) v(r * d + c) = op(r, c);
    }
    v /= std::sqrt(static_cast<double>(d));
    choi += v * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(choi, Eigen::EigenvaluesOnly);
  report.min_choi_eigenvalue = solver.eigenvalues().minCoeff();
  report.completely_positive = report.min_choi_eigenvalue >= -psd_tol;
  return report;
}

inline CptpReport validate_cptp(const KrausChannel& ch) {
  return validate_cptp(ch.operators(), ch.num_qubits());
}

inline CptpReport validate_cptp(const ChoiMatrix& choi) {
  const std::size_t n = choi.num_qubits();
  const auto d = static_cast<Eigen::Index>(dimension(n));
  CptpReport report;
  report.tp_residual =
      (choi.trace_out_output() -
       Matrix::Identity(d, d) / static_cast<double>(d))
          .norm();
  report.trace_preserving = report.tp_residual <= tp_tol;
  report.min_choi_eigenvalue = choi.min_eigenvalue();
  report.completely_positive = report.min_choi_eigenvalue >= -psd_tol;
  report.unitality_residual =
      (static_cast<double>(d) * choi.trace_out_ancilla() -
       Matrix::Identity(d, d))
          .norm();
  report.unital = report.unitality_residual <= tp_tol;
  return report;
}

/// True iff every off-diagonal entry of the transfer matrix is at most
/// tol in magnitude. Pauli channels are exactly the diagonal ones.
inline bool is_pauli_channel(const PauliTransferMatrix& ptm,
                             double tol = tp_tol) {
  const auto len = ptm.gamma().rows();
  for (Eigen::Index i = 0; i < len; ++i) {
    for (Eigen::Index j = 0; j < len; ++j) {
      if (i != j && std::abs(ptm.gamma()(i, j)) > tol) return false;
    }
  }
  return true;
}

}  // namespace ptm
