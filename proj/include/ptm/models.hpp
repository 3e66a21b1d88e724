#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "ptm/channel.hpp"
#include "ptm/pauli.hpp"

namespace ptm {

namespace detail {

inline void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must be in [0, 1], got " +
                                std::to_string(p));
  }
}

}  // namespace detail

inline KrausChannel identity_channel(std::size_t num_qubits) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  return KrausChannel(num_qubits, {Matrix::Identity(d, d)});
}

/// Decay of |1> to |0> with transition probability p.
inline KrausChannel amplitude_damping(double p) {
  detail::check_probability(p, "p");
  Matrix a0 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - p);
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 1) = std::sqrt(p);
  return KrausChannel(1, {a0, a1});
}

inline KrausChannel bit_flip(double p) {
  detail::check_probability(p, "p");
  return KrausChannel(1, {std::sqrt(1.0 - p) * sigma(0), std::sqrt(p) * sigma(1)});
}

inline KrausChannel phase_flip(double p) {
  detail::check_probability(p, "p");
  return KrausChannel(1, {std::sqrt(1.0 - p) * sigma(0), std::sqrt(p) * sigma(3)});
}

/// n-qubit depolarizing channel rho -> (1-p) rho + p Tr[rho] 1/d, realized
/// as the Pauli channel with weight 1 - p (d^2-1)/d^2 on the identity and
/// p/d^2 on every other basis element.
inline KrausChannel depolarizing(double p, std::size_t num_qubits) {
  detail::check_probability(p, "p");
  const std::size_t len = basis_size(num_qubits);
  const double w_other = p / static_cast<double>(len);
  const double w_id = 1.0 - p + w_other;
  std::vector<Matrix> ops;
  ops.reserve(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double w = (k == 0) ? w_id : w_other;
    if (w > 0.0) ops.push_back(std::sqrt(w) * PauliString(num_qubits, k).matrix());
  }
  return KrausChannel(num_qubits, std::move(ops));
}

/// Joint weights p_{a1 a2} = p_{a1} ((1 - mu) p_{a2} + mu delta_{a1 a2})
/// of the two-qubit correlated Pauli channel. mu = 0 is memoryless,
/// mu = 1 is full memory (only matching pairs survive).
inline std::array<double, 16> correlated_pauli_weights(
    const std::array<double, 4>& marginal, double mu) {
  detail::check_probability(mu, "mu");
  double total = 0.0;
  for (double p : marginal) {
    if (p < 0.0) throw std::invalid_argument("marginal probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > hermiticity_tol) {
    throw std::invalid_argument("marginal probabilities must sum to 1, got " +
                                std::to_string(total));
  }
  std::array<double, 16> weights{};
  for (int a1 = 0; a1 < 4; ++a1) {
    for (int a2 = 0; a2 < 4; ++a2) {
      const double conditional =
          (1.0 - mu) * marginal[a2] + (a1 == a2 ? mu : 0.0);
      weights[4 * a1 + a2] = marginal[a1] * conditional;
    }
  }
  return weights;
}

inline KrausChannel correlated_pauli(const std::array<double, 4>& marginal,
                                     double mu) {
  const auto weights = correlated_pauli_weights(marginal, mu);
  std::vector<Matrix> ops;
  for (int a1 = 0; a1 < 4; ++a1) {
    for (int a2 = 0; a2 < 4; ++a2) {
      const double w = weights[4 * a1 + a2];
      if (w > 0.0) ops.push_back(std::sqrt(w) * kron(sigma(a1), sigma(a2)));
    }
  }
  return KrausChannel(2, std::move(ops));
}

/// Correlated Pauli channel with the depolarizing marginal
/// [1 - 3p/4, p/4, p/4, p/4].
inline KrausChannel correlated_depolarizing(double p, double mu) {
  detail::check_probability(p, "p");
  return correlated_pauli({1.0 - 3.0 * p / 4.0, p / 4.0, p / 4.0, p / 4.0}, mu);
}

/// Random channel from a Haar-style isometry: a complex Gaussian
/// (num_kraus * d) x d matrix is orthonormalized and sliced into d x d
/// blocks. Deterministic for a fixed seed.
inline KrausChannel random_channel(std::size_t num_qubits, std::size_t num_kraus,
                                   std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(dimension(num_qubits));
  if (num_kraus < 1 || num_kraus > basis_size(num_qubits)) {
    throw std::invalid_argument("num_kraus must be in [1, d^2]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto rows = static_cast<Eigen::Index>(num_kraus) * d;
  Matrix g(rows, d);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      g(r, c) = Complex(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ() * Matrix::Identity(rows, d);
  std::vector<Matrix> ops;
  ops.reserve(num_kraus);
  for (std::size_t i = 0; i < num_kraus; ++i) {
    ops.push_back(q.block(static_cast<Eigen::Index>(i) * d, 0, d, d));
  }
  return KrausChannel(num_qubits, std::move(ops));
}

/// Named channel description, either a model with parameters or a raw
/// Kraus operator list. This is the wire format every export carries for
/// provenance.
struct ChannelSpec {
  std::string model;                    // empty when raw Kraus is given
  std::map<std::string, double> params;
  std::vector<double> marginal;         // correlated_pauli only
  std::optional<std::size_t> num_qubits;
  std::vector<Matrix> kraus;            // raw operators, used when non-empty
};

inline double require_param(const ChannelSpec& spec, const std::string& key) {
  const auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw std::invalid_argument("channel model '" + spec.model +
                                "' requires parameter '" + key + "'");
  }
  return it->second;
}

inline KrausChannel build_model(const ChannelSpec& spec) {
  if (!spec.kraus.empty()) {
    if (!spec.num_qubits) {
      throw std::invalid_argument("raw Kraus channel spec requires 'n'");
    }
    return KrausChannel(*spec.num_qubits, spec.kraus);
  }
  if (spec.model == "identity") {
    return identity_channel(spec.num_qubits.value_or(1));
  }
  if (spec.model == "amplitude_damping") {
    return amplitude_damping(require_param(spec, "p"));
  }
  if (spec.model == "bit_flip") {
    return bit_flip(require_param(spec, "p"));
  }
  if (spec.model == "phase_flip") {
    return phase_flip(require_param(spec, "p"));
  }
  if (spec.model == "depolarizing") {
    const auto n_it = spec.params.find("n");
    const std::size_t n = n_it != spec.params.end()
                              ? static_cast<std::size_t>(n_it->second)
                              : spec.num_qubits.value_or(1);
    return depolarizing(require_param(spec, "p"), n);
  }
  if (spec.model == "correlated_pauli") {
    if (spec.marginal.size() != 4) {
      throw std::invalid_argument(
          "correlated_pauli requires a 4-entry marginal distribution");
    }
    return correlated_pauli(
        {spec.marginal[0], spec.marginal[1], spec.marginal[2], spec.marginal[3]},
        require_param(spec, "mu"));
  }
  if (spec.model == "correlated_depolarizing") {
    return correlated_depolarizing(require_param(spec, "p"),
                                   require_param(spec, "mu"));
  }
  throw std::invalid_argument("unknown channel model '" + spec.model + "'");
}

}  // namespace ptm
