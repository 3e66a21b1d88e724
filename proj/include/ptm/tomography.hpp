#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ptm/channel.hpp"
#include "ptm/models.hpp"
#include "ptm/planner.hpp"
#include "ptm/state_prep.hpp"
#include "ptm/tomo_types.hpp"

namespace ptm {

using MeasurementMap = std::map<EntryKey, Estimate>;

/// Reconstruction output: one estimate per requested transfer-matrix
/// entry, plus the deduplicated configuration list that produced the
/// measurements. Prior-known entries are filled analytically with zero
/// standard error; the first row in particular is never sampled.
struct TomographyResult {
  Protocol protocol = Protocol::dptm;
  Prior prior = Prior::cptp;
  std::size_t num_qubits = 1;
  std::uint64_t master_seed = 0;
  ShotCount shots = ShotCount::exact();
  std::map<EntryKey, Estimate> entries;
  std::vector<Configuration> configurations;
  std::size_t configuration_count = 0;
};

namespace detail {

// Exact configuration outcomes for one channel, evaluated through two
// independent routes that must agree: a dense trace against the evolved
// state, and the transfer matrix acting on the input coefficient vector.
class ExactOutcomes {
 public:
  ExactOutcomes(const KrausChannel& channel, Protocol protocol)
      : channel_(channel),
        protocol_(protocol),
        ptm_(kraus_to_ptm(channel)) {}

  double operator()(std::size_t i, std::size_t j) {
    auto it = cache_.find(j);
    if (it == cache_.end()) {
      const DensityMatrix input =
          protocol_ == Protocol::dptm ? dptm_state(j, channel_.num_qubits())
                                      : sqpt_state(j, channel_.num_qubits());
      const RealVector direct = pauli_coefficients(
          kraus_apply(channel_, input).matrix(), channel_.num_qubits());
      const RealVector via_ptm =
          ptm_.gamma() * pauli_coefficients(input.matrix(),
                                            channel_.num_qubits());
      const double disagreement = (direct - via_ptm).cwiseAbs().maxCoeff();
      if (disagreement > 1e-10) {
        throw std::runtime_error(
            "exact expectation routes disagree by " +
            std::to_string(disagreement));
      }
      it = cache_.emplace(j, direct).first;
    }
    return it->second(static_cast<Eigen::Index>(i));
  }

  const PauliTransferMatrix& ptm() const { return ptm_; }

 private:
  const KrausChannel& channel_;
  Protocol protocol_;
  PauliTransferMatrix ptm_;
  std::unordered_map<std::size_t, RealVector> cache_;
};

inline Estimate sample_from_expectation(double exact, std::uint64_t shots,
                                        std::uint64_t seed) {
  double p_plus = (1.0 + exact) / 2.0;
  if (p_plus < -psd_tol || p_plus > 1.0 + psd_tol) {
    throw std::runtime_error(
        "outcome probability " + std::to_string(p_plus) +
        " outside [0, 1]; channel or state is invalid");
  }
  p_plus = std::clamp(p_plus, 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uint64_t plus = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    if (uniform(rng) < p_plus) ++plus;
  }
  const double n = static_cast<double>(shots);
  const double value = (2.0 * static_cast<double>(plus) - n) / n;
  const double variance = std::max(0.0, 1.0 - value * value);
  return Estimate{value, std::sqrt(variance / n), shots};
}

}  // namespace detail

/// Exact configuration outcome Tr[P_i Phi(rho_j)] with rho_j drawn from
/// the protocol's input family. Internally cross-checked against the
/// transfer-matrix route (Gamma r)_i.
inline double exact_expectation(const KrausChannel& channel, std::size_t i,
                                std::size_t j, Protocol protocol) {
  const std::size_t len = basis_size(channel.num_qubits());
  if (i >= len || j >= len) {
    throw std::invalid_argument("configuration index out of range");
  }
  detail::ExactOutcomes outcomes(channel, protocol);
  const DensityMatrix input =
      protocol == Protocol::dptm ? dptm_state(j, channel.num_qubits())
                                 : sqpt_state(j, channel.num_qubits());
  const double via_trace = pauli_expectation(
      PauliString(channel.num_qubits(), i), kraus_apply(channel, input));
  const double via_ptm = outcomes(i, j);
  if (std::abs(via_trace - via_ptm) > 1e-10) {
    throw std::runtime_error("exact expectation routes disagree");
  }
  return via_trace;
}

/// Draws `shots` independent +-1 outcomes with p(+1) = (1 + <P_i>)/2 and
/// returns the empirical mean with standard error sqrt((1 - m^2)/N).
/// Deterministic for a fixed seed. Identity observables are not sampled;
/// schedule them as exact or skip them.
inline Estimate sample_configuration(const KrausChannel& channel,
                                     const Configuration& config,
                                     std::uint64_t seed) {
  if (config.observable == 0) {
    throw std::invalid_argument(
        "identity observable has constant outcome 1 and is never sampled");
  }
  if (config.shots.is_exact()) {
    throw std::invalid_argument("sampling requires a finite shot count");
  }
  const double exact = exact_expectation(channel, config.observable,
                                         config.state, config.protocol);
  return detail::sample_from_expectation(exact, config.shots.count(), seed);
}

namespace detail {

// Measurement lookup that records which configurations a reconstruction
// actually consumed.
class MeasurementReader {
 public:
  explicit MeasurementReader(const MeasurementMap& measurements)
      : measurements_(measurements) {}

  const Estimate& require(std::size_t i, std::size_t j) {
    const auto it = measurements_.find({i, j});
    if (it == measurements_.end()) {
      throw std::invalid_argument("missing required measurement (" +
                                  std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
    }
    consumed_.insert({i, j});
    return it->second;
  }

  const Estimate* find(std::size_t i, std::size_t j) {
    const auto it = measurements_.find({i, j});
    if (it == measurements_.end()) return nullptr;
    consumed_.insert({i, j});
    return &it->second;
  }

  std::vector<Configuration> consumed(Protocol protocol) const {
    std::vector<Configuration> configs;
    configs.reserve(consumed_.size());
    for (const EntryKey& key : consumed_) {
      const Estimate& e = measurements_.at(key);
      configs.push_back({key.first, key.second, protocol,
                         e.shots == 0 ? ShotCount::exact()
                                      : ShotCount::of(e.shots)});
    }
    return configs;
  }

 private:
  const MeasurementMap& measurements_;
  std::set<EntryKey> consumed_;
};

}  // namespace detail

/// Direct reconstruction: Gamma_i0 is read off the mixed-state
/// configuration, and Gamma_ij (j != 0) subtracts it from the matching
/// measurement, with errors added in quadrature. Entries of one row that
/// share the subtraction term are therefore correlated; that covariance
/// is not modeled in the reported standard errors. Under a unital prior
/// the identification is immediate and no subtraction happens. When a
/// row's (i, 0) entry is neither requested nor measured, its value is
/// taken as known-zero from the channel model (see
/// configurations_for_entry).
inline TomographyResult reconstruct_dptm(const MeasurementMap& measurements,
                                         Prior prior,
                                         const std::vector<EntryKey>& entries,
                                         std::size_t num_qubits) {
  const std::size_t len = basis_size(num_qubits);
  const std::set<EntryKey> requested(entries.begin(), entries.end());
  detail::MeasurementReader reader(measurements);
  TomographyResult result;
  result.protocol = Protocol::dptm;
  result.prior = prior;
  result.num_qubits = num_qubits;
  for (const EntryKey& entry : requested) {
    const auto [i, j] = entry;
    if (i >= len || j >= len) {
      throw std::invalid_argument("entry index out of range");
    }
    if (i == 0 || entry_known_from_prior(entry, prior)) {
      result.entries[entry] = Estimate{prior_entry_value(entry), 0.0, 0};
      continue;
    }
    if (j == 0 || prior_at_least(prior, Prior::unital)) {
      result.entries[entry] = reader.require(i, j);
      continue;
    }
    const Estimate& direct = reader.require(i, j);
    Estimate reference{0.0, 0.0, 0};
    if (const Estimate* found = reader.find(i, 0)) {
      reference = *found;
    } else if (requested.count({i, 0}) != 0) {
      reader.require(i, 0);  // throws: the entry is requested but unmeasured
    }
    result.entries[entry] =
        Estimate{direct.value - reference.value,
                 std::hypot(direct.std_error, reference.std_error),
                 std::max(direct.shots, reference.shots)};
  }
  result.configurations = reader.consumed(Protocol::dptm);
  result.configuration_count = result.configurations.size();
  return result;
}

/// Entry inference overload: every measured configuration is also a
/// requested entry.
inline TomographyResult reconstruct_dptm(const MeasurementMap& measurements,
                                         Prior prior, std::size_t num_qubits) {
  std::vector<EntryKey> entries;
  entries.reserve(measurements.size());
  for (const auto& [key, estimate] : measurements) entries.push_back(key);
  return reconstruct_dptm(measurements, prior, entries, num_qubits);
}

/// Standard-protocol reconstruction: each entry recombines the
/// measurements selected by the nonzero rows of the inverse
/// reconstruction-matrix column, Gamma_ij = sum_k c_kj M_ik, with the
/// standard error sqrt(sum_k c_kj^2 se_ik^2).
inline TomographyResult reconstruct_sqpt(const MeasurementMap& measurements,
                                         std::size_t num_qubits,
                                         const std::vector<EntryKey>& entries,
                                         Prior prior = Prior::cptp) {
  const std::size_t len = basis_size(num_qubits);
  detail::MeasurementReader reader(measurements);
  TomographyResult result;
  result.protocol = Protocol::sqpt;
  result.prior = prior;
  result.num_qubits = num_qubits;
  for (const EntryKey& entry : std::set<EntryKey>(entries.begin(), entries.end())) {
    const auto [i, j] = entry;
    if (i >= len || j >= len) {
      throw std::invalid_argument("entry index out of range");
    }
    if (i == 0 || entry_known_from_prior(entry, prior)) {
      result.entries[entry] = Estimate{prior_entry_value(entry), 0.0, 0};
      continue;
    }
    double value = 0.0;
    double variance = 0.0;
    std::uint64_t shots = 0;
    for (const SparseEntry& term : sqpt_beta_inv_column(j, num_qubits)) {
      const Estimate& m = reader.require(i, term.row);
      value += term.value * m.value;
      variance += term.value * term.value * m.std_error * m.std_error;
      shots = std::max(shots, m.shots);
    }
    result.entries[entry] = Estimate{value, std::sqrt(variance), shots};
  }
  result.configurations = reader.consumed(Protocol::sqpt);
  result.configuration_count = result.configurations.size();
  return result;
}

/// Entry inference overload: reconstructs every entry whose required
/// measurements are all present.
inline TomographyResult reconstruct_sqpt(const MeasurementMap& measurements,
                                         std::size_t num_qubits,
                                         Prior prior = Prior::cptp) {
  const std::size_t len = basis_size(num_qubits);
  std::set<std::size_t> rows;
  for (const auto& [key, estimate] : measurements) rows.insert(key.first);
  std::vector<EntryKey> entries;
  for (std::size_t i : rows) {
    for (std::size_t j = 0; j < len; ++j) {
      const auto column = sqpt_beta_inv_column(j, num_qubits);
      const bool complete =
          std::all_of(column.begin(), column.end(), [&](const SparseEntry& e) {
            return measurements.count({i, e.row}) != 0;
          });
      if (complete) entries.push_back({i, j});
    }
  }
  return reconstruct_sqpt(measurements, num_qubits, entries, prior);
}

/// Generic linear reconstruction Gamma = M beta^{-1} against an explicit
/// dense inverse. This is the textbook relation the two protocol-specific
/// reconstructions specialize; it exists so the specializations can be
/// checked against it.
inline TomographyResult reconstruct_with_beta_inverse(
    const MeasurementMap& measurements, const RealMatrix& beta_inverse,
    const std::vector<EntryKey>& entries, std::size_t num_qubits,
    Protocol protocol) {
  const std::size_t len = basis_size(num_qubits);
  if (beta_inverse.rows() != static_cast<Eigen::Index>(len) ||
      beta_inverse.cols() != static_cast<Eigen::Index>(len)) {
    throw std::invalid_argument("beta inverse has wrong dimension");
  }
  detail::MeasurementReader reader(measurements);
  TomographyResult result;
  result.protocol = protocol;
  result.prior = Prior::cptp;
  result.num_qubits = num_qubits;
  for (const EntryKey& entry : std::set<EntryKey>(entries.begin(), entries.end())) {
    const auto [i, j] = entry;
    if (i >= len || j >= len) {
      throw std::invalid_argument("entry index out of range");
    }
    if (i == 0) {
      result.entries[entry] = Estimate{prior_entry_value(entry), 0.0, 0};
      continue;
    }
    double value = 0.0;
    double variance = 0.0;
    std::uint64_t shots = 0;
    for (std::size_t k = 0; k < len; ++k) {
      const double c = beta_inverse(static_cast<Eigen::Index>(k),
                                    static_cast<Eigen::Index>(j));
      if (c == 0.0) continue;
      const Estimate& m = reader.require(i, k);
      value += c * m.value;
      variance += c * c * m.std_error * m.std_error;
      shots = std::max(shots, m.shots);
    }
    result.entries[entry] = Estimate{value, std::sqrt(variance), shots};
  }
  result.configurations = reader.consumed(protocol);
  result.configuration_count = result.configurations.size();
  return result;
}

/// Plans, measures, and reconstructs in one call. Every configuration gets
/// its own seed derived from (master_seed, protocol, i, j), so results are
/// bit-identical across runs and evaluation orders. With exact shots the
/// estimates are the analytic expectations.
inline TomographyResult run_protocol(const KrausChannel& channel,
                                     const std::vector<EntryKey>& entries,
                                     Protocol protocol, Prior prior,
                                     ShotCount shots,
                                     std::uint64_t master_seed) {
  const std::size_t n = channel.num_qubits();
  const std::vector<Configuration> plan =
      plan_configurations(entries, protocol, prior, n, shots);
  detail::ExactOutcomes outcomes(channel, protocol);
  MeasurementMap measurements;
  for (const Configuration& config : plan) {
    const double exact = outcomes(config.observable, config.state);
    Estimate estimate;
    if (shots.is_exact()) {
      estimate = Estimate{exact, 0.0, 0};
    } else if (config.observable == 0) {
      // Identity observable: the outcome is 1 by normalization, recorded
      // without sampling.
      estimate = Estimate{1.0, 0.0, shots.count()};
    } else {
      estimate = detail::sample_from_expectation(
          exact, shots.count(),
          configuration_seed(master_seed, protocol, config.observable,
                             config.state));
    }
    measurements[{config.observable, config.state}] = estimate;
  }
  TomographyResult result =
      protocol == Protocol::dptm
          ? reconstruct_dptm(measurements, prior, entries, n)
          : reconstruct_sqpt(measurements, n, entries, prior);
  result.master_seed = master_seed;
  result.shots = shots;
  result.configurations = plan;
  result.configuration_count = plan.size();
  return result;
}

/// One extracted model parameter with its first-order propagated error.
struct ParamEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct CorrDepolParams {
  ParamEstimate p;
  ParamEstimate mu;
  std::vector<std::string> warnings;
};

/// Inverts the correlated-depolarizing relations Gamma_44 = 1 - p and
/// Gamma_66 = (1 - p)(mu p - p + 1) for (p, mu), propagating standard
/// errors to first order. Out-of-range results are reported with warnings
/// rather than clamped.
inline CorrDepolParams extract_corr_depol_params(const Estimate& g44,
                                                 const Estimate& g66) {
  if (g44.value >= 1.0) {
    throw std::invalid_argument(
        "Gamma_44 >= 1 leaves p = 0 and mu indeterminate");
  }
  if (g44.value <= 0.0) {
    throw std::invalid_argument("Gamma_44 <= 0 is outside the model range");
  }
  CorrDepolParams out;
  const double p = 1.0 - g44.value;
  out.p = ParamEstimate{p, g44.std_error};

  const double ratio = g66.value / g44.value;
  const double mu = (ratio - 1.0 + p) / p;
  // d(mu)/d(g44) and d(mu)/d(g66) of mu = (g66/g44 - g44) / (1 - g44).
  const double dmu_d44 =
      ((-g66.value / (g44.value * g44.value) - 1.0) * (1.0 - g44.value) +
       (ratio - g44.value)) /
      ((1.0 - g44.value) * (1.0 - g44.value));
  const double dmu_d66 = 1.0 / (g44.value * (1.0 - g44.value));
  out.mu = ParamEstimate{
      mu, std::hypot(dmu_d44 * g44.std_error, dmu_d66 * g66.std_error)};

  if (p < 0.0 || p > 1.0) {
    out.warnings.push_back("extracted p is outside [0, 1]");
  }
  if (mu < 0.0 || mu > 1.0) {
    out.warnings.push_back("extracted mu is outside [0, 1]");
  }
  return out;
}

}  // namespace ptm
