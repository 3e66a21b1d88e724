#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "ptm/state_prep.hpp"
#include "ptm/tomo_types.hpp"

namespace ptm {

inline std::vector<EntryKey> full_ptm_entries(std::size_t num_qubits) {
  const std::size_t len = basis_size(num_qubits);
  std::vector<EntryKey> entries;
  entries.reserve(len * len);
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < len; ++j) entries.push_back({i, j});
  }
  return entries;
}

/// True when the prior already fixes the entry, so no configuration is
/// needed for it: the first row under CPTP, additionally the first column
/// under unitality, and all off-diagonal entries for Pauli channels.
inline bool entry_known_from_prior(const EntryKey& entry, Prior prior) {
  if (prior_at_least(prior, Prior::cptp) && entry.first == 0) return true;
  if (prior_at_least(prior, Prior::unital) && entry.second == 0) return true;
  if (prior == Prior::pauli && entry.first != entry.second) return true;
  return false;
}

/// Value of a prior-known entry (Kronecker deltas of the constrained row,
/// column, or diagonal).
inline double prior_entry_value(const EntryKey& entry) {
  return entry.first == entry.second ? 1.0 : 0.0;
}

/// Stand-alone cost of one entry in experimental configurations, with no
/// other entries being measured. This is the quantity behind the scaling
/// comparison: direct reconstruction needs at most 2 configurations per
/// entry at any qubit count, while the standard protocol combines as many
/// measurements as its inverse reconstruction matrix column has nonzeros,
/// between 2^n and 3^n.
inline std::size_t entry_cost(Protocol protocol, std::size_t i, std::size_t j,
                              std::size_t num_qubits, Prior prior) {
  const std::size_t len = basis_size(num_qubits);
  if (i >= len || j >= len) {
    throw std::invalid_argument("entry index out of range");
  }
  if (entry_known_from_prior({i, j}, prior)) return 0;
  if (protocol == Protocol::sqpt) return sqpt_column_nonzeros(j, num_qubits);
  if (prior_at_least(prior, Prior::unital)) return 1;
  return j == 0 ? 1 : 2;
}

/// Configurations required for a single entry in the context of a
/// requested-entry set.
///
/// For the direct protocol, an entry (i, j != 0) is the measured value
/// minus the non-unital component Gamma_i0. That component is measured,
/// and its configuration shared across the row, exactly when (i, 0) is
/// itself among the requested entries. A request that leaves (i, 0) out
/// declares it known from the channel model (the reconstruction then
/// substitutes zero), which is how partial characterizations of known
/// models reach their minimal configuration counts. Under Prior::none no
/// such declaration is possible and the subtraction term is always
/// scheduled.
inline std::vector<EntryKey> configurations_for_entry(
    const EntryKey& entry, const std::set<EntryKey>& requested,
    Protocol protocol, Prior prior, std::size_t num_qubits) {
  if (entry_known_from_prior(entry, prior)) return {};
  const auto [i, j] = entry;
  if (protocol == Protocol::sqpt) {
    std::vector<EntryKey> configs;
    for (const SparseEntry& e : sqpt_beta_inv_column(j, num_qubits)) {
      configs.push_back({i, e.row});
    }
    return configs;
  }
  std::vector<EntryKey> configs{{i, j}};
  if (j != 0 && !prior_at_least(prior, Prior::unital)) {
    if (prior == Prior::none || requested.count({i, 0}) != 0) {
      configs.push_back({i, 0});
    }
  }
  return configs;
}

/// Deduplicated union of the configurations needed for a set of entries.
/// Shared configurations (the j = 0 subtraction term across a row, or
/// overlapping recombination columns) are counted once. The list is
/// canonically sorted by (observable, state).
inline std::vector<Configuration> plan_configurations(
    const std::vector<EntryKey>& entries, Protocol protocol, Prior prior,
    std::size_t num_qubits, ShotCount shots) {
  const std::size_t len = basis_size(num_qubits);
  const std::set<EntryKey> requested(entries.begin(), entries.end());
  std::set<EntryKey> keys;
  for (const EntryKey& entry : requested) {
    if (entry.first >= len || entry.second >= len) {
      throw std::invalid_argument("entry index out of range");
    }
    for (const EntryKey& key : configurations_for_entry(
             entry, requested, protocol, prior, num_qubits)) {
      keys.insert(key);
    }
  }
  std::vector<Configuration> plan;
  plan.reserve(keys.size());
  for (const EntryKey& key : keys) {
    plan.push_back({key.first, key.second, protocol, shots});
  }
  return plan;
}

/// Closed-form size of the full transfer-matrix plan. The direct-protocol
/// column gives the familiar totals d^4, d^2 (d^2 - 1), (d^2 - 1)^2 and
/// d^2 - 1 as the prior tightens. The standard protocol cannot exploit
/// unitality (its raw measurements are not transfer-matrix entries), and
/// its Pauli-prior total sums the diagonal column counts, 10^n - 2^n.
inline std::uint64_t full_ptm_plan_size(Protocol protocol, Prior prior,
                                        std::size_t num_qubits) {
  const auto n = static_cast<std::uint64_t>(num_qubits);
  auto ipow = [](std::uint64_t base, std::uint64_t exp) {
    std::uint64_t out = 1;
    for (std::uint64_t k = 0; k < exp; ++k) out *= base;
    return out;
  };
  const std::uint64_t d2 = ipow(4, n);
  if (protocol == Protocol::dptm) {
    switch (prior) {
      case Prior::none: return d2 * d2;
      case Prior::cptp: return d2 * (d2 - 1);
      case Prior::unital: return (d2 - 1) * (d2 - 1);
      case Prior::pauli: return d2 - 1;
    }
  } else {
    switch (prior) {
      case Prior::none: return d2 * d2;
      case Prior::cptp: return d2 * (d2 - 1);
      case Prior::unital: return d2 * (d2 - 1);
      case Prior::pauli: return ipow(10, n) - ipow(2, n);
    }
  }
  throw std::invalid_argument("unknown prior");
}

/// Per-entry configuration cost scaling, one row per qubit count: the
/// full-tomography reference d^4, the constant direct-protocol ceiling,
/// and the standard protocol's min/max column counts. The min/max are
/// found by scanning every column, not from a formula.
struct ScalingRow {
  std::size_t num_qubits;
  std::uint64_t full_tomography;
  std::size_t dptm_max;
  std::size_t sqpt_min;
  std::size_t sqpt_max;
};

inline std::vector<ScalingRow> scaling_table(std::size_t max_n) {
  std::vector<ScalingRow> rows;
  for (std::size_t n = 1; n <= max_n; ++n) {
    ScalingRow row{};
    row.num_qubits = n;
    row.full_tomography = 1;
    for (std::size_t k = 0; k < 2 * n; ++k) row.full_tomography *= 4;
    const std::size_t columns = std::size_t{1} << (2 * n);
    row.dptm_max = 1;
    row.sqpt_min = ~std::size_t{0};
    row.sqpt_max = 0;
    for (std::size_t j = 0; j < columns; ++j) {
      // Same digit arithmetic as sqpt_column_nonzeros, inlined here so the
      // table extends past the dense-simulation qubit limit.
      static constexpr std::size_t per_digit[4] = {2, 3, 3, 2};
      std::size_t count = 1;
      for (std::size_t q = 0; q < n; ++q) {
        count *= per_digit[(j >> (2 * (n - 1 - q))) & 3];
      }
      row.sqpt_min = std::min(row.sqpt_min, count);
      row.sqpt_max = std::max(row.sqpt_max, count);
      row.dptm_max = std::max<std::size_t>(row.dptm_max, j == 0 ? 1 : 2);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ptm
