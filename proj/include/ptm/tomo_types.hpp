#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "ptm/state_prep.hpp"

namespace ptm {

/// Shot budget of a configuration: either a finite repetition count (at
/// least 2) or exact evaluation of the expectation value.
class ShotCount {
 public:
  static ShotCount exact() { return ShotCount(0); }

  static ShotCount of(std::uint64_t count) {
    if (count < 2) {
      throw std::invalid_argument("shot count must be at least 2");
    }
    return ShotCount(count);
  }

  bool is_exact() const { return count_ == 0; }

  std::uint64_t count() const {
    if (is_exact()) {
      throw std::logic_error("exact evaluation has no shot count");
    }
    return count_;
  }

  friend bool operator==(ShotCount a, ShotCount b) {
    return a.count_ == b.count_;
  }

 private:
  explicit ShotCount(std::uint64_t count) : count_(count) {}
  std::uint64_t count_;
};

/// Knowledge assumed about the channel before any measurement. Each level
/// subsumes the previous one: every physical channel is CPTP, unital
/// channels fix the first transfer-matrix column, Pauli channels are
/// diagonal. `none` drops even the CPTP row constraint, which only matters
/// for cost accounting (the first row is then scheduled for validation
/// runs, although its outcome is the constant 1).
enum class Prior { none, cptp, unital, pauli };

inline bool prior_at_least(Prior p, Prior level) {
  return static_cast<int>(p) >= static_cast<int>(level);
}

inline std::string to_string(Prior p) {
  switch (p) {
    case Prior::none: return "none";
    case Prior::cptp: return "cptp";
    case Prior::unital: return "unital";
    case Prior::pauli: return "pauli";
  }
  return "?";
}

inline Prior prior_from_string(const std::string& s) {
  if (s == "none") return Prior::none;
  if (s == "cptp") return Prior::cptp;
  if (s == "unital") return Prior::unital;
  if (s == "pauli") return Prior::pauli;
  throw std::invalid_argument("unknown prior '" + s + "'");
}

/// One experimental configuration: prepare input state `state` of the
/// protocol's family, evolve it through the channel, measure the Pauli
/// observable `observable` for the given number of shots. Observable 0 is
/// the identity, whose expectation is 1 on any state; such configurations
/// appear in plans only as validation entries and are never sampled.
struct Configuration {
  std::size_t observable;
  std::size_t state;
  Protocol protocol;
  ShotCount shots;
};

/// A sampled or exact expectation value. Exact estimates carry shots = 0
/// and a zero standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t shots = 0;
};

// Transfer-matrix entry address (observable row, state column).
using EntryKey = std::pair<std::size_t, std::size_t>;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Stable per-configuration seed derived from the master seed and the
/// configuration identity. Plans of different sizes and any evaluation
/// order produce the same per-configuration random streams.
inline std::uint64_t configuration_seed(std::uint64_t master_seed,
                                        Protocol protocol, std::size_t observable,
                                        std::size_t state) {
  std::uint64_t h = detail::splitmix64(master_seed);
  h = detail::splitmix64(h ^ (protocol == Protocol::dptm ? 0x1dULL : 0x2dULL));
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(observable));
  h = detail::splitmix64(h ^ static_cast<std::uint64_t>(state));
  return h;
}

}  // namespace ptm
