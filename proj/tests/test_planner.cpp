#include <catch2/catch_amalgamated.hpp>

#include "ptm/planner.hpp"

using namespace ptm;

namespace {

std::size_t plan_size(const std::vector<EntryKey>& entries, Protocol proto,
                      Prior prior, std::size_t n) {
  return plan_configurations(entries, proto, prior, n, ShotCount::of(512))
      .size();
}

}  // namespace

TEST_CASE("direct per-entry costs", "[cost]") {
  REQUIRE(entry_cost(Protocol::dptm, 2, 1, 1, Prior::none) == 2);
  REQUIRE(entry_cost(Protocol::dptm, 2, 1, 1, Prior::cptp) == 2);
  REQUIRE(entry_cost(Protocol::dptm, 2, 0, 1, Prior::cptp) == 1);
  REQUIRE(entry_cost(Protocol::dptm, 0, 2, 1, Prior::cptp) == 0);
  REQUIRE(entry_cost(Protocol::dptm, 2, 1, 1, Prior::unital) == 1);
  REQUIRE(entry_cost(Protocol::dptm, 2, 0, 1, Prior::unital) == 0);
  REQUIRE(entry_cost(Protocol::dptm, 2, 2, 1, Prior::pauli) == 1);
  REQUIRE(entry_cost(Protocol::dptm, 2, 1, 1, Prior::pauli) == 0);
}

TEST_CASE("standard per-entry costs count column nonzeros", "[cost]") {
  REQUIRE(entry_cost(Protocol::sqpt, 1, 1, 1, Prior::cptp) == 3);
  REQUIRE(entry_cost(Protocol::sqpt, 1, 0, 1, Prior::cptp) == 2);
  REQUIRE(entry_cost(Protocol::sqpt, 6, 6, 2, Prior::cptp) == 9);
  REQUIRE(entry_cost(Protocol::sqpt, 4, 4, 2, Prior::cptp) == 6);
  REQUIRE(entry_cost(Protocol::sqpt, 0, 4, 2, Prior::cptp) == 0);
}

TEST_CASE("cost scaling across qubit counts", "[cost]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t dptm_max = 0, sqpt_min = ~std::size_t{0}, sqpt_max = 0;
    for (std::size_t j = 0; j < basis_size(n); ++j) {
      dptm_max = std::max(dptm_max, entry_cost(Protocol::dptm, 1, j, n,
                                               Prior::none));
      sqpt_min = std::min(sqpt_min, entry_cost(Protocol::sqpt, 1, j, n,
                                               Prior::none));
      sqpt_max = std::max(sqpt_max, entry_cost(Protocol::sqpt, 1, j, n,
                                               Prior::none));
    }
    std::size_t pow3 = 1;
    for (std::size_t k = 0; k < n; ++k) pow3 *= 3;
    REQUIRE(dptm_max == 2);
    REQUIRE(sqpt_min == (std::size_t{1} << n));
    REQUIRE(sqpt_max == pow3);
    REQUIRE(dptm_max <= sqpt_min);
    REQUIRE(sqpt_min < sqpt_max);
    if (n == 1) {
      REQUIRE(dptm_max == sqpt_min);
    } else {
      REQUIRE(dptm_max < sqpt_min);
    }
  }
}

TEST_CASE("amplitude-damping characterization plans", "[plan]") {
  const std::vector<EntryKey> entries = {{1, 1}, {2, 2}, {3, 0}, {3, 3}};
  const auto dptm =
      plan_configurations(entries, Protocol::dptm, Prior::cptp, 1,
                          ShotCount::of(512));
  REQUIRE(dptm.size() == 4);
  // Rows 1 and 2 leave their first-column entries out of the request, so
  // the plan measures only the requested configurations; row 3 shares its
  // (3, 0) configuration between the two requested entries.
  std::set<EntryKey> keys;
  for (const Configuration& c : dptm) keys.insert({c.observable, c.state});
  REQUIRE(keys == std::set<EntryKey>{{1, 1}, {2, 2}, {3, 0}, {3, 3}});

  REQUIRE(plan_size(entries, Protocol::sqpt, Prior::cptp, 1) == 8);
}

TEST_CASE("correlated-depolarizing parameter plans", "[plan]") {
  const std::vector<EntryKey> entries = {{4, 4}, {6, 6}};
  REQUIRE(plan_size(entries, Protocol::dptm, Prior::unital, 2) == 2);
  REQUIRE(plan_size(entries, Protocol::sqpt, Prior::unital, 2) == 15);
  REQUIRE(plan_size(entries, Protocol::sqpt, Prior::cptp, 2) == 15);
  // Without the unital prior the two mixed-state references are added.
  REQUIRE(plan_size(entries, Protocol::dptm, Prior::none, 2) == 4);
}

TEST_CASE("requested-set semantics of the subtraction term", "[plan]") {
  // (1, 1) alone: the first-column entry is declared model-known.
  REQUIRE(plan_size({{1, 1}}, Protocol::dptm, Prior::cptp, 1) == 1);
  // Adding (1, 0) to the request schedules the subtraction measurement.
  REQUIRE(plan_size({{1, 1}, {1, 0}}, Protocol::dptm, Prior::cptp, 1) == 2);
  // Under Prior::none nothing can be declared known.
  REQUIRE(plan_size({{1, 1}}, Protocol::dptm, Prior::none, 1) == 2);
}

TEST_CASE("full-matrix plans reproduce the resource table", "[plan]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    const std::vector<EntryKey> full = full_ptm_entries(n);
    const std::uint64_t d2 = basis_size(n);
    const std::uint64_t expected[4] = {d2 * d2, d2 * (d2 - 1),
                                       (d2 - 1) * (d2 - 1), d2 - 1};
    const Prior priors[4] = {Prior::none, Prior::cptp, Prior::unital,
                             Prior::pauli};
    for (int k = 0; k < 4; ++k) {
      REQUIRE(plan_size(full, Protocol::dptm, priors[k], n) == expected[k]);
      REQUIRE(full_ptm_plan_size(Protocol::dptm, priors[k], n) == expected[k]);
    }
  }
}

TEST_CASE("standard full-matrix plans match their closed forms", "[plan]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    const std::vector<EntryKey> full = full_ptm_entries(n);
    for (Prior prior : {Prior::none, Prior::cptp, Prior::unital, Prior::pauli}) {
      REQUIRE(plan_size(full, Protocol::sqpt, prior, n) ==
              full_ptm_plan_size(Protocol::sqpt, prior, n));
    }
  }
  // Full single-qubit Pauli-channel characterization: 8 standard
  // configurations against 3 direct ones.
  REQUIRE(full_ptm_plan_size(Protocol::sqpt, Prior::pauli, 1) == 8);
  REQUIRE(full_ptm_plan_size(Protocol::dptm, Prior::pauli, 1) == 3);
}

TEST_CASE("unitality test plan measures one column", "[plan]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    std::vector<EntryKey> column;
    for (std::size_t i = 0; i < basis_size(n); ++i) column.push_back({i, 0});
    REQUIRE(plan_size(column, Protocol::dptm, Prior::cptp, n) ==
            basis_size(n) - 1);
  }
}

TEST_CASE("scaling table rows", "[plan]") {
  const auto rows = scaling_table(8);
  REQUIRE(rows.size() == 8);
  std::uint64_t full = 16;
  std::size_t pow2 = 2, pow3 = 3;
  for (std::size_t n = 1; n <= 8; ++n) {
    const ScalingRow& row = rows[n - 1];
    REQUIRE(row.num_qubits == n);
    REQUIRE(row.full_tomography == full);
    REQUIRE(row.dptm_max == 2);
    REQUIRE(row.sqpt_min == pow2);
    REQUIRE(row.sqpt_max == pow3);
    full *= 16;
    pow2 *= 2;
    pow3 *= 3;
  }
}

TEST_CASE("plans reject out-of-range entries", "[plan]") {
  REQUIRE_THROWS_AS(
      plan_configurations({{4, 0}}, Protocol::dptm, Prior::cptp, 1,
                          ShotCount::of(16)),
      std::invalid_argument);
  REQUIRE_THROWS_AS(entry_cost(Protocol::dptm, 0, 16, 1, Prior::cptp),
                    std::invalid_argument);
}
