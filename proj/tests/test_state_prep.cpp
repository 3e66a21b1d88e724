#include <catch2/catch_amalgamated.hpp>

#include "ptm/state_prep.hpp"
#include "ptm/tomography.hpp"
#include "support/oracles.hpp"

using namespace ptm;

namespace {

DensityMatrix ket_state(std::size_t n, std::initializer_list<Complex> amps) {
  Vector ket(static_cast<Eigen::Index>(amps.size()));
  Eigen::Index k = 0;
  for (Complex a : amps) ket(k++) = a;
  return DensityMatrix::pure(n, ket);
}

const double s2 = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("direct-protocol input states", "[states]") {
  // j = 0 is the maximally mixed state.
  REQUIRE((dptm_state(0, 1).matrix() - Matrix::Identity(2, 2) / 2.0).norm() <
          1e-15);

  // j = 3 on one qubit is |0><0|.
  REQUIRE((dptm_state(3, 1).matrix() - ket_state(1, {1, 0}).matrix()).norm() <
          1e-15);

  // j = 4 on two qubits is |+><+| (x) 1/2.
  const Matrix plus = ket_state(1, {s2, s2}).matrix();
  const Matrix expected = kron(plus, Matrix::Identity(2, 2) / 2.0);
  REQUIRE((dptm_state(4, 2).matrix() - expected).norm() < 1e-15);

  REQUIRE_THROWS_AS(dptm_state(16, 2), std::invalid_argument);
}

TEST_CASE("direct-protocol states are valid density matrices", "[states]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    for (std::size_t j = 0; j < basis_size(n); ++j) {
      REQUIRE_NOTHROW(dptm_state(j, n));
    }
  }
}

TEST_CASE("standard-protocol input states", "[states]") {
  REQUIRE((sqpt_state(0, 1).matrix() - ket_state(1, {0, 1}).matrix()).norm() <
          1e-15);
  REQUIRE((sqpt_state(2, 1).matrix() - (sigma(0) + sigma(2)) / 2.0).norm() <
          1e-15);
  REQUIRE((sqpt_state(3, 1).matrix() - ket_state(1, {1, 0}).matrix()).norm() <
          1e-15);

  // j = 5 has digits (1, 1): |+><+| on both qubits.
  const Matrix plus = ket_state(1, {s2, s2}).matrix();
  REQUIRE((sqpt_state(5, 2).matrix() - kron(plus, plus)).norm() < 1e-15);

  REQUIRE_THROWS_AS(sqpt_state(4, 1), std::invalid_argument);
}

TEST_CASE("direct reconstruction matrix has the closed-form inverse",
          "[beta]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    const ReconstructionMatrix rec = dptm_reconstruction_matrix(n);
    const auto len = static_cast<Eigen::Index>(basis_size(n));
    for (Eigen::Index i = 0; i < len; ++i) {
      for (Eigen::Index j = 0; j < len; ++j) {
        // beta^{-1}_ij = delta_ij - (1 - delta_0j) delta_i0, entries in
        // {0, +-1}, exactly.
        double expected = (i == j) ? 1.0 : 0.0;
        if (i == 0 && j != 0) expected -= 1.0;
        REQUIRE(rec.inverse()(i, j) == expected);
      }
    }
    REQUIRE((rec.beta() * rec.inverse() -
             RealMatrix::Identity(len, len)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("beta columns are the vectorized input states", "[beta]") {
  for (Protocol proto : {Protocol::dptm, Protocol::sqpt}) {
    const StateFamily family = StateFamily::of(proto, 2);
    for (std::size_t j = 0; j < family.size(); ++j) {
      const RealVector expected =
          pauli_coefficients(family.state(j).matrix(), 2);
      REQUIRE((family.beta().beta().col(static_cast<Eigen::Index>(j)) -
               expected).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("direct states equal the devectorized beta columns", "[beta]") {
  const StateFamily family = StateFamily::dptm(2);
  for (std::size_t j = 0; j < family.size(); ++j) {
    const DensityMatrix from_beta = devectorize(PauliVector(
        2, family.beta().beta().col(static_cast<Eigen::Index>(j))));
    REQUIRE((from_beta.matrix() - family.state(j).matrix())
                .cwiseAbs()
                .maxCoeff() < 1e-13);
  }
}

TEST_CASE("single-qubit standard inverse matches the closed form", "[beta]") {
  const ReconstructionMatrix rec = sqpt_reconstruction_matrix(1);
  RealMatrix expected(4, 4);
  expected << 1, -1, -1, -1,
              0,  2,  0,  0,
              0,  0,  2,  0,
              1, -1, -1,  1;
  expected /= 2.0;
  REQUIRE((rec.inverse() - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sparse columns agree with the dense Kronecker power", "[beta]") {
  for (std::size_t n = 1; n <= 2; ++n) {
    const RealMatrix dense = sqpt_reconstruction_matrix(n).inverse();
    for (std::size_t j = 0; j < basis_size(n); ++j) {
      RealVector column = RealVector::Zero(dense.rows());
      for (const SparseEntry& e : sqpt_beta_inv_column(j, n)) {
        column(static_cast<Eigen::Index>(e.row)) += e.value;
      }
      REQUIRE((column - dense.col(static_cast<Eigen::Index>(j)))
                  .cwiseAbs()
                  .maxCoeff() < 1e-14);
      REQUIRE(sqpt_beta_inv_column(j, n).size() == sqpt_column_nonzeros(j, n));
    }
  }
}

TEST_CASE("column 4 of the two-qubit inverse has six nonzeros", "[beta]") {
  REQUIRE(sqpt_column_nonzeros(4, 2) == 6);
  // The six recombination terms of Gamma_44 with their coefficients.
  const std::vector<std::pair<std::size_t, double>> expected = {
      {0, -0.25}, {3, -0.25}, {4, 0.5}, {7, 0.5}, {12, -0.25}, {15, -0.25}};
  auto column = sqpt_beta_inv_column(4, 2);
  std::sort(column.begin(), column.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.row < b.row;
            });
  REQUIRE(column.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    REQUIRE(column[k].row == expected[k].first);
    REQUIRE(column[k].value == Catch::Approx(expected[k].second));
  }
}

TEST_CASE("column 6 of the two-qubit inverse has nine nonzeros", "[beta]") {
  REQUIRE(sqpt_column_nonzeros(6, 2) == 9);
  // The nine recombination terms of Gamma_66.
  const std::vector<std::pair<std::size_t, double>> expected = {
      {0, 0.25}, {2, -0.5},  {3, 0.25},  {4, -0.5}, {6, 1.0},
      {7, -0.5}, {12, 0.25}, {14, -0.5}, {15, 0.25}};
  auto column = sqpt_beta_inv_column(6, 2);
  std::sort(column.begin(), column.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.row < b.row;
            });
  REQUIRE(column.size() == expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    REQUIRE(column[k].row == expected[k].first);
    REQUIRE(column[k].value == Catch::Approx(expected[k].second));
  }
}

TEST_CASE("column nonzero counts range from 2^n to 3^n", "[beta]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    std::size_t low = ~std::size_t{0}, high = 0;
    for (std::size_t j = 0; j < basis_size(n); ++j) {
      const std::size_t count = sqpt_column_nonzeros(j, n);
      low = std::min(low, count);
      high = std::max(high, count);
    }
    REQUIRE(low == (std::size_t{1} << n));
    std::size_t pow3 = 1;
    for (std::size_t k = 0; k < n; ++k) pow3 *= 3;
    REQUIRE(high == pow3);
  }
}

TEST_CASE("custom families detect linear dependence", "[family]") {
  std::vector<DensityMatrix> states;
  for (std::size_t j = 0; j < 4; ++j) {
    states.push_back(DensityMatrix::maximally_mixed(1));
  }
  REQUIRE_THROWS_AS(StateFamily::custom(1, states), std::invalid_argument);
}

TEST_CASE("custom families reproduce their states", "[family]") {
  std::vector<DensityMatrix> states;
  for (std::size_t j = 0; j < 4; ++j) states.push_back(sqpt_state(j, 1));
  const StateFamily family = StateFamily::custom(1, states);
  REQUIRE_FALSE(family.protocol().has_value());
  REQUIRE((family.beta().beta() - sqpt_reconstruction_matrix(1).beta())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
}

TEST_CASE("solving targets against themselves gives the identity map",
          "[prep]") {
  const StateFamily targets = StateFamily::sqpt(1);
  const PrepChannelSolution sol = prep_channel_solve(targets, targets);
  REQUIRE((sol.lambda.gamma() - RealMatrix::Identity(4, 4))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
  REQUIRE(sol.report.completely_positive);
}

TEST_CASE("preparation map from standard to direct states", "[prep]") {
  const PrepChannelSolution sol =
      prep_channel_solve(StateFamily::dptm(1), StateFamily::sqpt(1));
  RealMatrix expected(4, 4);
  expected << 1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 1, 0,
              0.5, -0.5, -0.5, 0.5;
  REQUIRE((sol.lambda.gamma() - expected).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(sol.max_defining_residual < 1e-9);

  // The solved map moves |1> to the maximally mixed state while fixing the
  // three other pure inputs; no completely positive map does that, and the
  // report shows it.
  REQUIRE_FALSE(sol.report.completely_positive);
  REQUIRE(sol.report.min_choi_eigenvalue < -0.1);
  REQUIRE(sol.report.trace_preserving);
}

TEST_CASE("solved maps satisfy the defining relation", "[prep]") {
  const StateFamily targets = StateFamily::dptm(2);
  const StateFamily seeds = StateFamily::sqpt(2);
  const PrepChannelSolution sol = prep_channel_solve(targets, seeds);
  for (std::size_t j = 0; j < seeds.size(); ++j) {
    const RealVector lhs =
        sol.lambda.gamma() * pauli_coefficients(seeds.state(j).matrix(), 2);
    const RealVector rhs = pauli_coefficients(targets.state(j).matrix(), 2);
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("solver rejects mixed seeds", "[prep]") {
  std::vector<DensityMatrix> seeds;
  for (std::size_t j = 0; j < 4; ++j) seeds.push_back(dptm_state(j, 1));
  // dptm_state(0, .) is maximally mixed, purity 1/2.
  REQUIRE_THROWS_AS(prep_channel_solve(StateFamily::dptm(1), seeds),
                    std::invalid_argument);
}

TEST_CASE("solver rejects linearly dependent seeds", "[prep]") {
  std::vector<DensityMatrix> seeds;
  for (std::size_t j = 0; j < 4; ++j) {
    seeds.push_back(ket_state(1, {1, 0}));
  }
  REQUIRE_THROWS_AS(prep_channel_solve(StateFamily::dptm(1), seeds),
                    std::invalid_argument);
}

TEST_CASE("built-in preparation channels are CPTP", "[prep]") {
  for (PrepChannel name : {PrepChannel::e0, PrepChannel::e1, PrepChannel::e2}) {
    const CptpReport report = validate_cptp(prep_channel_builtin(name));
    REQUIRE(report.trace_preserving);
    REQUIRE(report.completely_positive);
  }
}

TEST_CASE("e0 mixes the ground state", "[prep]") {
  const DensityMatrix out =
      kraus_apply(prep_channel_builtin(PrepChannel::e0), ket_state(1, {1, 0}));
  REQUIRE((out.matrix() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-12);
}

TEST_CASE("e1 prepares state 4 from a plus-zero product", "[prep]") {
  const DensityMatrix seed = ket_state(2, {s2, 0, s2, 0});  // (H (x) 1)|00>
  const DensityMatrix out =
      kraus_apply(prep_channel_builtin(PrepChannel::e1), seed);
  REQUIRE((out.matrix() - dptm_state(4, 2).matrix()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("e2 prepares state 6 from |00>", "[prep]") {
  const DensityMatrix out = kraus_apply(prep_channel_builtin(PrepChannel::e2),
                                        ket_state(2, {1, 0, 0, 0}));
  REQUIRE((out.matrix() - dptm_state(6, 2).matrix()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("e2 equals the two-unitary mixture built from gates", "[prep]") {
  const Matrix u = cnot_gate() * kron(phase_gate(), sigma(0)) *
                   kron(hadamard_gate(), sigma(0));
  const Matrix v = kron(sigma(0), sigma(3)) * kron(sigma(0), sigma(1));
  const Matrix psi = ket_state(2, {1, 0, 0, 0}).matrix();
  const Matrix by_hand =
      0.5 * u * psi * u.adjoint() + 0.5 * v * u * psi * u.adjoint() * v.adjoint();
  REQUIRE((by_hand - dptm_state(6, 2).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}
