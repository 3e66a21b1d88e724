#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptm/channel.hpp"
#include "ptm/density_matrix.hpp"
#include "ptm/models.hpp"
#include "ptm/pauli.hpp"
#include "ptm/planner.hpp"
#include "ptm/state_prep.hpp"
#include "ptm/tomography.hpp"

// JSON wire formats. Complex matrices serialize as nested arrays of
// [re, im] pairs; real matrices as nested arrays of numbers, row-major.

namespace ptm {

using Json = nlohmann::json;

inline Json complex_matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix complex_matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a non-empty matrix array");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& cell = row.at(static_cast<std::size_t>(c));
      if (!cell.is_array() || cell.size() != 2) {
        throw std::invalid_argument("matrix cells must be [re, im] pairs");
      }
      m(r, c) = Complex(cell.at(0).get<double>(), cell.at(1).get<double>());
    }
  }
  return m;
}

inline Json real_matrix_to_json(const RealMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const PauliString& p) {
  return Json{{"label", p.label()}, {"index", p.index()}};
}

inline Json to_json(const DensityMatrix& rho) {
  return Json{{"n", rho.num_qubits()},
              {"rho", complex_matrix_to_json(rho.matrix())}};
}

inline Json to_json(const ChannelSpec& spec) {
  Json out;
  if (!spec.kraus.empty()) {
    Json ops = Json::array();
    for (const Matrix& op : spec.kraus) ops.push_back(complex_matrix_to_json(op));
    out["kraus"] = std::move(ops);
    if (spec.num_qubits) out["n"] = *spec.num_qubits;
    return out;
  }
  out["model"] = spec.model;
  Json params = Json::object();
  for (const auto& [key, value] : spec.params) params[key] = value;
  if (!spec.marginal.empty()) params["marginal"] = spec.marginal;
  out["params"] = std::move(params);
  if (spec.num_qubits) out["n"] = *spec.num_qubits;
  return out;
}

inline ChannelSpec channel_spec_from_json(const Json& j) {
  ChannelSpec spec;
  if (j.contains("kraus")) {
    for (const Json& op : j.at("kraus")) {
      spec.kraus.push_back(complex_matrix_from_json(op));
    }
    if (!j.contains("n")) {
      throw std::invalid_argument("raw Kraus channel spec requires 'n'");
    }
    spec.num_qubits = j.at("n").get<std::size_t>();
    return spec;
  }
  if (!j.contains("model")) {
    throw std::invalid_argument("channel spec needs 'model' or 'kraus'");
  }
  spec.model = j.at("model").get<std::string>();
  if (j.contains("params")) {
    for (const auto& [key, value] : j.at("params").items()) {
      if (key == "marginal") {
        spec.marginal = value.get<std::vector<double>>();
      } else {
        spec.params[key] = value.get<double>();
      }
    }
  }
  if (j.contains("n")) spec.num_qubits = j.at("n").get<std::size_t>();
  return spec;
}

/// Inline channel syntax for the command line:
/// "model=amplitude_damping,p=0.25" or
/// "model=correlated_pauli,mu=0.5,marginal=0.7:0.1:0.1:0.1".
inline ChannelSpec channel_spec_from_inline(const std::string& text) {
  ChannelSpec spec;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("inline channel items must be key=value: '" +
                                  item + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "model") {
      spec.model = value;
    } else if (key == "n") {
      spec.num_qubits = static_cast<std::size_t>(std::stoul(value));
    } else if (key == "marginal") {
      std::stringstream parts(value);
      std::string part;
      while (std::getline(parts, part, ':')) {
        spec.marginal.push_back(std::stod(part));
      }
    } else {
      spec.params[key] = std::stod(value);
    }
  }
  if (spec.model.empty()) {
    throw std::invalid_argument("inline channel spec requires model=<name>");
  }
  return spec;
}

inline Json to_json(const CptpReport& report) {
  return Json{{"tp_residual", report.tp_residual},
              {"min_choi_eigenvalue", report.min_choi_eigenvalue},
              {"unitality_residual", report.unitality_residual},
              {"trace_preserving", report.trace_preserving},
              {"completely_positive", report.completely_positive},
              {"unital", report.unital}};
}

/// Transfer-matrix export; the channel spec rides along for provenance.
inline Json ptm_to_json(const PauliTransferMatrix& ptm,
                        const ChannelSpec* provenance = nullptr) {
  Json out{{"n", ptm.num_qubits()}, {"gamma", real_matrix_to_json(ptm.gamma())}};
  if (provenance) out["channel"] = to_json(*provenance);
  return out;
}

inline Json to_json(const StateFamily& family) {
  Json states = Json::array();
  for (std::size_t j = 0; j < family.size(); ++j) {
    states.push_back(complex_matrix_to_json(family.state(j).matrix()));
  }
  return Json{{"protocol", family.protocol() ? to_string(*family.protocol())
                                             : std::string("custom")},
              {"n", family.num_qubits()},
              {"states", std::move(states)},
              {"beta", real_matrix_to_json(family.beta().beta())},
              {"beta_inverse", real_matrix_to_json(family.beta().inverse())}};
}

inline Json shots_to_json(ShotCount shots) {
  if (shots.is_exact()) return Json("exact");
  return Json(shots.count());
}

inline ShotCount shots_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "exact") return ShotCount::exact();
    throw std::invalid_argument("shots must be a count or \"exact\"");
  }
  return ShotCount::of(j.get<std::uint64_t>());
}

inline Json to_json(const Estimate& e) {
  return Json{{"value", e.value}, {"std_error", e.std_error}, {"shots", e.shots}};
}

inline Json to_json(const Configuration& c) {
  return Json{{"observable", c.observable},
              {"state", c.state},
              {"protocol", to_string(c.protocol)},
              {"shots", shots_to_json(c.shots)}};
}

inline Json to_json(const TomographyResult& result) {
  Json entries = Json::array();
  for (const auto& [key, estimate] : result.entries) {
    entries.push_back(Json{{"i", key.first},
                           {"j", key.second},
                           {"value", estimate.value},
                           {"std_error", estimate.std_error},
                           {"shots", estimate.shots}});
  }
  Json configs = Json::array();
  for (const Configuration& c : result.configurations) {
    configs.push_back(Json{{"observable", c.observable}, {"state", c.state}});
  }
  return Json{{"protocol", to_string(result.protocol)},
              {"prior", to_string(result.prior)},
              {"n", result.num_qubits},
              {"master_seed", result.master_seed},
              {"shots", shots_to_json(result.shots)},
              {"configuration_count", result.configuration_count},
              {"configurations", std::move(configs)},
              {"entries", std::move(entries)}};
}

/// CSV export, one line per entry. The last column counts the
/// configurations feeding that entry under the result's requested set.
inline std::string to_csv(const TomographyResult& result) {
  std::set<EntryKey> requested;
  for (const auto& [key, estimate] : result.entries) requested.insert(key);
  std::ostringstream out;
  out << "i,j,gamma_hat,std_error,n_configs_used\n";
  out.precision(17);
  for (const auto& [key, estimate] : result.entries) {
    const auto configs = configurations_for_entry(
        key, requested, result.protocol, result.prior, result.num_qubits);
    out << key.first << ',' << key.second << ',' << estimate.value << ','
        << estimate.std_error << ',' << configs.size() << '\n';
  }
  return out.str();
}

}  // namespace ptm
