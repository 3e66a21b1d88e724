// Command-line front end: analytic transfer matrices, tomography runs,
// configuration-cost tables, and the two shipped reproduction studies.
//
//   ptmtool exact --channel model=amplitude_damping,p=0.25 --validate
//   ptmtool tomo  --channel spec.json --protocol both --shots 512
//   ptmtool cost  --n 3 --protocol sqpt
//   ptmtool cost  --scaling --max-n 8
//   ptmtool repro corr-depol
//
// Output is JSON on stdout (or --out FILE); repro also prints a readable
// summary table on stderr. Exit status is 0 only if every requested
// assertion holds.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptm/io.hpp"

namespace {

using ptm::Json;

ptm::ChannelSpec load_channel_spec(const std::string& arg) {
  if (arg.rfind("model=", 0) == 0) {
    return ptm::channel_spec_from_inline(arg);
  }
  std::ifstream in(arg);
  if (!in) {
    throw std::invalid_argument("cannot open channel spec file '" + arg + "'");
  }
  Json j;
  in >> j;
  return ptm::channel_spec_from_json(j);
}

std::vector<ptm::EntryKey> parse_entries(const std::string& text,
                                         std::size_t num_qubits) {
  if (text == "full") {
    return ptm::full_ptm_entries(num_qubits);
  }
  std::vector<ptm::EntryKey> entries;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ';')) {
    if (item.empty()) continue;
    const auto comma = item.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("entries must be 'i,j' pairs: '" + item + "'");
    }
    entries.push_back({std::stoul(item.substr(0, comma)),
                       std::stoul(item.substr(comma + 1))});
  }
  if (entries.empty()) {
    throw std::invalid_argument("no entries requested");
  }
  for (const ptm::EntryKey& e : entries) {
    if (e.first >= ptm::basis_size(num_qubits) ||
        e.second >= ptm::basis_size(num_qubits)) {
      throw std::invalid_argument("entry index out of range for this channel");
    }
  }
  return entries;
}

ptm::ShotCount parse_shots(const std::string& text) {
  if (text == "exact") return ptm::ShotCount::exact();
  return ptm::ShotCount::of(std::stoull(text));
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PTMTOOL_SEED")) {
    return std::stoull(env);
  }
  return 0;
}

void emit(const Json& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload.dump(2) << std::endl;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write to '" + out_path + "'");
  }
  out << payload.dump(2) << '\n';
}

void emit_text(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) {
    throw std::runtime_error("cannot write to '" + out_path + "'");
  }
  out << text;
}

int cmd_exact(const std::string& channel_arg, bool with_choi, bool with_report,
              const std::string& out_path) {
  const ptm::ChannelSpec spec = load_channel_spec(channel_arg);
  const ptm::KrausChannel channel = ptm::build_model(spec);
  const ptm::PauliTransferMatrix gamma = ptm::kraus_to_ptm(channel);
  Json payload = ptm::ptm_to_json(gamma, &spec);
  if (with_choi) {
    payload["choi"] = ptm::complex_matrix_to_json(ptm::ptm_to_choi(gamma).matrix());
  }
  if (with_report) {
    payload["validity"] = ptm::to_json(ptm::validate_cptp(channel));
  }
  emit(payload, out_path);
  return 0;
}

Json comparison_block(const ptm::TomographyResult& dptm,
                      const ptm::TomographyResult& sqpt,
                      const ptm::PauliTransferMatrix& exact) {
  Json entries = Json::array();
  for (const auto& [key, d_est] : dptm.entries) {
    const auto s_it = sqpt.entries.find(key);
    if (s_it == sqpt.entries.end()) continue;
    const double truth = exact(key.first, key.second);
    entries.push_back(
        Json{{"i", key.first},
             {"j", key.second},
             {"exact", truth},
             {"dptm", Json{{"value", d_est.value},
                           {"std_error", d_est.std_error},
                           {"deviation", d_est.value - truth}}},
             {"sqpt", Json{{"value", s_it->second.value},
                           {"std_error", s_it->second.std_error},
                           {"deviation", s_it->second.value - truth}}}});
  }
  return Json{{"configuration_counts",
               Json{{"dptm", dptm.configuration_count},
                    {"sqpt", sqpt.configuration_count}}},
              {"entries", std::move(entries)}};
}

int cmd_tomo(const std::string& channel_arg, const std::string& protocol_arg,
             const std::string& entries_arg, const std::string& prior_arg,
             const std::string& shots_arg,
             const std::optional<std::uint64_t>& seed_flag,
             const std::string& format, const std::string& out_path) {
  const ptm::ChannelSpec spec = load_channel_spec(channel_arg);
  const ptm::KrausChannel channel = ptm::build_model(spec);
  const std::size_t n = channel.num_qubits();
  const auto entries = parse_entries(entries_arg, n);
  const ptm::Prior prior = ptm::prior_from_string(prior_arg);
  const ptm::ShotCount shots = parse_shots(shots_arg);
  const std::uint64_t seed = resolve_seed(seed_flag);

  const bool run_dptm = protocol_arg == "dptm" || protocol_arg == "both";
  const bool run_sqpt = protocol_arg == "sqpt" || protocol_arg == "both";
  if (!run_dptm && !run_sqpt) {
    throw std::invalid_argument("protocol must be dptm, sqpt, or both");
  }

  std::optional<ptm::TomographyResult> dptm, sqpt;
  if (run_dptm) {
    dptm = ptm::run_protocol(channel, entries, ptm::Protocol::dptm, prior,
                             shots, seed);
  }
  if (run_sqpt) {
    sqpt = ptm::run_protocol(channel, entries, ptm::Protocol::sqpt, prior,
                             shots, seed);
  }

  if (format == "csv") {
    if (dptm && sqpt) {
      throw std::invalid_argument(
          "csv output covers a single protocol; pick --protocol dptm or sqpt");
    }
    emit_text(ptm::to_csv(dptm ? *dptm : *sqpt), out_path);
    return 0;
  }

  Json payload{{"channel", ptm::to_json(spec)}, {"n", n}};
  if (dptm) payload["dptm"] = ptm::to_json(*dptm);
  if (sqpt) payload["sqpt"] = ptm::to_json(*sqpt);
  if (dptm && sqpt) {
    payload["comparison"] =
        comparison_block(*dptm, *sqpt, ptm::kraus_to_ptm(channel));
  }
  emit(payload, out_path);
  return 0;
}

int cmd_cost(std::size_t n, const std::string& protocol_arg,
             const std::string& prior_arg, bool table, bool scaling,
             std::size_t max_n, const std::string& out_path) {
  // Cost accounting only counts column nonzeros, so it runs well past the
  // dense-simulation qubit limit; 12 keeps the 4^n column scans snappy.
  constexpr std::size_t cost_qubit_limit = 12;
  if (n < 1 || n > cost_qubit_limit || max_n < 1 || max_n > cost_qubit_limit) {
    throw std::invalid_argument("cost accounting supports 1 to " +
                                std::to_string(cost_qubit_limit) + " qubits");
  }
  Json payload;
  if (scaling) {
    Json rows = Json::array();
    for (const ptm::ScalingRow& row : ptm::scaling_table(max_n)) {
      rows.push_back(Json{{"n", row.num_qubits},
                          {"full_tomography", row.full_tomography},
                          {"dptm_max", row.dptm_max},
                          {"sqpt_min", row.sqpt_min},
                          {"sqpt_max", row.sqpt_max}});
    }
    payload = Json{{"scaling", std::move(rows)}};
  } else if (table) {
    auto totals = [&](ptm::Protocol proto) {
      return Json{
          {"general", ptm::full_ptm_plan_size(proto, ptm::Prior::none, n)},
          {"cptp", ptm::full_ptm_plan_size(proto, ptm::Prior::cptp, n)},
          {"unital", ptm::full_ptm_plan_size(proto, ptm::Prior::unital, n)},
          {"pauli", ptm::full_ptm_plan_size(proto, ptm::Prior::pauli, n)}};
    };
    payload = Json{{"n", n},
                   {"dptm", totals(ptm::Protocol::dptm)},
                   {"sqpt", totals(ptm::Protocol::sqpt)}};
  } else {
    const ptm::Protocol proto = ptm::protocol_from_string(protocol_arg);
    const ptm::Prior prior = ptm::prior_from_string(prior_arg);
    std::size_t low = ~std::size_t{0}, high = 0;
    for (std::size_t j = 0; j < ptm::basis_size(n); ++j) {
      const std::size_t cost = ptm::entry_cost(proto, 1, j, n, prior);
      low = std::min(low, cost);
      high = std::max(high, cost);
    }
    payload = Json{{"n", n},
                   {"protocol", ptm::to_string(proto)},
                   {"prior", ptm::to_string(prior)},
                   {"per_entry", Json{{"min", low}, {"max", high}}},
                   {"full_ptm_total", ptm::full_ptm_plan_size(proto, prior, n)}};
  }
  emit(payload, out_path);
  return 0;
}

struct ReproCheck {
  std::string name;
  bool passed;
  std::string detail;
};

Json checks_to_json(const std::vector<ReproCheck>& checks) {
  Json out = Json::array();
  for (const ReproCheck& c : checks) {
    out.push_back(
        Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  return out;
}

void print_summary(const std::string& title,
                   const std::vector<ReproCheck>& checks) {
  std::cerr << title << '\n';
  for (const ReproCheck& c : checks) {
    std::cerr << "  [" << (c.passed ? "ok" : "FAIL") << "] " << c.name << ": "
              << c.detail << '\n';
  }
}

int cmd_repro(const std::string& name,
              const std::optional<std::uint64_t>& seed_flag,
              const std::string& out_path) {
  const std::uint64_t seed = resolve_seed(seed_flag);
  std::vector<ReproCheck> checks;
  auto check = [&](const std::string& label, bool ok, const std::string& detail) {
    checks.push_back({label, ok, detail});
  };
  auto within = [](double value, double target, double se, double factor) {
    return std::abs(value - target) <= factor * se;
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
  };

  Json payload{{"study", name}, {"master_seed", seed}};

  if (name == "amp-damp") {
    const double p = 0.25;
    const ptm::KrausChannel channel = ptm::amplitude_damping(p);
    const ptm::PauliTransferMatrix exact = ptm::kraus_to_ptm(channel);
    const std::vector<ptm::EntryKey> entries = {{1, 1}, {2, 2}, {3, 0}, {3, 3}};
    const ptm::ShotCount shots = ptm::ShotCount::of(512);

    const auto dptm = ptm::run_protocol(channel, entries, ptm::Protocol::dptm,
                                        ptm::Prior::cptp, shots, seed);
    const auto sqpt = ptm::run_protocol(channel, entries, ptm::Protocol::sqpt,
                                        ptm::Prior::cptp, shots, seed);
    check("dptm uses 4 configurations", dptm.configuration_count == 4,
          std::to_string(dptm.configuration_count));
    check("sqpt uses 8 configurations", sqpt.configuration_count == 8,
          std::to_string(sqpt.configuration_count));

    Json rows = Json::array();
    for (const ptm::EntryKey& key : entries) {
      const double truth = exact(key.first, key.second);
      const ptm::Estimate& d = dptm.entries.at(key);
      const ptm::Estimate& q = sqpt.entries.at(key);
      const std::string label = "Gamma_" + std::to_string(key.first) +
                                std::to_string(key.second);
      check(label + " (dptm) within 4 SE", within(d.value, truth, d.std_error, 4),
            fmt(d.value) + " +- " + fmt(d.std_error) + " vs " + fmt(truth));
      check(label + " (sqpt) within 4 SE", within(q.value, truth, q.std_error, 4),
            fmt(q.value) + " +- " + fmt(q.std_error) + " vs " + fmt(truth));
      rows.push_back(Json{{"i", key.first},
                          {"j", key.second},
                          {"theory", truth},
                          {"dptm_value", d.value},
                          {"dptm_std_error", d.std_error},
                          {"sqpt_value", q.value},
                          {"sqpt_std_error", q.std_error}});
    }
    payload["table"] = std::move(rows);
    payload["configuration_counts"] =
        Json{{"dptm", dptm.configuration_count},
             {"sqpt", sqpt.configuration_count}};
  } else if (name == "corr-depol") {
    const double p = 0.25, mu = 0.75;
    const ptm::KrausChannel channel = ptm::correlated_depolarizing(p, mu);
    const std::vector<ptm::EntryKey> entries = {{4, 4}, {6, 6}};
    const ptm::ShotCount shots = ptm::ShotCount::of(2048);
    const double g44_truth = 1.0 - p;
    const double g66_truth = (1.0 - p) * (mu * p - p + 1.0);

    const auto dptm = ptm::run_protocol(channel, entries, ptm::Protocol::dptm,
                                        ptm::Prior::unital, shots, seed);
    const auto sqpt = ptm::run_protocol(channel, entries, ptm::Protocol::sqpt,
                                        ptm::Prior::unital, shots, seed);
    check("dptm uses 2 configurations", dptm.configuration_count == 2,
          std::to_string(dptm.configuration_count));
    check("sqpt uses 15 configurations", sqpt.configuration_count == 15,
          std::to_string(sqpt.configuration_count));

    Json rows = Json::array();
    for (const auto& [proto, result] :
         {std::pair<std::string, const ptm::TomographyResult&>{"dptm", dptm},
          {"sqpt", sqpt}}) {
      const ptm::Estimate& g44 = result.entries.at({4, 4});
      const ptm::Estimate& g66 = result.entries.at({6, 6});
      check("Gamma_44 (" + proto + ") within 4 SE",
            within(g44.value, g44_truth, g44.std_error, 4),
            fmt(g44.value) + " +- " + fmt(g44.std_error) + " vs " +
                fmt(g44_truth));
      check("Gamma_66 (" + proto + ") within 4 SE",
            within(g66.value, g66_truth, g66.std_error, 4),
            fmt(g66.value) + " +- " + fmt(g66.std_error) + " vs " +
                fmt(g66_truth));

      const ptm::CorrDepolParams params =
          ptm::extract_corr_depol_params(g44, g66);
      check("extracted p (" + proto + ") within 4 SE",
            within(params.p.value, p, params.p.std_error, 4),
            fmt(params.p.value) + " +- " + fmt(params.p.std_error));
      check("extracted mu (" + proto + ") within 4 SE",
            within(params.mu.value, mu, params.mu.std_error, 4),
            fmt(params.mu.value) + " +- " + fmt(params.mu.std_error));
      rows.push_back(Json{{"protocol", proto},
                          {"gamma_44", ptm::to_json(g44)},
                          {"gamma_66", ptm::to_json(g66)},
                          {"p", Json{{"value", params.p.value},
                                     {"std_error", params.p.std_error}}},
                          {"mu", Json{{"value", params.mu.value},
                                      {"std_error", params.mu.std_error}}}});
    }
    payload["table"] = std::move(rows);
    payload["configuration_counts"] =
        Json{{"dptm", dptm.configuration_count},
             {"sqpt", sqpt.configuration_count}};
  } else {
    throw std::invalid_argument("unknown study '" + name +
                                "'; expected amp-damp or corr-depol");
  }

  bool all_ok = true;
  for (const ReproCheck& c : checks) all_ok = all_ok && c.passed;
  payload["checks"] = checks_to_json(checks);
  payload["passed"] = all_ok;
  print_summary("reproduction study: " + name, checks);
  emit(payload, out_path);
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli transfer matrix tomography toolkit"};
  app.require_subcommand(1);

  std::string channel_arg, out_path;
  std::string protocol_arg = "both", entries_arg = "full", prior_arg = "cptp";
  std::string shots_arg = "exact", format = "json";
  std::optional<std::uint64_t> seed_flag;
  bool with_choi = false, with_report = false;

  CLI::App* exact = app.add_subcommand("exact", "analytic transfer matrix");
  exact->add_option("--channel", channel_arg, "channel spec file or model=...")
      ->required();
  exact->add_flag("--choi", with_choi, "include the Choi matrix");
  exact->add_flag("--validate", with_report, "include the CPTP report");
  exact->add_option("--out", out_path, "write JSON here instead of stdout");

  CLI::App* tomo = app.add_subcommand("tomo", "simulated tomography run");
  tomo->add_option("--channel", channel_arg, "channel spec file or model=...")
      ->required();
  tomo->add_option("--protocol", protocol_arg, "dptm, sqpt, or both");
  tomo->add_option("--entries", entries_arg, "'i,j;i,j;...' or 'full'");
  tomo->add_option("--prior", prior_arg, "none, cptp, unital, or pauli");
  tomo->add_option("--shots", shots_arg, "shot count or 'exact'");
  tomo->add_option("--seed", seed_flag, "master seed (default: $PTMTOOL_SEED or 0)");
  tomo->add_option("--format", format, "json or csv");
  tomo->add_option("--out", out_path, "write here instead of stdout");

  std::size_t cost_n = 1, max_n = 8;
  bool table = false, scaling = false;
  std::string cost_protocol = "dptm", cost_prior = "cptp";
  CLI::App* cost = app.add_subcommand("cost", "configuration-cost accounting");
  cost->add_option("--n", cost_n, "qubit count");
  cost->add_option("--protocol", cost_protocol, "dptm or sqpt");
  cost->add_option("--prior", cost_prior, "none, cptp, unital, or pauli");
  cost->add_flag("--table", table, "full-matrix totals for every prior");
  cost->add_flag("--scaling", scaling, "per-entry cost table for n = 1..max-n");
  cost->add_option("--max-n", max_n, "last row of the scaling table");
  cost->add_option("--out", out_path, "write JSON here instead of stdout");

  std::string study;
  CLI::App* repro = app.add_subcommand("repro", "reproduce a shipped study");
  repro->add_option("study", study, "amp-damp or corr-depol")->required();
  repro->add_option("--seed", seed_flag, "master seed (default: $PTMTOOL_SEED or 0)");
  repro->add_option("--out", out_path, "write JSON here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (exact->parsed()) {
      return cmd_exact(channel_arg, with_choi, with_report, out_path);
    }
    if (tomo->parsed()) {
      return cmd_tomo(channel_arg, protocol_arg, entries_arg, prior_arg,
                      shots_arg, seed_flag, format, out_path);
    }
    if (cost->parsed()) {
      return cmd_cost(cost_n, cost_protocol, cost_prior, table, scaling, max_n,
                      out_path);
    }
    if (repro->parsed()) {
      return cmd_repro(study, seed_flag, out_path);
    }
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 0;
}
