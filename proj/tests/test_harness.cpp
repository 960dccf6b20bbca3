// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "milac/channel.hpp"
#include "milac/config.hpp"
#include "milac/errors.hpp"
#include "milac/harness.hpp"

using namespace milac;

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string token;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  parts.push_back(token);
  return parts;
}

// CSV rows as field lists, header excluded; trailing newline tolerated.
std::vector<std::vector<std::string>> csv_rows(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line : split(csv, '\n')) {
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
  }
  rows.erase(rows.begin());
  return rows;
}

// Small, well-conditioned system so the solver-backed commands stay fast:
// the high noise figure keeps the snr moderate at a 0 dBm budget.
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.system.n_antennas = 4;
  cfg.system.n_users = 2;
  cfg.system.n_rf_chains = 2;
  cfg.system.pmax_dbm = 0.0;
  cfg.system.noise_figure_db = 90.0;
  cfg.channel.seed = 7;
  cfg.solver.eps_in = 1e-5;
  cfg.solver.eps_out = 1e-5;
  cfg.solver.max_outer = 15;
  cfg.solver.max_inner = 80;
  cfg.solver.max_pgd = 150;
  return cfg;
}

}  // namespace

TEST_CASE("dbm and watt conversions round trip") {
  CHECK(dbm_to_watt(30.0) == 1.0);
  CHECK(dbm_to_watt(0.0) == doctest::Approx(1e-3).epsilon(1e-15));
  for (double dbm : {-10.0, 0.0, 10.0, 23.0, 30.0, 40.0}) {
    CHECK(watt_to_dbm(dbm_to_watt(dbm)) ==
          doctest::Approx(dbm).epsilon(1e-12));
  }
  for (double watt : {1e-6, 1e-3, 0.5, 1.0, 10.0}) {
    CHECK(dbm_to_watt(watt_to_dbm(watt)) ==
          doctest::Approx(watt).epsilon(1e-12));
  }
  CHECK_THROWS_AS(watt_to_dbm(0.0), ContractViolation);
  CHECK_THROWS_AS(watt_to_dbm(-1.0), ContractViolation);
}

TEST_CASE("config text parses defaults, overrides, and comments") {
  const ExperimentConfig def = parse_config("");
  CHECK(def.system.n_antennas == 64);
  CHECK(def.system.n_users == 4);
  CHECK(def.system.n_rf_chains == 4);
  CHECK(def.system.pmax_dbm == 30.0);
  CHECK(def.system.dac_bits == 4);
  CHECK(def.channel.model == ChannelModel::rayleigh);
  CHECK(def.solver.frontier_weights == 21);
  CHECK(def.runs == 1);
  CHECK(def.p_max_watt() == doctest::Approx(1.0).epsilon(1e-15));

  const ExperimentConfig cfg = parse_config(
      "# leading comment\n"
      "system.n_antennas = 8\n"
      "system.n_users=2   # trailing comment\n"
      "\n"
      "power.pa_efficiency = 0.5\n"
      "channel.model = geometric\n"
      "channel.seed = 99\n"
      "solver.max_pgd = 333\n"
      "runs = 3\n");
  CHECK(cfg.system.n_antennas == 8);
  CHECK(cfg.system.n_users == 2);
  CHECK(cfg.power.pa_efficiency == 0.5);
  CHECK(cfg.channel.model == ChannelModel::geometric);
  CHECK(cfg.channel.seed == 99);
  CHECK(cfg.solver.max_pgd == 333);
  CHECK(cfg.runs == 3);

  const PowerModel pm = cfg.power_model();
  CHECK(pm.pa_efficiency == 0.5);
  CHECK(pm.sampling_rate_hz == cfg.system.bandwidth_hz);
  CHECK(pm.p_lp == doctest::Approx(14e-3).epsilon(1e-15));
  CHECK(pm.p_adm_eff == doctest::Approx(8.75e-6).epsilon(1e-15));
}

TEST_CASE("config parsing rejects bad keys, values, and ranges") {
  CHECK_THROWS_AS(parse_config("system.bogus = 1\n"), ParseError);
  try {
    parse_config("system.bogus = 1\n");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("system.bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("just some words\n"), ParseError);
  CHECK_THROWS_AS(parse_config("system.n_antennas = abc\n"), ParseError);
  CHECK_THROWS_AS(parse_config("system.n_antennas = 0\n"), ParseError);
  CHECK_THROWS_AS(parse_config("system.dac_bits = 64\n"), ParseError);
  CHECK_THROWS_AS(parse_config("power.pa_efficiency = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_config("power.pa_efficiency = abc\n"), ParseError);
  CHECK_THROWS_AS(parse_config("channel.model = laplacian\n"), ParseError);
  CHECK_THROWS_AS(parse_config("channel.model = file\n"), ParseError);
  CHECK_THROWS_AS(parse_config("solver.eps_in = -1e-6\n"), ParseError);
  CHECK_THROWS_AS(parse_config("system.pmax_dbm = inf\n"), ParseError);
  CHECK_THROWS_AS(parse_config_file("/nonexistent/config.txt"), ParseError);
}

TEST_CASE("frontier weight grid is uniform with exact endpoints") {
  const std::vector<double> w = frontier_weight_grid(21);
  REQUIRE(w.size() == 21);
  CHECK(w.front() == 0.0);
  CHECK(w.back() == 1.0);
  CHECK(w[10] == doctest::Approx(0.5).epsilon(1e-15));
  for (std::size_t i = 1; i < w.size(); ++i) CHECK(w[i] > w[i - 1]);
  CHECK(frontier_weight_grid(2) == std::vector<double>{0.0, 1.0});
  CHECK_THROWS_AS(frontier_weight_grid(1), ContractViolation);
}

TEST_CASE("csv numbers print 12 significant digits") {
  CHECK(format_csv_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_csv_number(2.5) == "2.5");
  CHECK(format_csv_number(0.0) == "0");
  CHECK(format_csv_number(1e8) == "100000000");
  CHECK(format_csv_number(std::nan("")) == "nan");
}

TEST_CASE("architecture and sweep parameter names round trip") {
  for (Architecture kind :
       {Architecture::milac, Architecture::digital, Architecture::hybrid_fc,
        Architecture::hybrid_sc}) {
    CHECK(architecture_from(architecture_name(kind)) == kind);
  }
  for (SweepParam p :
       {SweepParam::pmax_dbm, SweepParam::users, SweepParam::antennas,
        SweepParam::dac_bits, SweepParam::adm_scale}) {
    CHECK(sweep_param_from(sweep_param_name(p)) == p);
  }
  CHECK_THROWS_AS(architecture_from("analog"), ParseError);
  CHECK_THROWS_AS(sweep_param_from("bandwidth"), ParseError);

  const std::vector<Architecture> archs =
      parse_architecture_list("milac, digital");
  REQUIRE(archs.size() == 2);
  CHECK(archs[0] == Architecture::milac);
  CHECK(archs[1] == Architecture::digital);
  CHECK_THROWS_AS(parse_architecture_list(""), ParseError);
  CHECK_THROWS_AS(parse_architecture_list("milac,,digital"), ParseError);
}

TEST_CASE("sweep emits per-realization and mean rows deterministically") {
  ExperimentConfig cfg = small_config();
  cfg.runs = 2;
  const std::vector<double> values = {0.0, 5.0};
  const CommandOutput first = run_sweep(cfg, SweepParam::pmax_dbm, values);
  const CommandOutput second = run_sweep(cfg, SweepParam::pmax_dbm, values);
  CHECK(first.csv == second.csv);

  const auto rows = csv_rows(first.csv);
  REQUIRE(rows.size() == 24);  // 2 values x 4 archs x (2 runs + mean)
  int result_rows = 0;
  int mean_rows = 0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 10);
    CHECK(row[1] == "pmax_dbm");
    if (row[3] == "mean") {
      ++mean_rows;
      CHECK((row[9] == "0" || row[9] == "1"));
    } else {
      ++result_rows;
      CHECK(std::stod(row[4]) > 0.0);   // se
      CHECK(std::stod(row[5]) > 0.0);   // ee
      CHECK(std::stod(row[7]) > 0.0);   // p_tot
    }
  }
  CHECK(result_rows == 16);
  CHECK(mean_rows == 8);

  // Fixed architecture order inside each value group.
  CHECK(rows[0][0] == "digital");
  CHECK(rows[3][0] == "milac");
  CHECK(rows[6][0] == "hybrid-fc");
  CHECK(rows[9][0] == "hybrid-sc");

  // The contract's canonical count: 2 values over 1 run -> 8 result rows.
  cfg.runs = 1;
  const auto single = csv_rows(run_sweep(cfg, SweepParam::pmax_dbm, values).csv);
  int singles = 0;
  for (const auto& row : single) {
    if (row[3] != "mean") ++singles;
  }
  CHECK(singles == 8);
}

TEST_CASE("sweep rejects bad value lists") {
  const ExperimentConfig cfg = small_config();
  CHECK_THROWS_AS(run_sweep(cfg, SweepParam::pmax_dbm, {}), ParseError);
  CHECK_THROWS_AS(run_sweep(cfg, SweepParam::users, {2.5}), ParseError);
  CHECK_THROWS_AS(run_sweep(cfg, SweepParam::dac_bits, {0.0}), ParseError);
  CHECK_THROWS_AS(run_sweep(cfg, SweepParam::adm_scale, {-1.0}), ParseError);
}

TEST_CASE("users sweep past the antenna count yields diagnostic rows") {
  ExperimentConfig cfg = small_config();
  const CommandOutput out = run_sweep(cfg, SweepParam::users, {2.0, 6.0});
  int solved = 0;
  int skipped = 0;
  for (const auto& row : csv_rows(out.csv)) {
    if (std::stod(row[2]) == 6.0) {
      CHECK(row[3] != "mean");
      CHECK(row[4] == "nan");
      CHECK(row[7] == "nan");
      CHECK(row[9] == "skipped_users_exceed_antennas");
      ++skipped;
    } else if (row[3] != "mean") {
      ++solved;
    }
  }
  CHECK(skipped == 4);
  CHECK(solved == 4);

  // RF-chain bounds produce hybrid-only diagnostics.
  const CommandOutput mixed = run_sweep(cfg, SweepParam::users, {3.0});
  int hybrid_skipped = 0;
  for (const auto& row : csv_rows(mixed.csv)) {
    if (row[0] == "hybrid-fc" || row[0] == "hybrid-sc") {
      CHECK(row[9] == "skipped_rf_chains_below_users");
      ++hybrid_skipped;
    } else {
      CHECK(row[9] != "skipped_rf_chains_below_users");
    }
  }
  CHECK(hybrid_skipped == 2);
}

TEST_CASE("admittance scale sweep re-prices one solve per realization") {
  ExperimentConfig cfg = small_config();
  const CommandOutput out =
      run_sweep(cfg, SweepParam::adm_scale, {1.0, 10.0, 100.0});
  const auto rows = csv_rows(out.csv);
  REQUIRE(rows.size() == 6);  // 3 values x (1 run + mean)
  std::vector<std::string> se;
  std::vector<double> ee;
  std::vector<double> p_tot;
  for (const auto& row : rows) {
    CHECK(row[0] == "milac");
    CHECK(row[1] == "adm_scale");
    if (row[3] == "mean") continue;
    se.push_back(row[4]);
    ee.push_back(std::stod(row[5]));
    p_tot.push_back(std::stod(row[7]));
  }
  REQUIRE(ee.size() == 3);
  CHECK(se[1] == se[0]);  // identical beamformer, byte-identical rate
  CHECK(se[2] == se[0]);
  CHECK(ee[1] < ee[0]);
  CHECK(ee[2] < ee[1]);
  CHECK(p_tot[1] > p_tot[0]);
  CHECK(p_tot[2] > p_tot[1]);
}

TEST_CASE("static-only power breakdown matches the component table") {
  ExperimentConfig cfg;  // reference defaults: 64 antennas, 4 users, 4 chains
  const CommandOutput out = run_power_breakdown(cfg, true);
  const auto rows = csv_rows(out.csv);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "digital");
  CHECK(rows[1][0] == "milac");
  CHECK(rows[2][0] == "hybrid-fc");
  CHECK(rows[3][0] == "hybrid-sc");
  for (const auto& row : rows) {
    REQUIRE(row.size() == 7);
    CHECK(std::stod(row[2]) == 0.0);  // no amplifier column when static-only
  }
  CHECK(std::stod(rows[0][1]) == doctest::Approx(2.514).epsilon(1e-3));
  CHECK(std::stod(rows[2][3]) == doctest::Approx(5.530).epsilon(1e-3));
  CHECK(std::stod(rows[1][6]) == doctest::Approx(0.200).epsilon(5e-3));
  CHECK(std::stod(rows[3][3]) == doctest::Approx(1.382).epsilon(1e-2));
  CHECK(std::stod(rows[0][5]) == doctest::Approx(0.0225).epsilon(1e-9));
}

TEST_CASE("single-architecture efficiency run emits sweep-schema rows") {
  ExperimentConfig cfg = small_config();
  cfg.runs = 2;
  const CommandOutput out = run_ee(cfg, Architecture::milac);
  const auto rows = csv_rows(out.csv);
  REQUIRE(rows.size() == 3);  // 2 runs + mean
  for (const auto& row : rows) {
    CHECK(row[0] == "milac");
    CHECK(row[1] == "pmax_dbm");
    CHECK(std::stod(row[2]) == cfg.system.pmax_dbm);
  }
  CHECK(rows[2][3] == "mean");
}

TEST_CASE("frontier command emits sorted rows per architecture") {
  ExperimentConfig cfg = small_config();
  cfg.solver.frontier_weights = 3;
  cfg.solver.recal_passes = 1;
  const CommandOutput out = run_frontier(cfg, {Architecture::milac});
  const auto rows = csv_rows(out.csv);
  REQUIRE(!rows.empty());
  CHECK(rows.size() <= 3);
  double last_eta = -1.0;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 5);
    CHECK(row[0] == "milac");
    const double eta = std::stod(row[1]);
    CHECK(eta > last_eta);
    last_eta = eta;
    CHECK(std::stod(row[2]) > 0.0);
    CHECK(std::stod(row[3]) > 0.0);
  }
}

TEST_CASE("file channel model feeds the harness and checks dimensions") {
  const std::string path = "harness_channel_tmp.txt";
  const ChannelSet cs = generate_rayleigh(2, 4, 11, 1.0, 0.0);
  save_channel(path, cs.h);

  ExperimentConfig cfg = small_config();
  cfg.channel.model = ChannelModel::file;
  cfg.channel.path = path;
  const CommandOutput out = run_ee(cfg, Architecture::digital);
  CHECK(csv_rows(out.csv).size() == 2);  // 1 run + mean

  cfg.system.n_antennas = 8;  // file no longer matches
  CHECK_THROWS_AS(run_ee(cfg, Architecture::digital), ParseError);
  std::remove(path.c_str());
}
