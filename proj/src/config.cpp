// SPDX-License-Identifier: Apache-2.0
#include "milac/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "milac/channel.hpp"
#include "milac/errors.hpp"

namespace milac {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
  throw ParseError("config key '" + key + "': expected " + expected +
                   ", got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "a real number");
  }
  if (pos != value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a finite real number");
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(value, &pos);
  } catch (const std::exception&) {
    bad_value(key, value, "an integer");
  }
  if (pos != value.size()) bad_value(key, value, "an integer");
  return out;
}

int parse_count(const std::string& key, const std::string& value) {
  const long long v = parse_integer(key, value);
  if (v < 1 || v > (1LL << 30)) bad_value(key, value, "a count >= 1");
  return static_cast<int>(v);
}

ChannelModel parse_model(const std::string& key, const std::string& value) {
  if (value == "rayleigh") return ChannelModel::rayleigh;
  if (value == "geometric") return ChannelModel::geometric;
  if (value == "file") return ChannelModel::file;
  bad_value(key, value, "one of rayleigh|geometric|file");
}

void assign(ExperimentConfig* cfg, const std::string& key,
            const std::string& value) {
  auto& sys = cfg->system;
  auto& pow = cfg->power;
  auto& ch = cfg->channel;
  auto& sol = cfg->solver;
  if (key == "system.n_antennas") {
    sys.n_antennas = parse_count(key, value);
  } else if (key == "system.n_users") {
    sys.n_users = parse_count(key, value);
  } else if (key == "system.n_rf_chains") {
    sys.n_rf_chains = parse_count(key, value);
  } else if (key == "system.pmax_dbm") {
    sys.pmax_dbm = parse_real(key, value);
  } else if (key == "system.bandwidth_hz") {
    sys.bandwidth_hz = parse_real(key, value);
  } else if (key == "system.noise_figure_db") {
    sys.noise_figure_db = parse_real(key, value);
  } else if (key == "system.dac_bits") {
    sys.dac_bits = parse_count(key, value);
  } else if (key == "power.p_lp_mw") {
    pow.p_lp_mw = parse_real(key, value);
  } else if (key == "power.p_m_mw") {
    pow.p_m_mw = parse_real(key, value);
  } else if (key == "power.p_h_mw") {
    pow.p_h_mw = parse_real(key, value);
  } else if (key == "power.p_lo_mw") {
    pow.p_lo_mw = parse_real(key, value);
  } else if (key == "power.p_ps_mw") {
    pow.p_ps_mw = parse_real(key, value);
  } else if (key == "power.p_adm_uw") {
    pow.p_adm_uw = parse_real(key, value);
  } else if (key == "power.pa_efficiency") {
    pow.pa_efficiency = parse_real(key, value);
  } else if (key == "power.z0_ohm") {
    pow.z0_ohm = parse_real(key, value);
  } else if (key == "channel.model") {
    ch.model = parse_model(key, value);
  } else if (key == "channel.seed") {
    const long long v = parse_integer(key, value);
    if (v < 0) bad_value(key, value, "a nonnegative integer");
    ch.seed = static_cast<std::uint64_t>(v);
  } else if (key == "channel.paths") {
    ch.paths = parse_count(key, value);
  } else if (key == "channel.path") {
    ch.path = value;
  } else if (key == "solver.eps_in") {
    sol.eps_in = parse_real(key, value);
  } else if (key == "solver.eps_out") {
    sol.eps_out = parse_real(key, value);
  } else if (key == "solver.max_outer") {
    sol.max_outer = parse_count(key, value);
  } else if (key == "solver.max_inner") {
    sol.max_inner = parse_count(key, value);
  } else if (key == "solver.max_pgd") {
    sol.max_pgd = parse_count(key, value);
  } else if (key == "solver.frontier_weights") {
    sol.frontier_weights = parse_count(key, value);
  } else if (key == "solver.recal_passes") {
    sol.recal_passes = parse_count(key, value);
  } else if (key == "runs") {
    cfg->runs = parse_count(key, value);
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

}  // namespace

PowerModel ExperimentConfig::power_model() const {
  PowerModel pm;
  pm.p_lp = power.p_lp_mw * 1e-3;
  pm.p_m = power.p_m_mw * 1e-3;
  pm.p_h = power.p_h_mw * 1e-3;
  pm.p_lo = power.p_lo_mw * 1e-3;
  pm.p_ps = power.p_ps_mw * 1e-3;
  pm.p_adm_eff = power.p_adm_uw * 1e-6;
  pm.pa_efficiency = power.pa_efficiency;
  pm.sampling_rate_hz = system.bandwidth_hz;
  pm.dac_bits = system.dac_bits;
  return pm;
}

double ExperimentConfig::p_max_watt() const {
  return dbm_to_watt(system.pmax_dbm);
}

double ExperimentConfig::noise_variance() const {
  return noise_variance_from(system.noise_figure_db, system.bandwidth_hz);
}

SolverOptions ExperimentConfig::solver_options() const {
  SolverOptions opts =
      options_from(power_model(), p_max_watt(), system.bandwidth_hz);
  opts.eps_in = solver.eps_in;
  opts.eps_out = solver.eps_out;
  opts.max_outer = solver.max_outer;
  opts.max_inner = solver.max_inner;
  opts.max_pgd = solver.max_pgd;
  return opts;
}

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) {
      throw ParseError(std::string("config key '") + key + "': " + what);
    }
  };
  require(system.n_antennas >= 1, "system.n_antennas", "must be >= 1");
  require(system.n_users >= 1, "system.n_users", "must be >= 1");
  require(system.n_rf_chains >= 1, "system.n_rf_chains", "must be >= 1");
  require(std::isfinite(system.pmax_dbm), "system.pmax_dbm",
          "must be finite");
  require(system.bandwidth_hz > 0.0, "system.bandwidth_hz", "must be > 0");
  require(system.dac_bits >= 1 && system.dac_bits <= 48, "system.dac_bits",
          "must lie in [1, 48]");
  require(power.pa_efficiency > 0.0 && power.pa_efficiency <= 1.0,
          "power.pa_efficiency", "must lie in (0, 1]");
  require(power.p_lp_mw >= 0.0, "power.p_lp_mw", "must be >= 0");
  require(power.p_m_mw >= 0.0, "power.p_m_mw", "must be >= 0");
  require(power.p_h_mw >= 0.0, "power.p_h_mw", "must be >= 0");
  require(power.p_lo_mw >= 0.0, "power.p_lo_mw", "must be >= 0");
  require(power.p_ps_mw >= 0.0, "power.p_ps_mw", "must be >= 0");
  require(power.p_adm_uw >= 0.0, "power.p_adm_uw", "must be >= 0");
  require(power.z0_ohm > 0.0, "power.z0_ohm", "must be > 0");
  require(channel.paths >= 1, "channel.paths", "must be >= 1");
  require(channel.model != ChannelModel::file || !channel.path.empty(),
          "channel.path", "required when channel.model = file");
  require(solver.eps_in > 0.0, "solver.eps_in", "must be > 0");
  require(solver.eps_out > 0.0, "solver.eps_out", "must be > 0");
  require(solver.max_outer >= 1, "solver.max_outer", "must be >= 1");
  require(solver.max_inner >= 1, "solver.max_inner", "must be >= 1");
  require(solver.max_pgd >= 1, "solver.max_pgd", "must be >= 1");
  require(solver.frontier_weights >= 2, "solver.frontier_weights",
          "must be >= 2");
  require(solver.recal_passes >= 1, "solver.recal_passes", "must be >= 1");
  require(runs >= 1, "runs", "must be >= 1");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": expected 'key = value', got '"
          << line << "'";
      throw ParseError(msg.str());
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      std::ostringstream msg;
      msg << "config line " << line_no << ": empty key";
      throw ParseError(msg.str());
    }
    assign(&cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) {
  if (!(watt > 0.0)) {
    throw ContractViolation("watt_to_dbm: power must be positive");
  }
  return 30.0 + 10.0 * std::log10(watt);
}

std::vector<double> frontier_weight_grid(int count) {
  if (count < 2) {
    throw ContractViolation("frontier_weight_grid: need at least 2 points");
  }
  std::vector<double> w(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    w[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(count - 1);
  }
  w.front() = 0.0;
  w.back() = 1.0;
  return w;
}

const char* channel_model_name(ChannelModel model) {
  switch (model) {
    case ChannelModel::rayleigh:
      return "rayleigh";
    case ChannelModel::geometric:
      return "geometric";
    case ChannelModel::file:
      return "file";
  }
  return "unknown";
}

}  // namespace milac
