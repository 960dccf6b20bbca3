// SPDX-License-Identifier: Apache-2.0
#include "milac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "milac/baselines.hpp"
#include "milac/channel.hpp"
#include "milac/errors.hpp"
#include "milac/milac_ee.hpp"

namespace milac {
namespace {

constexpr const char* kSweepHeader =
    "arch,param,value,realization,se_bit_s_hz,ee_bit_per_J,p_tx_W,p_tot_W,"
    "outer_iters,converged";

const Architecture kArchOrder[] = {Architecture::digital, Architecture::milac,
                                   Architecture::hybrid_fc,
                                   Architecture::hybrid_sc};

// Runs body(0..jobs-1) on a pool sized to the hardware; exceptions are
// collected per slot and the lowest-index one is rethrown after the join,
// so failures are as deterministic as the serial order.
void parallel_for(int jobs, const std::function<void(int)>& body) {
  if (jobs <= 0) return;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, jobs));
  if (threads == 1) {
    for (int i = 0; i < jobs; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < jobs; i = next.fetch_add(1)) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Channel for one realization; seeds advance by the realization index so
// every architecture sees the same draw. File channels must match the
// requested dimensions.
ChannelSet make_channel(const ExperimentConfig& cfg, int users, int antennas,
                        int realization) {
  const double nv = cfg.noise_variance();
  const std::uint64_t seed =
      cfg.channel.seed + static_cast<std::uint64_t>(realization);
  switch (cfg.channel.model) {
    case ChannelModel::rayleigh:
      return generate_rayleigh(users, antennas, seed, 1.0, nv);
    case ChannelModel::geometric:
      return generate_geometric(users, antennas, cfg.channel.paths, seed, nv);
    case ChannelModel::file: {
      ChannelSet cs = load_channel(cfg.channel.path, nv);
      if (cs.users() != users || cs.antennas() != antennas) {
        throw ParseError("channel.path: file is " +
                         std::to_string(cs.users()) + "x" +
                         std::to_string(cs.antennas()) + " but the run needs " +
                         std::to_string(users) + "x" +
                         std::to_string(antennas));
      }
      return cs;
    }
  }
  throw ContractViolation("make_channel: unknown channel model");
}

// Empty when the (arch, dims) combination is solvable; otherwise the token
// written to the converged column of a diagnostic row.
std::string feasibility_note(Architecture kind, int antennas, int users,
                             int n_rf) {
  if (users < 1 || antennas < 1) return "skipped_empty_system";
  if (users > antennas) return "skipped_users_exceed_antennas";
  if (kind == Architecture::hybrid_fc || kind == Architecture::hybrid_sc) {
    if (n_rf < users) return "skipped_rf_chains_below_users";
    if (n_rf > antennas) return "skipped_rf_chains_exceed_antennas";
  }
  return "";
}

ArchitectureSpec spec_for(const ExperimentConfig& cfg, Architecture kind,
                          int antennas, int users) {
  return ArchitectureSpec::make(kind, antennas, users,
                                cfg.system.n_rf_chains);
}

SolveReport solve_ee_for(const ChannelSet& cs, const ArchitectureSpec& spec,
                         const PowerModel& pm, const SolverOptions& opts) {
  switch (spec.kind) {
    case Architecture::milac:
      return maximize_ee(cs, spec, pm, opts);
    case Architecture::digital:
      return digital_ee(cs, spec, pm, opts);
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc:
      return hybrid_ee(cs, spec, pm, opts);
  }
  throw ContractViolation("solve_ee_for: unknown architecture");
}

// One emitted CSV line of the sweep schema, before formatting.
struct SweepRow {
  bool solved = false;
  std::string note;  // diagnostic token when not solved
  double se = 0.0;
  double ee = 0.0;
  double p_tx = 0.0;
  double p_tot = 0.0;
  int outer_iters = 0;
  bool converged = false;
};

std::string sweep_csv_line(const std::string& arch, const std::string& param,
                           double value, const std::string& realization,
                           const SweepRow& row) {
  std::string line = arch + "," + param + "," + format_csv_number(value) +
                     "," + realization + ",";
  if (row.solved) {
    line += format_csv_number(row.se) + "," + format_csv_number(row.ee) + "," +
            format_csv_number(row.p_tx) + "," + format_csv_number(row.p_tot) +
            "," + std::to_string(row.outer_iters) + "," +
            (row.converged ? "1" : "0");
  } else {
    line += "nan,nan,nan,nan,0," + row.note;
  }
  return line;
}

// Arithmetic mean of the solved rows; outer_iters keeps the worst case and
// converged is the conjunction.
SweepRow mean_of(const std::vector<SweepRow>& rows) {
  SweepRow mean;
  int n = 0;
  mean.converged = true;
  for (const SweepRow& r : rows) {
    if (!r.solved) continue;
    ++n;
    mean.se += r.se;
    mean.ee += r.ee;
    mean.p_tx += r.p_tx;
    mean.p_tot += r.p_tot;
    mean.outer_iters = std::max(mean.outer_iters, r.outer_iters);
    mean.converged = mean.converged && r.converged;
  }
  if (n == 0) return SweepRow{};
  mean.solved = true;
  mean.se /= n;
  mean.ee /= n;
  mean.p_tx /= n;
  mean.p_tot /= n;
  return mean;
}

void check_sweep_values(SweepParam param, const std::vector<double>& values) {
  if (values.empty()) throw ParseError("sweep values: empty list");
  for (double v : values) {
    if (!std::isfinite(v)) throw ParseError("sweep values: non-finite entry");
    switch (param) {
      case SweepParam::pmax_dbm:
        break;
      case SweepParam::users:
      case SweepParam::antennas:
        if (v != std::floor(v) || v < 1.0 || v > (1 << 20)) {
          throw ParseError(std::string("sweep values: ") +
                           sweep_param_name(param) +
                           " entries must be positive integers");
        }
        break;
      case SweepParam::dac_bits:
        if (v != std::floor(v) || v < 1.0 || v > 48.0) {
          throw ParseError("sweep values: dac_bits entries must be integers "
                           "in [1, 48]");
        }
        break;
      case SweepParam::adm_scale:
        if (v <= 0.0) {
          throw ParseError("sweep values: adm_scale entries must be > 0");
        }
        break;
    }
  }
}

// Re-evaluation sweep: one milac solve per realization at the base power
// model, then the total power is recomputed with the admittance cost scaled
// by each value. The beamformer (hence se and p_tx) is held fixed.
CommandOutput run_adm_scale(const ExperimentConfig& cfg,
                            const std::vector<double>& values) {
  const PowerModel pm = cfg.power_model();
  const SolverOptions opts = cfg.solver_options();
  const int runs = cfg.runs;
  const int n = cfg.system.n_antennas;
  const int k = cfg.system.n_users;
  const std::string note = feasibility_note(Architecture::milac, n, k, 0);

  std::vector<SolveReport> reports(runs);
  ArchitectureSpec spec;
  if (note.empty()) {
    spec = spec_for(cfg, Architecture::milac, n, k);
    parallel_for(runs, [&](int r) {
      const ChannelSet cs = make_channel(cfg, k, n, r);
      reports[r] = solve_ee_for(cs, spec, pm, opts);
    });
  }

  std::ostringstream csv;
  std::ostringstream table;
  csv << kSweepHeader << "\n";
  table << "sweep param=adm_scale arch=milac runs=" << runs << "\n";
  for (double v : values) {
    std::vector<SweepRow> rows(runs);
    for (int r = 0; r < runs; ++r) {
      SweepRow& row = rows[r];
      if (!note.empty()) {
        row.note = note;
      } else {
        PowerModel scaled = pm;
        scaled.p_adm_eff = pm.p_adm_eff * v;
        const SolveReport& rep = reports[r];
        row.solved = true;
        row.se = rep.se;
        row.p_tx = rep.p_tx;
        row.p_tot = total_power(spec, scaled, rep.p_tx);
        row.ee = cfg.system.bandwidth_hz * rep.se / row.p_tot;
        row.outer_iters = rep.outer_iters;
        row.converged = rep.converged;
      }
      csv << sweep_csv_line("milac", "adm_scale", v, std::to_string(r), row)
          << "\n";
    }
    const SweepRow mean = mean_of(rows);
    if (mean.solved) {
      csv << sweep_csv_line("milac", "adm_scale", v, "mean", mean) << "\n";
      table << "  value=" << format_csv_number(v)
            << " mean_ee=" << format_csv_number(mean.ee)
            << " mean_se=" << format_csv_number(mean.se)
            << " mean_p_tot=" << format_csv_number(mean.p_tot) << "\n";
    } else {
      table << "  value=" << format_csv_number(v) << " skipped ("
            << (note.empty() ? "no solved realizations" : note) << ")\n";
    }
  }
  return CommandOutput{csv.str(), table.str()};
}

// Applies one sweep value to a copy of the run inputs.
struct RunInputs {
  int users = 0;
  int antennas = 0;
  PowerModel pm;
  SolverOptions opts;
};

RunInputs inputs_for(const ExperimentConfig& cfg, SweepParam param,
                     double value) {
  RunInputs in;
  in.users = cfg.system.n_users;
  in.antennas = cfg.system.n_antennas;
  in.pm = cfg.power_model();
  in.opts = cfg.solver_options();
  switch (param) {
    case SweepParam::pmax_dbm:
      in.opts.p_max = dbm_to_watt(value);
      break;
    case SweepParam::users:
      in.users = static_cast<int>(value);
      break;
    case SweepParam::antennas:
      in.antennas = static_cast<int>(value);
      break;
    case SweepParam::dac_bits:
      in.pm.dac_bits = static_cast<int>(value);
      in.opts.aqnm = aqnm_params(in.pm.dac_bits);
      break;
    case SweepParam::adm_scale:
      break;  // handled by run_adm_scale
  }
  return in;
}

CommandOutput run_solve_sweep(const ExperimentConfig& cfg, SweepParam param,
                              const std::vector<double>& values,
                              const std::vector<Architecture>& archs) {
  const int runs = cfg.runs;
  const int n_vals = static_cast<int>(values.size());
  const int n_arch = static_cast<int>(archs.size());
  const int jobs = n_vals * n_arch * runs;
  std::vector<SweepRow> rows(jobs);

  parallel_for(jobs, [&](int j) {
    const int vi = j / (n_arch * runs);
    const int ai = (j / runs) % n_arch;
    const int r = j % runs;
    const RunInputs in = inputs_for(cfg, param, values[vi]);
    SweepRow& row = rows[j];
    row.note = feasibility_note(archs[ai], in.antennas, in.users,
                                cfg.system.n_rf_chains);
    if (!row.note.empty()) return;
    const ChannelSet cs = make_channel(cfg, in.users, in.antennas, r);
    const ArchitectureSpec spec =
        spec_for(cfg, archs[ai], in.antennas, in.users);
    const SolveReport rep = solve_ee_for(cs, spec, in.pm, in.opts);
    row.solved = true;
    row.se = rep.se;
    row.ee = rep.ee;
    row.p_tx = rep.p_tx;
    row.p_tot = rep.p_tot;
    row.outer_iters = rep.outer_iters;
    row.converged = rep.converged;
  });

  std::ostringstream csv;
  std::ostringstream table;
  csv << kSweepHeader << "\n";
  table << "sweep param=" << sweep_param_name(param) << " runs=" << runs
        << "\n";
  for (int vi = 0; vi < n_vals; ++vi) {
    for (int ai = 0; ai < n_arch; ++ai) {
      const std::string arch = architecture_name(archs[ai]);
      std::vector<SweepRow> group;
      group.reserve(runs);
      for (int r = 0; r < runs; ++r) {
        const SweepRow& row = rows[(vi * n_arch + ai) * runs + r];
        group.push_back(row);
        csv << sweep_csv_line(arch, sweep_param_name(param), values[vi],
                              std::to_string(r), row)
            << "\n";
      }
      const SweepRow mean = mean_of(group);
      if (mean.solved) {
        csv << sweep_csv_line(arch, sweep_param_name(param), values[vi],
                              "mean", mean)
            << "\n";
        table << "  value=" << format_csv_number(values[vi]) << " arch=" << arch
              << " mean_ee=" << format_csv_number(mean.ee)
              << " mean_se=" << format_csv_number(mean.se)
              << " mean_p_tot=" << format_csv_number(mean.p_tot) << "\n";
      } else {
        table << "  value=" << format_csv_number(values[vi]) << " arch=" << arch
              << " skipped (" << group.front().note << ")\n";
      }
    }
  }
  return CommandOutput{csv.str(), table.str()};
}

}  // namespace

SweepParam sweep_param_from(const std::string& name) {
  if (name == "pmax_dbm") return SweepParam::pmax_dbm;
  if (name == "users") return SweepParam::users;
  if (name == "antennas") return SweepParam::antennas;
  if (name == "dac_bits") return SweepParam::dac_bits;
  if (name == "adm_scale") return SweepParam::adm_scale;
  throw ParseError("unknown sweep parameter '" + name +
                   "' (expected pmax_dbm, users, antennas, dac_bits, or "
                   "adm_scale)");
}

const char* sweep_param_name(SweepParam param) {
  switch (param) {
    case SweepParam::pmax_dbm: return "pmax_dbm";
    case SweepParam::users: return "users";
    case SweepParam::antennas: return "antennas";
    case SweepParam::dac_bits: return "dac_bits";
    case SweepParam::adm_scale: return "adm_scale";
  }
  return "?";
}

Architecture architecture_from(const std::string& name) {
  if (name == "milac") return Architecture::milac;
  if (name == "digital") return Architecture::digital;
  if (name == "hybrid-fc") return Architecture::hybrid_fc;
  if (name == "hybrid-sc") return Architecture::hybrid_sc;
  throw ParseError("unknown architecture '" + name +
                   "' (expected milac, digital, hybrid-fc, or hybrid-sc)");
}

const char* architecture_name(Architecture kind) {
  switch (kind) {
    case Architecture::milac: return "milac";
    case Architecture::digital: return "digital";
    case Architecture::hybrid_fc: return "hybrid-fc";
    case Architecture::hybrid_sc: return "hybrid-sc";
  }
  return "?";
}

std::vector<Architecture> parse_architecture_list(const std::string& list) {
  std::vector<Architecture> archs;
  std::string token;
  std::istringstream in(list);
  while (std::getline(in, token, ',')) {
    const auto a = token.find_first_not_of(" \t");
    const auto b = token.find_last_not_of(" \t");
    if (a == std::string::npos) {
      throw ParseError("architecture list: empty entry in '" + list + "'");
    }
    archs.push_back(architecture_from(token.substr(a, b - a + 1)));
  }
  if (archs.empty()) throw ParseError("architecture list: empty");
  return archs;
}

std::string format_csv_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CommandOutput run_power_breakdown(const ExperimentConfig& cfg,
                                  bool static_only) {
  const PowerModel pm = cfg.power_model();
  const int n = cfg.system.n_antennas;
  const int k = cfg.system.n_users;
  const SolverOptions opts = cfg.solver_options();

  struct ArchRow {
    StaticPowerBreakdown stat;
    double pa_supply = 0.0;
    std::string note;
  };
  const int n_arch = 4;
  std::vector<ArchRow> rows(n_arch);
  parallel_for(n_arch, [&](int ai) {
    ArchRow& row = rows[ai];
    row.note =
        feasibility_note(kArchOrder[ai], n, k, cfg.system.n_rf_chains);
    if (!row.note.empty()) return;
    const ArchitectureSpec spec = spec_for(cfg, kArchOrder[ai], n, k);
    row.stat = static_power(spec, pm);
    if (static_only) return;
    const ChannelSet cs = make_channel(cfg, k, n, 0);
    const SolveReport rep = solve_ee_for(cs, spec, pm, opts);
    row.pa_supply = rep.p_tx / pm.pa_efficiency;
  });

  std::ostringstream csv;
  std::ostringstream table;
  csv << "arch,rf_dac_W,pa_supply_W,phase_shifters_W,milac_static_W,"
         "common_W,total_W\n";
  table << "power breakdown (W)" << (static_only ? ", static only" : "")
        << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "  %-10s %10s %10s %10s %10s %10s %10s\n",
                "arch", "rf_dac", "pa_supply", "ps", "milac", "common",
                "total");
  table << line;
  for (int ai = 0; ai < n_arch; ++ai) {
    const std::string arch = architecture_name(kArchOrder[ai]);
    const ArchRow& row = rows[ai];
    if (!row.note.empty()) {
      csv << arch << ",nan,nan,nan,nan,nan,nan\n";
      table << "  " << arch << " skipped (" << row.note << ")\n";
      continue;
    }
    const double total = row.stat.total() + row.pa_supply;
    csv << arch << "," << format_csv_number(row.stat.rf_dac) << ","
        << format_csv_number(row.pa_supply) << ","
        << format_csv_number(row.stat.phase_shifters) << ","
        << format_csv_number(row.stat.milac_static) << ","
        << format_csv_number(row.stat.common) << ","
        << format_csv_number(total) << "\n";
    std::snprintf(line, sizeof(line),
                  "  %-10s %10.3f %10.3f %10.3f %10.3f %10.3f %10.3f\n",
                  arch.c_str(), row.stat.rf_dac, row.pa_supply,
                  row.stat.phase_shifters, row.stat.milac_static,
                  row.stat.common, total);
    table << line;
  }
  return CommandOutput{csv.str(), table.str()};
}

CommandOutput run_sweep(const ExperimentConfig& cfg, SweepParam param,
                        const std::vector<double>& values) {
  check_sweep_values(param, values);
  if (param == SweepParam::adm_scale) return run_adm_scale(cfg, values);
  const std::vector<Architecture> archs(std::begin(kArchOrder),
                                        std::end(kArchOrder));
  return run_solve_sweep(cfg, param, values, archs);
}

CommandOutput run_frontier(const ExperimentConfig& cfg,
                           const std::vector<Architecture>& archs) {
  if (archs.empty()) throw ParseError("frontier: empty architecture list");
  const PowerModel pm = cfg.power_model();
  const SolverOptions opts = cfg.solver_options();
  const std::vector<double> weights =
      frontier_weight_grid(cfg.solver.frontier_weights);
  const int n = cfg.system.n_antennas;
  const int k = cfg.system.n_users;

  struct ArchOut {
    FrontierResult result;
    std::string note;
  };
  const int n_arch = static_cast<int>(archs.size());
  std::vector<ArchOut> outs(n_arch);
  parallel_for(n_arch, [&](int ai) {
    ArchOut& out = outs[ai];
    out.note = feasibility_note(archs[ai], n, k, cfg.system.n_rf_chains);
    if (!out.note.empty()) return;
    const ChannelSet cs = make_channel(cfg, k, n, 0);
    const ArchitectureSpec spec = spec_for(cfg, archs[ai], n, k);
    out.result =
        trace_frontier(cs, spec, pm, opts, weights, cfg.solver.recal_passes);
  });

  std::ostringstream csv;
  std::ostringstream table;
  csv << "arch,eta,se_bit_s_hz,ee_bit_J,p_tx_W\n";
  for (int ai = 0; ai < n_arch; ++ai) {
    const std::string arch = architecture_name(archs[ai]);
    const ArchOut& out = outs[ai];
    if (!out.note.empty()) {
      table << "frontier arch=" << arch << " skipped (" << out.note << ")\n";
      continue;
    }
    for (const FrontierPoint& pt : out.result.points) {
      csv << arch << "," << format_csv_number(pt.eta) << ","
          << format_csv_number(pt.se) << "," << format_csv_number(pt.ee)
          << "," << format_csv_number(pt.p_tx) << "\n";
    }
    table << "frontier arch=" << arch
          << " points=" << out.result.points.size();
    if (!out.result.points.empty()) {
      table << " se=[" << format_csv_number(out.result.points.front().se)
            << ", " << format_csv_number(out.result.points.back().se)
            << "] ee=[" << format_csv_number(out.result.points.back().ee)
            << ", " << format_csv_number(out.result.points.front().ee) << "]";
    }
    table << "\n";
    for (const std::string& w : out.result.warnings) {
      table << "  warning: " << arch << " " << w << "\n";
    }
  }
  return CommandOutput{csv.str(), table.str()};
}

CommandOutput run_ee(const ExperimentConfig& cfg, Architecture arch) {
  return run_solve_sweep(cfg, SweepParam::pmax_dbm, {cfg.system.pmax_dbm},
                         {arch});
}

}  // namespace milac
