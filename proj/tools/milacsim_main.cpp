// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "milac/config.hpp"
#include "milac/errors.hpp"
#include "milac/harness.hpp"
#include "milac/selftest.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    const auto a = token.find_first_not_of(" \t");
    const auto b = token.find_last_not_of(" \t");
    if (a == std::string::npos) {
      throw milac::ParseError("value list: empty entry in '" + text + "'");
    }
    const std::string item = token.substr(a, b - a + 1);
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw milac::ParseError("value list: bad number '" + item + "'");
    }
    if (pos != item.size()) {
      throw milac::ParseError("value list: bad number '" + item + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) throw milac::ParseError("value list: empty");
  return values;
}

void write_output(const milac::CommandOutput& out,
                  const std::string& out_path) {
  std::fputs(out.table.c_str(), stdout);
  if (out_path.empty()) {
    std::fputs(out.csv.c_str(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    throw milac::ParseError("cannot open output file '" + out_path + "'");
  }
  f << out.csv;
  if (!f) {
    throw milac::ParseError("cannot write output file '" + out_path + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Energy-efficiency experiments for quantization-aware multiuser "
      "beamforming architectures"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  int runs = 0;
  app.add_option("--config", config_path, "configuration file path");
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "override channel.seed");
  CLI::Option* runs_opt = app.add_option("--runs", runs, "override runs");

  CLI::App* cmd_power =
      app.add_subcommand("power-breakdown", "static power per architecture");
  bool static_only = false;
  cmd_power->add_flag("--static-only", static_only,
                      "skip the solver-driven amplifier column");
  cmd_power->fallthrough();

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "parameter sweep across architectures");
  std::string param_name;
  std::string values_text;
  cmd_sweep->add_option("--param", param_name,
                        "pmax_dbm|users|antennas|dac_bits|adm_scale")
      ->required();
  cmd_sweep->add_option("--values", values_text, "comma-separated values")
      ->required();
  cmd_sweep->fallthrough();

  CLI::App* cmd_frontier =
      app.add_subcommand("frontier", "rate/efficiency tradeoff boundary");
  std::string archs_text = "milac,digital,hybrid-fc,hybrid-sc";
  cmd_frontier->add_option("--archs", archs_text,
                           "comma-separated architectures");
  cmd_frontier->fallthrough();

  CLI::App* cmd_ee =
      app.add_subcommand("ee", "efficiency solves for one architecture");
  std::string arch_name;
  cmd_ee->add_option("--arch", arch_name,
                     "milac|digital|hybrid-fc|hybrid-sc")
      ->required();
  cmd_ee->fallthrough();

  CLI::App* cmd_selftest =
      app.add_subcommand("selftest", "fixed-seed verification suites");
  std::string inject_fault;
  cmd_selftest->add_option("--inject-fault", inject_fault, "")->group("");
  cmd_selftest->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    milac::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = milac::parse_config_file(config_path);
    if (seed_opt->count() > 0) cfg.channel.seed = seed;
    if (runs_opt->count() > 0) cfg.runs = runs;
    cfg.validate();

    if (cmd_selftest->parsed()) {
      const milac::SelftestReport report = milac::run_selftest(inject_fault);
      std::fputs(report.summary().c_str(), stdout);
      return report.all_passed() ? 0 : 3;
    }

    milac::CommandOutput out;
    if (cmd_power->parsed()) {
      out = milac::run_power_breakdown(cfg, static_only);
    } else if (cmd_sweep->parsed()) {
      out = milac::run_sweep(cfg, milac::sweep_param_from(param_name),
                             parse_value_list(values_text));
    } else if (cmd_frontier->parsed()) {
      out = milac::run_frontier(cfg,
                                milac::parse_architecture_list(archs_text));
    } else if (cmd_ee->parsed()) {
      out = milac::run_ee(cfg, milac::architecture_from(arch_name));
    }
    write_output(out, out_path);
    return 0;
  } catch (const milac::ParseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 2;
  }
}
