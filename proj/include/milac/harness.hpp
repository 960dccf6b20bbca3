// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "milac/config.hpp"
#include "milac/tradeoff.hpp"

namespace milac {

enum class SweepParam { pmax_dbm, users, antennas, dac_bits, adm_scale };

// Name <-> enum maps used by the CLI; unknown names raise ParseError.
SweepParam sweep_param_from(const std::string& name);
const char* sweep_param_name(SweepParam param);
Architecture architecture_from(const std::string& name);
const char* architecture_name(Architecture kind);
// Comma-separated list, e.g. "milac,digital,hybrid-fc,hybrid-sc".
std::vector<Architecture> parse_architecture_list(const std::string& list);

// 12 significant digits; nan prints as "nan".
std::string format_csv_number(double v);

// Every command returns the machine CSV plus a human summary for stdout.
struct CommandOutput {
  std::string csv;
  std::string table;
};

// Static power components per architecture; pa_supply from each
// architecture's efficiency-optimal radiated power unless static_only.
CommandOutput run_power_breakdown(const ExperimentConfig& cfg,
                                  bool static_only);

// One efficiency solve per (value, architecture, realization) plus a mean
// row per (value, architecture). Infeasible combinations produce diagnostic
// rows. adm_scale re-evaluates a fixed solution under scaled admittance
// cost and reports the milac architecture only.
CommandOutput run_sweep(const ExperimentConfig& cfg, SweepParam param,
                        const std::vector<double>& values);

// Rate/efficiency boundary per architecture on the first realization.
CommandOutput run_frontier(const ExperimentConfig& cfg,
                           const std::vector<Architecture>& archs);

// Efficiency solves for one architecture across realizations.
CommandOutput run_ee(const ExperimentConfig& cfg, Architecture arch);

}  // namespace milac
