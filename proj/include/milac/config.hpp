// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "milac/hardware.hpp"
#include "milac/milac_ee.hpp"

namespace milac {

enum class ChannelModel { rayleigh, geometric, file };

// Experiment configuration parsed from flat `section.key = value` text.
// Defaults describe the reference system: 64 antennas, 4 users, 4 RF
// chains, 30 dBm budget, 100 MHz bandwidth/sampling, 4-bit DACs.
struct ExperimentConfig {
  struct System {
    int n_antennas = 64;
    int n_users = 4;
    int n_rf_chains = 4;
    double pmax_dbm = 30.0;
    double bandwidth_hz = 1e8;
    double noise_figure_db = 5.0;
    int dac_bits = 4;
  } system;

  struct Power {
    double p_lp_mw = 14.0;
    double p_m_mw = 0.3;
    double p_h_mw = 3.0;
    double p_lo_mw = 22.5;
    double p_ps_mw = 21.6;
    double p_adm_uw = 8.75;
    double pa_efficiency = 0.27;
    double z0_ohm = 50.0;
  } power;

  struct Channel {
    ChannelModel model = ChannelModel::rayleigh;
    std::uint64_t seed = 1;
    int paths = 4;
    std::string path;
  } channel;

  struct Solver {
    double eps_in = 1e-6;
    double eps_out = 1e-6;
    int max_outer = 100;
    int max_inner = 500;
    int max_pgd = 2000;
    int frontier_weights = 21;
    int recal_passes = 3;
  } solver;

  int runs = 1;

  // Derived views. power_model() carries sampling_rate_hz = bandwidth_hz.
  PowerModel power_model() const;
  double p_max_watt() const;
  double noise_variance() const;
  SolverOptions solver_options() const;

  // Throws ParseError naming the offending key when a value is out of range.
  void validate() const;
};

// Parses `section.key = value` lines ('#' comments, blank lines allowed).
// Unknown keys, malformed values, and invariant violations raise ParseError
// with the key path. parse_config_file reads the file at `path`.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// P_W = 10^((dBm - 30)/10) and its inverse.
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Uniform weight grid over [0, 1] with `count` >= 2 points.
std::vector<double> frontier_weight_grid(int count);

const char* channel_model_name(ChannelModel model);

}  // namespace milac
