// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "milac/numkit.hpp"

namespace milac {

// Additive quantization noise model for a b-bit DAC pair. alpha is the
// linear gain, beta the normalized distortion variance; alpha = 1 - beta.
struct AqnmParams {
  int bits = 0;
  double alpha = 1.0;
  double beta = 0.0;
};

// Transmitter circuit constants. All powers in Watts.
struct PowerModel {
  double p_lp = 0.0;         // low-pass filter
  double p_m = 0.0;          // mixer
  double p_h = 0.0;          // 90-degree hybrid with buffer
  double p_lo = 0.0;         // local oscillator, shared
  double p_ps = 0.0;         // per phase shifter
  double p_adm_eff = 0.0;    // per tunable admittance
  double pa_efficiency = 1.0;
  double sampling_rate_hz = 0.0;
  int dac_bits = 1;

  static PowerModel defaults();
};

enum class Architecture { digital, hybrid_fc, hybrid_sc, milac };

struct ArchitectureSpec {
  Architecture kind = Architecture::digital;
  int n_antennas = 0;   // N
  int n_users = 0;      // K
  int n_rf_chains = 0;  // N for digital, K for milac, in [K, N] for hybrid

  static ArchitectureSpec make(Architecture kind, int n_antennas, int n_users,
                               int n_rf_chains_hybrid = -1);
};

struct StaticPowerBreakdown {
  double rf_dac = 0.0;
  double phase_shifters = 0.0;
  double milac_static = 0.0;
  double common = 0.0;

  double total() const { return rf_dac + phase_shifters + milac_static + common; }
};

struct ScatteringFactors {
  ComplexMatrix theta;  // (N+K) x (N+K)
  ComplexMatrix f;      // lower-left N x K block
};

// Quantization gain/distortion for a b-bit DAC. For b <= 5 uses the optimal
// scalar quantizer distortion for a unit Gaussian; beyond that the
// high-resolution approximation (pi*sqrt(3)/2) * 2^(-2b).
AqnmParams aqnm_params(int bits);

// 2 * (1.5e-5 * 2^b + 9e-12 * f_s * b) Watts for the I/Q converter pair.
double dac_pair_power(int bits, double sampling_rate_hz);

// Per-chain analog front end: two filters, two mixers, one hybrid.
double rf_chain_power(const PowerModel& pm);

StaticPowerBreakdown static_power(const ArchitectureSpec& arch,
                                  const PowerModel& pm);

// Static breakdown plus p_tx / pa_efficiency.
double total_power(const ArchitectureSpec& arch, const PowerModel& pm,
                   double p_tx);

// Theta = (I + Z0 Y_c)^{-1} (I - Z0 Y_c) for an (N+K)-port admittance
// network, plus the stream-to-antenna block rows K..K+N-1, cols 0..K-1.
ScatteringFactors scattering_matrix(const ComplexMatrix& y_c, double z0,
                                    int n_users);

}  // namespace milac
