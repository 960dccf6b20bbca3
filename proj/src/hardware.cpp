// SPDX-License-Identifier: Apache-2.0
#include "milac/hardware.hpp"

#include <cmath>

#include <Eigen/LU>

#include "milac/errors.hpp"

namespace milac {

namespace {

// Normalized MSE of the Lloyd-Max quantizer for a unit Gaussian source,
// b = 1..5. Converged to < 1e-14 residual; the 1-bit value is 1 - 2/pi.
constexpr double kLloydBeta[5] = {
    0.36338022763241866,    // b = 1
    0.11748184782932929,    // b = 2
    0.034547760788503730,   // b = 3
    0.0095010080081918861,  // b = 4
    0.0025046683556747991,  // b = 5
};

}  // namespace

AqnmParams aqnm_params(int bits) {
  if (bits < 1) throw ContractViolation("aqnm_params: bits must be >= 1");
  double beta;
  if (bits <= 5) {
    beta = kLloydBeta[bits - 1];
  } else {
    beta = (M_PI * std::sqrt(3.0) / 2.0) * std::pow(2.0, -2.0 * bits);
  }
  return AqnmParams{bits, 1.0 - beta, beta};
}

double dac_pair_power(int bits, double sampling_rate_hz) {
  if (bits < 1) throw ContractViolation("dac_pair_power: bits must be >= 1");
  if (sampling_rate_hz < 0.0) {
    throw ContractViolation("dac_pair_power: sampling rate must be >= 0");
  }
  return 2.0 * (1.5e-5 * std::pow(2.0, bits) + 9e-12 * sampling_rate_hz * bits);
}

double rf_chain_power(const PowerModel& pm) {
  return 2.0 * pm.p_lp + 2.0 * pm.p_m + pm.p_h;
}

PowerModel PowerModel::defaults() {
  PowerModel pm;
  pm.p_lp = 14e-3;
  pm.p_m = 0.3e-3;
  pm.p_h = 3e-3;
  pm.p_lo = 22.5e-3;
  pm.p_ps = 21.6e-3;
  pm.p_adm_eff = 8.75e-6;
  pm.pa_efficiency = 0.27;
  pm.sampling_rate_hz = 1e8;
  pm.dac_bits = 4;
  return pm;
}

ArchitectureSpec ArchitectureSpec::make(Architecture kind, int n_antennas,
                                        int n_users, int n_rf_chains_hybrid) {
  if (n_antennas <= 0 || n_users <= 0 || n_users > n_antennas) {
    throw ContractViolation("ArchitectureSpec: need 0 < n_users <= n_antennas");
  }
  ArchitectureSpec arch;
  arch.kind = kind;
  arch.n_antennas = n_antennas;
  arch.n_users = n_users;
  switch (kind) {
    case Architecture::digital:
      arch.n_rf_chains = n_antennas;
      break;
    case Architecture::milac:
      arch.n_rf_chains = n_users;
      break;
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc:
      arch.n_rf_chains = n_rf_chains_hybrid < 0 ? n_users : n_rf_chains_hybrid;
      if (arch.n_rf_chains < n_users || arch.n_rf_chains > n_antennas) {
        throw ContractViolation(
            "ArchitectureSpec: hybrid needs n_users <= n_rf_chains <= "
            "n_antennas");
      }
      break;
  }
  return arch;
}

StaticPowerBreakdown static_power(const ArchitectureSpec& arch,
                                  const PowerModel& pm) {
  if (pm.pa_efficiency <= 0.0 || pm.pa_efficiency > 1.0) {
    throw ContractViolation("static_power: pa_efficiency must be in (0,1]");
  }
  const double per_chain =
      rf_chain_power(pm) + dac_pair_power(pm.dac_bits, pm.sampling_rate_hz);
  StaticPowerBreakdown out;
  out.common = pm.p_lo;
  int n_chains = arch.n_rf_chains;
  switch (arch.kind) {
    case Architecture::digital:
      n_chains = arch.n_antennas;
      break;
    case Architecture::milac: {
      n_chains = arch.n_users;
      const double ports = arch.n_antennas + arch.n_users;
      out.milac_static = pm.p_adm_eff * ports * (ports + 1.0) / 2.0;
      break;
    }
    case Architecture::hybrid_fc:
      out.phase_shifters =
          static_cast<double>(arch.n_antennas) * arch.n_rf_chains * pm.p_ps;
      break;
    case Architecture::hybrid_sc:
      out.phase_shifters = static_cast<double>(arch.n_antennas) * pm.p_ps;
      break;
  }
  out.rf_dac = n_chains * per_chain;
  return out;
}

double total_power(const ArchitectureSpec& arch, const PowerModel& pm,
                   double p_tx) {
  if (!(p_tx >= 0.0) || !std::isfinite(p_tx)) {
    throw ContractViolation("total_power: p_tx must be finite and >= 0");
  }
  return static_power(arch, pm).total() + p_tx / pm.pa_efficiency;
}

ScatteringFactors scattering_matrix(const ComplexMatrix& y_c, double z0,
                                    int n_users) {
  if (y_c.rows() != y_c.cols() || y_c.rows() == 0) {
    throw ContractViolation("scattering_matrix: admittance must be square");
  }
  if (n_users < 1 || n_users >= y_c.rows()) {
    throw ContractViolation("scattering_matrix: invalid port split");
  }
  if (!(z0 > 0.0)) {
    throw ContractViolation("scattering_matrix: reference impedance must be > 0");
  }
  const auto dim = y_c.rows();
  const ComplexMatrix lhs = ComplexMatrix::Identity(dim, dim) + z0 * y_c;
  Eigen::PartialPivLU<ComplexMatrix> lu(lhs);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-14)) {
    throw NumericFailure("scattering_matrix: I + Z0*Y_c is singular");
  }
  ScatteringFactors out;
  out.theta = lu.solve(ComplexMatrix::Identity(dim, dim) - z0 * y_c);
  out.f = out.theta.block(n_users, 0, dim - n_users, n_users);
  return out;
}

}  // namespace milac
