// SPDX-License-Identifier: Apache-2.0
#include "milac/metrics.hpp"

#include <cmath>

#include "milac/errors.hpp"

namespace milac {

namespace {

void check_sigma(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw ContractViolation("sinr: noise variance must be finite and > 0");
  }
}

RatePowerReport assemble(const ChannelSet& cs, const ArchitectureSpec& arch,
                         const PowerModel& pm, double bandwidth_hz,
                         RealVector sinr, double p_tx) {
  RatePowerReport rep;
  rep.per_user_sinr = std::move(sinr);
  rep.sum_se = sum_se(rep.per_user_sinr);
  rep.p_tx = p_tx;
  rep.p_tot = total_power(arch, pm, p_tx);
  rep.ee = rep.p_tot > 0.0 ? bandwidth_hz * rep.sum_se / rep.p_tot : 0.0;
  (void)cs;
  return rep;
}

}  // namespace

ComplexMatrix coupling_matrix(const ChannelSet& cs, const ReducedPoint& rp) {
  const int k = cs.users();
  if (rp.y.rows() != k || rp.y.cols() != k || rp.p.size() != k) {
    throw ContractViolation("coupling_matrix: dimension mismatch");
  }
  const ComplexVector sp = rp.p.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
  return cs.gram_sqrt * rp.y * sp.asDiagonal();
}

RealVector sinr_milac(const ComplexMatrix& c, const AqnmParams& aqnm,
                      double sigma2) {
  check_sigma(sigma2);
  if (c.rows() != c.cols()) {
    throw ContractViolation("sinr_milac: coupling matrix must be square");
  }
  const int k = static_cast<int>(c.rows());
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  RealVector out(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const double denom =
        a * a * (row_power - direct) + ab * row_power + sigma2;
    out(i) = a * a * direct / denom;
  }
  return out;
}

RealVector sinr_diag_antenna(const ComplexMatrix& c, const ComplexMatrix& h,
                             const RealVector& row_gains,
                             const AqnmParams& aqnm, double sigma2) {
  check_sigma(sigma2);
  if (c.rows() != h.rows() || row_gains.size() != h.cols()) {
    throw ContractViolation("sinr_diag_antenna: dimension mismatch");
  }
  const int k = static_cast<int>(c.rows());
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  RealVector out(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector gains_h = h.row(i).cwiseAbs2().transpose();
    const double distortion = ab * gains_h.dot(row_gains);
    const double denom = a * a * (row_power - direct) + distortion + sigma2;
    out(i) = a * a * direct / denom;
  }
  return out;
}

double sum_se(const RealVector& sinr) {
  double se = 0.0;
  for (int i = 0; i < sinr.size(); ++i) {
    if (!(sinr(i) >= 0.0)) {
      throw ContractViolation("sum_se: SINR entries must be >= 0");
    }
    se += std::log2(1.0 + sinr(i));
  }
  return se;
}

double p_tx_full(const Beamformer& w, const AqnmParams& aqnm) {
  return aqnm.alpha * w.w.squaredNorm();
}

double p_tx_reduced(const ReducedPoint& rp, const AqnmParams& aqnm) {
  double acc = 0.0;
  for (int k = 0; k < rp.y.cols(); ++k) {
    acc += rp.p(k) * rp.y.col(k).squaredNorm();
  }
  return aqnm.alpha * acc;
}

RatePowerReport evaluate(const ChannelSet& cs, const ArchitectureSpec& arch,
                         const PowerModel& pm, double bandwidth_hz,
                         const ReducedPoint& rp) {
  if (arch.kind != Architecture::milac) {
    throw ContractViolation("evaluate: reduced coordinates are milac-only");
  }
  const AqnmParams aqnm = aqnm_params(pm.dac_bits);
  const ComplexMatrix c = coupling_matrix(cs, rp);
  return assemble(cs, arch, pm, bandwidth_hz,
                  sinr_milac(c, aqnm, cs.noise_variance),
                  p_tx_reduced(rp, aqnm));
}

RatePowerReport evaluate(const ChannelSet& cs, const ArchitectureSpec& arch,
                         const PowerModel& pm, double bandwidth_hz,
                         const Beamformer& w) {
  if (w.w.rows() != cs.antennas() || w.w.cols() != cs.users()) {
    throw ContractViolation("evaluate: beamformer dimension mismatch");
  }
  const AqnmParams aqnm = aqnm_params(pm.dac_bits);
  const ComplexMatrix c = cs.h * w.w;
  RealVector sinr;
  switch (arch.kind) {
    case Architecture::milac:
      sinr = sinr_milac(c, aqnm, cs.noise_variance);
      break;
    case Architecture::digital: {
      const RealVector row_gains = w.w.rowwise().squaredNorm();
      sinr = sinr_diag_antenna(c, cs.h, row_gains, aqnm, cs.noise_variance);
      break;
    }
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc:
      throw ContractViolation(
          "evaluate: hybrid reports need the factored form");
  }
  return assemble(cs, arch, pm, bandwidth_hz, std::move(sinr),
                  p_tx_full(w, aqnm));
}

}  // namespace milac
