// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "milac/channel.hpp"
#include "milac/hardware.hpp"

namespace milac {

// Effective stream-to-antenna map, N x K. ||w||_F^2 carries Watts.
struct Beamformer {
  ComplexMatrix w;
};

// Row-space coordinates: y is K x K with ||y||_2 <= 1, p holds per-stream
// powers in Watts. The pair stands for w = h^H gram^{-1/2} y diag(sqrt(p)).
struct ReducedPoint {
  ComplexMatrix y;
  RealVector p;
};

struct RatePowerReport {
  RealVector per_user_sinr;
  double sum_se = 0.0;   // bit/s/Hz
  double p_tx = 0.0;     // W
  double p_tot = 0.0;    // W
  double ee = 0.0;       // bit/J
};

// User-coupling matrix h * w in reduced coordinates: gram_sqrt * y * diag(sqrt p).
ComplexMatrix coupling_matrix(const ChannelSet& cs, const ReducedPoint& rp);

// Post-quantization SINR when the distortion covariance is
// alpha*beta * w w^H (distortion shaped by the full beamformer).
RealVector sinr_milac(const ComplexMatrix& c, const AqnmParams& aqnm,
                      double sigma2);

// SINR when the distortion is diagonal in the antenna domain:
// alpha*beta * diag of the row powers of w. row_gains holds those row powers.
RealVector sinr_diag_antenna(const ComplexMatrix& c, const ComplexMatrix& h,
                             const RealVector& row_gains,
                             const AqnmParams& aqnm, double sigma2);

double sum_se(const RealVector& sinr);

// Radiated power alpha * ||w||_F^2 (identical for the full and the diagonal
// distortion model since tr of either covariance is alpha*beta*||w||_F^2).
double p_tx_full(const Beamformer& w, const AqnmParams& aqnm);

// alpha * tr(diag(p) y^H y); matches p_tx_full after expansion.
double p_tx_reduced(const ReducedPoint& rp, const AqnmParams& aqnm);

// Full report in reduced coordinates.
RatePowerReport evaluate(const ChannelSet& cs, const ArchitectureSpec& arch,
                         const PowerModel& pm, double bandwidth_hz,
                         const ReducedPoint& rp);

// Full report for an explicit beamformer. Dispatches the distortion model on
// arch.kind (digital vs milac); hybrid needs its factor form, see baselines.
RatePowerReport evaluate(const ChannelSet& cs, const ArchitectureSpec& arch,
                         const PowerModel& pm, double bandwidth_hz,
                         const Beamformer& w);

}  // namespace milac
