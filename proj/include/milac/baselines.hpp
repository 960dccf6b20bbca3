// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "milac/milac_ee.hpp"

namespace milac {

// Factored hybrid precoder w = f_rf * f_bb. f_rf has unit-modulus entries on
// its support: all of them for the fully connected case, one block of rows
// per RF chain for the sub-connected case.
struct HybridFactors {
  ComplexMatrix f_rf;  // N x N_RF
  ComplexMatrix f_bb;  // N_RF x K
};

// Diagonal antenna-domain distortion covariance alpha*beta*diag(w w^H), N x N.
ComplexMatrix digital_distortion(const Beamformer& w, const AqnmParams& aqnm);

// Row blocks of the sub-connected analog stage: (offset, size) per RF chain,
// sizes floor(n/n_rf) or ceil(n/n_rf).
std::vector<std::pair<int, int>> sc_blocks(int n, int n_rf);

// Post-quantized radiated power of a factored precoder:
// alpha^2 ||f_rf f_bb||_F^2 + alpha*beta*sum_m ||col_m f_rf||^2 ||row_m f_bb||^2.
double hybrid_p_tx(const HybridFactors& fac, const AqnmParams& aqnm);

RatePowerReport evaluate_hybrid(const ChannelSet& cs,
                                const ArchitectureSpec& arch,
                                const PowerModel& pm, double bandwidth_hz,
                                const HybridFactors& fac);

// EE maximization for fully digital beamforming: Dinkelbach outer loop with
// an inner alternation of closed-form receivers/weights and a regularized
// N x N beamformer solve under the sum-power cap.
SolveReport digital_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                       const PowerModel& pm, const SolverOptions& opts);

// EE maximization for hybrid beamforming (arch.kind selects fc or sc):
// closed-form f_bb in the effective channel, projected gradient on the
// unit-modulus manifold for f_rf.
SolveReport hybrid_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                      const PowerModel& pm, const SolverOptions& opts,
                      HybridFactors* factors_out = nullptr);

}  // namespace milac
