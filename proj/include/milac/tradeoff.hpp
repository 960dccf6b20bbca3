// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "milac/baselines.hpp"
#include "milac/milac_ee.hpp"

namespace milac {

// Concave quadratic lower bound on the sum rate at frozen receive scalars
// and mse weights: value(z) = c0 + 2 Re tr(l z) - tr(z^H q z), in bit/s/Hz.
// q is PSD. The variable convention follows the builder that produced it.
struct RateSurrogate {
  ComplexMatrix q;
  ComplexMatrix l;
  double c0 = 0.0;

  double value(const ComplexMatrix& z) const;
  // Euclidean gradient with respect to the conjugate variable, times two.
  ComplexMatrix gradient(const ComplexMatrix& z) const;
};

// Surrogate over the row-space coordinate x (K x K, effective beamformer
// w = h^H x); tight at the expansion point when (u, omega) are the mmse
// optima there, and a global lower bound on the sum rate elsewhere.
RateSurrogate rate_minorizer(const ComplexMatrix& x, const ComplexVector& u,
                             const RealVector& omega, const ChannelSet& cs,
                             const AqnmParams& aqnm);

// First-order lower bound on x^2/y around (x_ref, y_ref):
// (2 x_ref / y_ref) x - (x_ref / y_ref)^2 y. Tight at the reference point;
// throws ContractViolation when y_ref <= 0.
double fractional_minorizer(double x, double y, double x_ref, double y_ref);

// Normalizers for the weighted-sum objective.
struct TradeoffRefs {
  double r_ref = 1.0;   // rate scale, bit/s/Hz
  double ee_ref = 1.0;  // efficiency scale, bit/J
};

// Linearization point of the fractional bound.
struct FractionalCut {
  double x_ref = 0.0;  // sqrt-rate at the incumbent
  double y_ref = 1.0;  // total consumed power at the incumbent, > 0, W
};

// One weighted-sum iterate. x_mat follows the architecture: K x K row-space
// coordinate for milac (w = h^H x_mat), N x K beamformer for digital, and
// the baseband factor for hybrid with f_rf carried alongside.
struct TradeoffVars {
  ComplexMatrix x_mat;
  ComplexMatrix f_rf;  // hybrid only, empty otherwise
  RealVector p;        // per-stream power caps; milac: uniform spectral max
  double r = 0.0;      // surrogate rate at the solution, bit/s/Hz
  double x = 0.0;      // sqrt(max(r, 0))
  double y = 0.0;      // total consumed power, W
  double t = 0.0;      // bandwidth * x^2 / y, bit/s
  double eta = 0.0;
  double objective = 0.0;     // eta r/r_ref + (1-eta) t-term/ee_ref
  double kkt_residual = 0.0;  // scaled projected-gradient norm at exit
  int iters = 0;
};

struct FrontierPoint {
  double eta = 0.0;
  double se = 0.0;    // bit/s/Hz
  double ee = 0.0;    // bit/J
  double p_tx = 0.0;  // W
};

// Weighted-sum objective values recorded at the start of every refresh of
// one weight's inner loop; nondecreasing by construction.
struct ScaTrace {
  double eta = 0.0;
  std::vector<double> objective;
};

struct FrontierResult {
  std::vector<FrontierPoint> points;  // sorted by eta ascending
  std::vector<std::string> warnings;  // per-weight failures, omitted points
  std::vector<ScaTrace> traces;
};

// Maximizes
//   eta * rate_cut(z)/r_ref
//   + (1-eta) * B * phi(sqrt(rate_cut(z)), P_tot(z)) / ee_ref
// over the architecture's transmit set by projected gradient ascent with a
// backtracking line search, warm-started at `start` (never undercut). The
// rate surrogate must be expressed over start.x_mat's variable convention.
TradeoffVars solve_sca_subproblem(const RateSurrogate& rate_cut,
                                  const FractionalCut& frac_cut,
                                  const ChannelSet& cs,
                                  const ArchitectureSpec& arch,
                                  const PowerModel& pm,
                                  const SolverOptions& opts, double eta,
                                  const TradeoffRefs& refs, double p_max,
                                  const TradeoffVars& start);

// Sweeps the weight grid (sorted, spanning [0, 1] inclusive): endpoints come
// from the architecture's efficiency/rate solvers, weights are solved in
// ascending order with warm starts, references are recalibrated to the best
// attained rate/efficiency between passes (recal_passes total sweeps), and
// dominated points are re-solved from their dominating neighbors.
FrontierResult trace_frontier(const ChannelSet& cs,
                              const ArchitectureSpec& arch,
                              const PowerModel& pm, const SolverOptions& opts,
                              const std::vector<double>& weights,
                              int recal_passes);

// True rate/power report for a tradeoff iterate (dispatches on arch.kind).
RatePowerReport evaluate_tradeoff(const ChannelSet& cs,
                                  const ArchitectureSpec& arch,
                                  const PowerModel& pm, double bandwidth_hz,
                                  const TradeoffVars& vars);

}  // namespace milac
