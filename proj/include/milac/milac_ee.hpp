// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "milac/metrics.hpp"

namespace milac {

// Knobs shared by the EE solvers. p_max in Watts, bandwidth in Hz.
struct SolverOptions {
  double p_max = 1.0;
  double bandwidth_hz = 1e8;
  AqnmParams aqnm = AqnmParams{4, 1.0, 0.0};  // callers overwrite
  double eps_in = 1e-6;
  double eps_out = 1e-6;
  int max_outer = 100;
  int max_inner = 500;
  int max_pgd = 2000;
  // Test hooks: optional fixed starting points (empty = solver default).
  ComplexMatrix w_init;    // digital
  ComplexMatrix fbb_init;  // hybrid
  bool analog_identity_hook = false;  // hybrid: pin the analog stage to I
};

// Per-user receive scalars and weights plus the quadratic pieces of the
// reduced inner subproblem.
struct WmmseState {
  ComplexVector u;      // scalar receive filters
  RealVector omega;     // positive MSE weights
  ComplexMatrix q;      // gram_sqrt diag(z) gram_sqrt + gamma I
  ComplexMatrix l;      // diag((B/ln2) omega .* u) gram_sqrt
  RealVector z;         // (B/ln2) omega .* |u|^2
  double lambda = 0.0;  // ratio parameter, bit/J
  double gamma = 0.0;   // lambda / pa_efficiency
  double mu_p = 0.0;    // power dual variable
};

struct SolveReport {
  ReducedPoint point;  // milac solver; empty for the baselines
  Beamformer w;
  double ee = 0.0;
  double se = 0.0;
  double p_tx = 0.0;
  double p_tot = 0.0;
  std::vector<double> lambda_trace;
  std::vector<double> inner_objective_trace;  // one entry per block update
  int outer_iters = 0;
  int inner_iters = 0;
  int pgd_iters = 0;
  int budget_violations = 0;  // times the Y step left the budget and the
                              // shifted-quadratic fallback ran
  bool converged = false;
  double kkt_residual = 0.0;
};

// Convergence bookkeeping for one inner call.
struct InnerTrace {
  std::vector<double> objective;
  int cycles = 0;
  int pgd_iters = 0;
  int budget_violations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

// Factor a row-space beamformer into (y, p): y = gram^{-1/2} h w diag(p)^{-1/2}
// with zero-power columns mapped to zero. Requires w^H w <= diag(p) up to tol.
ReducedPoint reduce(const ChannelSet& cs, const Beamformer& w,
                    const RealVector& p);

// w = h^H gram^{-1/2} y diag(sqrt p).
Beamformer expand(const ChannelSet& cs, const ReducedPoint& rp);

// True iff max eigenvalue of (w^H w - diag(p)) <= tol.
bool is_feasible(const Beamformer& w, const RealVector& p, double tol);

// Closed-form receive filters and weights for a coupling matrix c:
// u_k = alpha conj(c_kk) / (alpha sum_j |c_kj|^2 + sigma2), omega_k = 1/e_k.
void update_receivers_weights(const ComplexMatrix& c, const AqnmParams& aqnm,
                              double sigma2, ComplexVector* u,
                              RealVector* omega);

// Per-stream powers p_k = [a_k/(b_k + (gamma+mu_p) c_k)]_+^2 with the budget
// alpha sum_k c_k p_k <= p_max enforced through a bisected mu_p.
void update_powers(const WmmseState& state, const ComplexMatrix& y,
                   const ComplexMatrix& z_mat, double p_max,
                   const AqnmParams& aqnm, double bandwidth_hz, RealVector* p,
                   double* mu_p);

// Projected gradient descent for
//   f(y) = tr(y^H q y diag(p)) - 2 Re tr(l y diag(sqrt p))
// over the unit spectral ball, constant step 1/L with the exact Lipschitz
// constant. Returns the fixed-point residual through *residual.
ComplexMatrix update_y_pgd(const WmmseState& state, const RealVector& p,
                           const ComplexMatrix& y0, int max_iters, double tol,
                           int* iters, double* residual);

// Y step with the budget repair: runs update_y_pgd, and if the returned
// iterate pushes alpha sum_k p_k ||y_k||^2 past p_max (beyond 1e-10 relative),
// bisects a ridge mu_y >= 0 on q until the budget is tight. *violations is
// incremented when the repair path runs. The result never increases the
// quadratic objective: candidates that fail to improve on y0 are halved
// toward it, falling back to y0 itself, so the block is monotone even when
// the ridge subproblems are solved inexactly.
ComplexMatrix update_y_budget_guarded(const WmmseState& state,
                                      const RealVector& p,
                                      const ComplexMatrix& y0, double p_max,
                                      const AqnmParams& aqnm, int max_iters,
                                      double tol, int* pgd_iters,
                                      double* residual, int* violations);

// One inner solve at fixed gamma: cyclic (u,omega) -> p -> y blocks until the
// relative objective change drops below opts.eps_in.
ReducedPoint wmmse_inner(const ChannelSet& cs, const SolverOptions& opts,
                         double gamma, double p_max, const ReducedPoint& start,
                         InnerTrace* trace = nullptr);

// Ratio-parameter outer loop around wmmse_inner; maximizes
// bandwidth * se / p_tot for the milac architecture.
SolveReport maximize_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                        const PowerModel& pm, const SolverOptions& opts);

// Sum-SE maximization (the gamma = 0 special case, no outer loop).
SolveReport maximize_se(const ChannelSet& cs, const ArchitectureSpec& arch,
                        const PowerModel& pm, const SolverOptions& opts);

// Inner objective (B/ln2) sum_k (omega_k e_k - ln omega_k) + gamma * p_tx
// evaluated at explicit blocks; exposed for the monotonicity checks.
double inner_objective(const ChannelSet& cs, const AqnmParams& aqnm,
                       double bandwidth_hz, double gamma,
                       const ComplexVector& u, const RealVector& omega,
                       const ReducedPoint& rp);

SolverOptions options_from(const PowerModel& pm, double p_max,
                           double bandwidth_hz);

}  // namespace milac
