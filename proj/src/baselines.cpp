// SPDX-License-Identifier: Apache-2.0
#include "milac/baselines.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "milac/errors.hpp"

namespace milac {

namespace {

constexpr double kBudgetSlackRel = 1e-10;
constexpr double kArmijo = 1e-4;

}  // namespace

ComplexMatrix digital_distortion(const Beamformer& w, const AqnmParams& aqnm) {
  const int n = static_cast<int>(w.w.rows());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  const double ab = aqnm.alpha * aqnm.beta;
  for (int i = 0; i < n; ++i) out(i, i) = ab * w.w.row(i).squaredNorm();
  return out;
}

std::vector<std::pair<int, int>> sc_blocks(int n, int n_rf) {
  if (n_rf < 1 || n_rf > n) {
    throw ContractViolation("sc_blocks: need 1 <= n_rf <= n");
  }
  std::vector<std::pair<int, int>> blocks;
  const int base = n / n_rf;
  const int extra = n % n_rf;
  int offset = 0;
  for (int m = 0; m < n_rf; ++m) {
    const int size = base + (m < extra ? 1 : 0);
    blocks.emplace_back(offset, size);
    offset += size;
  }
  return blocks;
}

double hybrid_p_tx(const HybridFactors& fac, const AqnmParams& aqnm) {
  const double direct = (fac.f_rf * fac.f_bb).squaredNorm();
  double dist = 0.0;
  for (int m = 0; m < fac.f_rf.cols(); ++m) {
    dist += fac.f_rf.col(m).squaredNorm() * fac.f_bb.row(m).squaredNorm();
  }
  return aqnm.alpha * aqnm.alpha * direct + aqnm.alpha * aqnm.beta * dist;
}

RatePowerReport evaluate_hybrid(const ChannelSet& cs,
                                const ArchitectureSpec& arch,
                                const PowerModel& pm, double bandwidth_hz,
                                const HybridFactors& fac) {
  if (arch.kind != Architecture::hybrid_fc &&
      arch.kind != Architecture::hybrid_sc) {
    throw ContractViolation("evaluate_hybrid: architecture must be hybrid");
  }
  const AqnmParams aqnm = aqnm_params(pm.dac_bits);
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  const ComplexMatrix g = cs.h * fac.f_rf;
  const ComplexMatrix c = g * fac.f_bb;
  const RealVector d = fac.f_bb.rowwise().squaredNorm();
  const int k = cs.users();
  RealVector sinr(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector gk = g.row(i).cwiseAbs2().transpose();
    const double dist = ab * gk.dot(d);
    sinr(i) =
        a * a * direct / (a * a * (row_power - direct) + dist +
                          cs.noise_variance);
  }
  RatePowerReport rep;
  rep.per_user_sinr = sinr;
  rep.sum_se = sum_se(sinr);
  rep.p_tx = hybrid_p_tx(fac, aqnm);
  rep.p_tot = total_power(arch, pm, rep.p_tx);
  rep.ee = rep.p_tot > 0.0 ? bandwidth_hz * rep.sum_se / rep.p_tot : 0.0;
  return rep;
}

namespace {

// --- fully digital -------------------------------------------------------

void digital_receivers(const ChannelSet& cs, const ComplexMatrix& w,
                       const AqnmParams& aqnm, ComplexVector* u,
                       RealVector* omega) {
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  const ComplexMatrix c = cs.h * w;
  const RealVector gains = w.rowwise().squaredNorm();
  const int k = cs.users();
  u->resize(k);
  omega->resize(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector hk = cs.h.row(i).cwiseAbs2().transpose();
    const double dist = ab * hk.dot(gains);
    const double total = a * a * row_power + dist + cs.noise_variance;
    const Complex ui = a * std::conj(c(i, i)) / total;
    const double mag2 = std::norm(ui);
    const double e = std::norm(1.0 - a * ui * c(i, i)) +
                     mag2 * (a * a * (row_power - direct) + dist) +
                     cs.noise_variance * mag2;
    (*u)(i) = ui;
    (*omega)(i) = 1.0 / e;
  }
}

double digital_objective(const ChannelSet& cs, const ComplexMatrix& w,
                         const ComplexVector& u, const RealVector& omega,
                         const AqnmParams& aqnm, double t_scale,
                         double gamma) {
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  const ComplexMatrix c = cs.h * w;
  const RealVector gains = w.rowwise().squaredNorm();
  double acc = 0.0;
  for (int i = 0; i < cs.users(); ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector hk = cs.h.row(i).cwiseAbs2().transpose();
    const double dist = ab * hk.dot(gains);
    const double mag2 = std::norm(u(i));
    const double e = std::norm(1.0 - a * u(i) * c(i, i)) +
                     mag2 * (a * a * (row_power - direct) + dist) +
                     cs.noise_variance * mag2;
    acc += omega(i) * e - std::log(omega(i));
  }
  return t_scale * acc + gamma * a * w.squaredNorm();
}

// Regularized normal-equation solve for w with the sum-power cap enforced by
// a bisected shift mu on top of gamma.
ComplexMatrix digital_w_update(const ChannelSet& cs, const ComplexVector& u,
                               const RealVector& omega,
                               const AqnmParams& aqnm, double t_scale,
                               double gamma, double p_max, double* mu_out) {
  const int n = cs.antennas();
  const int k = cs.users();
  const double a = aqnm.alpha;
  const RealVector t = t_scale * omega;
  const RealVector tw = (t.array() * u.cwiseAbs2().array()).matrix();
  ComplexMatrix m = a * a * cs.h.adjoint() *
                    tw.cast<Complex>().asDiagonal() * cs.h;
  const RealVector d =
      a * aqnm.beta * (cs.h.cwiseAbs2().transpose() * tw);
  for (int i = 0; i < n; ++i) m(i, i) += d(i);

  ComplexMatrix rhs(n, k);
  for (int j = 0; j < k; ++j) {
    rhs.col(j) = (a * t(j) * std::conj(u(j))) * cs.h.row(j).adjoint();
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (m + m.adjoint())));
  RealVector lam = es.eigenvalues().cwiseMax(0.0);
  const ComplexMatrix rt = es.eigenvectors().adjoint() * rhs;
  const RealVector rt2 = rt.cwiseAbs2().rowwise().sum();

  const auto norm2_at = [&](double mu) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double denom = lam(i) + a * (gamma + mu);
      if (denom > 0.0) {
        acc += rt2(i) / (denom * denom);
      } else if (rt2(i) > 0.0) {
        return std::numeric_limits<double>::infinity();
      }
    }
    return acc;
  };

  double mu = 0.0;
  if (a * norm2_at(0.0) > p_max) {
    double hi = 1.0;
    while (a * norm2_at(hi) > p_max) hi *= 2.0;
    double lo = 0.0;
    for (int step = 0; step < 200; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (a * norm2_at(mid) > p_max) {
        lo = mid;
      } else {
        hi = mid;
        if (a * norm2_at(hi) >= p_max * (1.0 - kBudgetSlackRel)) break;
      }
      if (hi - lo <= 1e-12 * hi) break;
    }
    mu = hi;
  }
  *mu_out = mu;

  RealVector inv(n);
  for (int i = 0; i < n; ++i) {
    const double denom = lam(i) + a * (gamma + mu);
    inv(i) = denom > 0.0 ? 1.0 / denom : 0.0;
  }
  return es.eigenvectors() * (inv.cast<Complex>().asDiagonal() * rt);
}

ComplexMatrix digital_start(const ChannelSet& cs, const SolverOptions& opts) {
  if (opts.w_init.size() > 0) return opts.w_init;
  const int k = cs.users();
  ComplexMatrix w(cs.antennas(), k);
  for (int j = 0; j < k; ++j) {
    ComplexVector col = cs.h.row(j).adjoint();
    const double nrm2 = col.squaredNorm();
    w.col(j) = col * std::sqrt(0.9 * opts.p_max /
                               (k * opts.aqnm.alpha * std::max(nrm2, 1e-300)));
  }
  return w;
}

// --- hybrid ---------------------------------------------------------------

struct HybridSupport {
  bool full = true;
  std::vector<std::pair<int, int>> blocks;  // per-column (offset, size)

  bool contains(int row, int col) const {
    if (full) return true;
    return row >= blocks[col].first &&
           row < blocks[col].first + blocks[col].second;
  }
};

void project_modulus(ComplexMatrix* f_rf, const HybridSupport& sup) {
  for (int m = 0; m < f_rf->cols(); ++m) {
    for (int n = 0; n < f_rf->rows(); ++n) {
      if (!sup.contains(n, m)) {
        (*f_rf)(n, m) = Complex(0.0, 0.0);
        continue;
      }
      const Complex z = (*f_rf)(n, m);
      const double mag = std::abs(z);
      (*f_rf)(n, m) = mag > 0.0 ? z / mag : Complex(1.0, 0.0);
    }
  }
}

void hybrid_receivers(const ChannelSet& cs, const HybridFactors& fac,
                      const AqnmParams& aqnm, ComplexVector* u,
                      RealVector* omega) {
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  const ComplexMatrix g = cs.h * fac.f_rf;
  const ComplexMatrix c = g * fac.f_bb;
  const RealVector d = fac.f_bb.rowwise().squaredNorm();
  const int k = cs.users();
  u->resize(k);
  omega->resize(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector gk = g.row(i).cwiseAbs2().transpose();
    const double dist = ab * gk.dot(d);
    const double total = a * a * row_power + dist + cs.noise_variance;
    const Complex ui = a * std::conj(c(i, i)) / total;
    const double mag2 = std::norm(ui);
    const double e = std::norm(1.0 - a * ui * c(i, i)) +
                     mag2 * (a * a * (row_power - direct) + dist) +
                     cs.noise_variance * mag2;
    (*u)(i) = ui;
    (*omega)(i) = 1.0 / e;
  }
}

double hybrid_objective(const ChannelSet& cs, const HybridFactors& fac,
                        const ComplexVector& u, const RealVector& omega,
                        const AqnmParams& aqnm, double t_scale, double gamma) {
  const double a = aqnm.alpha;
  const double ab = aqnm.alpha * aqnm.beta;
  const ComplexMatrix g = cs.h * fac.f_rf;
  const ComplexMatrix c = g * fac.f_bb;
  const RealVector d = fac.f_bb.rowwise().squaredNorm();
  double acc = 0.0;
  for (int i = 0; i < cs.users(); ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const RealVector gk = g.row(i).cwiseAbs2().transpose();
    const double dist = ab * gk.dot(d);
    const double mag2 = std::norm(u(i));
    const double e = std::norm(1.0 - a * u(i) * c(i, i)) +
                     mag2 * (a * a * (row_power - direct) + dist) +
                     cs.noise_variance * mag2;
    acc += omega(i) * e - std::log(omega(i));
  }
  return t_scale * acc + gamma * hybrid_p_tx(fac, aqnm);
}

ComplexMatrix hybrid_p_mat(const ComplexMatrix& f_rf, const AqnmParams& aqnm) {
  ComplexMatrix p_mat =
      aqnm.alpha * aqnm.alpha * (f_rf.adjoint() * f_rf);
  for (int m = 0; m < f_rf.cols(); ++m) {
    p_mat(m, m) += aqnm.alpha * aqnm.beta * f_rf.col(m).squaredNorm();
  }
  return p_mat;
}

// Closed-form baseband update with the budget multiplier bisected on top of
// gamma. The system is N_RF x N_RF.
ComplexMatrix hybrid_fbb_update(const ChannelSet& cs, const HybridFactors& fac,
                                const ComplexVector& u,
                                const RealVector& omega,
                                const AqnmParams& aqnm, double t_scale,
                                double gamma, double p_max) {
  const double a = aqnm.alpha;
  const int k = cs.users();
  const int n_rf = static_cast<int>(fac.f_rf.cols());
  const ComplexMatrix g = cs.h * fac.f_rf;
  const RealVector t = t_scale * omega;
  const RealVector tw = (t.array() * u.cwiseAbs2().array()).matrix();
  ComplexMatrix base =
      a * a * g.adjoint() * tw.cast<Complex>().asDiagonal() * g;
  const RealVector dt = a * aqnm.beta * (g.cwiseAbs2().transpose() * tw);
  for (int m = 0; m < n_rf; ++m) base(m, m) += dt(m);
  const ComplexMatrix p_mat = hybrid_p_mat(fac.f_rf, aqnm);
  const double ridge = 1e-14 * (1.0 + std::real(base.trace()) +
                                std::real(p_mat.trace()));

  ComplexMatrix rhs(n_rf, k);
  for (int j = 0; j < k; ++j) {
    rhs.col(j) = (a * t(j) * std::conj(u(j))) * g.row(j).adjoint();
  }

  const auto solve_at = [&](double mu) {
    ComplexMatrix m = base + (gamma + mu) * p_mat;
    for (int i = 0; i < n_rf; ++i) m(i, i) += ridge;
    Eigen::LDLT<ComplexMatrix> ldlt(0.5 * (m + m.adjoint()));
    return ComplexMatrix(ldlt.solve(rhs));
  };
  const auto budget_at = [&](const ComplexMatrix& f_bb) {
    return std::real((f_bb.adjoint() * p_mat * f_bb).trace());
  };

  ComplexMatrix cand = solve_at(0.0);
  if (budget_at(cand) > p_max) {
    double hi = 1.0;
    ComplexMatrix f_hi = solve_at(hi);
    while (budget_at(f_hi) > p_max) {
      hi *= 2.0;
      f_hi = solve_at(hi);
    }
    double lo = 0.0;
    for (int step = 0; step < 200; ++step) {
      const double mid = 0.5 * (lo + hi);
      const ComplexMatrix f_mid = solve_at(mid);
      const double b = budget_at(f_mid);
      if (b > p_max) {
        lo = mid;
      } else {
        hi = mid;
        f_hi = f_mid;
        if (b >= p_max * (1.0 - kBudgetSlackRel)) break;
      }
      if (hi - lo <= 1e-12 * hi) break;
    }
    cand = f_hi;
  }
  return cand;
}

// Projected gradient pass over the unit-modulus manifold with backtracking;
// steps that break the power budget or fail the decrease test are rejected.
void hybrid_frf_update(const ChannelSet& cs, HybridFactors* fac,
                       const HybridSupport& sup, const ComplexVector& u,
                       const RealVector& omega, const AqnmParams& aqnm,
                       double t_scale, double gamma, double p_max,
                       int max_steps) {
  const double a = aqnm.alpha;
  const RealVector t = t_scale * omega;
  const RealVector tw = (t.array() * u.cwiseAbs2().array()).matrix();
  const double beta_ratio = aqnm.beta / a;
  const ComplexMatrix m_bb = fac->f_bb * fac->f_bb.adjoint();
  const RealVector dvec = m_bb.diagonal().real();
  const ComplexVector tu =
      (t.array().cast<Complex>() * u.array()).matrix();
  const ComplexMatrix p_lin_adj =
      (a * fac->f_bb * tu.asDiagonal() * cs.h).adjoint();
  // The quadratic kernel s = a^2 h^H diag(tw) h is never formed; products
  // with it go through the K x N channel, and its spectral norm is bounded
  // by a^2 max(tw) ||h||_2^2. The bound only seeds the line search.
  const ComplexMatrix quad_mix =
      m_bb + beta_ratio * dvec.cast<Complex>().asDiagonal().toDenseMatrix();
  const ComplexMatrix reg_mix =
      gamma * a * (a * m_bb +
                   aqnm.beta * dvec.cast<Complex>().asDiagonal().toDenseMatrix());
  const auto kernel_times = [&](const ComplexMatrix& f_rf) {
    return ComplexMatrix(a * a * cs.h.adjoint() *
                         (tw.cast<Complex>().asDiagonal() * (cs.h * f_rf)));
  };
  const double sn_h = spectral_norm(cs.h);
  const double s_bound =
      a * a * (tw.size() ? std::max(tw.maxCoeff(), 0.0) : 0.0) * sn_h * sn_h;
  const double lip = 2.0 * ((s_bound + gamma * a * a) * spectral_norm(m_bb) +
                            (beta_ratio * s_bound + gamma * a * aqnm.beta) *
                                (dvec.size() ? dvec.maxCoeff() : 0.0));
  double tau = lip > 0.0 ? 1.0 / lip : 1.0;

  double obj = hybrid_objective(cs, *fac, u, omega, aqnm, t_scale, gamma);
  // Step-length exit scaled by the iterate norm (entries are unit modulus).
  const double tol = 1e-8 * (1.0 + fac->f_rf.norm());
  for (int step = 0; step < max_steps; ++step) {
    const ComplexMatrix grad =
        2.0 * (kernel_times(fac->f_rf) * quad_mix + fac->f_rf * reg_mix -
               p_lin_adj);
    bool accepted = false;
    double local_tau = tau;
    HybridFactors trial = *fac;
    for (int bt = 0; bt < 40; ++bt) {
      trial.f_rf = fac->f_rf - local_tau * grad;
      project_modulus(&trial.f_rf, sup);
      if (hybrid_p_tx(trial, aqnm) <= p_max * (1.0 + kBudgetSlackRel)) {
        const double trial_obj =
            hybrid_objective(cs, trial, u, omega, aqnm, t_scale, gamma);
        const double move = (trial.f_rf - fac->f_rf).squaredNorm();
        if (trial_obj <= obj - kArmijo / std::max(local_tau, 1e-300) * move) {
          const double moved = std::sqrt(move);
          fac->f_rf = trial.f_rf;
          obj = trial_obj;
          accepted = true;
          tau = local_tau * 2.0;
          if (moved <= tol) return;
          break;
        }
      }
      local_tau *= 0.5;
    }
    if (!accepted) return;
  }
}

HybridSupport make_support(const ArchitectureSpec& arch) {
  HybridSupport sup;
  if (arch.kind == Architecture::hybrid_sc) {
    sup.full = false;
    sup.blocks = sc_blocks(arch.n_antennas, arch.n_rf_chains);
  }
  return sup;
}

HybridFactors hybrid_start(const ChannelSet& cs, const ArchitectureSpec& arch,
                           const HybridSupport& sup,
                           const SolverOptions& opts) {
  const int n = arch.n_antennas;
  const int n_rf = arch.n_rf_chains;
  const int k = cs.users();
  HybridFactors fac;
  if (opts.analog_identity_hook) {
    if (n_rf != n) {
      throw ContractViolation(
          "hybrid_start: identity hook needs n_rf_chains == n_antennas");
    }
    fac.f_rf = ComplexMatrix::Identity(n, n_rf);
  } else if (sup.full) {
    fac.f_rf.resize(n, n_rf);
    for (int m = 0; m < n_rf; ++m) {
      for (int i = 0; i < n; ++i) {
        const double phase = 2.0 * M_PI * i * m / n;
        fac.f_rf(i, m) = Complex(std::cos(phase), std::sin(phase));
      }
    }
  } else {
    fac.f_rf = ComplexMatrix::Zero(n, n_rf);
    project_modulus(&fac.f_rf, sup);  // support entries default to 1
  }

  const auto scaled_matched = [&](const ComplexMatrix& f_rf) {
    const ComplexMatrix g = cs.h * f_rf;
    ComplexMatrix f_bb = g.adjoint();
    const double tx = hybrid_p_tx(HybridFactors{f_rf, f_bb}, opts.aqnm);
    if (!(tx > 0.0)) return ComplexMatrix(ComplexMatrix::Zero(n_rf, k));
    f_bb *= std::sqrt(0.9 * opts.p_max / tx);
    return f_bb;
  };

  if (opts.fbb_init.size() > 0) {
    fac.f_bb = opts.fbb_init;
    return fac;
  }
  fac.f_bb = scaled_matched(fac.f_rf);
  if (fac.f_bb.squaredNorm() == 0.0 && !opts.analog_identity_hook) {
    // Retry with user-matched phases.
    for (int m = 0; m < n_rf; ++m) {
      for (int i = 0; i < n; ++i) {
        if (!sup.contains(i, m)) continue;
        fac.f_rf(i, m) = std::conj(cs.h(m % k, i));
      }
    }
    project_modulus(&fac.f_rf, sup);
    fac.f_bb = scaled_matched(fac.f_rf);
  }
  return fac;
}

}  // namespace

SolveReport digital_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                       const PowerModel& pm, const SolverOptions& opts) {
  if (arch.kind != Architecture::digital) {
    throw ContractViolation("digital_ee: architecture must be digital");
  }
  if (!(cs.noise_variance > 0.0)) {
    throw ContractViolation("digital_ee: channel needs a noise variance");
  }
  const AqnmParams aqnm = opts.aqnm;
  const double t_scale = opts.bandwidth_hz / M_LN2;

  ComplexMatrix w = digital_start(cs, opts);
  RatePowerReport m = evaluate(cs, arch, pm, opts.bandwidth_hz, Beamformer{w});
  SolveReport rep;
  double lambda = m.ee;
  rep.lambda_trace.push_back(lambda);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++rep.outer_iters;
    const double gamma = lambda / pm.pa_efficiency;
    double obj_prev = std::numeric_limits<double>::quiet_NaN();
    bool inner_converged = false;
    for (int cycle = 0; cycle < opts.max_inner; ++cycle) {
      ++rep.inner_iters;
      ComplexVector u;
      RealVector omega;
      digital_receivers(cs, w, aqnm, &u, &omega);
      const double g1 =
          digital_objective(cs, w, u, omega, aqnm, t_scale, gamma);
      rep.inner_objective_trace.push_back(g1);

      double mu = 0.0;
      w = digital_w_update(cs, u, omega, aqnm, t_scale, gamma, opts.p_max,
                           &mu);
      const double g2 =
          digital_objective(cs, w, u, omega, aqnm, t_scale, gamma);
      rep.inner_objective_trace.push_back(g2);

      const double anchor = cycle == 0 ? g1 : obj_prev;
      if (std::abs(g2 - anchor) <=
          opts.eps_in * std::max(1.0, std::abs(anchor))) {
        inner_converged = true;
        break;
      }
      obj_prev = g2;
    }
    (void)inner_converged;
    m = evaluate(cs, arch, pm, opts.bandwidth_hz, Beamformer{w});
    rep.lambda_trace.push_back(m.ee);
    if (std::abs(m.ee - lambda) <=
        opts.eps_out * std::max(lambda, 1e-300)) {
      lambda = m.ee;
      rep.converged = true;
      break;
    }
    lambda = m.ee;
  }
  rep.w = Beamformer{w};
  rep.ee = m.ee;
  rep.se = m.sum_se;
  rep.p_tx = m.p_tx;
  rep.p_tot = m.p_tot;
  return rep;
}

SolveReport hybrid_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                      const PowerModel& pm, const SolverOptions& opts,
                      HybridFactors* factors_out) {
  if (arch.kind != Architecture::hybrid_fc &&
      arch.kind != Architecture::hybrid_sc) {
    throw ContractViolation("hybrid_ee: architecture must be hybrid");
  }
  if (!(cs.noise_variance > 0.0)) {
    throw ContractViolation("hybrid_ee: channel needs a noise variance");
  }
  const AqnmParams aqnm = opts.aqnm;
  const double t_scale = opts.bandwidth_hz / M_LN2;
  const HybridSupport sup = make_support(arch);

  HybridFactors fac = hybrid_start(cs, arch, sup, opts);
  RatePowerReport m = evaluate_hybrid(cs, arch, pm, opts.bandwidth_hz, fac);
  SolveReport rep;
  double lambda = m.ee;
  rep.lambda_trace.push_back(lambda);

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    ++rep.outer_iters;
    const double gamma = lambda / pm.pa_efficiency;
    double obj_prev = std::numeric_limits<double>::quiet_NaN();
    for (int cycle = 0; cycle < opts.max_inner; ++cycle) {
      ++rep.inner_iters;
      ComplexVector u;
      RealVector omega;
      hybrid_receivers(cs, fac, aqnm, &u, &omega);
      const double g1 =
          hybrid_objective(cs, fac, u, omega, aqnm, t_scale, gamma);
      rep.inner_objective_trace.push_back(g1);

      fac.f_bb = hybrid_fbb_update(cs, fac, u, omega, aqnm, t_scale, gamma,
                                   opts.p_max);
      const double g2 =
          hybrid_objective(cs, fac, u, omega, aqnm, t_scale, gamma);
      rep.inner_objective_trace.push_back(g2);

      double g_last = g2;
      if (!opts.analog_identity_hook) {
        hybrid_frf_update(cs, &fac, sup, u, omega, aqnm, t_scale, gamma,
                          opts.p_max, 100);
        g_last = hybrid_objective(cs, fac, u, omega, aqnm, t_scale, gamma);
        rep.inner_objective_trace.push_back(g_last);
        rep.pgd_iters += 1;
      }

      const double anchor = cycle == 0 ? g1 : obj_prev;
      if (std::abs(g_last - anchor) <=
          opts.eps_in * std::max(1.0, std::abs(anchor))) {
        break;
      }
      obj_prev = g_last;
    }
    m = evaluate_hybrid(cs, arch, pm, opts.bandwidth_hz, fac);
    rep.lambda_trace.push_back(m.ee);
    if (std::abs(m.ee - lambda) <=
        opts.eps_out * std::max(lambda, 1e-300)) {
      lambda = m.ee;
      rep.converged = true;
      break;
    }
    lambda = m.ee;
  }
  rep.w = Beamformer{fac.f_rf * fac.f_bb};
  rep.ee = m.ee;
  rep.se = m.sum_se;
  rep.p_tx = m.p_tx;
  rep.p_tot = m.p_tot;
  if (factors_out) *factors_out = fac;
  return rep;
}

}  // namespace milac
