// SPDX-License-Identifier: Apache-2.0
#include "milac/tradeoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "milac/errors.hpp"

namespace milac {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kTiny = 1e-12;
constexpr double kBudgetSlackRel = 1e-10;
constexpr int kScaMaxIters = 200;
constexpr int kFrfStepsPerIter = 10;
constexpr int kRepairRounds = 3;

bool is_hybrid(Architecture kind) {
  return kind == Architecture::hybrid_fc || kind == Architecture::hybrid_sc;
}

// Unit-modulus support of the analog stage: every entry for the fully
// connected case, one row block per RF chain for the sub-connected case.
struct AnalogSupport {
  bool full = true;
  std::vector<std::pair<int, int>> blocks;

  static AnalogSupport make(const ArchitectureSpec& arch) {
    AnalogSupport s;
    if (arch.kind == Architecture::hybrid_sc) {
      s.full = false;
      s.blocks = sc_blocks(arch.n_antennas, arch.n_rf_chains);
    }
    return s;
  }

  bool contains(int row, int col) const {
    if (full) return true;
    const auto& b = blocks[static_cast<std::size_t>(col)];
    return row >= b.first && row < b.first + b.second;
  }
};

ComplexMatrix project_phases(const ComplexMatrix& m, const AnalogSupport& sup) {
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) {
      if (!sup.contains(i, j)) continue;
      const Complex z = m(i, j);
      const double mag = std::abs(z);
      out(i, j) = mag > 0.0 ? z / mag : Complex(1.0, 0.0);
    }
  }
  return out;
}

// Receive scalars, weights, rate, and radiated power at one transmit point.
struct IncumbentSnapshot {
  ComplexVector u;
  RealVector omega;
  double se = 0.0;
  double p_tx = 0.0;
};

// Closed-form mmse scalars for coupling matrix c when user k sees extra
// interference dist_k on top of alpha^2 * (row power - direct power).
void fill_mmse(const ComplexMatrix& c, const RealVector& dist,
               const AqnmParams& aqnm, double sigma2, IncumbentSnapshot* out) {
  const int k = static_cast<int>(c.rows());
  out->u = ComplexVector::Zero(k);
  out->omega = RealVector::Ones(k);
  out->se = 0.0;
  const double a = aqnm.alpha;
  for (int i = 0; i < k; ++i) {
    const double row = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const double denom_u = a * a * row + dist(i) + sigma2;
    if (denom_u > 0.0) out->u(i) = a * std::conj(c(i, i)) / denom_u;
    const double interf = a * a * (row - direct) + dist(i) + sigma2;
    const double g = interf > 0.0 ? a * a * direct / interf : 0.0;
    out->omega(i) = 1.0 + g;
    out->se += std::log2(1.0 + g);
  }
}

IncumbentSnapshot snapshot_of(const ChannelSet& cs,
                              const ArchitectureSpec& arch,
                              const AqnmParams& aqnm,
                              const TradeoffVars& vars) {
  IncumbentSnapshot snap;
  const double ab = aqnm.alpha * aqnm.beta;
  switch (arch.kind) {
    case Architecture::milac: {
      const ComplexMatrix c = cs.gram * vars.x_mat;
      const int k = static_cast<int>(c.rows());
      RealVector dist(k);
      for (int i = 0; i < k; ++i) dist(i) = ab * c.row(i).squaredNorm();
      fill_mmse(c, dist, aqnm, cs.noise_variance, &snap);
      snap.p_tx = aqnm.alpha * (cs.gram_sqrt * vars.x_mat).squaredNorm();
      break;
    }
    case Architecture::digital: {
      const ComplexMatrix c = cs.h * vars.x_mat;
      const RealVector row_gains = vars.x_mat.rowwise().squaredNorm();
      const int k = static_cast<int>(c.rows());
      RealVector dist(k);
      for (int i = 0; i < k; ++i)
        dist(i) = ab * cs.h.row(i).cwiseAbs2().dot(row_gains);
      fill_mmse(c, dist, aqnm, cs.noise_variance, &snap);
      snap.p_tx = aqnm.alpha * vars.x_mat.squaredNorm();
      break;
    }
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc: {
      const ComplexMatrix g = cs.h * vars.f_rf;
      const ComplexMatrix c = g * vars.x_mat;
      const RealVector d = vars.x_mat.rowwise().squaredNorm();
      const int k = static_cast<int>(c.rows());
      RealVector dist(k);
      for (int i = 0; i < k; ++i) dist(i) = ab * g.row(i).cwiseAbs2().dot(d);
      fill_mmse(c, dist, aqnm, cs.noise_variance, &snap);
      snap.p_tx = hybrid_p_tx(HybridFactors{vars.f_rf, vars.x_mat}, aqnm);
      break;
    }
  }
  return snap;
}

double surrogate_constant(const ComplexVector& u, const RealVector& omega,
                          double sigma2) {
  double c0 = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    c0 += std::log(omega(i)) + 1.0 -
          omega(i) * (1.0 + sigma2 * std::norm(u(i)));
  }
  return c0 / M_LN2;
}

RealVector weighted_gains(const ComplexVector& u, const RealVector& omega) {
  return omega.array() * u.array().abs2();
}

// Surrogate over the full digital beamformer w (N x K).
RateSurrogate digital_minorizer(const ComplexMatrix& /*w*/,
                                const ComplexVector& u,
                                const RealVector& omega, const ChannelSet& cs,
                                const AqnmParams& aqnm) {
  RateSurrogate s;
  const double a = aqnm.alpha;
  const RealVector wu2 = weighted_gains(u, omega);
  const RealVector dvec = cs.h.cwiseAbs2().transpose() * wu2;
  ComplexMatrix q = (a * a / M_LN2) *
                    (cs.h.adjoint() * wu2.cast<Complex>().asDiagonal() * cs.h);
  q += ((a * aqnm.beta / M_LN2) * dvec).cast<Complex>().asDiagonal();
  s.q = std::move(q);
  ComplexVector lu(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) lu(i) = omega(i) * u(i);
  s.l = (a / M_LN2) * (lu.asDiagonal() * cs.h);
  s.c0 = surrogate_constant(u, omega, cs.noise_variance);
  return s;
}

// Surrogate over the baseband factor f_bb (N_RF x K) at fixed f_rf.
RateSurrogate hybrid_minorizer(const ComplexMatrix& f_rf,
                               const ComplexVector& u, const RealVector& omega,
                               const ChannelSet& cs, const AqnmParams& aqnm) {
  RateSurrogate s;
  const double a = aqnm.alpha;
  const ComplexMatrix g = cs.h * f_rf;
  const RealVector wu2 = weighted_gains(u, omega);
  const RealVector dvec = g.cwiseAbs2().transpose() * wu2;
  ComplexMatrix q = (a * a / M_LN2) *
                    (g.adjoint() * wu2.cast<Complex>().asDiagonal() * g);
  q += ((a * aqnm.beta / M_LN2) * dvec).cast<Complex>().asDiagonal();
  s.q = std::move(q);
  ComplexVector lu(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) lu(i) = omega(i) * u(i);
  s.l = (a / M_LN2) * (lu.asDiagonal() * g);
  s.c0 = surrogate_constant(u, omega, cs.noise_variance);
  return s;
}

RateSurrogate minorizer_of(const ChannelSet& cs, const ArchitectureSpec& arch,
                           const AqnmParams& aqnm,
                           const IncumbentSnapshot& snap,
                           const TradeoffVars& vars) {
  switch (arch.kind) {
    case Architecture::milac:
      return rate_minorizer(vars.x_mat, snap.u, snap.omega, cs, aqnm);
    case Architecture::digital:
      return digital_minorizer(vars.x_mat, snap.u, snap.omega, cs, aqnm);
    default:
      return hybrid_minorizer(vars.f_rf, snap.u, snap.omega, cs, aqnm);
  }
}

// Weighted-sum objective over a Frobenius ball after eliminating the lifted
// scalars: rate enters through the surrogate, power through
// p_static + kappa ||z||_F^2 / pa_efficiency.
struct BallObjective {
  const RateSurrogate* cut = nullptr;
  double eta = 0.0;
  double r_ref = 1.0;
  double ee_ref = 1.0;
  double x_ref = 0.0;
  double y_ref = 1.0;
  double bandwidth = 1.0;
  double kappa = 1.0;
  double pa_eff = 1.0;
  double p_static = 0.0;

  double lifted_scale() const { return (1.0 - eta) * bandwidth / ee_ref; }
  double ratio() const { return x_ref / y_ref; }

  double power_of(const ComplexMatrix& z) const {
    return p_static + kappa * z.squaredNorm() / pa_eff;
  }

  double value_at(double rate, double power) const {
    const double rt = ratio();
    const double lifted =
        2.0 * rt * std::sqrt(std::max(rate, 0.0)) - rt * rt * power;
    return eta * rate / r_ref + lifted_scale() * lifted;
  }

  double value(const ComplexMatrix& z) const {
    return value_at(cut->value(z), power_of(z));
  }

  ComplexMatrix grad(const ComplexMatrix& z) const {
    const ComplexMatrix gr = cut->gradient(z);
    const double rate = cut->value(z);
    const double rt = ratio();
    ComplexMatrix g = (eta / r_ref) * gr;
    const double sq = std::sqrt(std::max(rate, 0.0));
    if (sq > 0.0) g += (lifted_scale() * rt / sq) * gr;
    g -= (lifted_scale() * rt * rt * 2.0 * kappa / pa_eff) * z;
    return g;
  }
};

ComplexMatrix project_frobenius(const ComplexMatrix& m, double radius) {
  const double n = m.norm();
  if (n <= radius || n == 0.0) return m;
  return ComplexMatrix((radius / n) * m);
}

// Projected gradient ascent with backtracking; never accepts a decrease.
ComplexMatrix ascend_ball(const BallObjective& obj, double radius,
                          ComplexMatrix z, int max_iters, int* iters_out,
                          double* residual_out) {
  z = project_frobenius(z, radius);
  if (radius <= 0.0 || max_iters <= 0) {
    *iters_out = 0;
    *residual_out = 0.0;
    return z;
  }
  double phi = obj.value(z);
  const double qn = spectral_norm(obj.cut->q);
  double lip = 2.0 * qn * (obj.eta / obj.r_ref) +
               obj.lifted_scale() * obj.ratio() * obj.ratio() * 2.0 *
                   obj.kappa / obj.pa_eff;
  const double r0 = obj.cut->value(z);
  if (r0 > kTiny)
    lip += obj.lifted_scale() * obj.ratio() * 2.0 * qn / std::sqrt(r0);
  const double tau_ref = 1.0 / std::max(lip, 1e-30);
  double tau = tau_ref;
  double residual = 0.0;
  int it = 0;
  for (; it < max_iters; ++it) {
    const ComplexMatrix g = obj.grad(z);
    const ComplexMatrix probe = project_frobenius(z + tau_ref * g, radius);
    residual = (probe - z).norm() / tau_ref;
    if (residual <= 1e-6 * (1.0 + g.norm())) break;
    bool accepted = false;
    double local = tau;
    for (int bt = 0; bt < 60; ++bt) {
      ComplexMatrix znew = project_frobenius(z + local * g, radius);
      const double move2 = (znew - z).squaredNorm();
      if (move2 == 0.0) break;
      const double phinew = obj.value(znew);
      if (phinew >= phi + (kArmijo / local) * move2) {
        z = std::move(znew);
        phi = phinew;
        tau = 2.0 * local;
        accepted = true;
        break;
      }
      local *= 0.5;
    }
    if (!accepted) break;
  }
  *iters_out = it;
  const double gnorm = obj.grad(z).norm();
  *residual_out = residual / (1.0 + gnorm);
  return z;
}

// One ascent pass over the analog stage at fixed baseband factor. Trials
// that leave the radiated-power budget are rejected.
void analog_ascent_pass(const ChannelSet& cs, const ArchitectureSpec& arch,
                        const AqnmParams& aqnm, const IncumbentSnapshot& snap,
                        const BallObjective& shape, double p_max,
                        TradeoffVars* vars) {
  const AnalogSupport sup = AnalogSupport::make(arch);
  const ComplexMatrix& b = vars->x_mat;  // N_RF x K
  const int n = arch.n_antennas;
  const double a = aqnm.alpha;
  const double ab = a * aqnm.beta;
  const RealVector wu2 = weighted_gains(snap.u, snap.omega);
  const ComplexMatrix s0 = cs.h.adjoint() * wu2.cast<Complex>().asDiagonal() * cs.h;
  const ComplexMatrix m_bb = b * b.adjoint();
  const RealVector d = b.rowwise().squaredNorm();
  ComplexVector lu(snap.u.size());
  for (Eigen::Index i = 0; i < snap.u.size(); ++i)
    lu(i) = snap.omega(i) * snap.u(i);
  const ComplexMatrix l_r = (a / M_LN2) * (b * lu.asDiagonal() * cs.h);
  const double c0 = surrogate_constant(snap.u, snap.omega, cs.noise_variance);
  const ComplexMatrix d_diag = d.cast<Complex>().asDiagonal();

  auto rate_of = [&](const ComplexMatrix& r) {
    const ComplexMatrix sr = s0 * r;
    const double quad =
        (a * a * (r.adjoint() * sr * m_bb).trace().real() +
         ab * (r.adjoint() * sr * d_diag).trace().real()) /
        M_LN2;
    return c0 + 2.0 * (l_r * r).trace().real() - quad;
  };
  auto ptx_of = [&](const ComplexMatrix& r) {
    double acc = a * a * (r * b).squaredNorm();
    for (int m = 0; m < r.cols(); ++m)
      acc += ab * r.col(m).squaredNorm() * d(m);
    return acc;
  };
  auto phi_of = [&](const ComplexMatrix& r) {
    return shape.value_at(rate_of(r), shape.p_static + ptx_of(r) / shape.pa_eff);
  };
  auto grad_of = [&](const ComplexMatrix& r) {
    const ComplexMatrix sr = s0 * r;
    const ComplexMatrix grad_rate =
        2.0 * (l_r.adjoint() -
               (a * a * sr * m_bb + ab * sr * d_diag) / M_LN2);
    const ComplexMatrix grad_ptx =
        2.0 * (a * a * (r * m_bb) + ab * (r * d_diag));
    const double rate = rate_of(r);
    const double rt = shape.ratio();
    ComplexMatrix g = (shape.eta / shape.r_ref) * grad_rate;
    const double sq = std::sqrt(std::max(rate, 0.0));
    if (sq > 0.0) g += (shape.lifted_scale() * rt / sq) * grad_rate;
    g -= (shape.lifted_scale() * rt * rt / shape.pa_eff) * grad_ptx;
    return g;
  };

  ComplexMatrix r = vars->f_rf;
  double phi = phi_of(r);
  const double scale = std::sqrt(static_cast<double>(n));
  double tau = 1.0 / std::max(spectral_norm(grad_of(r)) / std::max(scale, 1.0),
                              1e-12);
  for (int step = 0; step < kFrfStepsPerIter; ++step) {
    const ComplexMatrix g = grad_of(r);
    bool accepted = false;
    double local = tau;
    for (int bt = 0; bt < 40; ++bt) {
      ComplexMatrix rnew = project_phases(r + local * g, sup);
      const double move2 = (rnew - r).squaredNorm();
      if (move2 == 0.0) break;
      if (ptx_of(rnew) <= p_max * (1.0 + kBudgetSlackRel)) {
        const double phinew = phi_of(rnew);
        if (phinew >= phi + (kArmijo / local) * move2) {
          r = std::move(rnew);
          phi = phinew;
          tau = 2.0 * local;
          accepted = true;
          break;
        }
      }
      local *= 0.5;
    }
    if (!accepted) break;
    if ((r - vars->f_rf).norm() <= 1e-10 * (1.0 + r.norm())) break;
  }
  vars->f_rf = std::move(r);
}

FrontierPoint point_from(const RatePowerReport& rep, double eta) {
  FrontierPoint pt;
  pt.eta = eta;
  pt.se = rep.sum_se;
  pt.ee = rep.ee;
  pt.p_tx = rep.p_tx;
  return pt;
}

}  // namespace

double RateSurrogate::value(const ComplexMatrix& z) const {
  const double lin = (l * z).trace().real();
  const double quad = (z.adjoint() * q * z).trace().real();
  return c0 + 2.0 * lin - quad;
}

ComplexMatrix RateSurrogate::gradient(const ComplexMatrix& z) const {
  return 2.0 * (l.adjoint() - q * z);
}

RateSurrogate rate_minorizer(const ComplexMatrix& x, const ComplexVector& u,
                             const RealVector& omega, const ChannelSet& cs,
                             const AqnmParams& aqnm) {
  if (x.rows() != cs.h.rows() || u.size() != cs.h.rows() ||
      omega.size() != cs.h.rows()) {
    throw ContractViolation("rate_minorizer: dimension mismatch");
  }
  RateSurrogate s;
  const double a = aqnm.alpha;
  const RealVector wu2 = weighted_gains(u, omega);
  s.q = (a / M_LN2) *
        (cs.gram * wu2.cast<Complex>().asDiagonal() * cs.gram);
  ComplexVector lu(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) lu(i) = omega(i) * u(i);
  s.l = (a / M_LN2) * (lu.asDiagonal() * cs.gram);
  s.c0 = surrogate_constant(u, omega, cs.noise_variance);
  return s;
}

double fractional_minorizer(double x, double y, double x_ref, double y_ref) {
  if (!(y_ref > 0.0)) {
    throw ContractViolation(
        "fractional_minorizer: reference denominator must be positive");
  }
  const double ratio = x_ref / y_ref;
  return 2.0 * ratio * x - ratio * ratio * y;
}

TradeoffVars solve_sca_subproblem(const RateSurrogate& rate_cut,
                                  const FractionalCut& frac_cut,
                                  const ChannelSet& cs,
                                  const ArchitectureSpec& arch,
                                  const PowerModel& pm,
                                  const SolverOptions& opts, double eta,
                                  const TradeoffRefs& refs, double p_max,
                                  const TradeoffVars& start) {
  if (!(frac_cut.y_ref > 0.0)) {
    throw ContractViolation(
        "solve_sca_subproblem: reference power must be positive");
  }
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ContractViolation("solve_sca_subproblem: eta must lie in [0, 1]");
  }
  if (!(p_max >= 0.0)) {
    throw ContractViolation("solve_sca_subproblem: negative power budget");
  }
  const AqnmParams& aqnm = opts.aqnm;
  const double p_static = static_power(arch, pm).total();

  BallObjective obj;
  obj.eta = eta;
  obj.r_ref = std::max(refs.r_ref, kTiny);
  obj.ee_ref = std::max(refs.ee_ref, kTiny);
  obj.x_ref = frac_cut.x_ref;
  obj.y_ref = frac_cut.y_ref;
  obj.bandwidth = opts.bandwidth_hz;
  obj.pa_eff = pm.pa_efficiency;
  obj.p_static = p_static;

  RateSurrogate zcut;
  ComplexMatrix z0;
  ComplexMatrix p_inv_sqrt;  // hybrid back-transform
  switch (arch.kind) {
    case Architecture::milac: {
      zcut.q = cs.gram_inv_sqrt * rate_cut.q * cs.gram_inv_sqrt;
      zcut.l = rate_cut.l * cs.gram_inv_sqrt;
      zcut.c0 = rate_cut.c0;
      z0 = cs.gram_sqrt * start.x_mat;
      obj.kappa = aqnm.alpha;
      break;
    }
    case Architecture::digital: {
      zcut = rate_cut;
      z0 = start.x_mat;
      obj.kappa = aqnm.alpha;
      break;
    }
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc: {
      const double a = aqnm.alpha;
      const RealVector col2 = start.f_rf.colwise().squaredNorm().transpose();
      ComplexMatrix p_mat = (a * a) * (start.f_rf.adjoint() * start.f_rf);
      p_mat += ((a * aqnm.beta) * col2).cast<Complex>().asDiagonal();
      const ComplexMatrix p_sqrt = hermitian_sqrt(p_mat);
      p_inv_sqrt = hermitian_inv_sqrt(p_mat);
      zcut.q = p_inv_sqrt * rate_cut.q * p_inv_sqrt;
      zcut.l = rate_cut.l * p_inv_sqrt;
      zcut.c0 = rate_cut.c0;
      z0 = p_sqrt * start.x_mat;
      obj.kappa = 1.0;
      break;
    }
  }
  obj.cut = &zcut;
  const double radius =
      obj.kappa > 0.0 ? std::sqrt(std::max(p_max, 0.0) / obj.kappa) : 0.0;

  int iters = 0;
  double residual = 0.0;
  const ComplexMatrix z =
      ascend_ball(obj, radius, z0, opts.max_pgd, &iters, &residual);

  TradeoffVars out = start;
  out.eta = eta;
  out.iters = iters;
  out.kkt_residual = residual;
  const int k = static_cast<int>(cs.h.rows());
  switch (arch.kind) {
    case Architecture::milac: {
      out.x_mat = cs.gram_inv_sqrt * z;
      const double smax = spectral_norm(z);
      out.p = RealVector::Constant(k, smax * smax);
      break;
    }
    case Architecture::digital: {
      out.x_mat = z;
      out.p = aqnm.alpha * z.colwise().squaredNorm().transpose();
      break;
    }
    default: {
      out.x_mat = p_inv_sqrt * z;
      out.p = (z.adjoint() * z).diagonal().real();
      break;
    }
  }
  out.r = zcut.value(z);
  out.x = std::sqrt(std::max(out.r, 0.0));
  out.y = obj.power_of(z);
  out.t = out.y > 0.0 ? opts.bandwidth_hz * out.x * out.x / out.y : 0.0;
  out.objective = obj.value(z);
  return out;
}

RatePowerReport evaluate_tradeoff(const ChannelSet& cs,
                                  const ArchitectureSpec& arch,
                                  const PowerModel& pm, double bandwidth_hz,
                                  const TradeoffVars& vars) {
  switch (arch.kind) {
    case Architecture::milac: {
      const ComplexMatrix v = cs.gram_sqrt * vars.x_mat;
      const int k = static_cast<int>(v.rows());
      ReducedPoint rp;
      const double smax = spectral_norm(v);
      if (smax > 0.0) {
        rp.y = v / smax;
        rp.p = RealVector::Constant(k, smax * smax);
      } else {
        rp.y = ComplexMatrix::Zero(k, v.cols());
        rp.p = RealVector::Zero(k);
      }
      return evaluate(cs, arch, pm, bandwidth_hz, rp);
    }
    case Architecture::digital:
      return evaluate(cs, arch, pm, bandwidth_hz, Beamformer{vars.x_mat});
    default:
      return evaluate_hybrid(cs, arch, pm, bandwidth_hz,
                             HybridFactors{vars.f_rf, vars.x_mat});
  }
}

FrontierResult trace_frontier(const ChannelSet& cs,
                              const ArchitectureSpec& arch,
                              const PowerModel& pm, const SolverOptions& opts,
                              const std::vector<double>& weights,
                              int recal_passes) {
  if (weights.empty()) {
    throw ContractViolation("trace_frontier: empty weight grid");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0 && weights[i] <= 1.0)) {
      throw ContractViolation("trace_frontier: weights must lie in [0, 1]");
    }
    if (i > 0 && weights[i] < weights[i - 1]) {
      throw ContractViolation("trace_frontier: weights must be sorted");
    }
  }
  if (std::abs(weights.front()) > 1e-12 ||
      std::abs(weights.back() - 1.0) > 1e-12) {
    throw ContractViolation("trace_frontier: grid must span [0, 1]");
  }

  FrontierResult result;
  const AqnmParams aqnm = opts.aqnm;
  const double bw = opts.bandwidth_hz;
  const double p_static = static_power(arch, pm).total();

  // Endpoint solves: the efficiency optimum anchors eta = 0, a rate-only
  // solve (vanishing amplifier cost for the baselines) anchors eta = 1.
  TradeoffVars state_ee, state_se;
  double ee_anchor = 0.0;
  double se_anchor = 0.0;
  auto milac_state = [&](const ReducedPoint& rp) {
    ComplexMatrix v = rp.y;
    for (int j = 0; j < v.cols(); ++j)
      v.col(j) *= std::sqrt(std::max(rp.p(j), 0.0));
    TradeoffVars s;
    s.x_mat = cs.gram_inv_sqrt * v;
    s.p = rp.p;
    return s;
  };
  switch (arch.kind) {
    case Architecture::milac: {
      const SolveReport rep0 = maximize_ee(cs, arch, pm, opts);
      const SolveReport rep1 = maximize_se(cs, arch, pm, opts);
      state_ee = milac_state(rep0.point);
      state_se = milac_state(rep1.point);
      ee_anchor = rep0.ee;
      se_anchor = rep1.se;
      break;
    }
    case Architecture::digital: {
      const SolveReport rep0 = digital_ee(cs, arch, pm, opts);
      // A huge fixed term makes the efficiency ratio proportional to the
      // rate, so the same solver yields the rate-oriented endpoint.
      PowerModel pm_se = pm;
      pm_se.p_lo = pm.p_lo + 1e9;
      const SolveReport rep1 = digital_ee(cs, arch, pm_se, opts);
      state_ee.x_mat = rep0.w.w;
      state_se.x_mat = rep1.w.w;
      ee_anchor = rep0.ee;
      se_anchor = evaluate(cs, arch, pm, bw, rep1.w).sum_se;
      break;
    }
    case Architecture::hybrid_fc:
    case Architecture::hybrid_sc: {
      HybridFactors fac0, fac1;
      const SolveReport rep0 = hybrid_ee(cs, arch, pm, opts, &fac0);
      PowerModel pm_se = pm;  // rate-oriented endpoint, same trick as above
      pm_se.p_lo = pm.p_lo + 1e9;
      const SolveReport rep1 = hybrid_ee(cs, arch, pm_se, opts, &fac1);
      state_ee.x_mat = fac0.f_bb;
      state_ee.f_rf = fac0.f_rf;
      state_se.x_mat = fac1.f_bb;
      state_se.f_rf = fac1.f_rf;
      ee_anchor = rep0.ee;
      se_anchor = evaluate_hybrid(cs, arch, pm, bw, fac1).sum_se;
      break;
    }
  }

  TradeoffRefs refs;
  refs.r_ref = std::max(se_anchor, kTiny);
  refs.ee_ref = std::max(ee_anchor, kTiny);

  const int n = static_cast<int>(weights.size());
  struct Slot {
    bool solved = false;
    TradeoffVars state;
    FrontierPoint point;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n));

  auto weighted_value = [&](const FrontierPoint& pt, double eta) {
    return eta * pt.se / refs.r_ref + (1.0 - eta) * pt.ee / refs.ee_ref;
  };

  // One weighted-sum solve: alternate tight surrogate construction with the
  // ball subproblem (plus an analog pass for hybrid) until the objective
  // settles. The recorded objective sequence is nondecreasing.
  auto sca_run = [&](double eta, TradeoffVars state) {
    state.eta = eta;
    if (is_hybrid(arch.kind) && state.f_rf.size() == 0) {
      throw ContractViolation("trace_frontier: missing analog factor");
    }
    ScaTrace trace;
    trace.eta = eta;
    double u_prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < kScaMaxIters; ++it) {
      const IncumbentSnapshot snap = snapshot_of(cs, arch, aqnm, state);
      const double p_tot = p_static + snap.p_tx / pm.pa_efficiency;
      const double ee_inc = p_tot > 0.0 ? bw * snap.se / p_tot : 0.0;
      const double u_inc =
          eta * snap.se / refs.r_ref + (1.0 - eta) * ee_inc / refs.ee_ref;
      trace.objective.push_back(u_inc);
      if (it > 0 &&
          std::abs(u_inc - u_prev) <= 1e-6 * std::max(1.0, std::abs(u_inc))) {
        break;
      }
      u_prev = u_inc;
      if (snap.se <= 0.0 || p_tot <= 0.0) break;
      const RateSurrogate cut = minorizer_of(cs, arch, aqnm, snap, state);
      FractionalCut fc;
      fc.x_ref = std::sqrt(snap.se);
      fc.y_ref = p_tot;
      state = solve_sca_subproblem(cut, fc, cs, arch, pm, opts, eta, refs,
                                   opts.p_max, state);
      if (is_hybrid(arch.kind) && !opts.analog_identity_hook) {
        BallObjective shape;
        shape.eta = eta;
        shape.r_ref = refs.r_ref;
        shape.ee_ref = refs.ee_ref;
        shape.x_ref = fc.x_ref;
        shape.y_ref = fc.y_ref;
        shape.bandwidth = bw;
        shape.kappa = 1.0;
        shape.pa_eff = pm.pa_efficiency;
        shape.p_static = p_static;
        analog_ascent_pass(cs, arch, aqnm, snap, shape, opts.p_max, &state);
      }
    }
    Slot s;
    s.solved = true;
    s.state = std::move(state);
    s.point = point_from(evaluate_tradeoff(cs, arch, pm, bw, s.state), eta);
    result.traces.push_back(std::move(trace));
    return s;
  };

  auto try_improve = [&](int i, const TradeoffVars& start) {
    const double eta = weights[static_cast<std::size_t>(i)];
    Slot& slot = slots[static_cast<std::size_t>(i)];
    try {
      Slot cand = sca_run(eta, start);
      if (!slot.solved ||
          weighted_value(cand.point, eta) >= weighted_value(slot.point, eta)) {
        slot = std::move(cand);
      }
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "eta=" << eta << ": " << e.what();
      result.warnings.push_back(msg.str());
    }
  };

  const int passes = std::max(1, recal_passes);
  for (int pass = 0; pass < passes; ++pass) {
    for (int i = 0; i < n; ++i) {
      const Slot& slot = slots[static_cast<std::size_t>(i)];
      if (slot.solved) {
        try_improve(i, slot.state);
        continue;
      }
      const TradeoffVars* warm = &state_ee;
      if (i > 0 && slots[static_cast<std::size_t>(i - 1)].solved) {
        warm = &slots[static_cast<std::size_t>(i - 1)].state;
      }
      try_improve(i, *warm);
      if (i == n - 1) try_improve(i, state_se);
    }
    if (pass + 1 < passes) {
      double best_se = se_anchor;
      double best_ee = ee_anchor;
      for (const Slot& s : slots) {
        if (!s.solved) continue;
        best_se = std::max(best_se, s.point.se);
        best_ee = std::max(best_ee, s.point.ee);
      }
      refs.r_ref = std::max(best_se, kTiny);
      refs.ee_ref = std::max(best_ee, kTiny);
    }
  }

  // Dominance repair: rerun a dominated weight from the state of a point
  // that beats it in both coordinates.
  for (int round = 0; round < kRepairRounds; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      Slot& si = slots[static_cast<std::size_t>(i)];
      if (!si.solved) continue;
      int donor = -1;
      double donor_value = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (j == i || !slots[static_cast<std::size_t>(j)].solved) continue;
        const FrontierPoint& pj = slots[static_cast<std::size_t>(j)].point;
        const bool dominates =
            pj.se - si.point.se > 1e-6 * std::max(1.0, std::abs(si.point.se)) &&
            pj.ee - si.point.ee > 1e-6 * std::max(1.0, std::abs(si.point.ee));
        if (!dominates) continue;
        const double v = weighted_value(pj, weights[static_cast<std::size_t>(i)]);
        if (v > donor_value) {
          donor_value = v;
          donor = j;
        }
      }
      if (donor < 0) continue;
      const double before =
          weighted_value(si.point, weights[static_cast<std::size_t>(i)]);
      try_improve(i, slots[static_cast<std::size_t>(donor)].state);
      const double after =
          weighted_value(si.point, weights[static_cast<std::size_t>(i)]);
      if (after > before) changed = true;
    }
    if (!changed) break;
  }

  for (int i = 0; i < n; ++i) {
    const Slot& s = slots[static_cast<std::size_t>(i)];
    if (s.solved) {
      result.points.push_back(s.point);
    } else {
      std::ostringstream msg;
      msg << "eta=" << weights[static_cast<std::size_t>(i)]
          << ": omitted, no successful solve";
      result.warnings.push_back(msg.str());
    }
  }
  return result;
}

}  // namespace milac
