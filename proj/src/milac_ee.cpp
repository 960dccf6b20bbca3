// SPDX-License-Identifier: Apache-2.0
#include "milac/milac_ee.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "milac/errors.hpp"

namespace milac {

namespace {

constexpr double kZeroPowerRel = 1e-12;  // p entries below this * p_max -> 0
constexpr double kBudgetSlackRel = 1e-10;

ComplexVector sqrt_vec(const RealVector& p) {
  return p.cwiseMax(0.0).cwiseSqrt().cast<Complex>();
}

double reduced_p_tx(const ComplexMatrix& y, const RealVector& p,
                    double alpha) {
  double acc = 0.0;
  for (int k = 0; k < y.cols(); ++k) acc += p(k) * y.col(k).squaredNorm();
  return alpha * acc;
}

// f(y) = tr(y^H q y diag p) - 2 Re tr(l y diag sqrt(p)).
double y_objective(const ComplexMatrix& q, const ComplexMatrix& l,
                   const ComplexMatrix& y, const RealVector& p) {
  const ComplexVector sp = sqrt_vec(p);
  const ComplexMatrix qy = q * y;
  double quad = 0.0;
  for (int k = 0; k < y.cols(); ++k) {
    quad += p(k) * std::real(y.col(k).dot(qy.col(k)));
  }
  const Complex lin = (l * y * sp.asDiagonal()).trace();
  return quad - 2.0 * std::real(lin);
}

ComplexMatrix y_gradient(const ComplexMatrix& q, const ComplexMatrix& l,
                         const ComplexMatrix& y, const RealVector& p) {
  const ComplexVector sp = sqrt_vec(p);
  return 2.0 * (q * y * p.cast<Complex>().asDiagonal()) -
         2.0 * (l.adjoint() * sp.asDiagonal());
}

}  // namespace

SolverOptions options_from(const PowerModel& pm, double p_max,
                           double bandwidth_hz) {
  SolverOptions opts;
  opts.p_max = p_max;
  opts.bandwidth_hz = bandwidth_hz;
  opts.aqnm = aqnm_params(pm.dac_bits);
  return opts;
}

bool is_feasible(const Beamformer& w, const RealVector& p, double tol) {
  ComplexMatrix gap = w.w.adjoint() * w.w;
  gap -= p.cast<Complex>().asDiagonal().toDenseMatrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(
      ComplexMatrix(0.5 * (gap + gap.adjoint())));
  return eig.eigenvalues().maxCoeff() <= tol;
}

ReducedPoint reduce(const ChannelSet& cs, const Beamformer& w,
                    const RealVector& p) {
  if (w.w.rows() != cs.antennas() || w.w.cols() != cs.users() ||
      p.size() != cs.users()) {
    throw ContractViolation("reduce: dimension mismatch");
  }
  if ((p.array() < 0.0).any()) {
    throw ContractViolation("reduce: stream powers must be >= 0");
  }
  const double scale = 1.0 + p.maxCoeff();
  if (!is_feasible(w, p, 1e-8 * scale)) {
    throw ContractViolation("reduce: w^H w exceeds diag(p)");
  }
  const double p_floor = kZeroPowerRel * std::max(p.maxCoeff(), 1e-300);
  ReducedPoint rp;
  rp.p = p;
  rp.y = cs.gram_inv_sqrt * (cs.h * w.w);
  for (int k = 0; k < p.size(); ++k) {
    if (p(k) <= p_floor) {
      rp.y.col(k).setZero();
      rp.p(k) = 0.0;
    } else {
      rp.y.col(k) /= std::sqrt(p(k));
    }
  }
  return rp;
}

Beamformer expand(const ChannelSet& cs, const ReducedPoint& rp) {
  if (rp.y.rows() != cs.users() || rp.y.cols() != cs.users() ||
      rp.p.size() != cs.users()) {
    throw ContractViolation("expand: dimension mismatch");
  }
  const ComplexVector sp = sqrt_vec(rp.p);
  Beamformer w;
  w.w = cs.h.adjoint() * (cs.gram_inv_sqrt * rp.y * sp.asDiagonal());
  return w;
}

void update_receivers_weights(const ComplexMatrix& c, const AqnmParams& aqnm,
                              double sigma2, ComplexVector* u,
                              RealVector* omega) {
  if (!(sigma2 > 0.0)) {
    throw ContractViolation("update_receivers_weights: sigma2 must be > 0");
  }
  const int k = static_cast<int>(c.rows());
  const double a = aqnm.alpha;
  u->resize(k);
  omega->resize(k);
  for (int i = 0; i < k; ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const Complex ui = a * std::conj(c(i, i)) / (a * row_power + sigma2);
    const double mag2 = std::norm(ui);
    const double e = std::norm(1.0 - a * ui * c(i, i)) +
                     mag2 * (a * row_power - a * a * direct) + sigma2 * mag2;
    (*u)(i) = ui;
    (*omega)(i) = 1.0 / e;
  }
}

void update_powers(const WmmseState& state, const ComplexMatrix& y,
                   const ComplexMatrix& z_mat, double p_max,
                   const AqnmParams& aqnm, double bandwidth_hz, RealVector* p,
                   double* mu_p) {
  const int k = static_cast<int>(y.cols());
  const double t_scale = bandwidth_hz / M_LN2;
  RealVector a(k), b(k), c(k);
  for (int j = 0; j < k; ++j) {
    a(j) = t_scale * state.omega(j) * std::real(state.u(j) * z_mat(j, j));
    double bj = 0.0;
    for (int i = 0; i < k; ++i) bj += state.z(i) * std::norm(z_mat(i, j));
    b(j) = bj;
    c(j) = y.col(j).squaredNorm();
  }
  const auto powers_at = [&](double mu) {
    RealVector out(k);
    for (int j = 0; j < k; ++j) {
      const double denom = b(j) + (state.gamma + mu) * c(j);
      out(j) = (a(j) > 0.0 && denom > 0.0) ? (a(j) / denom) * (a(j) / denom)
                                           : 0.0;
    }
    return out;
  };
  const auto budget_at = [&](const RealVector& pw) {
    return aqnm.alpha * c.dot(pw);
  };

  RealVector cand = powers_at(0.0);
  double mu = 0.0;
  if (budget_at(cand) > p_max) {
    double hi = 0.0;
    for (int j = 0; j < k; ++j) {
      if (a(j) > 0.0 && c(j) > 0.0) {
        const double cap = std::sqrt(p_max / (aqnm.alpha * k * c(j)));
        hi = std::max(hi, a(j) / (cap * c(j)));
      }
    }
    hi = std::max(hi, 1e-30);
    while (budget_at(powers_at(hi)) > p_max) hi *= 2.0;
    double lo = 0.0;
    for (int step = 0; step < 200; ++step) {
      const double mid = 0.5 * (lo + hi);
      if (budget_at(powers_at(mid)) > p_max) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo <= 1e-12 * hi) break;
    }
    mu = hi;
    cand = powers_at(mu);
  }
  const double floor = kZeroPowerRel * p_max;
  for (int j = 0; j < k; ++j) {
    if (cand(j) < floor) cand(j) = 0.0;
  }
  *p = cand;
  *mu_p = mu;
}

ComplexMatrix update_y_pgd(const WmmseState& state, const RealVector& p,
                           const ComplexMatrix& y0, int max_iters, double tol,
                           int* iters, double* residual) {
  const ComplexMatrix& q = state.q;
  const ComplexMatrix& l = state.l;
  ComplexMatrix y = project_spectral_ball(y0, 1.0);
  const double lipschitz =
      2.0 * spectral_norm(q) * (p.size() > 0 ? p.maxCoeff() : 0.0);
  *iters = 0;
  if (!(lipschitz > 0.0)) {
    const ComplexMatrix g = l.adjoint() * sqrt_vec(p).asDiagonal();
    if (g.norm() > 0.0) {
      const SvdFactors f = svd(g);
      y = f.left * f.right.adjoint();
    }
    *residual = 0.0;
    return y;
  }
  const double tau = 1.0 / lipschitz;
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    const ComplexMatrix next =
        project_spectral_ball(y - tau * y_gradient(q, l, y, p), 1.0);
    res = (y - next).norm();
    y = next;
    ++*iters;
    if (res <= tol) break;
  }
  *residual = res;
  return y;
}

ComplexMatrix update_y_budget_guarded(const WmmseState& state,
                                      const RealVector& p,
                                      const ComplexMatrix& y0, double p_max,
                                      const AqnmParams& aqnm, int max_iters,
                                      double tol, int* pgd_iters,
                                      double* residual, int* violations) {
  // The incumbent is feasible: the preceding power update enforced the budget
  // at its column norms, and projection onto the spectral ball cannot grow
  // column norms. Candidates must strictly improve the quadratic model or the
  // step is shrunk toward the incumbent; ball and budget are both convex, so
  // every interpolate stays feasible.
  const ComplexMatrix y_start = project_spectral_ball(y0, 1.0);
  const double f_start = y_objective(state.q, state.l, y_start, p);
  const auto guarded = [&](ComplexMatrix cand) {
    for (int h = 0; h < 40; ++h) {
      if (y_objective(state.q, state.l, cand, p) < f_start) return cand;
      cand = 0.5 * (cand + y_start);
    }
    return y_start;
  };
  int it = 0;
  ComplexMatrix y =
      update_y_pgd(state, p, y_start, max_iters, tol, &it, residual);
  *pgd_iters += it;
  if (reduced_p_tx(y, p, aqnm.alpha) <= p_max * (1.0 + kBudgetSlackRel)) {
    return guarded(y);
  }
  ++*violations;
  WmmseState shifted = state;
  const int k = static_cast<int>(y.rows());
  const auto solve_at = [&](double mu, const ComplexMatrix& warm) {
    shifted.q = state.q + mu * aqnm.alpha *
                              ComplexMatrix::Identity(k, k);
    int inner_it = 0;
    ComplexMatrix out =
        update_y_pgd(shifted, p, warm, max_iters, tol, &inner_it, residual);
    *pgd_iters += inner_it;
    return out;
  };
  double hi = std::max(1.0, spectral_norm(state.q));
  ComplexMatrix y_hi = solve_at(hi, y);
  while (reduced_p_tx(y_hi, p, aqnm.alpha) > p_max) {
    hi *= 2.0;
    y_hi = solve_at(hi, y_hi);
  }
  double lo = 0.0;
  for (int step = 0; step < 100; ++step) {
    const double mid = 0.5 * (lo + hi);
    const ComplexMatrix y_mid = solve_at(mid, y_hi);
    const double tx = reduced_p_tx(y_mid, p, aqnm.alpha);
    if (tx > p_max) {
      lo = mid;
    } else {
      hi = mid;
      y_hi = y_mid;
      if (tx >= p_max * (1.0 - kBudgetSlackRel)) break;
    }
    if (hi - lo <= 1e-12 * hi) break;
  }
  return guarded(y_hi);
}

double inner_objective(const ChannelSet& cs, const AqnmParams& aqnm,
                       double bandwidth_hz, double gamma,
                       const ComplexVector& u, const RealVector& omega,
                       const ReducedPoint& rp) {
  const ComplexMatrix c = coupling_matrix(cs, rp);
  const double a = aqnm.alpha;
  const double sigma2 = cs.noise_variance;
  double mse_part = 0.0;
  for (int i = 0; i < c.rows(); ++i) {
    const double row_power = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const double mag2 = std::norm(u(i));
    const double e = std::norm(1.0 - a * u(i) * c(i, i)) +
                     mag2 * (a * row_power - a * a * direct) + sigma2 * mag2;
    mse_part += omega(i) * e - std::log(omega(i));
  }
  return (bandwidth_hz / M_LN2) * mse_part +
         gamma * p_tx_reduced(rp, aqnm);
}

ReducedPoint wmmse_inner(const ChannelSet& cs, const SolverOptions& opts,
                         double gamma, double p_max, const ReducedPoint& start,
                         InnerTrace* trace) {
  const AqnmParams aqnm = opts.aqnm;
  const double t_scale = opts.bandwidth_hz / M_LN2;
  const int k = cs.users();
  ReducedPoint cur = start;
  InnerTrace local;
  InnerTrace& tr = trace ? *trace : local;
  tr.converged = false;

  double obj_prev = std::numeric_limits<double>::quiet_NaN();
  for (int cycle = 0; cycle < opts.max_inner; ++cycle) {
    ++tr.cycles;
    const ComplexMatrix z_mat = cs.gram_sqrt * cur.y;
    const ComplexMatrix c = z_mat * sqrt_vec(cur.p).asDiagonal();
    WmmseState state;
    state.gamma = gamma;
    update_receivers_weights(c, aqnm, cs.noise_variance, &state.u,
                             &state.omega);
    state.z = t_scale *
              (state.omega.array() * state.u.cwiseAbs2().array()).matrix();
    state.q = cs.gram_sqrt * state.z.cast<Complex>().asDiagonal() *
                  cs.gram_sqrt +
              gamma * ComplexMatrix::Identity(k, k);
    const ComplexVector lw =
        t_scale * (state.omega.array().cast<Complex>() * state.u.array())
                      .matrix();
    state.l = lw.asDiagonal() * cs.gram_sqrt;

    const double g1 =
        inner_objective(cs, aqnm, opts.bandwidth_hz, gamma, state.u,
                        state.omega, cur);
    tr.objective.push_back(g1);

    update_powers(state, cur.y, z_mat, p_max, aqnm, opts.bandwidth_hz, &cur.p,
                  &state.mu_p);
    tr.objective.push_back(inner_objective(cs, aqnm, opts.bandwidth_hz, gamma,
                                           state.u, state.omega, cur));

    const double tol = 1e-8 * (1.0 + state.l.norm());
    cur.y = update_y_budget_guarded(state, cur.p, cur.y, p_max, aqnm,
                                    opts.max_pgd, tol, &tr.pgd_iters,
                                    &tr.kkt_residual, &tr.budget_violations);
    const double g3 = inner_objective(cs, aqnm, opts.bandwidth_hz, gamma,
                                      state.u, state.omega, cur);
    tr.objective.push_back(g3);

    const double anchor = cycle == 0 ? g1 : obj_prev;
    if (std::abs(g3 - anchor) <=
        opts.eps_in * std::max(1.0, std::abs(anchor))) {
      tr.converged = true;
      break;
    }
    obj_prev = g3;
  }
  return cur;
}

namespace {

ReducedPoint default_start(const ChannelSet& cs, const AqnmParams& aqnm,
                           double p_max, bool identity_retry) {
  const int k = cs.users();
  ReducedPoint rp;
  if (identity_retry) {
    rp.y = ComplexMatrix::Identity(k, k);
  } else {
    const SvdFactors f = svd(cs.gram_sqrt);
    rp.y = f.right * f.left.adjoint();
  }
  double c_sum = 0.0;
  for (int j = 0; j < k; ++j) c_sum += rp.y.col(j).squaredNorm();
  rp.p = RealVector::Constant(k, 0.9 * p_max / (aqnm.alpha * c_sum));
  return rp;
}

SolveReport finish_report(const ChannelSet& cs, const ArchitectureSpec& arch,
                          const PowerModel& pm, const SolverOptions& opts,
                          const ReducedPoint& point) {
  SolveReport rep;
  rep.point = point;
  rep.w = expand(cs, point);
  const RatePowerReport m = evaluate(cs, arch, pm, opts.bandwidth_hz, point);
  rep.ee = m.ee;
  rep.se = m.sum_se;
  rep.p_tx = m.p_tx;
  rep.p_tot = m.p_tot;
  return rep;
}

}  // namespace

SolveReport maximize_ee(const ChannelSet& cs, const ArchitectureSpec& arch,
                        const PowerModel& pm, const SolverOptions& opts) {
  if (arch.kind != Architecture::milac) {
    throw ContractViolation("maximize_ee: architecture must be milac");
  }
  if (!(opts.p_max > 0.0)) {
    throw ContractViolation("maximize_ee: p_max must be > 0");
  }
  const AqnmParams aqnm = opts.aqnm;
  ReducedPoint cur = default_start(cs, aqnm, opts.p_max, false);
  RatePowerReport m = evaluate(cs, arch, pm, opts.bandwidth_hz, cur);
  if (m.sum_se <= 0.0) {
    cur = default_start(cs, aqnm, opts.p_max, true);
    m = evaluate(cs, arch, pm, opts.bandwidth_hz, cur);
    if (m.sum_se <= 0.0) {
      SolveReport rep = finish_report(cs, arch, pm, opts, cur);
      rep.converged = true;
      return rep;
    }
  }

  double lambda = m.ee;
  std::vector<double> lambda_trace{lambda};
  SolveReport rep;
  bool converged = false;
  int outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    const double gamma = lambda / pm.pa_efficiency;
    InnerTrace tr;
    cur = wmmse_inner(cs, opts, gamma, opts.p_max, cur, &tr);
    rep.inner_iters += tr.cycles;
    rep.pgd_iters += tr.pgd_iters;
    rep.budget_violations += tr.budget_violations;
    rep.kkt_residual = tr.kkt_residual;
    rep.inner_objective_trace.insert(rep.inner_objective_trace.end(),
                                     tr.objective.begin(),
                                     tr.objective.end());
    m = evaluate(cs, arch, pm, opts.bandwidth_hz, cur);
    const double next = m.ee;
    lambda_trace.push_back(next);
    if (std::abs(next - lambda) <= opts.eps_out * std::max(lambda, 1e-300)) {
      lambda = next;
      converged = true;
      ++outer;
      break;
    }
    lambda = next;
  }
  SolveReport out = finish_report(cs, arch, pm, opts, cur);
  out.lambda_trace = std::move(lambda_trace);
  out.inner_objective_trace = std::move(rep.inner_objective_trace);
  out.outer_iters = outer;
  out.inner_iters = rep.inner_iters;
  out.pgd_iters = rep.pgd_iters;
  out.budget_violations = rep.budget_violations;
  out.kkt_residual = rep.kkt_residual;
  out.converged = converged;
  return out;
}

SolveReport maximize_se(const ChannelSet& cs, const ArchitectureSpec& arch,
                        const PowerModel& pm, const SolverOptions& opts) {
  if (arch.kind != Architecture::milac) {
    throw ContractViolation("maximize_se: architecture must be milac");
  }
  const AqnmParams aqnm = opts.aqnm;
  ReducedPoint cur = default_start(cs, aqnm, opts.p_max, false);
  InnerTrace tr;
  cur = wmmse_inner(cs, opts, 0.0, opts.p_max, cur, &tr);
  if (evaluate(cs, arch, pm, opts.bandwidth_hz, cur).sum_se <= 0.0) {
    cur = default_start(cs, aqnm, opts.p_max, true);
    InnerTrace tr2;
    cur = wmmse_inner(cs, opts, 0.0, opts.p_max, cur, &tr2);
    tr = tr2;
  }
  SolveReport out = finish_report(cs, arch, pm, opts, cur);
  out.lambda_trace = {out.ee};
  out.inner_objective_trace = tr.objective;
  out.outer_iters = 1;
  out.inner_iters = tr.cycles;
  out.pgd_iters = tr.pgd_iters;
  out.budget_violations = tr.budget_violations;
  out.kkt_residual = tr.kkt_residual;
  out.converged = tr.converged;
  return out;
}

}  // namespace milac
