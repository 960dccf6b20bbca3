// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "milac/channel.hpp"
#include "milac/errors.hpp"
#include "milac/metrics.hpp"
#include "milac/tradeoff.hpp"
#include "test_support.hpp"

namespace {

using milac::AqnmParams;
using milac::Architecture;
using milac::ArchitectureSpec;
using milac::ChannelSet;
using milac::Complex;
using milac::ComplexMatrix;
using milac::ComplexVector;
using milac::FractionalCut;
using milac::PowerModel;
using milac::RateSurrogate;
using milac::RealVector;
using milac::SolverOptions;
using milac::TradeoffRefs;
using milac::TradeoffVars;

ChannelSet random_channel(int users, int antennas, unsigned seed,
                          double sigma2) {
  return milac::generate_rayleigh(users, antennas, seed, 1.0, sigma2);
}

// Random row-space coordinate scaled so the radiated power is frac * p_max.
ComplexMatrix feasible_x(const ChannelSet& cs, const AqnmParams& aqnm,
                         double p_max, double frac, std::mt19937_64& rng) {
  const int k = static_cast<int>(cs.h.rows());
  ComplexMatrix x = milac::test::random_complex(k, k, rng);
  const double tx = aqnm.alpha * (cs.gram_sqrt * x).squaredNorm();
  if (tx > 0.0) x *= std::sqrt(frac * p_max / tx);
  return x;
}

double milac_rate(const ChannelSet& cs, const AqnmParams& aqnm,
                  const ComplexMatrix& x) {
  const ComplexMatrix c = cs.gram * x;
  return milac::sum_se(milac::sinr_milac(c, aqnm, cs.noise_variance));
}

// MMSE receive scalars and weights for the diagonal-distortion model.
void digital_mmse(const ChannelSet& cs, const AqnmParams& aqnm,
                  const ComplexMatrix& w, ComplexVector* u, RealVector* omega) {
  const ComplexMatrix c = cs.h * w;
  const RealVector row_gains = w.rowwise().squaredNorm();
  const int k = static_cast<int>(c.rows());
  u->setZero(k);
  omega->setOnes(k);
  const double a = aqnm.alpha;
  for (int i = 0; i < k; ++i) {
    const double row = c.row(i).squaredNorm();
    const double direct = std::norm(c(i, i));
    const double dist = a * aqnm.beta * cs.h.row(i).cwiseAbs2().dot(row_gains);
    const double denom = a * a * row + dist + cs.noise_variance;
    if (denom > 0.0) (*u)(i) = a * std::conj(c(i, i)) / denom;
    const double interf =
        a * a * (row - direct) + dist + cs.noise_variance;
    (*omega)(i) = 1.0 + (interf > 0.0 ? a * a * direct / interf : 0.0);
  }
}

// Beamformer-space surrogate coefficients for the diagonal-distortion model,
// assembled independently of the library for the closed-form cross check.
RateSurrogate digital_cut(const ChannelSet& cs, const AqnmParams& aqnm,
                          const ComplexVector& u, const RealVector& omega) {
  RateSurrogate s;
  const double a = aqnm.alpha;
  const int k = static_cast<int>(u.size());
  const RealVector wu2 = omega.array() * u.array().abs2();
  const RealVector dvec = cs.h.cwiseAbs2().transpose() * wu2;
  s.q = (a * a / M_LN2) *
        (cs.h.adjoint() * wu2.cast<Complex>().asDiagonal() * cs.h);
  s.q += ((a * aqnm.beta / M_LN2) * dvec).cast<Complex>().asDiagonal();
  ComplexVector lu(k);
  for (int i = 0; i < k; ++i) lu(i) = omega(i) * u(i);
  s.l = (a / M_LN2) * (lu.asDiagonal() * cs.h);
  double c0 = 0.0;
  for (int i = 0; i < k; ++i) {
    c0 += std::log(omega(i)) + 1.0 -
          omega(i) * (1.0 + cs.noise_variance * std::norm(u(i)));
  }
  s.c0 = c0 / M_LN2;
  return s;
}

double true_weighted_value(double se, double p_tot, double eta,
                           const TradeoffRefs& refs, double bw) {
  return eta * se / refs.r_ref + (1.0 - eta) * (bw * se / p_tot) / refs.ee_ref;
}

}  // namespace

TEST_CASE("fractional lower bound matches the ratio at its reference") {
  CHECK(milac::fractional_minorizer(2.0, 1.0, 2.0, 1.0) == doctest::Approx(4.0).epsilon(1e-15));
  const double off = milac::fractional_minorizer(3.0, 1.0, 2.0, 1.0);
  CHECK(off == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(off <= 9.0);
  CHECK(milac::fractional_minorizer(5.0, 2.0, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(milac::fractional_minorizer(1.0, 1.0, 1.0, 0.0),
                  milac::ContractViolation);
  CHECK_THROWS_AS(milac::fractional_minorizer(1.0, 1.0, 1.0, -2.0),
                  milac::ContractViolation);

  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    const double x = 4.0 * milac::test::urand(rng);
    const double y = 0.1 + 3.0 * milac::test::urand(rng);
    const double xr = 4.0 * milac::test::urand(rng);
    const double yr = 0.1 + 3.0 * milac::test::urand(rng);
    const double bound = milac::fractional_minorizer(x, y, xr, yr);
    CHECK(bound <= x * x / y + 1e-12);
    const double at_ref = milac::fractional_minorizer(xr, yr, xr, yr);
    CHECK(at_ref == doctest::Approx(xr * xr / yr).epsilon(1e-12));
  }
}

TEST_CASE("rate surrogate is tight at its expansion point") {
  std::mt19937_64 rng(11);
  const AqnmParams aqnm = milac::aqnm_params(3);
  for (int t = 0; t < 20; ++t) {
    const ChannelSet cs = random_channel(3, 5, 100 + t, 0.1);
    const ComplexMatrix x = feasible_x(cs, aqnm, 1.0, 0.7, rng);
    const ComplexMatrix c = cs.gram * x;
    ComplexVector u;
    RealVector omega;
    milac::update_receivers_weights(c, aqnm, cs.noise_variance, &u, &omega);
    const RateSurrogate cut = milac::rate_minorizer(x, u, omega, cs, aqnm);
    const double rate = milac_rate(cs, aqnm, x);
    CHECK(cut.value(x) ==
          doctest::Approx(rate).epsilon(1e-10).scale(1.0 + rate));
    // Curvature matrix stays PSD.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(cut.q);
    CHECK(es.eigenvalues().minCoeff() >=
          -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rate surrogate lower-bounds the rate everywhere") {
  std::mt19937_64 rng(13);
  const AqnmParams aqnm = milac::aqnm_params(2);
  for (int t = 0; t < 20; ++t) {
    const ChannelSet cs = random_channel(3, 4, 300 + t, 0.2);
    const ComplexMatrix x0 = feasible_x(cs, aqnm, 1.0, 0.6, rng);
    ComplexVector u;
    RealVector omega;
    milac::update_receivers_weights(cs.gram * x0, aqnm, cs.noise_variance, &u,
                                    &omega);
    const RateSurrogate cut = milac::rate_minorizer(x0, u, omega, cs, aqnm);
    for (int probe = 0; probe < 5; ++probe) {
      const double frac = 0.05 + 0.9 * milac::test::urand(rng);
      const ComplexMatrix xp = feasible_x(cs, aqnm, 1.0, frac, rng);
      const double rate = milac_rate(cs, aqnm, xp);
      CHECK(cut.value(xp) <= rate + 1e-9 * (1.0 + std::abs(rate)));
    }
  }
}

TEST_CASE("zero expansion point with unit weights gives a zero surrogate") {
  const ChannelSet cs = random_channel(2, 3, 17, 0.3);
  const AqnmParams aqnm = milac::aqnm_params(4);
  const ComplexMatrix x0 = ComplexMatrix::Zero(2, 2);
  const ComplexVector u = ComplexVector::Zero(2);
  const RealVector omega = RealVector::Ones(2);
  const RateSurrogate cut = milac::rate_minorizer(x0, u, omega, cs, aqnm);
  CHECK(cut.value(x0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(milac_rate(cs, aqnm, x0) == 0.0);
  std::mt19937_64 rng(19);
  const ComplexMatrix xp = feasible_x(cs, aqnm, 1.0, 0.5, rng);
  CHECK(cut.value(xp) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("subproblem never undercuts its warm start") {
  std::mt19937_64 rng(23);
  const double p_max = 1.0;
  const PowerModel pm = PowerModel::defaults();
  const ArchitectureSpec arch = ArchitectureSpec::make(Architecture::milac, 4, 2);
  const SolverOptions opts = milac::options_from(pm, p_max, 1e3);
  const AqnmParams aqnm = opts.aqnm;
  const double p_static = milac::static_power(arch, pm).total();
  TradeoffRefs refs;
  refs.r_ref = 4.0;
  refs.ee_ref = 50.0;
  for (const double eta : {0.0, 0.37, 1.0}) {
    for (int t = 0; t < 5; ++t) {
      const ChannelSet cs = random_channel(2, 4, 500 + t, 0.05);
      TradeoffVars start;
      start.x_mat = feasible_x(cs, aqnm, p_max, 0.4, rng);
      ComplexVector u;
      RealVector omega;
      milac::update_receivers_weights(cs.gram * start.x_mat, aqnm,
                                      cs.noise_variance, &u, &omega);
      const RateSurrogate cut =
          milac::rate_minorizer(start.x_mat, u, omega, cs, aqnm);
      const double rate0 = milac_rate(cs, aqnm, start.x_mat);
      const double p_tx0 =
          aqnm.alpha * (cs.gram_sqrt * start.x_mat).squaredNorm();
      const double p_tot0 = p_static + p_tx0 / pm.pa_efficiency;
      FractionalCut fc;
      fc.x_ref = std::sqrt(rate0);
      fc.y_ref = p_tot0;
      const TradeoffVars out = milac::solve_sca_subproblem(
          cut, fc, cs, arch, pm, opts, eta, refs, p_max, start);
      const double incumbent =
          true_weighted_value(rate0, p_tot0, eta, refs, opts.bandwidth_hz);
      CHECK(out.objective >=
            incumbent - 1e-9 * std::max(1.0, std::abs(incumbent)));
      // Lifted scalars stay active at the returned point.
      CHECK(out.x * out.x ==
            doctest::Approx(std::max(out.r, 0.0)).epsilon(1e-12));
      CHECK(out.t ==
            doctest::Approx(opts.bandwidth_hz * out.x * out.x / out.y)
                .epsilon(1e-12));
      const double rate_out = milac_rate(cs, aqnm, out.x_mat);
      CHECK(out.r <= rate_out + 1e-6 * std::max(1.0, std::abs(rate_out)));
      CHECK(out.eta == eta);
    }
  }
}

TEST_CASE("subproblem keeps the returned point inside the transmit set") {
  std::mt19937_64 rng(29);
  const double p_max = 0.8;
  const PowerModel pm = PowerModel::defaults();
  const SolverOptions opts = milac::options_from(pm, p_max, 1e3);
  const AqnmParams aqnm = opts.aqnm;
  const ChannelSet cs = random_channel(2, 4, 907, 0.05);

  const ArchitectureSpec milac_arch =
      ArchitectureSpec::make(Architecture::milac, 4, 2);
  TradeoffVars start;
  start.x_mat = feasible_x(cs, aqnm, p_max, 0.5, rng);
  ComplexVector u;
  RealVector omega;
  milac::update_receivers_weights(cs.gram * start.x_mat, aqnm,
                                  cs.noise_variance, &u, &omega);
  const RateSurrogate cut =
      milac::rate_minorizer(start.x_mat, u, omega, cs, aqnm);
  const double rate0 = milac_rate(cs, aqnm, start.x_mat);
  FractionalCut fc;
  fc.x_ref = std::sqrt(rate0);
  fc.y_ref = milac::static_power(milac_arch, pm).total() + 0.1;
  TradeoffRefs refs;
  refs.r_ref = 3.0;
  refs.ee_ref = 40.0;
  const TradeoffVars out = milac::solve_sca_subproblem(
      cut, fc, cs, milac_arch, pm, opts, 0.5, refs, p_max, start);

  const double p_tx = aqnm.alpha * (cs.gram_sqrt * out.x_mat).squaredNorm();
  CHECK(p_tx <= p_max * (1.0 + 1e-8));
  // Spectral cap: x^H gram x <= diag(p) up to slack.
  const ComplexMatrix gap =
      out.x_mat.adjoint() * cs.gram * out.x_mat -
      ComplexMatrix(out.p.cast<Complex>().asDiagonal());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (gap + gap.adjoint())));
  CHECK(es.eigenvalues().maxCoeff() <= 1e-8 * (1.0 + out.p.maxCoeff()));

  // Invalid references are rejected.
  FractionalCut bad = fc;
  bad.y_ref = 0.0;
  CHECK_THROWS_AS(milac::solve_sca_subproblem(cut, bad, cs, milac_arch, pm,
                                              opts, 0.5, refs, p_max, start),
                  milac::ContractViolation);
  CHECK_THROWS_AS(milac::solve_sca_subproblem(cut, fc, cs, milac_arch, pm,
                                              opts, -0.1, refs, p_max, start),
                  milac::ContractViolation);
  CHECK_THROWS_AS(milac::solve_sca_subproblem(cut, fc, cs, milac_arch, pm,
                                              opts, 1.1, refs, p_max, start),
                  milac::ContractViolation);
}

TEST_CASE("rate-weighted subproblem matches the trust-region closed form") {
  std::mt19937_64 rng(31);
  const double p_max = 1.0;
  const PowerModel pm = PowerModel::defaults();
  const ArchitectureSpec arch =
      ArchitectureSpec::make(Architecture::digital, 3, 2);
  SolverOptions opts = milac::options_from(pm, p_max, 1e3);
  opts.max_pgd = 20000;
  const AqnmParams aqnm = opts.aqnm;
  for (int t = 0; t < 5; ++t) {
    const ChannelSet cs = random_channel(2, 3, 1100 + t, 0.1);
    ComplexMatrix w0 = milac::test::random_complex(3, 2, rng);
    w0 *= std::sqrt(0.5 * p_max / (aqnm.alpha * w0.squaredNorm()));
    ComplexVector u;
    RealVector omega;
    digital_mmse(cs, aqnm, w0, &u, &omega);
    const RateSurrogate cut = digital_cut(cs, aqnm, u, omega);

    // Independent closed form: w(mu) = (q + mu I)^{-1} l^H with mu >= 0
    // bisected until ||w|| meets the Frobenius budget.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (cut.q + cut.q.adjoint())));
    const RealVector lam = es.eigenvalues().cwiseMax(0.0);
    const ComplexMatrix rt = es.eigenvectors().adjoint() * cut.l.adjoint();
    const RealVector rt2 = rt.cwiseAbs2().rowwise().sum();
    const double radius2 = p_max / aqnm.alpha;
    auto norm2_at = [&](double mu) {
      double acc = 0.0;
      for (int i = 0; i < lam.size(); ++i) {
        const double den = lam(i) + mu;
        if (den <= 0.0) {
          if (rt2(i) > 0.0) return std::numeric_limits<double>::infinity();
          continue;
        }
        acc += rt2(i) / (den * den);
      }
      return acc;
    };
    double mu = 0.0;
    if (norm2_at(0.0) > radius2) {
      double lo = 0.0, hi = 1.0;
      while (norm2_at(hi) > radius2) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm2_at(mid) > radius2 ? lo : hi) = mid;
      }
      mu = hi;
    }
    ComplexMatrix scaled = rt;
    for (int i = 0; i < lam.size(); ++i) {
      const double den = lam(i) + mu;
      scaled.row(i) *= den > 0.0 ? 1.0 / den : 0.0;
    }
    const ComplexMatrix w_cf = es.eigenvectors() * scaled;
    const double r_cf = cut.value(w_cf);

    TradeoffVars start;
    start.x_mat = w0;
    FractionalCut fc;
    fc.x_ref = 1.0;
    fc.y_ref = 1.0;
    TradeoffRefs refs;
    refs.r_ref = 2.0;
    refs.ee_ref = 30.0;
    const TradeoffVars out = milac::solve_sca_subproblem(
        cut, fc, cs, arch, pm, opts, 1.0, refs, p_max, start);
    CHECK(out.r <= r_cf + 1e-9 * std::max(1.0, std::abs(r_cf)));
    CHECK(out.r >= r_cf - 1e-6 * std::max(1.0, std::abs(r_cf)));
    CHECK(aqnm.alpha * out.x_mat.squaredNorm() <= p_max * (1.0 + 1e-8));
  }
}

TEST_CASE("single-stream subproblem lands on the grid optimum") {
  std::mt19937_64 rng(37);
  const double p_max = 1.0;
  const PowerModel pm = PowerModel::defaults();
  const ArchitectureSpec arch = ArchitectureSpec::make(Architecture::milac, 2, 1);
  SolverOptions opts = milac::options_from(pm, p_max, 1e3);
  opts.max_pgd = 50000;
  const AqnmParams aqnm = opts.aqnm;
  const ChannelSet cs = random_channel(1, 2, 4242, 0.05);
  const double p_static = milac::static_power(arch, pm).total();

  TradeoffVars start;
  start.x_mat = feasible_x(cs, aqnm, p_max, 0.3, rng);
  ComplexVector u;
  RealVector omega;
  milac::update_receivers_weights(cs.gram * start.x_mat, aqnm,
                                  cs.noise_variance, &u, &omega);
  const RateSurrogate cut =
      milac::rate_minorizer(start.x_mat, u, omega, cs, aqnm);
  const double rate0 = milac_rate(cs, aqnm, start.x_mat);
  const double p_tx0 = aqnm.alpha * (cs.gram_sqrt * start.x_mat).squaredNorm();
  FractionalCut fc;
  fc.x_ref = std::sqrt(rate0);
  fc.y_ref = p_static + p_tx0 / pm.pa_efficiency;
  TradeoffRefs refs;
  refs.r_ref = 3.0;
  refs.ee_ref = 2e2;
  const double eta = 0.4;
  const TradeoffVars out = milac::solve_sca_subproblem(
      cut, fc, cs, arch, pm, opts, eta, refs, p_max, start);

  // The 1x1 problem depends on z only through |z| after phase alignment.
  const double qz =
      (cs.gram_inv_sqrt * cut.q * cs.gram_inv_sqrt)(0, 0).real();
  const double lz = std::abs((cut.l * cs.gram_inv_sqrt)(0, 0));
  const double rho = std::sqrt(p_max / aqnm.alpha);
  double best = -std::numeric_limits<double>::infinity();
  const int grid = 200000;
  for (int i = 0; i <= grid; ++i) {
    const double tt = rho * static_cast<double>(i) / grid;
    const double rate = cut.c0 + 2.0 * lz * tt - qz * tt * tt;
    const double power = p_static + aqnm.alpha * tt * tt / pm.pa_efficiency;
    const double lifted = milac::fractional_minorizer(
        std::sqrt(std::max(rate, 0.0)), power, fc.x_ref, fc.y_ref);
    const double value = eta * rate / refs.r_ref +
                         (1.0 - eta) * opts.bandwidth_hz * lifted / refs.ee_ref;
    best = std::max(best, value);
  }
  CHECK(out.objective >= best - 1e-3 * std::max(1.0, std::abs(best)));
  CHECK(out.objective <= best + 1e-5 * std::max(1.0, std::abs(best)));
}

TEST_CASE("tradeoff evaluation matches the architecture reports") {
  std::mt19937_64 rng(41);
  const PowerModel pm = PowerModel::defaults();
  const double bw = 1e3;

  // milac: uniform-cap extraction preserves the underlying beamformer.
  {
    const ChannelSet cs = random_channel(2, 4, 2200, 0.1);
    const ArchitectureSpec arch =
        ArchitectureSpec::make(Architecture::milac, 4, 2);
    milac::ReducedPoint rp;
    rp.y = milac::project_spectral_ball(
        milac::test::random_complex(2, 2, rng), 1.0);
    rp.p = milac::test::random_positive(2, rng);
    TradeoffVars vars;
    ComplexMatrix v = rp.y;
    for (int j = 0; j < 2; ++j) v.col(j) *= std::sqrt(rp.p(j));
    vars.x_mat = cs.gram_inv_sqrt * v;
    const auto direct = milac::evaluate(cs, arch, pm, bw, rp);
    const auto via = milac::evaluate_tradeoff(cs, arch, pm, bw, vars);
    CHECK(via.sum_se ==
          doctest::Approx(direct.sum_se).epsilon(1e-9));
    CHECK(via.p_tx == doctest::Approx(direct.p_tx).epsilon(1e-9));
    CHECK(via.ee == doctest::Approx(direct.ee).epsilon(1e-9));
  }

  // digital and hybrid dispatch to their own evaluators.
  {
    const ChannelSet cs = random_channel(2, 4, 2300, 0.1);
    const ArchitectureSpec arch =
        ArchitectureSpec::make(Architecture::digital, 4, 2);
    TradeoffVars vars;
    vars.x_mat = milac::test::random_complex(4, 2, rng);
    const auto direct =
        milac::evaluate(cs, arch, pm, bw, milac::Beamformer{vars.x_mat});
    const auto via = milac::evaluate_tradeoff(cs, arch, pm, bw, vars);
    CHECK(via.sum_se == doctest::Approx(direct.sum_se).epsilon(1e-12));
    CHECK(via.p_tot == doctest::Approx(direct.p_tot).epsilon(1e-12));
  }
  {
    const ChannelSet cs = random_channel(2, 4, 2400, 0.1);
    const ArchitectureSpec arch =
        ArchitectureSpec::make(Architecture::hybrid_sc, 4, 2, 2);
    TradeoffVars vars;
    vars.f_rf = ComplexMatrix::Zero(4, 2);
    const auto blocks = milac::sc_blocks(4, 2);
    for (int m = 0; m < 2; ++m) {
      for (int i = 0; i < blocks[m].second; ++i) {
        vars.f_rf(blocks[m].first + i, m) =
            std::polar(1.0, 0.3 * (m + 1) * (i + 1));
      }
    }
    vars.x_mat = milac::test::random_complex(2, 2, rng);
    const auto direct = milac::evaluate_hybrid(
        cs, arch, pm, bw, milac::HybridFactors{vars.f_rf, vars.x_mat});
    const auto via = milac::evaluate_tradeoff(cs, arch, pm, bw, vars);
    CHECK(via.sum_se == doctest::Approx(direct.sum_se).epsilon(1e-12));
    CHECK(via.ee == doctest::Approx(direct.ee).epsilon(1e-12));
  }
}

TEST_CASE("frontier sweep is monotone, sorted, and non-dominated") {
  const PowerModel pm = PowerModel::defaults();
  const ArchitectureSpec arch = ArchitectureSpec::make(Architecture::milac, 4, 2);
  SolverOptions opts = milac::options_from(pm, 1.0, 1e3);
  const ChannelSet cs = random_channel(2, 4, 3100, 0.05);
  const std::vector<double> weights = {0.0, 0.25, 0.5, 0.75, 1.0};
  const auto frontier = milac::trace_frontier(cs, arch, pm, opts, weights, 3);

  CHECK(frontier.warnings.empty());
  REQUIRE(frontier.points.size() == weights.size());
  for (std::size_t i = 0; i < frontier.points.size(); ++i) {
    CHECK(frontier.points[i].eta == doctest::Approx(weights[i]).epsilon(1e-15));
    if (i > 0) CHECK(frontier.points[i].eta >= frontier.points[i - 1].eta);
  }
  for (const auto& tr : frontier.traces) {
    for (std::size_t i = 1; i < tr.objective.size(); ++i) {
      CHECK(tr.objective[i] >=
            tr.objective[i - 1] -
                1e-9 * std::max(1.0, std::abs(tr.objective[i - 1])));
    }
  }
  for (const auto& a : frontier.points) {
    for (const auto& b : frontier.points) {
      const bool dominated =
          b.se - a.se > 1e-6 * std::max(1.0, std::abs(a.se)) &&
          b.ee - a.ee > 1e-6 * std::max(1.0, std::abs(a.ee));
      CHECK_FALSE(dominated);
    }
  }

  // Endpoints are no worse than the dedicated solvers.
  const auto rep_ee = milac::maximize_ee(cs, arch, pm, opts);
  const auto rep_se = milac::maximize_se(cs, arch, pm, opts);
  CHECK(frontier.points.front().ee >= rep_ee.ee * (1.0 - 1e-6) - 1e-12);
  CHECK(frontier.points.back().se >= rep_se.se * (1.0 - 1e-6) - 1e-12);
  // Sweep endpoints order the tradeoff: rate grows with eta, efficiency falls.
  CHECK(frontier.points.back().se >= frontier.points.front().se - 1e-9);
  CHECK(frontier.points.front().ee >= frontier.points.back().ee - 1e-9);
}

TEST_CASE("frontier covers the baseline architectures") {
  const PowerModel pm = PowerModel::defaults();
  const std::vector<double> weights = {0.0, 0.5, 1.0};
  const ChannelSet cs = random_channel(2, 4, 3300, 0.05);

  {
    const ArchitectureSpec arch =
        ArchitectureSpec::make(Architecture::digital, 4, 2);
    SolverOptions opts = milac::options_from(pm, 1.0, 1e3);
    const auto frontier = milac::trace_frontier(cs, arch, pm, opts, weights, 2);
    CHECK(frontier.warnings.empty());
    REQUIRE(frontier.points.size() == weights.size());
    const auto rep_ee = milac::digital_ee(cs, arch, pm, opts);
    CHECK(frontier.points.front().ee >= rep_ee.ee * (1.0 - 1e-6) - 1e-12);
    for (const auto& tr : frontier.traces) {
      for (std::size_t i = 1; i < tr.objective.size(); ++i) {
        CHECK(tr.objective[i] >=
              tr.objective[i - 1] -
                  1e-9 * std::max(1.0, std::abs(tr.objective[i - 1])));
      }
    }
  }
  {
    const ArchitectureSpec arch =
        ArchitectureSpec::make(Architecture::hybrid_sc, 4, 2, 2);
    SolverOptions opts = milac::options_from(pm, 1.0, 1e3);
    const auto frontier = milac::trace_frontier(cs, arch, pm, opts, weights, 2);
    CHECK(frontier.warnings.empty());
    REQUIRE(frontier.points.size() == weights.size());
    const auto rep_ee = milac::hybrid_ee(cs, arch, pm, opts);
    CHECK(frontier.points.front().ee >= rep_ee.ee * (1.0 - 1e-6) - 1e-12);
    for (const auto& tr : frontier.traces) {
      for (std::size_t i = 1; i < tr.objective.size(); ++i) {
        CHECK(tr.objective[i] >=
              tr.objective[i - 1] -
                  1e-9 * std::max(1.0, std::abs(tr.objective[i - 1])));
      }
    }
    for (const auto& a : frontier.points) {
      for (const auto& b : frontier.points) {
        const bool dominated =
            b.se - a.se > 1e-6 * std::max(1.0, std::abs(a.se)) &&
            b.ee - a.ee > 1e-6 * std::max(1.0, std::abs(a.ee));
        CHECK_FALSE(dominated);
      }
    }
  }
}

TEST_CASE("frontier validates its weight grid") {
  const PowerModel pm = PowerModel::defaults();
  const ArchitectureSpec arch = ArchitectureSpec::make(Architecture::milac, 3, 2);
  const SolverOptions opts = milac::options_from(pm, 1.0, 1e3);
  const ChannelSet cs = random_channel(2, 3, 3400, 0.1);
  CHECK_THROWS_AS(milac::trace_frontier(cs, arch, pm, opts, {}, 1),
                  milac::ContractViolation);
  CHECK_THROWS_AS(
      milac::trace_frontier(cs, arch, pm, opts, {0.0, 0.5}, 1),
      milac::ContractViolation);
  CHECK_THROWS_AS(
      milac::trace_frontier(cs, arch, pm, opts, {0.5, 1.0}, 1),
      milac::ContractViolation);
  CHECK_THROWS_AS(
      milac::trace_frontier(cs, arch, pm, opts, {0.0, 0.7, 0.3, 1.0}, 1),
      milac::ContractViolation);
  CHECK_THROWS_AS(
      milac::trace_frontier(cs, arch, pm, opts, {0.0, 1.5}, 1),
      milac::ContractViolation);
}
