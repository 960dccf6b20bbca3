// SPDX-License-Identifier: Apache-2.0
#include "milac/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "milac/baselines.hpp"
#include "milac/channel.hpp"
#include "milac/errors.hpp"
#include "milac/hardware.hpp"
#include "milac/metrics.hpp"
#include "milac/milac_ee.hpp"
#include "milac/numkit.hpp"
#include "milac/tradeoff.hpp"

namespace milac {
namespace {

// Counts every check and keeps the first failure's description.
struct Checker {
  int checks = 0;
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    ++checks;
    if (!ok && passed) {
      passed = false;
      detail = what;
    }
  }
  void require_close(double got, double want, double tol,
                     const std::string& what) {
    require(std::abs(got - want) <= tol,
            what + ": got " + std::to_string(got) + ", want " +
                std::to_string(want) + " +/- " + std::to_string(tol));
  }
};

double nrand(std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

ComplexMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  ComplexMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      m(i, j) = Complex(nrand(rng), nrand(rng)) / std::sqrt(2.0);
    }
  }
  return m;
}

ComplexMatrix random_psd(int n, std::mt19937_64& rng) {
  const ComplexMatrix a = random_complex(n, n, rng);
  return a.adjoint() * a + 0.1 * ComplexMatrix::Identity(n, n);
}

RealVector random_positive(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.2, 1.2);
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

SolveReport solve_arch(const ChannelSet& cs, const ArchitectureSpec& spec,
                       const PowerModel& pm, const SolverOptions& opts) {
  switch (spec.kind) {
    case Architecture::milac:
      return maximize_ee(cs, spec, pm, opts);
    case Architecture::digital:
      return digital_ee(cs, spec, pm, opts);
    default:
      return hybrid_ee(cs, spec, pm, opts);
  }
}

// Shared battery: 6 antennas, 2 users, 2 RF chains, unit budget, narrow
// band so the solves stay cheap.
SolverOptions battery_options(const PowerModel& pm) {
  SolverOptions opts = options_from(pm, 1.0, 1e3);
  opts.max_outer = 30;
  opts.max_inner = 150;
  opts.max_pgd = 300;
  return opts;
}

const Architecture kBatteryArchs[] = {
    Architecture::digital, Architecture::milac, Architecture::hybrid_fc,
    Architecture::hybrid_sc};

void suite_static_breakdown(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  const StaticPowerBreakdown dig =
      static_power(ArchitectureSpec::make(Architecture::digital, 64, 4), pm);
  const StaticPowerBreakdown mil =
      static_power(ArchitectureSpec::make(Architecture::milac, 64, 4), pm);
  const StaticPowerBreakdown hfc = static_power(
      ArchitectureSpec::make(Architecture::hybrid_fc, 64, 4, 4), pm);
  const StaticPowerBreakdown hsc = static_power(
      ArchitectureSpec::make(Architecture::hybrid_sc, 64, 4, 4), pm);
  double dig_rf = dig.rf_dac;
  if (fault) dig_rf += 0.01;
  c.require_close(dig_rf, 2.514, 1e-3, "digital rf+dac");
  c.require_close(hfc.rf_dac, 0.157, 1e-3, "hybrid-fc rf+dac");
  c.require_close(hsc.rf_dac, 0.157, 1e-3, "hybrid-sc rf+dac");
  c.require_close(hfc.phase_shifters, 5.530, 1e-3, "hybrid-fc phase shifters");
  c.require_close(mil.milac_static, 0.021, 1e-3, "milac admittance bank");
  c.require_close(dig.common, 0.022, 1e-3, "digital common");
  c.require_close(mil.common, 0.022, 1e-3, "milac common");
  c.require_close(hfc.common, 0.022, 1e-3, "hybrid-fc common");
  c.require(dig.phase_shifters == 0.0 && dig.milac_static == 0.0,
            "digital has no phase shifters or admittance bank");
  c.require(mil.phase_shifters == 0.0, "milac has no phase shifters");
  c.require(hfc.milac_static == 0.0 && hsc.milac_static == 0.0,
            "hybrid has no admittance bank");
}

void suite_sc_phase_shifters(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  const StaticPowerBreakdown hsc = static_power(
      ArchitectureSpec::make(Architecture::hybrid_sc, 64, 4, 4), pm);
  double got = hsc.phase_shifters;
  if (fault) got += 0.1;
  c.require_close(got, 1.382, 1e-2, "sub-connected phase shifters");
}

void suite_ratio_trace(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  const SolverOptions opts = battery_options(pm);
  for (int i = 0; i < 50; ++i) {
    const ChannelSet cs = generate_rayleigh(2, 6, 9000 + i, 1.0, 0.05);
    for (Architecture kind : kBatteryArchs) {
      const ArchitectureSpec spec = ArchitectureSpec::make(kind, 6, 2, 2);
      const SolveReport rep = solve_arch(cs, spec, pm, opts);
      std::vector<double> trace = rep.lambda_trace;
      c.require(!trace.empty(), std::string("empty ratio trace, seed ") +
                                    std::to_string(9000 + i));
      if (fault && !trace.empty()) trace.push_back(trace.back() - 1.0);
      for (std::size_t j = 1; j < trace.size(); ++j) {
        const double slack = 1e-9 * std::max(1.0, std::abs(trace[j - 1]));
        c.require(trace[j] >= trace[j - 1] - slack,
                  "ratio trace decreased, seed " + std::to_string(9000 + i) +
                      " arch " + std::to_string(static_cast<int>(kind)) +
                      " step " + std::to_string(j));
      }
    }
  }
}

void suite_inner_objective(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  SolverOptions opts = battery_options(pm);
  opts.max_outer = 1;  // one ratio value, so the whole trace shares it
  for (int i = 0; i < 50; ++i) {
    const ChannelSet cs = generate_rayleigh(2, 6, 9000 + i, 1.0, 0.05);
    for (Architecture kind : kBatteryArchs) {
      const ArchitectureSpec spec = ArchitectureSpec::make(kind, 6, 2, 2);
      const SolveReport rep = solve_arch(cs, spec, pm, opts);
      std::vector<double> trace = rep.inner_objective_trace;
      c.require(!trace.empty(), std::string("empty inner trace, seed ") +
                                    std::to_string(9000 + i));
      if (fault && !trace.empty()) trace.push_back(trace.back() + 1.0);
      for (std::size_t j = 1; j < trace.size(); ++j) {
        const double slack = 1e-9 * std::max(1.0, std::abs(trace[j - 1]));
        c.require(trace[j] <= trace[j - 1] + slack,
                  "inner objective increased, seed " +
                      std::to_string(9000 + i) + " arch " +
                      std::to_string(static_cast<int>(kind)) + " step " +
                      std::to_string(j));
      }
    }
  }
}

void suite_transmit_gradient(Checker& c, bool fault) {
  std::mt19937_64 rng(501);
  const int k = 3;
  for (int inst = 0; inst < 20; ++inst) {
    const ComplexMatrix q = random_psd(k, rng);
    const ComplexMatrix l = random_complex(k, k, rng);
    const RealVector p = random_positive(k, rng);
    const ComplexMatrix y = random_complex(k, k, rng);
    const ComplexVector pc = p.cast<Complex>();
    const ComplexVector spc = p.array().sqrt().cast<Complex>();
    const auto f = [&](const ComplexMatrix& ym) {
      const Complex quad = (ym.adjoint() * q * ym * pc.asDiagonal()).trace();
      const Complex lin = (l * ym * spc.asDiagonal()).trace();
      return quad.real() - 2.0 * lin.real();
    };
    ComplexMatrix g =
        2.0 * (q * y * pc.asDiagonal() - l.adjoint() * spc.asDiagonal());
    if (fault) g(0, 0) += 1e-3;
    const double h = 1e-5;
    ComplexMatrix gfd(k, k);
    for (int r = 0; r < k; ++r) {
      for (int s = 0; s < k; ++s) {
        ComplexMatrix e = ComplexMatrix::Zero(k, k);
        e(r, s) = 1.0;
        const double dre = (f(y + h * e) - f(y - h * e)) / (2.0 * h);
        const ComplexMatrix ie = Complex(0.0, 1.0) * e;
        const double dim = (f(y + h * ie) - f(y - h * ie)) / (2.0 * h);
        gfd(r, s) = Complex(dre, dim);
      }
    }
    const double err = (gfd - g).norm();
    c.require(err <= 1e-5 * (1.0 + g.norm()),
              "transmit gradient mismatch, instance " + std::to_string(inst) +
                  ": error " + std::to_string(err));
  }
}

void suite_row_space_reduction(Checker& c, bool fault) {
  std::mt19937_64 rng(601);
  const PowerModel pm = PowerModel::defaults();
  const double bw = 1e3;
  const ArchitectureSpec spec =
      ArchitectureSpec::make(Architecture::milac, 6, 3);
  for (int i = 0; i < 100; ++i) {
    const ChannelSet cs = generate_rayleigh(3, 6, 7000 + i, 1.0, 0.05);
    ReducedPoint rp;
    rp.y = project_spectral_ball(random_complex(3, 3, rng), 1.0);
    rp.p = random_positive(3, rng);
    const RatePowerReport red = evaluate(cs, spec, pm, bw, rp);
    const Beamformer w = expand(cs, rp);
    const RatePowerReport full = evaluate(cs, spec, pm, bw, w);
    double se_red = red.sum_se;
    if (fault) se_red += 1e-3;
    c.require(std::abs(se_red - full.sum_se) <=
                  1e-9 * std::max(1.0, std::abs(full.sum_se)),
              "reduced se != expanded se, seed " + std::to_string(7000 + i));
    c.require(std::abs(red.p_tx - full.p_tx) <=
                  1e-9 * std::max(1.0, full.p_tx),
              "reduced p_tx != expanded p_tx, seed " +
                  std::to_string(7000 + i));
  }
}

void suite_row_space_projection(Checker& c, bool fault) {
  std::mt19937_64 rng(701);
  const AqnmParams aqnm = aqnm_params(4);
  for (int i = 0; i < 100; ++i) {
    const ChannelSet cs = generate_rayleigh(3, 6, 7100 + i, 1.0, 0.05);
    const ComplexMatrix w = random_complex(6, 3, rng);
    ComplexMatrix wp = orthogonal_projector(cs.h) * w;
    if (fault) wp(0, 0) += 1e-3;
    const double scale = std::max(1.0, (cs.h * w).norm());
    c.require((cs.h * wp - cs.h * w).norm() <= 1e-10 * scale,
              "projection changed the coupling, seed " +
                  std::to_string(7100 + i));
    c.require(wp.norm() <= w.norm() * (1.0 + 1e-12),
              "projection grew the norm, seed " + std::to_string(7100 + i));
    const RealVector s1 = sinr_milac(cs.h * w, aqnm, cs.noise_variance);
    const RealVector s2 = sinr_milac(cs.h * wp, aqnm, cs.noise_variance);
    c.require((s1 - s2).cwiseAbs().maxCoeff() <=
                  1e-10 * std::max(1.0, s1.cwiseAbs().maxCoeff()),
              "projection moved a sinr, seed " + std::to_string(7100 + i));
  }
}

void suite_scattering(Checker& c, bool fault) {
  std::mt19937_64 rng(801);
  const int users = 3;
  const int ports = 5 + users;
  for (int i = 0; i < 100; ++i) {
    Eigen::MatrixXd b(ports, ports);
    for (int col = 0; col < ports; ++col) {
      for (int row = 0; row < ports; ++row) b(row, col) = nrand(rng);
    }
    b = 0.5 * (b + b.transpose()).eval();
    const ComplexMatrix y_c = Complex(0.0, 1.0) * b.cast<Complex>();
    const ScatteringFactors sf = scattering_matrix(y_c, 50.0, users);
    ComplexMatrix theta = sf.theta;
    if (fault) theta(0, 0) += 1e-3;
    const ComplexMatrix eye = ComplexMatrix::Identity(ports, ports);
    c.require((theta.adjoint() * theta - eye).cwiseAbs().maxCoeff() <= 1e-9,
              "scattering matrix not unitary, instance " + std::to_string(i));
    c.require((theta - theta.transpose()).cwiseAbs().maxCoeff() <= 1e-9,
              "scattering matrix not symmetric, instance " +
                  std::to_string(i));
    c.require(spectral_norm(sf.f) <= 1.0 + 1e-9,
              "stream block exceeds the passivity bound, instance " +
                  std::to_string(i));
  }
}

void suite_quantizer(Checker& c, bool fault) {
  for (int b = 1; b <= 24; ++b) {
    const AqnmParams q = aqnm_params(b);
    double sum = q.alpha + q.beta;
    if (fault) sum += 1e-9;
    c.require(sum == 1.0, "alpha+beta != 1 at b=" + std::to_string(b));
    const double lhs = q.alpha * q.alpha + q.alpha * q.beta;
    c.require(std::abs(lhs - q.alpha) <= 1e-15 * std::max(1.0, q.alpha),
              "alpha^2+alpha*beta != alpha at b=" + std::to_string(b));
    c.require(q.alpha > 0.0 && q.beta >= 0.0,
              "gain/distortion signs at b=" + std::to_string(b));
    if (b >= 2) {
      c.require(q.beta < aqnm_params(b - 1).beta,
                "distortion not decreasing at b=" + std::to_string(b));
    }
  }
  const AqnmParams q1 = aqnm_params(1);
  c.require(std::abs(q1.beta - (1.0 - 2.0 / M_PI)) <= 1e-6,
            "one-bit distortion mismatch");
}

void suite_grid_oracles(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  const double bw = 1e3;
  const double sigma2 = 0.05;
  const double p_max = 1.0;
  const ArchitectureSpec spec =
      ArchitectureSpec::make(Architecture::milac, 2, 1);
  const SolverOptions opts = options_from(pm, p_max, bw);
  const AqnmParams aqnm = opts.aqnm;

  {  // full solver vs a refined 200x200 (direction, power) grid
    const ChannelSet cs = generate_rayleigh(1, 2, 4321, 1.0, sigma2);
    const SolveReport rep = maximize_ee(cs, spec, pm, opts);
    const Complex h1 = cs.h(0, 0);
    const Complex h2 = cs.h(0, 1);
    const Complex e1 = std::abs(h1) == 0.0 ? 1.0 : std::conj(h1) / std::abs(h1);
    const Complex e2 = std::abs(h2) == 0.0 ? 1.0 : std::conj(h2) / std::abs(h2);
    const auto ee_of = [&](double t, double pw) {
      ComplexMatrix w(2, 1);
      w(0, 0) = std::sqrt(std::max(0.0, 1.0 - t)) * e1 * std::sqrt(pw);
      w(1, 0) = std::sqrt(std::max(0.0, t)) * e2 * std::sqrt(pw);
      return evaluate(cs, spec, pm, bw, Beamformer{w}).ee;
    };
    const int g = 200;
    const double pw_cap = p_max / aqnm.alpha;
    double t_lo = 0.0, t_hi = 1.0, p_lo = 0.0, p_hi = pw_cap;
    double best = 0.0, best_t = 0.0, best_p = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < g; ++i) {
        const double t = t_lo + (t_hi - t_lo) * i / (g - 1);
        for (int j = 0; j < g; ++j) {
          const double pw = p_lo + (p_hi - p_lo) * j / (g - 1);
          const double ee = ee_of(t, pw);
          if (ee > best) {
            best = ee;
            best_t = t;
            best_p = pw;
          }
        }
      }
      const double dt = (t_hi - t_lo) / (g - 1);
      const double dp = (p_hi - p_lo) / (g - 1);
      t_lo = std::max(0.0, best_t - dt);
      t_hi = std::min(1.0, best_t + dt);
      p_lo = std::max(0.0, best_p - dp);
      p_hi = std::min(pw_cap, best_p + dp);
    }
    double got = rep.ee;
    if (fault) got *= 1.006;
    c.require(best > 0.0, "grid oracle found no positive efficiency");
    c.require(std::abs(got - best) <= 0.005 * best,
              "solver efficiency " + std::to_string(got) +
                  " vs grid oracle " + std::to_string(best));
  }

  {  // single-stream subproblem vs a dense 1-D magnitude grid
    const ChannelSet cs = generate_rayleigh(1, 2, 4242, 1.0, sigma2);
    const double gram = cs.gram(0, 0).real();
    TradeoffVars start;
    start.x_mat = ComplexMatrix::Constant(
        1, 1, 0.4 * std::sqrt(p_max / (aqnm.alpha * gram)));
    const ComplexMatrix c_mat = cs.gram * start.x_mat;
    ComplexVector u;
    RealVector omega;
    update_receivers_weights(c_mat, aqnm, sigma2, &u, &omega);
    const RateSurrogate cut = rate_minorizer(start.x_mat, u, omega, cs, aqnm);
    const RatePowerReport inc = evaluate_tradeoff(cs, spec, pm, bw, start);
    const FractionalCut fc{std::sqrt(std::max(0.0, inc.sum_se)), inc.p_tot};
    const TradeoffRefs refs{3.0, 200.0};
    const double eta = 0.4;
    SolverOptions sub_opts = opts;
    sub_opts.max_pgd = 20000;
    const TradeoffVars out = solve_sca_subproblem(
        cut, fc, cs, spec, pm, sub_opts, eta, refs, p_max, start);

    const double qz = cut.q(0, 0).real() / gram;  // z = sqrt(gram) x
    const double lz = std::abs(cut.l(0, 0)) / std::sqrt(gram);
    const double p_static = static_power(spec, pm).total();
    const double rho = std::sqrt(p_max / aqnm.alpha);
    const int grid = 200001;
    double best = -1e300;
    for (int i = 0; i < grid; ++i) {
      const double t = rho * i / (grid - 1);
      const double rate = cut.c0 + 2.0 * lz * t - qz * t * t;
      const double power =
          p_static + aqnm.alpha * t * t / pm.pa_efficiency;
      const double phi =
          eta * rate / refs.r_ref +
          (1.0 - eta) * bw *
              fractional_minorizer(std::sqrt(std::max(0.0, rate)), power,
                                   fc.x_ref, fc.y_ref) /
              refs.ee_ref;
      best = std::max(best, phi);
    }
    double got = out.objective;
    if (fault) got += 2e-3 * std::max(1.0, std::abs(best));
    c.require(std::abs(got - best) <= 1e-3 * std::max(1.0, std::abs(best)),
              "subproblem objective " + std::to_string(got) +
                  " vs 1-D grid " + std::to_string(best));
  }
}

void suite_tradeoff_sca(Checker& c, bool fault) {
  std::mt19937_64 rng(901);
  const PowerModel pm = PowerModel::defaults();
  const double bw = 1e3;
  const double sigma2 = 0.05;
  const double p_max = 1.0;
  const ArchitectureSpec spec =
      ArchitectureSpec::make(Architecture::milac, 4, 2);
  SolverOptions opts = options_from(pm, p_max, bw);
  opts.max_pgd = 300;
  const AqnmParams aqnm = opts.aqnm;

  // Minorizer tightness at mmse-matched expansion points.
  for (int i = 0; i < 20; ++i) {
    const ChannelSet cs = generate_rayleigh(2, 4, 3200 + i, 1.0, sigma2);
    ComplexMatrix x = random_complex(2, 2, rng);
    const double p_tx = aqnm.alpha * (cs.gram_sqrt * x).squaredNorm();
    x *= std::sqrt(0.25 * p_max / std::max(p_tx, 1e-12));
    const ComplexMatrix c_mat = cs.gram * x;
    ComplexVector u;
    RealVector omega;
    update_receivers_weights(c_mat, aqnm, sigma2, &u, &omega);
    const RateSurrogate cut = rate_minorizer(x, u, omega, cs, aqnm);
    const double rate = sum_se(sinr_milac(c_mat, aqnm, sigma2));
    double got = cut.value(x);
    if (fault) got += 1e-6;
    c.require(std::abs(got - rate) <= 1e-9 * std::max(1.0, std::abs(rate)),
              "minorizer not tight, seed " + std::to_string(3200 + i));
  }

  // Lifted variables active at a subproblem solution.
  {
    const ChannelSet cs = generate_rayleigh(2, 4, 3400, 1.0, sigma2);
    TradeoffVars start;
    start.x_mat = random_complex(2, 2, rng);
    const double p_tx =
        aqnm.alpha * (cs.gram_sqrt * start.x_mat).squaredNorm();
    start.x_mat *= std::sqrt(0.25 * p_max / std::max(p_tx, 1e-12));
    const ComplexMatrix c_mat = cs.gram * start.x_mat;
    ComplexVector u;
    RealVector omega;
    update_receivers_weights(c_mat, aqnm, sigma2, &u, &omega);
    const RateSurrogate cut =
        rate_minorizer(start.x_mat, u, omega, cs, aqnm);
    const RatePowerReport inc = evaluate_tradeoff(cs, spec, pm, bw, start);
    const FractionalCut fc{std::sqrt(std::max(0.0, inc.sum_se)), inc.p_tot};
    const TradeoffRefs refs{std::max(inc.sum_se, 1e-3),
                            std::max(inc.ee, 1e-3)};
    SolverOptions sub_opts = opts;
    sub_opts.max_pgd = 2000;
    const TradeoffVars out = solve_sca_subproblem(
        cut, fc, cs, spec, pm, sub_opts, 0.6, refs, p_max, start);
    double xx = out.x * out.x;
    if (fault) xx += 1e-3;
    c.require(std::abs(xx - std::max(out.r, 0.0)) <=
                  1e-6 * std::max(1.0, std::abs(out.r)),
              "sqrt-rate variable inactive at the solution");
    c.require(std::abs(out.t - bw * out.x * out.x / out.y) <=
                  1e-6 * std::max(1.0, std::abs(out.t)),
              "throughput variable inactive at the solution");
    const RatePowerReport rep = evaluate_tradeoff(cs, spec, pm, bw, out);
    c.require(rep.p_tx <= p_max * (1.0 + 1e-6),
              "subproblem left the power budget");
    c.require(std::abs(out.y - rep.p_tot) <= 1e-6 * std::max(1.0, out.y),
              "power variable inconsistent with the report");
  }

  // Frontier run: per-weight ascent traces and pairwise non-dominance.
  {
    const ChannelSet cs = generate_rayleigh(2, 4, 3300, 1.0, sigma2);
    const FrontierResult fr =
        trace_frontier(cs, spec, pm, opts, {0.0, 0.5, 1.0}, 1);
    c.require(!fr.points.empty(), "frontier produced no points");
    for (const ScaTrace& tr : fr.traces) {
      std::vector<double> obj = tr.objective;
      if (fault && obj.size() >= 2) {
        double span = 1.0;
        for (double v : obj) span = std::max(span, std::abs(v));
        obj[0] += 10.0 * span;
      }
      for (std::size_t j = 1; j < obj.size(); ++j) {
        const double slack = 1e-9 * std::max(1.0, std::abs(obj[j - 1]));
        c.require(obj[j] >= obj[j - 1] - slack,
                  "weighted objective decreased at eta=" +
                      std::to_string(tr.eta) + " step " + std::to_string(j));
      }
    }
    for (std::size_t i = 0; i < fr.points.size(); ++i) {
      for (std::size_t j = 0; j < fr.points.size(); ++j) {
        if (i == j) continue;
        const FrontierPoint& a = fr.points[i];
        const FrontierPoint& b = fr.points[j];
        const bool dominated =
            b.se > a.se + 1e-6 * std::max(1.0, std::abs(a.se)) &&
            b.ee > a.ee + 1e-6 * std::max(1.0, std::abs(a.ee));
        c.require(!dominated,
                  "frontier point at eta=" + std::to_string(a.eta) +
                      " is dominated");
      }
    }
  }
}

void suite_frontier_endpoint(Checker& c, bool fault) {
  const PowerModel pm = PowerModel::defaults();
  const double sigma2 = 0.05;
  const ArchitectureSpec spec =
      ArchitectureSpec::make(Architecture::milac, 4, 2);
  SolverOptions opts = options_from(pm, 1.0, 1e3);
  opts.max_pgd = 300;
  for (int i = 0; i < 20; ++i) {
    const ChannelSet cs = generate_rayleigh(2, 4, 5000 + i, 1.0, sigma2);
    const SolveReport alg = maximize_ee(cs, spec, pm, opts);
    const FrontierResult fr =
        trace_frontier(cs, spec, pm, opts, {0.0, 0.5, 1.0}, 1);
    c.require(!fr.points.empty() && fr.points.front().eta <= 1e-12,
              "efficiency endpoint missing, seed " + std::to_string(5000 + i));
    if (fr.points.empty()) continue;
    double target = alg.ee;
    if (fault) target *= 1.01;
    c.require(fr.points.front().ee >= target - 1e-6 * target,
              "frontier endpoint " + std::to_string(fr.points.front().ee) +
                  " below the efficiency solve " + std::to_string(target) +
                  ", seed " + std::to_string(5000 + i));
  }
}

using SuiteFn = void (*)(Checker&, bool);

struct SuiteEntry {
  const char* name;
  SuiteFn fn;
};

const SuiteEntry kSuites[] = {
    {"static-power-breakdown", suite_static_breakdown},
    {"sc-phase-shifter-cost", suite_sc_phase_shifters},
    {"ratio-trace-monotone", suite_ratio_trace},
    {"inner-objective-monotone", suite_inner_objective},
    {"transmit-update-gradient", suite_transmit_gradient},
    {"row-space-reduction", suite_row_space_reduction},
    {"row-space-projection", suite_row_space_projection},
    {"scattering-factors", suite_scattering},
    {"quantizer-model", suite_quantizer},
    {"grid-oracles", suite_grid_oracles},
    {"tradeoff-sca", suite_tradeoff_sca},
    {"frontier-endpoint", suite_frontier_endpoint},
};

}  // namespace

bool SelftestReport::all_passed() const {
  for (const SuiteResult& s : suites) {
    if (!s.passed) return false;
  }
  return !suites.empty();
}

std::string SelftestReport::summary() const {
  std::ostringstream out;
  int passed = 0;
  double total = 0.0;
  char line[64];
  for (const SuiteResult& s : suites) {
    passed += s.passed ? 1 : 0;
    total += s.seconds;
    std::snprintf(line, sizeof(line), "(%d checks, %.2f s)", s.checks,
                  s.seconds);
    out << (s.passed ? "PASS " : "FAIL ") << s.name << " " << line;
    if (!s.passed) out << ": " << s.detail;
    out << "\n";
  }
  std::snprintf(line, sizeof(line), "%.2f", total);
  out << "selftest: " << passed << "/" << suites.size()
      << " suites passed in " << line << " s\n";
  return out.str();
}

SelftestReport run_selftest(const std::string& inject_fault) {
  if (!inject_fault.empty()) {
    bool known = false;
    for (const SuiteEntry& s : kSuites) {
      if (inject_fault == s.name) known = true;
    }
    if (!known) {
      throw ContractViolation("run_selftest: unknown suite '" + inject_fault +
                              "'");
    }
  }
  SelftestReport report;
  for (const SuiteEntry& s : kSuites) {
    Checker check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      s.fn(check, inject_fault == s.name);
    } catch (const std::exception& e) {
      check.require(false, std::string("exception: ") + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    SuiteResult result;
    result.name = s.name;
    result.passed = check.passed;
    result.detail = check.detail;
    result.checks = check.checks;
    result.seconds = std::chrono::duration<double>(t1 - t0).count();
    report.suites.push_back(std::move(result));
  }
  return report;
}

std::vector<std::string> selftest_suite_names() {
  std::vector<std::string> names;
  for (const SuiteEntry& s : kSuites) names.emplace_back(s.name);
  return names;
}

}  // namespace milac
