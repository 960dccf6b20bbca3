// SPDX-License-Identifier: Apache-2.0
#include "milac/channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace milac {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on raw engine bits: std::normal_distribution is
// implementation-defined, which would break cross-platform determinism of
// seeded channels.
double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Complex circular_gaussian(std::mt19937_64& rng) {
  const double re = standard_normal(rng);
  const double im = standard_normal(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

bool full_row_rank(const ComplexMatrix& h) {
  RealVector s = svd(h).singular_values;
  return s(s.size() - 1) > 1e-8 * s(0);
}

ComplexMatrix draw_rayleigh(int users, int antennas, std::uint64_t seed,
                            double scale) {
  std::mt19937_64 rng(seed);
  ComplexMatrix h(users, antennas);
  for (int k = 0; k < users; ++k) {
    for (int n = 0; n < antennas; ++n) {
      h(k, n) = scale * circular_gaussian(rng);
    }
  }
  return h;
}

ComplexMatrix draw_geometric(int users, int antennas, int paths,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ComplexMatrix h = ComplexMatrix::Zero(users, antennas);
  const double gain_scale = 1.0 / std::sqrt(static_cast<double>(paths));
  for (int k = 0; k < users; ++k) {
    for (int p = 0; p < paths; ++p) {
      const Complex gain = gain_scale * circular_gaussian(rng);
      const double theta = kPi * (uniform01(rng) - 0.5);  // departure angle
      const double spatial = kPi * std::sin(theta);       // half-wavelength ULA
      for (int n = 0; n < antennas; ++n) {
        h(k, n) += gain * std::exp(Complex(0.0, -spatial * n));
      }
    }
  }
  return h;
}

template <typename Draw>
ChannelSet generate_with_rank_guard(int users, int antennas,
                                    std::uint64_t seed, double noise_variance,
                                    Draw draw) {
  if (users < 1 || antennas < 1 || users > antennas) {
    throw ContractViolation("channel: require 1 <= K <= N");
  }
  for (int attempt = 0; attempt <= 8; ++attempt) {
    ComplexMatrix h = draw(seed + attempt);
    if (h.norm() > 0.0 && full_row_rank(h)) {
      return make_channel_set(std::move(h), noise_variance);
    }
  }
  throw ContractViolation("channel: rank-deficient after 8 seed retries");
}

}  // namespace

ChannelSet make_channel_set(ComplexMatrix h, double noise_variance) {
  if (h.rows() < 1 || h.cols() < 1 || h.rows() > h.cols()) {
    throw ContractViolation("make_channel_set: require 1 <= K <= N");
  }
  if (!h.allFinite()) {
    throw ContractViolation("make_channel_set: non-finite entries");
  }
  if (noise_variance < 0.0) {
    throw ContractViolation("make_channel_set: negative noise variance");
  }
  if (h.norm() == 0.0 || !full_row_rank(h)) {
    throw ContractViolation("make_channel_set: rank-deficient channel");
  }
  ChannelSet cs;
  cs.h = std::move(h);
  cs.gram = cs.h * cs.h.adjoint();
  cs.gram_sqrt = hermitian_sqrt(cs.gram);
  cs.gram_inv_sqrt = hermitian_inv_sqrt(cs.gram);
  cs.noise_variance = noise_variance;
  return cs;
}

ChannelSet generate_rayleigh(int users, int antennas, std::uint64_t seed,
                             double scale, double noise_variance) {
  return generate_with_rank_guard(
      users, antennas, seed, noise_variance, [&](std::uint64_t s) {
        return draw_rayleigh(users, antennas, s, scale);
      });
}

ChannelSet generate_geometric(int users, int antennas, int paths,
                              std::uint64_t seed, double noise_variance) {
  if (paths < 1) throw ContractViolation("generate_geometric: paths >= 1");
  return generate_with_rank_guard(
      users, antennas, seed, noise_variance, [&](std::uint64_t s) {
        return draw_geometric(users, antennas, paths, s);
      });
}

ChannelSet load_channel(const std::string& path, double noise_variance) {
  std::ifstream in(path);
  if (!in) throw ParseError("load_channel: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("load_channel: " + path + ":1: missing header");
  }
  int rows = 0, cols = 0;
  if (std::sscanf(line.c_str(), "# complex_matrix rows=%d cols=%d", &rows,
                  &cols) != 2 ||
      rows < 1 || cols < 1) {
    throw ParseError("load_channel: " + path + ":1: malformed header");
  }
  ComplexMatrix h(rows, cols);
  for (int k = 0; k < rows; ++k) {
    const int lineno = k + 2;
    if (!std::getline(in, line)) {
      throw ParseError("load_channel: " + path + ":" + std::to_string(lineno) +
                       ": missing data row");
    }
    std::stringstream ss(line);
    std::string tok;
    for (int j = 0; j < 2 * cols; ++j) {
      if (!std::getline(ss, tok, ',')) {
        throw ParseError("load_channel: " + path + ":" +
                         std::to_string(lineno) + ": too few values");
      }
      double v = 0.0;
      try {
        size_t used = 0;
        v = std::stod(tok, &used);
        // Allow trailing whitespace only.
        for (; used < tok.size(); ++used) {
          if (!std::isspace(static_cast<unsigned char>(tok[used]))) {
            throw std::invalid_argument(tok);
          }
        }
      } catch (const std::exception&) {
        throw ParseError("load_channel: " + path + ":" +
                         std::to_string(lineno) + ": bad float '" + tok + "'");
      }
      if (!std::isfinite(v)) {
        throw ParseError("load_channel: " + path + ":" +
                         std::to_string(lineno) + ": non-finite value");
      }
      if (j % 2 == 0) {
        h(k, j / 2).real(v);
      } else {
        h(k, j / 2).imag(v);
      }
    }
    if (std::getline(ss, tok, ',')) {
      throw ParseError("load_channel: " + path + ":" + std::to_string(lineno) +
                       ": too many values");
    }
  }
  std::string extra;
  if (std::getline(in, extra) && !extra.empty()) {
    throw ParseError("load_channel: " + path + ":" +
                     std::to_string(rows + 2) + ": unexpected extra row");
  }
  return make_channel_set(std::move(h), noise_variance);
}

void save_channel(const std::string& path, const ComplexMatrix& h) {
  std::ofstream out(path);
  if (!out) throw ParseError("save_channel: cannot open " + path);
  out << "# complex_matrix rows=" << h.rows() << " cols=" << h.cols() << "\n";
  char buf[64];
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    for (Eigen::Index n = 0; n < h.cols(); ++n) {
      std::snprintf(buf, sizeof(buf), "%.17g", h(k, n).real());
      out << (n == 0 ? "" : ",") << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", h(k, n).imag());
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) throw ParseError("save_channel: write failed for " + path);
}

double noise_variance_from(double noise_figure_db, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw ContractViolation("noise_variance_from: bandwidth must be positive");
  }
  const double dbm = -174.0 + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

}  // namespace milac
