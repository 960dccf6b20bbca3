// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "milac/channel.hpp"

using namespace milac;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/milac_test_") + stem + ".txt";
}

}  // namespace

TEST_CASE("rayleigh generation is deterministic") {
  ChannelSet a = generate_rayleigh(2, 4, 7, 1.0);
  ChannelSet b = generate_rayleigh(2, 4, 7, 1.0);
  CHECK(a.h == b.h);
}

TEST_CASE("rayleigh per-entry variance near scale^2") {
  ChannelSet cs = generate_rayleigh(4, 64, 1, 1.0);
  const double mean_sq = cs.h.squaredNorm() / (4.0 * 64.0);
  CHECK(mean_sq > 0.9);
  CHECK(mean_sq < 1.1);
}

TEST_CASE("degenerate zero-scale draw is rejected by the rank guard") {
  CHECK_THROWS_AS(generate_rayleigh(1, 1, 0, 0.0), ContractViolation);
  CHECK_THROWS_AS(generate_rayleigh(2, 1, 0, 1.0), ContractViolation);
}

TEST_CASE("gram factorizations satisfy their residual bounds") {
  ChannelSet cs = generate_rayleigh(3, 12, 21, 1.0);
  CHECK((cs.gram - cs.h * cs.h.adjoint()).norm() <= 1e-12 * cs.gram.norm());
  CHECK((cs.gram_sqrt * cs.gram_sqrt - cs.gram).norm() <=
        1e-9 * cs.gram.norm());
  CHECK((cs.gram_inv_sqrt * cs.gram_sqrt - ComplexMatrix::Identity(3, 3))
            .norm() <= 1e-8);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(cs.gram);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("geometric channel with one path has constant-modulus rows") {
  ChannelSet cs = generate_geometric(1, 6, 1, 3);
  const double ref = std::abs(cs.h(0, 0));
  for (int n = 1; n < 6; ++n) {
    CHECK(std::abs(cs.h(0, n)) == doctest::Approx(ref).epsilon(1e-12));
  }
  ChannelSet again = generate_geometric(1, 6, 1, 3);
  CHECK(cs.h == again.h);
}

TEST_CASE("geometric multi-path channel has a PD gram") {
  ChannelSet cs = generate_geometric(2, 8, 3, 5);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(cs.gram);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("save then load reproduces the channel exactly") {
  ChannelSet cs = generate_rayleigh(3, 5, 99, 1.0);
  const std::string path = temp_path("roundtrip");
  save_channel(path, cs.h);
  ChannelSet back = load_channel(path);
  CHECK(back.h == cs.h);
  std::remove(path.c_str());
}

TEST_CASE("hand-written single-row file") {
  const std::string path = temp_path("handwritten");
  {
    std::ofstream out(path);
    out << "# complex_matrix rows=1 cols=2\n1,0,0,1\n";
  }
  ChannelSet cs = load_channel(path);
  CHECK(cs.h(0, 0) == Complex(1.0, 0.0));
  CHECK(cs.h(0, 1) == Complex(0.0, 1.0));
  CHECK(std::abs(cs.gram(0, 0) - Complex(2.0, 0.0)) < 1e-15);
  std::remove(path.c_str());
}

TEST_CASE("malformed files raise parse errors naming the line") {
  const std::string path = temp_path("malformed");
  {
    std::ofstream out(path);
    out << "# complex_matrix rows=2 cols=2\n1,0,0,1\n0,1,1,0\n1,1,1,1\n";
  }
  CHECK_THROWS_AS(load_channel(path), ParseError);
  {
    std::ofstream out(path);
    out << "# wrong header\n";
  }
  CHECK_THROWS_AS(load_channel(path), ParseError);
  {
    std::ofstream out(path);
    out << "# complex_matrix rows=1 cols=2\n1,0,0\n";
  }
  CHECK_THROWS_AS(load_channel(path), ParseError);
  {
    std::ofstream out(path);
    out << "# complex_matrix rows=1 cols=2\n1,0,0,banana\n";
  }
  try {
    load_channel(path);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  std::remove(path.c_str());
}

TEST_CASE("noise variance from noise figure and bandwidth") {
  CHECK(noise_variance_from(5.0, 1e8) ==
        doctest::Approx(1.258925411794e-12).epsilon(1e-9));
  CHECK(noise_variance_from(0.0, 1.0) ==
        doctest::Approx(std::pow(10.0, -174.0 / 10.0) * 1e-3).epsilon(1e-12));
  CHECK(noise_variance_from(5.0, 1e6) ==
        doctest::Approx(std::pow(10.0, (-109.0 - 30.0) / 10.0)).epsilon(1e-9));
}
