// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

#include "milac/numkit.hpp"

namespace milac::test {

// Deterministic uniform double in [0,1) from the top 53 bits of the engine.
inline double urand(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller standard normal; avoids std::normal_distribution whose output
// sequence differs across standard libraries.
inline double nrand(std::mt19937_64& rng) {
  double u1 = urand(rng);
  while (u1 <= 0.0) u1 = urand(rng);
  const double u2 = urand(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

// CN(0,1): unit-variance circularly symmetric complex Gaussian.
inline Complex crand(std::mt19937_64& rng) {
  const double re = nrand(rng);
  const double im = nrand(rng);
  return Complex(re, im) / std::sqrt(2.0);
}

inline ComplexMatrix random_complex(int rows, int cols, std::mt19937_64& rng) {
  ComplexMatrix a(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) a(i, j) = crand(rng);
  return a;
}

inline ComplexMatrix random_psd(int n, std::mt19937_64& rng) {
  ComplexMatrix b = random_complex(n, n + 2, rng);
  return b * b.adjoint();
}

inline RealVector random_positive(int n, std::mt19937_64& rng) {
  RealVector p(n);
  for (int i = 0; i < n; ++i) p[i] = 0.1 + urand(rng);
  return p;
}

}  // namespace milac::test
