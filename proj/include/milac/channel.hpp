// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "milac/numkit.hpp"

namespace milac {

// K x N downlink channel with cached Gram factorizations. Immutable after
// construction; shareable across threads.
struct ChannelSet {
  ComplexMatrix h;              // K x N
  ComplexMatrix gram;           // H H^H, Hermitian PD
  ComplexMatrix gram_sqrt;      // PSD square root of gram
  ComplexMatrix gram_inv_sqrt;  // floored inverse square root
  double noise_variance = 0.0;  // receiver noise power sigma^2, Watts

  int users() const { return static_cast<int>(h.rows()); }
  int antennas() const { return static_cast<int>(h.cols()); }
};

// Builds the cached factorizations. Throws ContractViolation when H is
// rank-deficient (smallest singular value <= 1e-8 * largest) or K > N.
ChannelSet make_channel_set(ComplexMatrix h, double noise_variance);

// i.i.d. CN(0, scale^2) entries; deterministic for a fixed seed. If the
// draw is rank-deficient the seed is bumped by one, up to 8 retries.
ChannelSet generate_rayleigh(int users, int antennas, std::uint64_t seed,
                             double scale, double noise_variance = 0.0);

// Sum of `paths` planar wavefronts per user: CN(0, 1/paths) gains on
// half-wavelength uniform-linear-array steering vectors with uniform
// angles of departure. Same determinism and rank-retry rules as above.
ChannelSet generate_geometric(int users, int antennas, int paths,
                              std::uint64_t seed, double noise_variance = 0.0);

// Text format: line 1 "# complex_matrix rows=<K> cols=<N>", then K lines of
// 2N comma-separated floats "re,im,re,im,...". Reader errors carry the line
// number; writer emits 17 significant digits so round trips are exact.
ChannelSet load_channel(const std::string& path, double noise_variance = 0.0);
void save_channel(const std::string& path, const ComplexMatrix& h);

// Thermal noise power over `bandwidth_hz` with the given receiver noise
// figure: 10^((-174 + 10 log10(bw) + nf)/10) mW, returned in Watts.
double noise_variance_from(double noise_figure_db, double bandwidth_hz);

}  // namespace milac
