#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace natcap {

using Rng = std::mt19937_64;

//! Derives an independent substream seed from a user seed.
std::uint64_t
mix_seed(std::uint64_t seed, std::uint64_t stream);

//! Uniform double in [0, 1) from the top 53 bits.
inline double
uniform01(Rng& rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

//! Index drawn proportionally to non-negative `weights` (sum > 0).
std::size_t
draw_categorical(Rng& rng, std::span<const double> weights);

std::vector<double>
draw_dirichlet(Rng& rng, std::span<const double> concentration);

} // namespace natcap
