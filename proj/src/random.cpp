#include "natcap/random.hpp"
#include "natcap/errors.hpp"

namespace natcap {

std::uint64_t
mix_seed(std::uint64_t seed, std::uint64_t stream)
{
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t
draw_categorical(Rng& rng, std::span<const double> weights)
{
  double total = 0.0;
  for (double w : weights)
    total += w;
  if (!(total > 0.0))
    throw PreconditionError("categorical weights must have a positive sum");
  double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i])
      return i;
    u -= weights[i];
  }
  // rounding left u past the end: last positive weight
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0)
      return i;
  return weights.size() - 1;
}

std::vector<double>
draw_dirichlet(Rng& rng, std::span<const double> concentration)
{
  std::vector<double> out(concentration.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::gamma_distribution<double> g(concentration[i], 1.0);
    out[i] = g(rng);
    total += out[i];
  }
  if (!(total > 0.0)) {
    // every gamma draw underflowed: put the mass on the largest concentration
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (concentration[i] > concentration[best])
        best = i;
    out.assign(out.size(), 0.0);
    out[best] = 1.0;
    return out;
  }
  for (auto& v : out)
    v /= total;
  return out;
}

} // namespace natcap
