#include "fairloop/rng.hpp"

#include <cmath>
#include <numbers>

namespace fairloop {

double Rng::next_gaussian() {
  double u1 = next_double();
  double u2 = next_double();
  while (u1 <= 0.0) u1 = next_double();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  Rng mix(seed ^ (0xd1b54a32d192ed03ULL * (stream + 1)));
  return mix.next_u64();
}

}  // namespace fairloop
