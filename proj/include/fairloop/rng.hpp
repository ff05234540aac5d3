#pragma once

#include <cstdint>

namespace fairloop {

// Small deterministic generator (xorshift-multiply mix over a 64-bit
// counter). Output is identical across platforms and standard libraries,
// which keeps traces reproducible byte for byte.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64 step
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  bool bernoulli(double p) { return next_double() < p; }

  // Standard normal via Box-Muller (one value per call; no cached spare so
  // the stream position stays obvious).
  double next_gaussian();

  template <typename T>
  void shuffle(T* data, std::size_t n) {
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      T tmp = data[i - 1];
      data[i - 1] = data[j];
      data[j] = tmp;
    }
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed for a named substream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace fairloop
