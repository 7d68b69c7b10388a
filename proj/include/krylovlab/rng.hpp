#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace krylovlab {

// xoshiro256++ generator seeded through splitmix64. The integer stream is
// bit-identical across platforms for a given seed; gaussian() additionally
// depends on libm, so transcendental-derived draws are bit-identical per
// platform/toolchain only.
//
// Not shareable between threads. Parallel code takes one Rng per worker,
// derived from a root seed via substream().
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Stream for worker `index` under `root_seed`: the root seed is XORed with
  // the index and passed through splitmix64 before state expansion.
  static Rng substream(std::uint64_t root_seed, std::uint64_t index);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01();

  // Uniform integer in [0, n), n >= 1. Unbiased (rejection sampling).
  std::uint64_t uniform_below(std::uint64_t n);

  double uniform(double lo, double hi);

  // One normal draw via Box-Muller; throws std::invalid_argument if
  // stddev <= 0. Consecutive calls consume the cached second deviate.
  double gaussian(double mean, double stddev);

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::array<std::uint64_t, 4> state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace krylovlab
