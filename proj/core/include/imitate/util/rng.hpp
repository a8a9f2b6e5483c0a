#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace imitate {

/// Seedable generator whose full state can be written to and restored from a string.
///
/// Normal samples are drawn with a cache-free Box-Muller transform so that the
/// generator state alone determines every future draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  int integer(int lo, int hi_inclusive);
  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

  std::string serialize() const;
  void deserialize(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream id (splitmix64 mix).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace imitate
