#pragma once

#include <cstdint>

namespace esenc {

//! Counter-based random stream built on the splitmix64 finalizer.  Streams
//! are identified by a hashed key, so replication r of Monte Carlo cell c can
//! draw from stream_key(base_seed, c, r) without any shared state.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return mix(a ^ (mix(b) + 0x9E3779B97F4A7C15ull + (a << 6) + (a >> 2)));
  }

  std::uint64_t next_u64() {
    return mix(key_ + 0x9E3779B97F4A7C15ull * ++counter_);
  }

  //! Uniform draw strictly inside (0, 1); safe to feed into inverse CDFs.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_normal();

  bool next_bernoulli(double p) { return next_uniform() < p; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t a,
                                std::uint64_t b = 0) {
  return CounterRng::combine(CounterRng::combine(seed, a), b);
}

}  // namespace esenc
