#pragma once

#include <cstdint>
#include <limits>

namespace levyfit {

// Counter-based 64-bit generator: the i-th output of a stream is
// splitmix64(key + i * golden_gamma), where the key is derived from
// (seed, stream). Outputs depend only on (seed, stream, i), so replication
// streams can be generated in any order or in parallel.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace levyfit
