#include "levyfit/rng.hpp"

namespace levyfit {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(splitmix64(seed + kGoldenGamma) ^
           splitmix64(~stream * kGoldenGamma + 0x632BE59BD9B4E019ULL)) {}

CounterRng::result_type CounterRng::operator()() noexcept {
  ++counter_;
  return splitmix64(key_ + counter_ * kGoldenGamma);
}

double CounterRng::uniform() noexcept {
  // (k + 0.5) / 2^53 lies strictly inside (0, 1).
  const std::uint64_t k = (*this)() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

}  // namespace levyfit
