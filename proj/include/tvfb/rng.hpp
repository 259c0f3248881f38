#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace tvfb {

// Counter-based random streams. Every draw is a pure function of
// (key, counter), so replay does not depend on query order.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t stream_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x8E51ECA6F2C4D5A1ull;
  for (std::uint64_t p : parts) h = splitmix64(h ^ (p + kGolden));
  return h;
}

class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t n) const {
    return splitmix64(key_ + (n + 1) * kGolden);
  }

  // in [0, 1)
  double uniform(std::uint64_t n) const {
    return static_cast<double>(bits(n) >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; counters 2n and 2n+1 are consumed
  double normal(std::uint64_t n) const {
    const double u1 =
        (static_cast<double>(bits(2 * n) >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(bits(2 * n + 1) >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // integer in [0, m), m > 0
  std::uint64_t below(std::uint64_t n, std::uint64_t m) const {
    return bits(n) % m;
  }

 private:
  std::uint64_t key_;
};

}  // namespace tvfb
