#pragma once

#include <cstdint>
#include <vector>

#include "tvfb/rng.hpp"
#include "tvfb/stacked.hpp"

namespace tvfb::test {

inline StackedVector random_stacked(int n, int d, std::uint64_t seed) {
  StackedVector v(n, d);
  const CounterStream rng(stream_key({seed, 0x5453u}));
  for (std::size_t i = 0; i < v.data.size(); ++i)
    v.data[i] = rng.normal(i);
  return v;
}

inline StackedVector random_zero_sum_stacked(int n, int d,
                                             std::uint64_t seed) {
  return project_consensus_complement(random_stacked(n, d, seed));
}

inline std::vector<double> random_point(int d, std::uint64_t seed,
                                        double scale = 1.0) {
  std::vector<double> x(d);
  const CounterStream rng(stream_key({seed, 0x5054u}));
  for (int j = 0; j < d; ++j) x[j] = scale * (2.0 * rng.uniform(j) - 1.0);
  return x;
}

}  // namespace tvfb::test
