#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvfb {

// Element of H^n: n per-node blocks of equal dimension, stored contiguously.
struct StackedVector {
  int n_blocks = 0;
  int block_dim = 0;
  std::vector<double> data;

  StackedVector() = default;
  StackedVector(int n, int d)
      : n_blocks(n), block_dim(d), data(static_cast<std::size_t>(n) * d, 0.0) {}

  std::size_t size() const { return data.size(); }

  std::span<double> block(int i) {
    return {data.data() + static_cast<std::size_t>(i) * block_dim,
            static_cast<std::size_t>(block_dim)};
  }
  std::span<const double> block(int i) const {
    return {data.data() + static_cast<std::size_t>(i) * block_dim,
            static_cast<std::size_t>(block_dim)};
  }
};

double dot(const StackedVector& a, const StackedVector& b);
double norm(const StackedVector& a);

// this = a*x + b*y (dimensions must match)
void linear_combine(StackedVector& out, double a, const StackedVector& x,
                    double b, const StackedVector& y);

// out += c * x
void add_scaled(StackedVector& out, double c, const StackedVector& x);

void scale(StackedVector& x, double c);

// across-blocks mean, a point in H
std::vector<double> block_mean(const StackedVector& x);

// sum of blocks, a point in H
std::vector<double> block_sum(const StackedVector& x);

// subtracts the across-blocks mean from every block (projection onto the
// zero-block-sum subspace)
StackedVector project_consensus_complement(const StackedVector& x);

bool all_finite(const StackedVector& x);

}  // namespace tvfb
