#include "tvfb/stacked.hpp"

#include <cassert>
#include <cmath>

namespace tvfb {

double dot(const StackedVector& a, const StackedVector& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double norm(const StackedVector& a) { return std::sqrt(dot(a, a)); }

void linear_combine(StackedVector& out, double a, const StackedVector& x,
                    double b, const StackedVector& y) {
  assert(x.size() == y.size());
  out.n_blocks = x.n_blocks;
  out.block_dim = x.block_dim;
  out.data.resize(x.data.size());
  for (std::size_t i = 0; i < x.data.size(); ++i)
    out.data[i] = a * x.data[i] + b * y.data[i];
}

void add_scaled(StackedVector& out, double c, const StackedVector& x) {
  assert(out.size() == x.size());
  for (std::size_t i = 0; i < x.data.size(); ++i) out.data[i] += c * x.data[i];
}

void scale(StackedVector& x, double c) {
  for (double& v : x.data) v *= c;
}

std::vector<double> block_sum(const StackedVector& x) {
  std::vector<double> s(x.block_dim, 0.0);
  for (int i = 0; i < x.n_blocks; ++i) {
    auto bi = x.block(i);
    for (int j = 0; j < x.block_dim; ++j) s[j] += bi[j];
  }
  return s;
}

std::vector<double> block_mean(const StackedVector& x) {
  std::vector<double> m = block_sum(x);
  for (double& v : m) v /= x.n_blocks;
  return m;
}

StackedVector project_consensus_complement(const StackedVector& x) {
  StackedVector out = x;
  const std::vector<double> m = block_mean(x);
  for (int i = 0; i < out.n_blocks; ++i) {
    auto bi = out.block(i);
    for (int j = 0; j < out.block_dim; ++j) bi[j] -= m[j];
  }
  return out;
}

bool all_finite(const StackedVector& x) {
  for (double v : x.data)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace tvfb
