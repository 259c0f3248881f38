#pragma once

#include <cstddef>
#include <vector>

namespace tvfb {

// Dense row-major square matrix, sized for gossip matrices (n up to a few
// hundred).
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}

  double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
};

// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi; deterministic.
std::vector<double> symmetric_eigenvalues(const Matrix& m);

}  // namespace tvfb
