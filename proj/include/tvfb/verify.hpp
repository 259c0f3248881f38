#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tvfb/linalg.hpp"
#include "tvfb/problems.hpp"
#include "tvfb/stacked.hpp"

namespace tvfb {

// Exact minimizer of (l1_weight/n) * sum_i |u - c_i| + (r/2) u^2 by
// breakpoint scan. For r = 0 returns the lower median of the centers.
double solve_1d_exact(std::span<const double> centers, double r,
                      double l1_weight = 1.0);

// Coordinate-separable exact solution of a built-in instance (both blocks of
// a saddle instance reduce to the same 1-D minimization).
std::vector<double> solve_l1_instance(const ProblemInstance& pb);

// Optimal-point certificate: stacked copies of x*, multipliers y*, z*, and
// the per-node subgradient selections that witness stationarity.
struct Certificate {
  StackedVector w_star;
  StackedVector y_star;
  StackedVector z_star;
  std::vector<std::vector<double>> delta;  // n_nodes x (d_xi + d_zeta)
  double residual = 0.0;  // stationarity fit residual, <= 1e-9 on success
};

Certificate build_certificate(const ProblemInstance& pb,
                              std::span<const double> x_star,
                              double r_x = -1.0 /* default (2/3) r */);

// Max residual of the three block conditions of the monotone-inclusion
// reformulation at the certificate point. Requires r_x + 1/r_yz = r.
double inclusion_residual(const Certificate& cert, const ProblemInstance& pb,
                          double r_x, double r_yz);

struct CertificateBounds {
  double w_sq = 0.0, y_sq = 0.0, z_sq = 0.0;
  double w_lim = 0.0, y_lim = 0.0, z_lim = 0.0;
  bool ok() const { return w_sq <= w_lim && y_sq <= y_lim && z_sq <= z_lim; }
};
CertificateBounds certificate_norm_bounds(const Certificate& cert,
                                          const ProblemInstance& pb,
                                          double r_x);

// Worst ||Wx - x||^2 / ||x||^2 over random zero-sum vectors.
double contraction_probe(const Matrix& w, int trials, std::uint64_t seed);

}  // namespace tvfb
