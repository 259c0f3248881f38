#include "tvfb/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "tvfb/rng.hpp"

namespace tvfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Selection interval of one coordinate of T_i at u against center c: a point
// {w*sign(u-c)} off the kink, [-w, w] on it.
struct Interval {
  double lo, hi;
};
Interval selection_interval(double u, double c, double w) {
  if (u == c) return {-w, w};
  const double s = w * sign0(u - c);
  return {s, s};
}

double interval_distance(double v, Interval iv) {
  if (v < iv.lo) return iv.lo - v;
  if (v > iv.hi) return v - iv.hi;
  return 0.0;
}

// Distributes `need` over the slack of free intervals (delta starts at the
// canonical point; each entry can move within [lo, hi]). Returns what could
// not be placed.
double distribute(std::vector<double*>& free_slots, double lo, double hi,
                  double need) {
  for (double* slot : free_slots) {
    if (need == 0.0) break;
    const double room_up = hi - *slot;
    const double room_dn = *slot - lo;
    const double take = std::clamp(need, -room_dn, room_up);
    *slot += take;
    need -= take;
  }
  return need;
}

}  // namespace

double solve_1d_exact(std::span<const double> centers, double r,
                      double l1_weight) {
  const int n = static_cast<int>(centers.size());
  if (r < 0.0) throw std::invalid_argument("r must be >= 0");
  if (r == 0.0) {
    if (n == 0)
      throw std::invalid_argument("r = 0 needs at least one center");
    std::vector<double> c(centers.begin(), centers.end());
    std::sort(c.begin(), c.end());
    return c[(n - 1) / 2];  // lower median
  }
  if (n == 0) return 0.0;

  std::vector<double> c(centers.begin(), centers.end());
  std::sort(c.begin(), c.end());
  const double w = l1_weight;

  // On the interval with m centers below, the subgradient is
  // r*u + (w/n)(2m - n); it is increasing in u and in m.
  for (int m = 0; m <= n; ++m) {
    const double u = -(w * (2.0 * m - n)) / (n * r);
    const double lo = m == 0 ? -kInf : c[m - 1];
    const double hi = m == n ? kInf : c[m];
    if (u >= lo && u <= hi) return u;
  }
  // Otherwise zero enters the subdifferential at a kink.
  for (int j = 0; j < n; ++j) {
    if (j > 0 && c[j] == c[j - 1]) continue;
    const double cj = c[j];
    int lt = 0, eq = 0;
    for (double v : c) {
      lt += v < cj;
      eq += v == cj;
    }
    const int gt = n - lt - eq;
    const double g_minus = r * cj + (w / n) * (lt - eq - gt);
    const double g_plus = r * cj + (w / n) * (lt + eq - gt);
    if (g_minus <= 0.0 && 0.0 <= g_plus) return cj;
  }
  throw std::logic_error("breakpoint scan found no minimizer");
}

std::vector<double> solve_l1_instance(const ProblemInstance& pb) {
  std::vector<double> x(pb.dim(), 0.0);
  if (pb.family == ProblemFamily::kZero) return x;
  std::vector<double> column(pb.n_nodes);
  for (int j = 0; j < pb.d_xi; ++j) {
    for (int i = 0; i < pb.n_nodes; ++i) column[i] = pb.centers_xi[i][j];
    x[j] = solve_1d_exact(column, pb.r_xi, pb.w_xi);
  }
  // maximizing the concave block is the same 1-D minimization
  for (int j = 0; j < pb.d_zeta; ++j) {
    for (int i = 0; i < pb.n_nodes; ++i) column[i] = pb.centers_zeta[i][j];
    x[pb.d_xi + j] = solve_1d_exact(column, pb.r_zeta, pb.w_zeta);
  }
  return x;
}

Certificate build_certificate(const ProblemInstance& pb,
                              std::span<const double> x_star, double r_x) {
  const double r = pb.r();
  if (!(r > 0.0))
    throw std::invalid_argument("certificate construction needs r > 0");
  if (r_x < 0.0) r_x = (2.0 / 3.0) * r;
  if (static_cast<int>(x_star.size()) != pb.dim())
    throw std::invalid_argument("x_star dimension mismatch");
  const int n = pb.n_nodes;

  Certificate cert;
  cert.delta.assign(n, std::vector<double>(pb.dim(), 0.0));
  double worst_fit = 0.0;

  // delta^xi: canonical selection with targets sum_i delta = -n*r*xi*_j;
  // delta^zeta: the partial subgradient in zeta, targets +n*r*zeta*_j.
  auto fit_block = [&](int offset, int d,
                       const std::vector<std::vector<double>>& centers,
                       double w, double forced_sign, double target_scale) {
    for (int j = 0; j < d; ++j) {
      const double u = x_star[offset + j];
      double forced_sum = 0.0;
      std::vector<double*> free_slots;
      for (int i = 0; i < n; ++i) {
        double& slot = cert.delta[i][offset + j];
        if (pb.family == ProblemFamily::kZero) {
          slot = 0.0;  // zero operator: the only selection
        } else if (u == centers[i][j]) {
          slot = 0.0;
          free_slots.push_back(&slot);
        } else {
          slot = forced_sign * w * sign0(u - centers[i][j]);
          forced_sum += slot;
        }
      }
      const double need = target_scale * n * r * u - forced_sum;
      const double leftover = distribute(free_slots, -w, w, need);
      worst_fit = std::max(worst_fit, std::abs(leftover) / n);
    }
  };
  fit_block(0, pb.d_xi, pb.centers_xi, pb.w_xi, +1.0, -1.0);
  if (pb.d_zeta > 0)
    fit_block(pb.d_xi, pb.d_zeta, pb.centers_zeta, pb.w_zeta, -1.0, +1.0);

  cert.residual = worst_fit;
  if (!(worst_fit <= 1e-9))
    throw std::runtime_error(
        "infeasible subgradient fit: x_star is not optimal");

  cert.w_star = StackedVector(n, pb.dim());
  cert.y_star = StackedVector(n, pb.dim());
  cert.z_star = StackedVector(n, pb.dim());
  for (int i = 0; i < n; ++i) {
    auto wi = cert.w_star.block(i);
    auto yi = cert.y_star.block(i);
    auto zi = cert.z_star.block(i);
    for (int j = 0; j < pb.dim(); ++j) {
      const double u = x_star[j];
      const double dlt = cert.delta[i][j];
      const bool zeta_part = j >= pb.d_xi;
      wi[j] = u;
      yi[j] = (zeta_part ? -dlt : dlt) + r_x * u;
      zi[j] = (zeta_part ? dlt : -dlt) - r * u;
    }
  }
  return cert;
}

double inclusion_residual(const Certificate& cert, const ProblemInstance& pb,
                          double r_x, double r_yz) {
  const double r = pb.r();
  if (std::abs(r_x + 1.0 / r_yz - r) > 1e-12 * std::max(1.0, r))
    throw std::invalid_argument("parameters must satisfy r_x + 1/r_yz = r");

  const int n = pb.n_nodes;
  double worst = 0.0;

  // y* - r_x w* must select into T(w*)
  for (int i = 0; i < n; ++i) {
    auto yi = cert.y_star.block(i);
    auto wi = cert.w_star.block(i);
    for (int j = 0; j < pb.dim(); ++j) {
      const double v = yi[j] - r_x * wi[j];
      Interval iv{0.0, 0.0};
      if (pb.family != ProblemFamily::kZero) {
        iv = j < pb.d_xi
                 ? selection_interval(wi[j], pb.centers_xi[i][j], pb.w_xi)
                 : selection_interval(wi[j], pb.centers_zeta[i][j - pb.d_xi],
                                      pb.w_zeta);
      }
      worst = std::max(worst, interval_distance(v, iv));
    }
  }

  // x-block: 0 = w* + r_yz (y* + z*); z-block: projected coupling gradient
  StackedVector grad;
  linear_combine(grad, r_yz, cert.y_star, r_yz, cert.z_star);
  StackedVector x_block;
  linear_combine(x_block, 1.0, cert.w_star, 1.0, grad);
  for (double v : x_block.data) worst = std::max(worst, std::abs(v));
  const StackedVector projected = project_consensus_complement(grad);
  for (double v : projected.data) worst = std::max(worst, std::abs(v));
  return worst;
}

CertificateBounds certificate_norm_bounds(const Certificate& cert,
                                          const ProblemInstance& pb,
                                          double r_x) {
  const double r = pb.r();
  const double n = pb.n_nodes;
  const double m2 = pb.M * pb.M;
  CertificateBounds b;
  b.w_sq = dot(cert.w_star, cert.w_star);
  b.y_sq = dot(cert.y_star, cert.y_star);
  b.z_sq = dot(cert.z_star, cert.z_star);
  b.w_lim = 2.0 * n * m2 / (r * r);
  b.y_lim = 2.0 * (1.0 + r_x / r) * (1.0 + r_x / r) * n * m2;
  b.z_lim = 8.0 * n * m2;
  return b;
}

double contraction_probe(const Matrix& w, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const int n = w.n;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    const CounterStream rng(stream_key({seed, 0x5052u, (std::uint64_t)trial}));
    std::vector<double> x(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      x[i] = rng.normal(i);
      mean += x[i];
    }
    mean /= n;
    double nrm2 = 0.0;
    for (double& v : x) {
      v -= mean;
      nrm2 += v * v;
    }
    if (nrm2 == 0.0) continue;
    double diff2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double wi = 0.0;
      for (int j = 0; j < n; ++j) wi += w.at(i, j) * x[j];
      diff2 += (wi - x[i]) * (wi - x[i]);
    }
    worst = std::max(worst, diff2 / nrm2);
  }
  return worst;
}

}  // namespace tvfb
