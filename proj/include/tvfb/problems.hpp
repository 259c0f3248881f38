#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tvfb {

enum class ProblemKind { kConvexMin, kSaddlePoint };

// Built-in families. kL1Median: f_i(xi, zeta) = w_xi*||xi - c_xi,i||_1
// - w_zeta*||zeta - c_zeta,i||_1 (weights are 1 unless the instance came out
// of the rescaling transform). kZero: f_i identically 0.
enum class ProblemFamily { kL1Median, kZero };

enum class TieRule { kZeroOnKink };

struct ProblemInstance {
  ProblemKind kind = ProblemKind::kSaddlePoint;
  ProblemFamily family = ProblemFamily::kL1Median;
  int n_nodes = 0;
  int d_xi = 0;
  int d_zeta = 0;  // 0 for ConvexMin
  double r_xi = 0.0;
  double r_zeta = 0.0;  // equals r_xi for symmetric problems
  double w_xi = 1.0;
  double w_zeta = 1.0;
  std::vector<std::vector<double>> centers_xi;    // n_nodes x d_xi
  std::vector<std::vector<double>> centers_zeta;  // n_nodes x d_zeta
  double M = 0.0;        // subgradient norm bound
  double R_bound = 0.0;  // solution norm bound

  int dim() const { return d_xi + d_zeta; }
  bool symmetric() const {
    return kind == ProblemKind::kConvexMin || r_xi == r_zeta;
  }
  double r() const;  // symmetric regularization; throws if r_xi != r_zeta
};

ProblemInstance make_l1_saddle(int n, int d_xi, int d_zeta, double r,
                               std::uint64_t center_seed,
                               double center_scale = 1.0);
ProblemInstance make_l1_convex(int n, int d, double r,
                               std::uint64_t center_seed,
                               double center_scale = 1.0);
ProblemInstance make_l1_saddle_from_centers(
    std::vector<std::vector<double>> centers_xi,
    std::vector<std::vector<double>> centers_zeta, double r);
ProblemInstance make_l1_convex_from_centers(
    std::vector<std::vector<double>> centers, double r);
ProblemInstance make_zero_problem(int n, int d_xi, int d_zeta, double r);

// Per-node monotone operator T_i with a counter-based stochastic channel.
// Deterministic queries return the canonical selection (ties resolve to 0);
// stochastic queries add zero-mean Gaussian noise with E||noise||^2 = sigma^2,
// drawn purely from (rng_seed, node, k, t).
struct OperatorOracle {
  const ProblemInstance* problem = nullptr;
  double noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  TieRule tie_rule = TieRule::kZeroOnKink;
};

std::vector<double> query_deterministic(const OperatorOracle& o, int node,
                                        std::span<const double> x);
std::vector<double> query_stochastic(const OperatorOracle& o, int node,
                                     std::span<const double> x, int k, int t);

double evaluate_p(const ProblemInstance& pb, std::span<const double> x);
double evaluate_p_saddle(const ProblemInstance& pb, std::span<const double> xi,
                         std::span<const double> zeta);

double gap_cvx(const ProblemInstance& pb, std::span<const double> x_o,
               std::span<const double> x_star);
double gap_spp(const ProblemInstance& pb, std::span<const double> xi_o,
               std::span<const double> zeta_o, std::span<const double> xi_star,
               std::span<const double> zeta_star);
// Dispatches on pb.kind; points are full H vectors.
double gap(const ProblemInstance& pb, std::span<const double> x_o,
           std::span<const double> x_star);

struct AsymmetricRegularization {
  double r_xi = 0.0;
  double r_zeta = 0.0;
};

// Invertible diagonal coordinate change between original and rescaled
// problems: forward multiplies blocks by (s_xi, s_zeta).
struct CoordinateMap {
  int d_xi = 0;
  int d_zeta = 0;
  double s_xi = 1.0;
  double s_zeta = 1.0;
  std::vector<double> forward(std::span<const double> x) const;
  std::vector<double> backward(std::span<const double> x) const;
};

struct RescaledProblem {
  ProblemInstance problem;  // symmetric, r = 1
  CoordinateMap map;
};

// Reduces an asymmetric strongly-monotone saddle problem to the symmetric
// r = 1 form. The returned bound is M*sqrt(1/r_xi + 1/r_zeta).
RescaledProblem rescale_asymmetric(const ProblemInstance& pb,
                                   AsymmetricRegularization ar);

// Monotone (r = 0) reduction: sets r = eps / R_bound^2. Solving the result to
// gap eps certifies gap <= 2*eps on the original.
ProblemInstance regularize_monotone(const ProblemInstance& pb, double eps);

std::string serialize_problem(const ProblemInstance& pb);
ProblemInstance parse_problem(const std::string& text);

}  // namespace tvfb
