#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tvfb/gossip.hpp"
#include "tvfb/netgraph.hpp"
#include "tvfb/problems.hpp"
#include "tvfb/stacked.hpp"

namespace tvfb {

// Step sizes and momentum weights of the accelerated forward-backward
// method, precomputed for rounds 0..K. All quantities are strictly positive.
struct Schedule {
  int K = 0;
  int T = 0;
  double r = 0.0;
  double chi = 1.0;
  bool literal_eta_x = false;  // constant 1/(tau_x_k[K]*T) instead of per-k

  double r_x = 0.0;    // (2/3) r
  double r_yz = 0.0;   // 3 / r
  double tau_x = 0.0;  // r_x / 2
  double eta_y = 0.0;  // 1 / (4 r_yz)
  double eta_z = 0.0;  // 1 / (10 r_yz chi^2)

  std::vector<double> alpha;      // 0..K
  std::vector<double> gamma;      // 0..K-1
  std::vector<double> tau_x_k;    // 0..K
  std::vector<double> eta_x_k;    // 0..K-1
  std::vector<double> eta_y_k;    // 0..K-1
  std::vector<double> eta_z_k;    // 0..K (the momentum-correction ratio at the
                                  // last round needs index K)
  std::vector<double> beta;       // 0..K-1
  std::vector<double> sigma_k;    // 0..K-1
  std::vector<double> theta_z_k;  // 0..K-1
  std::vector<double> lambda;     // valid at 1..K-1 (interior weights)

  // Weight of bar-iterate j when round j closes the run.
  double lambda_final(int j) const { return 1.0 / (alpha[j - 1] * alpha[j - 1]); }
};

Schedule build_schedule(int K, int T, double r, double chi,
                        bool literal_eta_x = false);

struct SolverState {
  int round = 0;
  StackedVector x, x_prev, x_tilde, x_bar, x_hat;
  StackedVector y, y_bar, y_under;
  StackedVector z, z_bar, z_under;
  StackedVector m;
  // running interior-weighted sums of bar-iterates 1..round-1
  StackedVector sum_lambda_x, sum_lambda_y, sum_lambda_z;
  double sum_lambda = 0.0;
  double max_implicit_residual = 0.0;
};

SolverState init_state(int n_nodes, int block_dim);

// One outer round k. comm == nullptr replaces the gossip multiplication with
// the exact consensus-complement projection (test hook; identical on complete
// graphs).
void outer_step(SolverState& st, const Schedule& sched, const Matrix* comm,
                const OperatorOracle& oracle, int k,
                bool check_implicit_residual = false);

struct WeightedAverage {
  StackedVector x_a, y_a, z_a;
};
// Normalized lambda-weighted average after st.round >= 1 completed rounds.
WeightedAverage weighted_average(const SolverState& st, const Schedule& sched);

enum class MetricMode { kAnytime, kFinalPerK };

struct RunOptions {
  int K = 1;
  int T = 1;
  double sigma = 0.0;
  std::uint64_t oracle_seed = 0;
  bool literal_eta_x = false;
  bool use_projection_comm = false;
  bool check_implicit_residual = false;
  bool measure_wall_time = false;
};

// Evaluation target for per-round metrics: the original problem, its verified
// solution, and the coordinate map back from solved coordinates.
struct MetricReference {
  const ProblemInstance* problem = nullptr;
  std::vector<double> x_star;
  CoordinateMap back;
};

struct RunMetricsRow {
  int k = 0;
  std::int64_t t_total = 0;
  double dist_to_opt = 0.0;
  double gap = 0.0;
  double consensus_err = 0.0;
  std::int64_t wall_ns = 0;
};

struct RunResult {
  bool finite = true;
  int abort_round = -1;
  double chi = 1.0;
  std::vector<double> x_o;           // output in solved coordinates
  std::vector<double> x_o_original;  // mapped back through the reference
  std::vector<RunMetricsRow> rows;
  double max_implicit_residual = 0.0;
};

RunResult run(const ProblemInstance& pb, const TimeVaryingGraph& g,
              const RunOptions& opts, const MetricReference* ref = nullptr);

}  // namespace tvfb
