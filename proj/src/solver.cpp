#include "tvfb/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace tvfb {

namespace {

// Keeps the zero-block-sum invariant on iterates that live in the consensus
// complement. The communicated quantities only ever see the projected part,
// so this does not change the trajectory.
void enforce_zero_block_sum(StackedVector& v, double tol = 1e-10) {
  const std::vector<double> s = block_sum(v);
  double worst = 0.0;
  for (double c : s) worst = std::max(worst, std::abs(c));
  if (worst <= tol) return;
  for (int i = 0; i < v.n_blocks; ++i) {
    auto bi = v.block(i);
    for (int j = 0; j < v.block_dim; ++j) bi[j] -= s[j] / v.n_blocks;
  }
}

StackedVector communicate(const Matrix* comm, const StackedVector& v) {
  return comm ? apply_gossip(*comm, v) : project_consensus_complement(v);
}

}  // namespace

Schedule build_schedule(int K, int T, double r, double chi,
                        bool literal_eta_x) {
  if (K < 1 || T < 1) throw std::invalid_argument("need K >= 1 and T >= 1");
  if (!(r > 0.0))
    throw std::invalid_argument(
        "schedule needs r > 0; monotone problems must be regularized first");
  if (!(chi >= 1.0)) throw std::invalid_argument("need chi >= 1");

  Schedule s;
  s.K = K;
  s.T = T;
  s.r = r;
  s.chi = chi;
  s.literal_eta_x = literal_eta_x;
  s.r_x = (2.0 / 3.0) * r;
  s.r_yz = 3.0 / r;
  s.tau_x = 0.5 * s.r_x;
  s.eta_y = 1.0 / (4.0 * s.r_yz);
  s.eta_z = 1.0 / (10.0 * s.r_yz * chi * chi);

  s.alpha.resize(K + 1);
  s.tau_x_k.resize(K + 1);
  s.eta_z_k.resize(K + 1);
  for (int k = 0; k <= K; ++k) {
    s.alpha[k] = 3.0 / (k + 3.0);
    s.tau_x_k[k] = s.tau_x / s.alpha[k];
    s.eta_z_k[k] = s.eta_z / s.alpha[k];
  }
  s.gamma.resize(K);
  s.eta_x_k.resize(K);
  s.eta_y_k.resize(K);
  s.beta.resize(K);
  s.sigma_k.resize(K);
  s.theta_z_k.resize(K);
  for (int k = 0; k < K; ++k) {
    s.gamma[k] = (k + 2.0) / (k + 3.0);
    s.eta_y_k[k] = s.eta_y / s.alpha[k];
    s.eta_x_k[k] =
        1.0 / ((literal_eta_x ? s.tau_x_k[K] : s.tau_x_k[k]) * T);
    s.beta[k] = s.r_x;
    s.sigma_k[k] = s.tau_x_k[k] / (2.0 * s.tau_x_k[k] + s.beta[k]);
    s.theta_z_k[k] = 1.0 / (2.0 * s.r_yz);
  }
  s.lambda.resize(K + 1, 0.0);
  for (int k = 1; k < K; ++k) {
    const double am = 1.0 / s.alpha[k - 1];
    const double ak = 1.0 / s.alpha[k];
    s.lambda[k] = am * am + ak - ak * ak;
  }
  s.lambda[K] = s.lambda_final(K);
  return s;
}

SolverState init_state(int n_nodes, int block_dim) {
  SolverState st;
  const auto zero = StackedVector(n_nodes, block_dim);
  st.x = st.x_prev = st.x_tilde = st.x_bar = st.x_hat = zero;
  st.y = st.y_bar = st.y_under = zero;
  st.z = st.z_bar = st.z_under = zero;
  st.m = zero;
  st.sum_lambda_x = st.sum_lambda_y = st.sum_lambda_z = zero;
  return st;
}

void outer_step(SolverState& st, const Schedule& sched, const Matrix* comm,
                const OperatorOracle& oracle, int k,
                bool check_implicit_residual) {
  if (k != st.round) throw std::logic_error("round index out of sync");
  if (k >= sched.K) throw std::logic_error("round index beyond schedule");

  // fold the now-interior bar-iterates (index k) into the running average
  if (k >= 1) {
    add_scaled(st.sum_lambda_x, sched.lambda[k], st.x_bar);
    add_scaled(st.sum_lambda_y, sched.lambda[k], st.y_bar);
    add_scaled(st.sum_lambda_z, sched.lambda[k], st.z_bar);
    st.sum_lambda += sched.lambda[k];
  }

  const double a = sched.alpha[k];
  const int n = st.x.n_blocks;
  const int d = st.x.block_dim;

  // momentum combination
  linear_combine(st.y_under, a, st.y, 1.0 - a, st.y_bar);
  linear_combine(st.z_under, a, st.z, 1.0 - a, st.z_bar);

  // both partial gradients of the coupling G coincide
  StackedVector g_yz;
  linear_combine(g_yz, sched.r_yz, st.y_under, sched.r_yz, st.z_under);

  // the round's single communication: two multiplications by the same W
  const StackedVector g_z_tilde = communicate(comm, g_yz);
  StackedVector g_plus_m = g_yz;
  add_scaled(g_plus_m, 1.0, st.m);
  const StackedVector g_z_hat = communicate(comm, g_plus_m);

  // extrapolated x enters the y-update
  StackedVector x_diff;
  linear_combine(x_diff, 1.0, st.x_tilde, -1.0, st.x_prev);
  linear_combine(st.x_hat, 1.0, st.x, sched.gamma[k], x_diff);

  const StackedVector y_old = st.y;
  StackedVector y_force;
  linear_combine(y_force, 1.0, g_yz, 1.0, st.x_hat);
  add_scaled(st.y, -sched.eta_y_k[k], y_force);
  add_scaled(st.z, -sched.eta_z_k[k], g_z_hat);

  StackedVector y_step;
  linear_combine(y_step, 1.0, st.y, -1.0, y_old);
  linear_combine(st.y_bar, 1.0, st.y_under, a, y_step);
  linear_combine(st.z_bar, 1.0, st.z_under, -sched.theta_z_k[k], g_z_tilde);

  // error feedback: re-inject what the network did not carry
  const double ratio = sched.eta_z_k[k] / sched.eta_z_k[k + 1];
  StackedVector m_next = st.m;
  add_scaled(m_next, 1.0, g_yz);
  add_scaled(m_next, -1.0, g_z_hat);
  scale(m_next, ratio);
  st.m = std::move(m_next);

  enforce_zero_block_sum(st.z);
  enforce_zero_block_sum(st.z_bar);
  enforce_zero_block_sum(st.z_under);
  enforce_zero_block_sum(st.m);

  // inner loop: implicit subgradient steps against the frozen x^k
  const double eta_x = sched.eta_x_k[k];
  const double tau = sched.tau_x_k[k];
  const double beta = sched.beta[k];
  const double denom = 1.0 + eta_x * (beta + tau);
  const StackedVector x_base = st.x;
  StackedVector x_cur = st.x;
  StackedVector x_sum(n, d);
  StackedVector g_x(n, d);
  for (int t = 0; t < sched.T; ++t) {
    for (int i = 0; i < n; ++i) {
      const std::vector<double> gi =
          query_stochastic(oracle, i, x_cur.block(i), k, t);
      auto dst = g_x.block(i);
      for (int j = 0; j < d; ++j) dst[j] = gi[j];
    }
    StackedVector x_next(n, d);
    for (std::size_t idx = 0; idx < x_cur.data.size(); ++idx) {
      x_next.data[idx] =
          (x_cur.data[idx] -
           eta_x * (g_x.data[idx] - st.y.data[idx] - tau * x_base.data[idx])) /
          denom;
    }
    if (check_implicit_residual) {
      // substitute back into the implicit equation
      double res2 = 0.0;
      for (std::size_t idx = 0; idx < x_cur.data.size(); ++idx) {
        const double rhs =
            x_cur.data[idx] -
            eta_x * (g_x.data[idx] + beta * x_next.data[idx] -
                     st.y.data[idx] +
                     tau * (x_next.data[idx] - x_base.data[idx]));
        const double diff = x_next.data[idx] - rhs;
        res2 += diff * diff;
      }
      const double rel = std::sqrt(res2) / (1.0 + norm(x_next));
      st.max_implicit_residual = std::max(st.max_implicit_residual, rel);
    }
    add_scaled(x_sum, 1.0, x_next);
    x_cur = std::move(x_next);
  }

  StackedVector x_tilde_new = x_sum;
  scale(x_tilde_new, 1.0 / sched.T);
  StackedVector x_new;
  linear_combine(x_new, sched.sigma_k[k], x_cur, 1.0 - sched.sigma_k[k],
                 x_tilde_new);
  linear_combine(st.x_bar, a, x_tilde_new, 1.0 - a, st.x_bar);

  st.x_prev = st.x;
  st.x = std::move(x_new);
  st.x_tilde = std::move(x_tilde_new);
  st.round = k + 1;
}

WeightedAverage weighted_average(const SolverState& st,
                                 const Schedule& sched) {
  if (st.round < 1) throw std::logic_error("no completed rounds to average");
  const double lf = sched.lambda_final(st.round);
  const double total = st.sum_lambda + lf;
  WeightedAverage w;
  linear_combine(w.x_a, 1.0 / total, st.sum_lambda_x, lf / total, st.x_bar);
  linear_combine(w.y_a, 1.0 / total, st.sum_lambda_y, lf / total, st.y_bar);
  linear_combine(w.z_a, 1.0 / total, st.sum_lambda_z, lf / total, st.z_bar);
  return w;
}

RunResult run(const ProblemInstance& pb, const TimeVaryingGraph& g,
              const RunOptions& opts, const MetricReference* ref) {
  if (g.n_nodes != pb.n_nodes)
    throw std::invalid_argument("graph and problem disagree on node count");

  RunResult result;
  result.chi = opts.use_projection_comm
                   ? 1.0
                   : make_gossip_operator(g, opts.K, pb.dim()).chi;
  const Schedule sched =
      build_schedule(opts.K, opts.T, pb.r(), result.chi, opts.literal_eta_x);
  const OperatorOracle oracle{&pb, opts.sigma, opts.oracle_seed,
                              TieRule::kZeroOnKink};

  const bool static_graph = g.schedule_kind == ScheduleKind::kStatic;
  Matrix w_static;
  if (!opts.use_projection_comm && static_graph)
    w_static = build_gossip(g.base_edges, g.n_nodes);

  SolverState st = init_state(pb.n_nodes, pb.dim());
  const auto t0 = std::chrono::steady_clock::now();

  for (int k = 0; k < opts.K; ++k) {
    Matrix w_round;
    const Matrix* comm = nullptr;
    if (!opts.use_projection_comm) {
      if (static_graph) {
        comm = &w_static;
      } else {
        w_round = build_gossip(edges_at(g, k), g.n_nodes);
        comm = &w_round;
      }
    }
    outer_step(st, sched, comm, oracle, k, opts.check_implicit_residual);

    if (!all_finite(st.x) || !all_finite(st.y) || !all_finite(st.z) ||
        !all_finite(st.m)) {
      result.finite = false;
      result.abort_round = k;
      break;
    }

    const WeightedAverage avg = weighted_average(st, sched);
    RunMetricsRow row;
    row.k = st.round;
    row.t_total = static_cast<std::int64_t>(st.round) * opts.T;
    const std::vector<double> x_o = block_mean(avg.x_a);
    const StackedVector dev = project_consensus_complement(avg.x_a);
    row.consensus_err = norm(dev);
    if (ref != nullptr) {
      const std::vector<double> x_o_orig = ref->back.backward(x_o);
      double d2 = 0.0;
      for (std::size_t j = 0; j < x_o_orig.size(); ++j) {
        const double diff = x_o_orig[j] - ref->x_star[j];
        d2 += diff * diff;
      }
      row.dist_to_opt = std::sqrt(d2);
      row.gap = gap(*ref->problem, x_o_orig, ref->x_star);
    } else {
      row.dist_to_opt = std::numeric_limits<double>::quiet_NaN();
      row.gap = std::numeric_limits<double>::quiet_NaN();
    }
    if (opts.measure_wall_time) {
      row.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
    result.rows.push_back(row);

    if (st.round == opts.K) {
      result.x_o = x_o;
      result.x_o_original = ref ? ref->back.backward(x_o) : x_o;
    }
  }
  result.max_implicit_residual = st.max_implicit_residual;
  return result;
}

}  // namespace tvfb
