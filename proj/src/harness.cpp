#include "tvfb/harness.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "tvfb/netgraph.hpp"
#include "tvfb/rng.hpp"
#include "tvfb/verify.hpp"

namespace tvfb {

namespace {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Pipeline {
  TimeVaryingGraph graph;
  ProblemInstance original;
  ProblemInstance solved;
  CoordinateMap back;  // solved coordinates -> original coordinates
  std::vector<double> x_star;
};

ProblemInstance build_problem(const ExperimentConfig& cfg) {
  const double base_r = cfg.r;
  if (cfg.family == "l1_saddle") {
    ProblemInstance pb = make_l1_saddle(cfg.n, cfg.d_xi, cfg.d_zeta, base_r,
                                        cfg.center_seed, cfg.center_scale);
    if (cfg.r_xi > 0.0 && cfg.r_zeta > 0.0) {
      pb.r_xi = cfg.r_xi;
      pb.r_zeta = cfg.r_zeta;
    }
    return pb;
  }
  if (cfg.family == "l1_convex")
    return make_l1_convex(cfg.n, cfg.d_xi, base_r, cfg.center_seed,
                          cfg.center_scale);
  if (cfg.family == "zero")
    return make_zero_problem(cfg.n, cfg.d_xi, cfg.d_zeta, base_r);
  throw std::invalid_argument("unknown problem family: " + cfg.family);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("need n >= 2");
  if (cfg.K < 1) throw std::invalid_argument("need K >= 1");
  if (cfg.T < 1) throw std::invalid_argument("need T >= 1");
  if (cfg.sigma < 0.0) throw std::invalid_argument("sigma must be >= 0");
  if (cfg.d_xi < 1) throw std::invalid_argument("need d_xi >= 1");
  if (cfg.schedule != "static" && cfg.schedule != "churn")
    throw std::invalid_argument("schedule must be static or churn");
  if (cfg.eta_x_variant != "per_k" && cfg.eta_x_variant != "literal")
    throw std::invalid_argument("eta_x_variant must be per_k or literal");
  if (cfg.metric_mode != "anytime" && cfg.metric_mode != "final")
    throw std::invalid_argument("metric_mode must be anytime or final");
  if ((cfg.r_xi > 0.0) != (cfg.r_zeta > 0.0))
    throw std::invalid_argument("set both r_xi and r_zeta or neither");
}

Pipeline build_pipeline(const ExperimentConfig& cfg) {
  validate(cfg);
  Pipeline pl;
  pl.graph = generate_erdos_renyi(cfg.n, cfg.p, cfg.graph_seed);
  if (cfg.schedule == "churn") pl.graph = with_churn(pl.graph, cfg.churn_rate);

  pl.original = build_problem(cfg);
  pl.back = CoordinateMap{pl.original.d_xi, pl.original.d_zeta, 1.0, 1.0};
  if (!pl.original.symmetric()) {
    RescaledProblem rp = rescale_asymmetric(
        pl.original, {pl.original.r_xi, pl.original.r_zeta});
    pl.solved = std::move(rp.problem);
    pl.back = rp.map;
  } else if (pl.original.r() == 0.0) {
    if (!(cfg.epsilon > 0.0))
      throw std::invalid_argument("r = 0 needs a positive epsilon");
    pl.solved = regularize_monotone(pl.original, cfg.epsilon);
  } else {
    pl.solved = pl.original;
  }
  pl.x_star = solve_l1_instance(pl.original);
  return pl;
}

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions opts;
  opts.K = cfg.K;
  opts.T = cfg.T;
  opts.sigma = cfg.sigma;
  opts.oracle_seed = cfg.oracle_seed;
  opts.literal_eta_x = cfg.eta_x_variant == "literal";
  opts.measure_wall_time = cfg.timing;
  return opts;
}

std::string metrics_csv(const std::vector<RunMetricsRow>& rows) {
  std::ostringstream os;
  os << "k,t_total,dist_to_opt,gap,consensus_err,wall_ns\n";
  for (const RunMetricsRow& row : rows) {
    os << row.k << "," << row.t_total << "," << fmt_g17(row.dist_to_opt) << ","
       << fmt_g17(row.gap) << "," << fmt_g17(row.consensus_err) << ","
       << row.wall_ns << "\n";
  }
  return os.str();
}

std::string metadata_csv(const ExperimentConfig& cfg, const Pipeline& pl,
                         double chi) {
  std::ostringstream os;
  os << "key,value\n";
  os << "family," << cfg.family << "\n";
  os << "n," << cfg.n << "\n";
  os << "d_xi," << cfg.d_xi << "\n";
  os << "d_zeta," << cfg.d_zeta << "\n";
  os << "K," << cfg.K << "\n";
  os << "T," << cfg.T << "\n";
  os << "r," << fmt_g17(cfg.r) << "\n";
  os << "r_solved," << fmt_g17(pl.solved.r()) << "\n";
  os << "sigma," << fmt_g17(cfg.sigma) << "\n";
  os << "chi," << fmt_g17(chi) << "\n";
  os << "M," << fmt_g17(pl.solved.M) << "\n";
  os << "R_bound," << fmt_g17(pl.original.R_bound) << "\n";
  os << "graph_seed," << cfg.graph_seed << "\n";
  os << "center_seed," << cfg.center_seed << "\n";
  os << "oracle_seed," << cfg.oracle_seed << "\n";
  os << "schedule," << cfg.schedule << "\n";
  os << "churn_rate," << fmt_g17(cfg.churn_rate) << "\n";
  os << "p," << fmt_g17(cfg.p) << "\n";
  os << "eta_x_variant," << cfg.eta_x_variant << "\n";
  os << "metric_mode," << cfg.metric_mode << "\n";
  os << "base_edges," << pl.graph.base_edges.size() << "\n";
  os << "er_resamples," << pl.graph.resample_count << "\n";
  for (const RoundSpectrum& s : spectral_profile(pl.graph, cfg.K)) {
    os << "round_" << s.round << "_lambda_min_pos," << fmt_g17(s.lambda_min_pos)
       << "\n";
    os << "round_" << s.round << "_lambda_max," << fmt_g17(s.lambda_max)
       << "\n";
    os << "round_" << s.round << "_chi," << fmt_g17(s.chi) << "\n";
  }
  return os.str();
}

int map_exception(const std::exception& e, std::string& msg) {
  msg = e.what();
  if (dynamic_cast<const InfeasibleGraphError*>(&e)) return kInfeasibleGraph;
  return kConfigError;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["problem"] = {{"family", c.family},     {"n", c.n},
                  {"d_xi", c.d_xi},         {"d_zeta", c.d_zeta},
                  {"r", c.r},               {"r_xi", c.r_xi},
                  {"r_zeta", c.r_zeta},     {"epsilon", c.epsilon},
                  {"center_seed", c.center_seed},
                  {"center_scale", c.center_scale}};
  j["graph"] = {{"p", c.p},
                {"schedule", c.schedule},
                {"churn_rate", c.churn_rate},
                {"seed", c.graph_seed}};
  j["algorithm"] = {{"K", c.K},
                    {"T", c.T},
                    {"sigma", c.sigma},
                    {"oracle_seed", c.oracle_seed},
                    {"eta_x_variant", c.eta_x_variant},
                    {"metric_mode", c.metric_mode},
                    {"timing", c.timing}};
  j["output"] = c.output;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig c;
  const auto& p = j.at("problem");
  p.at("family").get_to(c.family);
  p.at("n").get_to(c.n);
  p.at("d_xi").get_to(c.d_xi);
  p.at("d_zeta").get_to(c.d_zeta);
  p.at("r").get_to(c.r);
  if (p.contains("r_xi")) p.at("r_xi").get_to(c.r_xi);
  if (p.contains("r_zeta")) p.at("r_zeta").get_to(c.r_zeta);
  if (p.contains("epsilon")) p.at("epsilon").get_to(c.epsilon);
  p.at("center_seed").get_to(c.center_seed);
  if (p.contains("center_scale")) p.at("center_scale").get_to(c.center_scale);
  const auto& g = j.at("graph");
  g.at("p").get_to(c.p);
  g.at("schedule").get_to(c.schedule);
  if (g.contains("churn_rate")) g.at("churn_rate").get_to(c.churn_rate);
  g.at("seed").get_to(c.graph_seed);
  const auto& a = j.at("algorithm");
  a.at("K").get_to(c.K);
  a.at("T").get_to(c.T);
  a.at("sigma").get_to(c.sigma);
  a.at("oracle_seed").get_to(c.oracle_seed);
  if (a.contains("eta_x_variant")) a.at("eta_x_variant").get_to(c.eta_x_variant);
  if (a.contains("metric_mode")) a.at("metric_mode").get_to(c.metric_mode);
  if (a.contains("timing")) a.at("timing").get_to(c.timing);
  j.at("output").get_to(c.output);
  return c;
}

RunOutcome execute_run(const ExperimentConfig& cfg) {
  RunOutcome out;
  Pipeline pl;
  try {
    pl = build_pipeline(cfg);
  } catch (const std::exception& e) {
    out.exit_code = map_exception(e, out.error);
    return out;
  }

  const MetricReference ref{&pl.original, pl.x_star, pl.back};
  RunOptions opts = run_options(cfg);

  try {
    if (cfg.metric_mode == "final") {
      // one fresh run per horizon; row j is the final row of the K = j run
      std::vector<RunMetricsRow> rows;
      for (int j = 1; j <= cfg.K; ++j) {
        RunOptions cell = opts;
        cell.K = j;
        RunResult rr = run(pl.solved, pl.graph, cell, &ref);
        if (!rr.finite) {
          out.result = std::move(rr);
          out.exit_code = kNumericalAbort;
          out.error = "non-finite state at round " +
                      std::to_string(out.result.abort_round);
          return out;
        }
        rows.push_back(rr.rows.back());
        if (j == cfg.K) out.result = std::move(rr);
      }
      out.result.rows = std::move(rows);
    } else {
      out.result = run(pl.solved, pl.graph, opts, &ref);
      if (!out.result.finite) {
        out.exit_code = kNumericalAbort;
        out.error = "non-finite state at round " +
                    std::to_string(out.result.abort_round);
        return out;
      }
    }
  } catch (const std::exception& e) {
    out.exit_code = map_exception(e, out.error);
    return out;
  }

  out.metrics_csv = metrics_csv(out.result.rows);
  out.metadata_csv = metadata_csv(cfg, pl, out.result.chi);
  return out;
}

int cmd_run(const ExperimentConfig& cfg) {
  const RunOutcome out = execute_run(cfg);
  if (out.exit_code == kConfigError || out.exit_code == kInfeasibleGraph) {
    std::cerr << "error: " << out.error << "\n";
    return out.exit_code;
  }
  std::ofstream mf(cfg.output);
  if (!mf) {
    std::cerr << "error: cannot write " << cfg.output << "\n";
    return kConfigError;
  }
  mf << out.metrics_csv;
  std::ofstream meta(cfg.output + ".meta.csv");
  meta << out.metadata_csv;
  if (out.exit_code != kOk) std::cerr << "error: " << out.error << "\n";
  return out.exit_code;
}

SweepOutcome execute_sweep(const ExperimentConfig& base,
                           const SweepSpec& spec) {
  SweepOutcome out;
  if (spec.values.empty() || spec.repeats < 1 ||
      (spec.axis != "K" && spec.axis != "T" && spec.axis != "sigma" &&
       spec.axis != "churn_rate")) {
    out.exit_code = kConfigError;
    out.error = "sweep needs axis in {K,T,sigma,churn_rate}, values, repeats >= 1";
    return out;
  }

  struct Cell {
    int exit_code = kOk;
    double dist = 0.0;
    double gap = 0.0;
  };
  const int n_values = static_cast<int>(spec.values.size());
  std::vector<Cell> cells(static_cast<std::size_t>(n_values) * spec.repeats);

  auto cell_config = [&](int vi, int ri) {
    ExperimentConfig cfg = base;
    const double v = spec.values[vi];
    if (spec.axis == "K") cfg.K = static_cast<int>(v);
    if (spec.axis == "T") cfg.T = static_cast<int>(v);
    if (spec.axis == "sigma") cfg.sigma = v;
    if (spec.axis == "churn_rate") {
      cfg.churn_rate = v;
      cfg.schedule = "churn";
    }
    // noise re-seeded per (value, repeat); instance seeds per repeat only, so
    // cells stay paired across the axis
    const std::uint64_t vbits = std::bit_cast<std::uint64_t>(v);
    cfg.oracle_seed = stream_key({base.oracle_seed, vbits, (std::uint64_t)ri});
    cfg.graph_seed = stream_key({base.graph_seed, (std::uint64_t)ri});
    cfg.center_seed = stream_key({base.center_seed, (std::uint64_t)ri});
    return cfg;
  };

  std::atomic<int> next{0};
  const int total = n_values * spec.repeats;
  auto worker = [&]() {
    for (int idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
      const int vi = idx / spec.repeats;
      const int ri = idx % spec.repeats;
      const RunOutcome ro = execute_run(cell_config(vi, ri));
      Cell& c = cells[idx];
      c.exit_code = ro.exit_code;
      if (ro.exit_code == kOk) {
        const RunMetricsRow& last = ro.result.rows.back();
        c.dist = last.dist_to_opt;
        c.gap = last.gap;
      }
    }
  };
  const int n_threads = std::max(1, spec.threads);
  std::vector<std::thread> pool;
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  std::ostringstream os;
  os << "axis,value,repeats,ok,mean_dist,stderr_dist,mean_gap,stderr_gap,"
        "failed\n";
  int worst = kOk;
  for (int vi = 0; vi < n_values; ++vi) {
    int ok = 0, failed = 0;
    double sd = 0.0, sg = 0.0;
    for (int ri = 0; ri < spec.repeats; ++ri) {
      const Cell& c = cells[static_cast<std::size_t>(vi) * spec.repeats + ri];
      if (c.exit_code == kOk) {
        ++ok;
        sd += c.dist;
        sg += c.gap;
      } else {
        ++failed;
        worst = std::max(worst, c.exit_code);
      }
    }
    const double md = ok ? sd / ok : 0.0;
    const double mg = ok ? sg / ok : 0.0;
    double vd = 0.0, vg = 0.0;
    if (ok > 1) {
      for (int ri = 0; ri < spec.repeats; ++ri) {
        const Cell& c =
            cells[static_cast<std::size_t>(vi) * spec.repeats + ri];
        if (c.exit_code != kOk) continue;
        vd += (c.dist - md) * (c.dist - md);
        vg += (c.gap - mg) * (c.gap - mg);
      }
      vd = std::sqrt(vd / (ok - 1)) / std::sqrt(static_cast<double>(ok));
      vg = std::sqrt(vg / (ok - 1)) / std::sqrt(static_cast<double>(ok));
    }
    os << spec.axis << "," << fmt_g17(spec.values[vi]) << "," << spec.repeats
       << "," << ok << "," << fmt_g17(md) << "," << fmt_g17(vd) << ","
       << fmt_g17(mg) << "," << fmt_g17(vg) << "," << failed << "\n";
  }
  out.summary_csv = os.str();
  out.exit_code = worst;
  return out;
}

int cmd_sweep(const ExperimentConfig& cfg, const SweepSpec& spec) {
  const SweepOutcome out = execute_sweep(cfg, spec);
  if (out.exit_code == kConfigError) {
    std::cerr << "error: " << out.error << "\n";
    return out.exit_code;
  }
  std::ofstream f(cfg.output);
  if (!f) {
    std::cerr << "error: cannot write " << cfg.output << "\n";
    return kConfigError;
  }
  f << out.summary_csv;
  return out.exit_code;
}

VerifyOutcome execute_verify(const ExperimentConfig& cfg) {
  VerifyOutcome out;
  Pipeline pl;
  try {
    pl = build_pipeline(cfg);
  } catch (const std::exception& e) {
    out.exit_code = map_exception(e, out.error);
    return out;
  }

  std::ostringstream os;
  os << "check,status,value,threshold\n";
  bool all_ok = true;
  auto row = [&](const std::string& name, double value, double threshold,
                 bool ok) {
    os << name << "," << (ok ? "pass" : "FAIL") << "," << fmt_g17(value) << ","
       << fmt_g17(threshold) << "\n";
    all_ok = all_ok && ok;
  };

  try {
    const double chi = certify_chi(pl.graph, cfg.K);
    out.chi = chi;
    row("chi_certified", chi, std::numeric_limits<double>::infinity(),
        chi >= 1.0);

    double worst_rowsum = 0.0, worst_sparsity = 0.0, worst_probe = 0.0;
    bool rounds_connected = true;
    for (int k = 0; k < cfg.K; ++k) {
      const EdgeList edges = edges_at(pl.graph, k);
      rounds_connected = rounds_connected && is_connected(edges, cfg.n);
      const Matrix w = build_gossip(edges, cfg.n);
      std::vector<char> adj(static_cast<std::size_t>(cfg.n) * cfg.n, 0);
      for (const auto& [u, v] : edges)
        adj[static_cast<std::size_t>(u) * cfg.n + v] =
            adj[static_cast<std::size_t>(v) * cfg.n + u] = 1;
      for (int i = 0; i < cfg.n; ++i) {
        double rs = 0.0, cs = 0.0;
        for (int j = 0; j < cfg.n; ++j) {
          rs += w.at(i, j);
          cs += w.at(j, i);
          if (i != j && !adj[static_cast<std::size_t>(i) * cfg.n + j])
            worst_sparsity = std::max(worst_sparsity, std::abs(w.at(i, j)));
        }
        worst_rowsum = std::max({worst_rowsum, std::abs(rs), std::abs(cs)});
      }
      worst_probe = std::max(
          worst_probe, contraction_probe(w, 50, cfg.graph_seed + k));
      if (pl.graph.schedule_kind == ScheduleKind::kStatic) break;
    }
    row("rounds_connected", rounds_connected ? 1.0 : 0.0, 1.0,
        rounds_connected);
    row("gossip_zero_sums", worst_rowsum, 1e-12, worst_rowsum <= 1e-12);
    row("gossip_sparsity", worst_sparsity, 0.0, worst_sparsity == 0.0);
    row("contraction_probe", worst_probe, 1.0 - 1.0 / chi + 1e-12,
        worst_probe <= 1.0 - 1.0 / chi + 1e-12);

    const std::vector<double> x_solved = solve_l1_instance(pl.solved);
    const Certificate cert = build_certificate(pl.solved, x_solved);
    row("certificate_residual", cert.residual, 1e-9, cert.residual <= 1e-9);
    const double r_solved = pl.solved.r();
    const double r_x = (2.0 / 3.0) * r_solved;
    const double r_yz = 3.0 / r_solved;
    const double incl = inclusion_residual(cert, pl.solved, r_x, r_yz);
    row("inclusion_residual", incl, 1e-8, incl <= 1e-8);
    const CertificateBounds b = certificate_norm_bounds(cert, pl.solved, r_x);
    row("lemma_bound_w", b.w_sq, b.w_lim, b.w_sq <= b.w_lim);
    row("lemma_bound_y", b.y_sq, b.y_lim, b.y_sq <= b.y_lim);
    row("lemma_bound_z", b.z_sq, b.z_lim, b.z_sq <= b.z_lim);

    // 1-D oracle spot check against a coarse grid
    double worst_grid = 0.0;
    const CounterStream rng(stream_key({cfg.center_seed, 0x5644u}));
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> centers(3);
      for (int i = 0; i < 3; ++i)
        centers[i] = 2.0 * rng.uniform(trial * 8 + i) - 1.0;
      const double rr = 0.1 + rng.uniform(trial * 8 + 4);
      const double u = solve_1d_exact(centers, rr);
      double best = 1e300, best_u = 0.0;
      const int grid = 20001;
      for (int gidx = 0; gidx < grid; ++gidx) {
        const double ug = -2.0 + 4.0 * gidx / (grid - 1);
        double val = 0.5 * rr * ug * ug;
        for (double cc : centers) val += std::abs(ug - cc) / 3.0;
        if (val < best) {
          best = val;
          best_u = ug;
        }
      }
      worst_grid = std::max(worst_grid, std::abs(u - best_u));
    }
    row("oracle_grid_agreement", worst_grid, 4.0 / 20000 + 1e-12,
        worst_grid <= 4.0 / 20000 + 1e-12);
  } catch (const std::exception& e) {
    out.error = e.what();
    out.exit_code = kVerificationFailure;
    out.table_csv = os.str();
    return out;
  }

  out.table_csv = os.str();
  out.exit_code = all_ok ? kOk : kVerificationFailure;
  return out;
}

int cmd_verify(const ExperimentConfig& cfg) {
  const VerifyOutcome out = execute_verify(cfg);
  if (!out.error.empty()) std::cerr << "error: " << out.error << "\n";
  std::cout << out.table_csv;
  return out.exit_code;
}

}  // namespace tvfb
