// Command-line front end: run a single experiment, sweep one axis, or check
// the verification oracles. Configuration comes from a JSON file and can be
// overridden by flags; identical configurations produce identical outputs.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tvfb/harness.hpp"

namespace {

struct Overrides {
  std::string config_path;
  tvfb::ExperimentConfig cfg;
};

void add_common_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config_path, "JSON config file");
  app->add_option("--family", o.cfg.family, "l1_saddle | l1_convex | zero");
  app->add_option("--nodes", o.cfg.n, "number of nodes");
  app->add_option("--d-xi", o.cfg.d_xi, "min-block dimension");
  app->add_option("--d-zeta", o.cfg.d_zeta, "max-block dimension");
  app->add_option("--reg", o.cfg.r, "regularization r");
  app->add_option("--r-xi", o.cfg.r_xi, "asymmetric min-block regularization");
  app->add_option("--r-zeta", o.cfg.r_zeta,
                  "asymmetric max-block regularization");
  app->add_option("--epsilon", o.cfg.epsilon, "target accuracy for r = 0");
  app->add_option("--center-seed", o.cfg.center_seed, "problem center seed");
  app->add_option("--center-scale", o.cfg.center_scale, "center box scale");
  app->add_option("--edge-prob", o.cfg.p, "Erdos-Renyi edge probability");
  app->add_option("--graph-schedule", o.cfg.schedule, "static | churn");
  app->add_option("--churn-rate", o.cfg.churn_rate, "edges toggled per round");
  app->add_option("--graph-seed", o.cfg.graph_seed, "graph seed");
  app->add_option("-K,--outer", o.cfg.K, "outer iterations");
  app->add_option("-T,--inner", o.cfg.T, "inner iterations per round");
  app->add_option("--sigma", o.cfg.sigma, "oracle noise level");
  app->add_option("--oracle-seed", o.cfg.oracle_seed, "oracle noise seed");
  app->add_option("--eta-x-variant", o.cfg.eta_x_variant, "per_k | literal");
  app->add_option("--metric-mode", o.cfg.metric_mode, "anytime | final");
  app->add_flag("--timing", o.cfg.timing,
                "record wall_ns (output is no longer reproducible)");
  app->add_option("-o,--output", o.cfg.output, "output CSV path");
}

// File config first, then flag overrides on top.
int resolve_config(const CLI::App* sub, Overrides& o) {
  if (o.config_path.empty()) return 0;
  std::ifstream f(o.config_path);
  if (!f) {
    std::cerr << "error: cannot read config " << o.config_path << "\n";
    return tvfb::kConfigError;
  }
  std::stringstream buf;
  buf << f.rdbuf();
  tvfb::ExperimentConfig file_cfg;
  try {
    file_cfg = tvfb::config_from_json(buf.str());
  } catch (const std::exception& e) {
    std::cerr << "error: bad config: " << e.what() << "\n";
    return tvfb::kConfigError;
  }
  const tvfb::ExperimentConfig flag_cfg = o.cfg;
  o.cfg = file_cfg;
  auto keep = [&](const std::string& name) { return sub->count(name) > 0; };
  if (keep("--family")) o.cfg.family = flag_cfg.family;
  if (keep("--nodes")) o.cfg.n = flag_cfg.n;
  if (keep("--d-xi")) o.cfg.d_xi = flag_cfg.d_xi;
  if (keep("--d-zeta")) o.cfg.d_zeta = flag_cfg.d_zeta;
  if (keep("--reg")) o.cfg.r = flag_cfg.r;
  if (keep("--r-xi")) o.cfg.r_xi = flag_cfg.r_xi;
  if (keep("--r-zeta")) o.cfg.r_zeta = flag_cfg.r_zeta;
  if (keep("--epsilon")) o.cfg.epsilon = flag_cfg.epsilon;
  if (keep("--center-seed")) o.cfg.center_seed = flag_cfg.center_seed;
  if (keep("--center-scale")) o.cfg.center_scale = flag_cfg.center_scale;
  if (keep("--edge-prob")) o.cfg.p = flag_cfg.p;
  if (keep("--graph-schedule")) o.cfg.schedule = flag_cfg.schedule;
  if (keep("--churn-rate")) o.cfg.churn_rate = flag_cfg.churn_rate;
  if (keep("--graph-seed")) o.cfg.graph_seed = flag_cfg.graph_seed;
  if (keep("--outer")) o.cfg.K = flag_cfg.K;
  if (keep("--inner")) o.cfg.T = flag_cfg.T;
  if (keep("--sigma")) o.cfg.sigma = flag_cfg.sigma;
  if (keep("--oracle-seed")) o.cfg.oracle_seed = flag_cfg.oracle_seed;
  if (keep("--eta-x-variant")) o.cfg.eta_x_variant = flag_cfg.eta_x_variant;
  if (keep("--metric-mode")) o.cfg.metric_mode = flag_cfg.metric_mode;
  if (keep("--timing")) o.cfg.timing = flag_cfg.timing;
  if (keep("--output")) o.cfg.output = flag_cfg.output;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized forward-backward solver harness"};
  app.require_subcommand(1);

  Overrides run_o, sweep_o, verify_o;
  CLI::App* run = app.add_subcommand("run", "execute one configuration");
  add_common_flags(run, run_o);

  CLI::App* sweep = app.add_subcommand("sweep", "cross product over one axis");
  add_common_flags(sweep, sweep_o);
  tvfb::SweepSpec spec;
  sweep->add_option("--axis", spec.axis, "K | T | sigma | churn_rate")
      ->required();
  sweep->add_option("--values", spec.values, "axis values")->required();
  sweep->add_option("--repeats", spec.repeats, "repeats per cell");
  sweep->add_option("--threads", spec.threads, "worker threads");

  CLI::App* verify =
      app.add_subcommand("verify", "oracle and certificate checks");
  add_common_flags(verify, verify_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : tvfb::kConfigError;
  }

  if (run->parsed()) {
    if (int rc = resolve_config(run, run_o)) return rc;
    return tvfb::cmd_run(run_o.cfg);
  }
  if (sweep->parsed()) {
    if (int rc = resolve_config(sweep, sweep_o)) return rc;
    return tvfb::cmd_sweep(sweep_o.cfg, spec);
  }
  if (int rc = resolve_config(verify, verify_o)) return rc;
  return tvfb::cmd_verify(verify_o.cfg);
}
