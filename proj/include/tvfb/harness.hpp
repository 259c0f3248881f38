#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvfb/solver.hpp"

namespace tvfb {

// Exit codes shared by the CLI and the library pipelines.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kInfeasibleGraph = 3,
  kNumericalAbort = 4,
  kVerificationFailure = 5,
};

// Full experiment description. Every random choice has an explicit seed and
// the struct round-trips losslessly through JSON.
struct ExperimentConfig {
  // problem
  std::string family = "l1_saddle";  // l1_saddle | l1_convex | zero
  int n = 15;
  int d_xi = 4;
  int d_zeta = 4;
  double r = 1e-3;
  double r_xi = 0.0;    // both > 0 selects the asymmetric path
  double r_zeta = 0.0;
  double epsilon = 0.0;  // target accuracy for the r = 0 reduction
  std::uint64_t center_seed = 7;
  double center_scale = 1.0;
  // graph
  double p = 0.3;
  std::string schedule = "static";  // static | churn
  double churn_rate = 0.2;
  std::uint64_t graph_seed = 42;
  // algorithm
  int K = 30;
  int T = 10;
  double sigma = 0.1;
  std::uint64_t oracle_seed = 1;
  std::string eta_x_variant = "per_k";  // per_k | literal
  std::string metric_mode = "anytime";  // anytime | final
  bool timing = false;                  // measured wall_ns breaks reproducibility
  // output
  std::string output = "metrics.csv";

  bool operator==(const ExperimentConfig&) const = default;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

struct RunOutcome {
  int exit_code = kOk;
  std::string error;
  std::string metrics_csv;
  std::string metadata_csv;
  RunResult result;
};

// generate graph -> certify chi -> build problem -> transform -> solve ->
// metrics against the exact solution.
RunOutcome execute_run(const ExperimentConfig& cfg);

// Writes metrics to cfg.output and metadata next to it (<output>.meta.csv).
int cmd_run(const ExperimentConfig& cfg);

struct SweepSpec {
  std::string axis;  // K | T | sigma | churn_rate
  std::vector<double> values;
  int repeats = 10;
  int threads = 2;
};

struct SweepOutcome {
  int exit_code = kOk;
  std::string error;
  std::string summary_csv;
};

SweepOutcome execute_sweep(const ExperimentConfig& cfg, const SweepSpec& spec);
int cmd_sweep(const ExperimentConfig& cfg, const SweepSpec& spec);

struct VerifyOutcome {
  int exit_code = kOk;
  std::string error;
  std::string table_csv;  // check,status,value,threshold
  double chi = 1.0;
};

VerifyOutcome execute_verify(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg);

}  // namespace tvfb
