#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "tvfb/harness.hpp"

using namespace tvfb;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.d_xi = 2;
  cfg.d_zeta = 2;
  cfg.r = 0.5;
  cfg.p = 0.7;
  cfg.K = 6;
  cfg.T = 3;
  cfg.sigma = 0.2;
  return cfg;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  ExperimentConfig cfg = small_config();
  cfg.family = "l1_convex";
  cfg.d_zeta = 0;
  cfg.schedule = "churn";
  cfg.churn_rate = 0.15;
  cfg.epsilon = 0.025;
  cfg.eta_x_variant = "literal";
  cfg.metric_mode = "final";
  cfg.center_scale = 1.75;
  cfg.output = "some/dir/out.csv";
  cfg.r = 0.12345678901234567;  // full double precision must survive
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back == cfg);
}

TEST_CASE("degenerate configs are rejected without output") {
  ExperimentConfig cfg = small_config();
  cfg.K = 0;
  const RunOutcome out = execute_run(cfg);
  CHECK(out.exit_code == kConfigError);
  CHECK(out.metrics_csv.empty());

  ExperimentConfig bad_family = small_config();
  bad_family.family = "quadratic";
  CHECK(execute_run(bad_family).exit_code == kConfigError);

  ExperimentConfig r0 = small_config();
  r0.r = 0.0;  // monotone without a target accuracy
  CHECK(execute_run(r0).exit_code == kConfigError);
}

TEST_CASE("infeasible graphs map to their own exit code") {
  ExperimentConfig cfg = small_config();
  cfg.n = 40;
  cfg.p = 1e-4;
  CHECK(execute_run(cfg).exit_code == kInfeasibleGraph);
}

TEST_CASE("numerical blowup maps to the abort code") {
  ExperimentConfig cfg = small_config();
  cfg.sigma = std::numeric_limits<double>::infinity();
  CHECK(execute_run(cfg).exit_code == kNumericalAbort);
}

TEST_CASE("metrics CSV has the pinned schema and one row per round") {
  const RunOutcome out = execute_run(small_config());
  REQUIRE(out.exit_code == kOk);
  std::istringstream is(out.metrics_csv);
  std::string header;
  std::getline(is, header);
  CHECK(header == "k,t_total,dist_to_opt,gap,consensus_err,wall_ns");
  CHECK(count_lines(out.metrics_csv) == 1 + 6);
  // default runs do not measure wall time, keeping bytes reproducible
  std::string line;
  std::getline(is, line);
  CHECK(line.substr(line.size() - 2) == ",0");
}

TEST_CASE("identical configs produce byte-identical outputs") {
  const RunOutcome a = execute_run(small_config());
  const RunOutcome b = execute_run(small_config());
  REQUIRE(a.exit_code == kOk);
  CHECK(a.metrics_csv == b.metrics_csv);
  CHECK(a.metadata_csv == b.metadata_csv);
}

TEST_CASE("metadata reports the certified chi and spectral rows") {
  const RunOutcome out = execute_run(small_config());
  REQUIRE(out.exit_code == kOk);
  CHECK(out.metadata_csv.find("chi,") != std::string::npos);
  CHECK(out.metadata_csv.find("round_0_lambda_max,") != std::string::npos);
  CHECK(out.metadata_csv.find("metric_mode,anytime") != std::string::npos);
}

TEST_CASE("anytime rows equal fresh final-mode runs on static graphs") {
  ExperimentConfig anytime = small_config();
  ExperimentConfig final_mode = small_config();
  final_mode.metric_mode = "final";
  const RunOutcome a = execute_run(anytime);
  const RunOutcome f = execute_run(final_mode);
  REQUIRE(a.exit_code == kOk);
  REQUIRE(f.exit_code == kOk);
  CHECK(a.metrics_csv == f.metrics_csv);
}

TEST_CASE("step-size variant changes the trajectory") {
  ExperimentConfig lit = small_config();
  lit.eta_x_variant = "literal";
  const RunOutcome a = execute_run(small_config());
  const RunOutcome b = execute_run(lit);
  REQUIRE(b.exit_code == kOk);
  CHECK(a.metrics_csv != b.metrics_csv);
}

TEST_CASE("asymmetric and monotone pipelines run end to end") {
  ExperimentConfig asym = small_config();
  asym.r_xi = 4.0;
  asym.r_zeta = 1.0;
  const RunOutcome a = execute_run(asym);
  REQUIRE(a.exit_code == kOk);
  CHECK(count_lines(a.metrics_csv) == 1 + asym.K);

  ExperimentConfig mono = small_config();
  mono.r = 0.0;
  mono.epsilon = 0.05;
  const RunOutcome m = execute_run(mono);
  REQUIRE(m.exit_code == kOk);
  CHECK(m.metadata_csv.find("r_solved,") != std::string::npos);
}

TEST_CASE("sweep summary: stderr is zero for single repeats") {
  SweepSpec spec;
  spec.axis = "T";
  spec.values = {2, 4};
  spec.repeats = 1;
  const SweepOutcome out = execute_sweep(small_config(), spec);
  REQUIRE(out.exit_code == kOk);
  std::istringstream is(out.summary_csv);
  std::string header, row;
  std::getline(is, header);
  CHECK(header ==
        "axis,value,repeats,ok,mean_dist,stderr_dist,mean_gap,stderr_gap,"
        "failed");
  int rows = 0;
  while (std::getline(is, row)) {
    ++rows;
    std::istringstream cells(row);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    REQUIRE(parts.size() == 9);
    CHECK(parts[0] == "T");
    CHECK(parts[3] == "1");
    CHECK(parts[5] == "0");
    CHECK(parts[7] == "0");
    CHECK(parts[8] == "0");
  }
  CHECK(rows == 2);
}

TEST_CASE("sweep is order-deterministic under parallel execution") {
  SweepSpec spec;
  spec.axis = "sigma";
  spec.values = {0.0, 0.3};
  spec.repeats = 4;
  spec.threads = 2;
  const SweepOutcome a = execute_sweep(small_config(), spec);
  const SweepOutcome b = execute_sweep(small_config(), spec);
  spec.threads = 1;
  const SweepOutcome serial = execute_sweep(small_config(), spec);
  REQUIRE(a.exit_code == kOk);
  CHECK(a.summary_csv == b.summary_csv);
  CHECK(a.summary_csv == serial.summary_csv);
}

namespace {

struct SummaryRow {
  double value = 0.0;
  double mean_gap = 0.0;
  double stderr_gap = 0.0;
};

std::vector<SummaryRow> parse_summary(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  std::vector<SummaryRow> rows;
  while (std::getline(is, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(cells, cell, ',')) parts.push_back(cell);
    rows.push_back(
        {std::stod(parts[1]), std::stod(parts[6]), std::stod(parts[7])});
  }
  return rows;
}

}  // namespace

TEST_CASE("deterministic sweep over K shows a strictly decreasing mean gap") {
  ExperimentConfig cfg = small_config();
  cfg.sigma = 0.0;
  cfg.r = 0.3;
  SweepSpec spec;
  spec.axis = "K";
  spec.values = {40, 80, 160};
  spec.repeats = 3;
  const SweepOutcome out = execute_sweep(cfg, spec);
  REQUIRE(out.exit_code == kOk);
  const std::vector<SummaryRow> rows = parse_summary(out.summary_csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mean_gap > rows[1].mean_gap);
  CHECK(rows[1].mean_gap > rows[2].mean_gap);
}

TEST_CASE("noise can only hurt the mean gap") {
  SweepSpec spec;
  spec.axis = "sigma";
  spec.values = {0.0, 0.5};
  spec.repeats = 8;
  const SweepOutcome out = execute_sweep(small_config(), spec);
  REQUIRE(out.exit_code == kOk);
  const std::vector<SummaryRow> rows = parse_summary(out.summary_csv);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean_gap <= rows[1].mean_gap + 2.0 * rows[1].stderr_gap);
}

TEST_CASE("churn-rate axis forces the churn schedule per cell") {
  SweepSpec spec;
  spec.axis = "churn_rate";
  spec.values = {0.0, 0.3};
  spec.repeats = 2;
  const SweepOutcome out = execute_sweep(small_config(), spec);
  REQUIRE(out.exit_code == kOk);
  CHECK(parse_summary(out.summary_csv).size() == 2);
}

TEST_CASE("sweep records failed cells and keeps going") {
  SweepSpec spec;
  spec.axis = "K";
  spec.values = {0, 3};  // K = 0 cells fail with a config error
  spec.repeats = 2;
  const SweepOutcome out = execute_sweep(small_config(), spec);
  CHECK(out.exit_code == kConfigError);
  std::istringstream is(out.summary_csv);
  std::string header, bad_row, good_row;
  std::getline(is, header);
  std::getline(is, bad_row);
  std::getline(is, good_row);
  CHECK(bad_row.substr(bad_row.size() - 2) == ",2");  // both repeats failed
  CHECK(good_row.substr(good_row.size() - 2) == ",0");

  SweepSpec bad_axis;
  bad_axis.axis = "p";
  bad_axis.values = {0.1};
  CHECK(execute_sweep(small_config(), bad_axis).exit_code == kConfigError);
}

TEST_CASE("verify passes on sane configs and reports chi 1 on complete graphs") {
  ExperimentConfig cfg = small_config();
  cfg.K = 4;
  const VerifyOutcome out = execute_verify(cfg);
  CHECK(out.exit_code == kOk);
  CHECK(out.table_csv.find("FAIL") == std::string::npos);
  CHECK(out.table_csv.find("inclusion_residual,pass") != std::string::npos);

  ExperimentConfig complete = cfg;
  complete.p = 1.0;
  const VerifyOutcome vc = execute_verify(complete);
  CHECK(vc.exit_code == kOk);
  CHECK(vc.chi == doctest::Approx(1.0).epsilon(1e-9));

  ExperimentConfig infeasible = cfg;
  infeasible.n = 40;
  infeasible.p = 1e-4;
  CHECK(execute_verify(infeasible).exit_code == kInfeasibleGraph);
}

TEST_CASE("cmd_run writes the metrics and metadata files") {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "tvfb_harness_test";
  std::filesystem::create_directories(dir);
  ExperimentConfig cfg = small_config();
  cfg.output = (dir / "out.csv").string();
  CHECK(cmd_run(cfg) == kOk);
  CHECK(std::filesystem::exists(dir / "out.csv"));
  CHECK(std::filesystem::exists(dir / "out.csv.meta.csv"));
  std::ifstream f(dir / "out.csv");
  std::string header;
  std::getline(f, header);
  CHECK(header == "k,t_total,dist_to_opt,gap,consensus_err,wall_ns");
  std::filesystem::remove_all(dir);
}
