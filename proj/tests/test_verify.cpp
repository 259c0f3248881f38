#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "tvfb/gossip.hpp"
#include "tvfb/netgraph.hpp"
#include "tvfb/solver.hpp"
#include "tvfb/verify.hpp"

using namespace tvfb;

namespace {

ProblemInstance random_small_saddle(std::uint64_t seed, double r) {
  const CounterStream rng(stream_key({seed, 0x494Eu}));
  const int n = 2 + static_cast<int>(rng.below(0, 4));
  const int dx = 1 + static_cast<int>(rng.below(1, 3));
  const int dz = 1 + static_cast<int>(rng.below(2, 3));
  return make_l1_saddle(n, dx, dz, r, seed * 31 + 5);
}

double grid_minimize_1d(std::span<const double> centers, double r, int grid,
                        double lo, double hi) {
  double best = 1e300, best_u = lo;
  for (int i = 0; i < grid; ++i) {
    const double u = lo + (hi - lo) * i / (grid - 1);
    double val = 0.5 * r * u * u;
    for (double c : centers) val += std::abs(u - c) / centers.size();
    if (val < best) {
      best = val;
      best_u = u;
    }
  }
  return best_u;
}

EdgeList complete_edges(int n) {
  EdgeList e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

}  // namespace

TEST_CASE("1-D oracle on hand-checked instances") {
  CHECK(solve_1d_exact(std::vector<double>{-1.0, 1.0}, 1.0) == 0.0);
  CHECK(solve_1d_exact(std::vector<double>{2.0}, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(solve_1d_exact(std::vector<double>{0.0, 0.0, 10.0}, 0.0) == 0.0);
  // lower median on even counts
  CHECK(solve_1d_exact(std::vector<double>{1.0, 2.0, 3.0, 4.0}, 0.0) == 2.0);
  CHECK_THROWS_AS(solve_1d_exact(std::vector<double>{}, 0.0),
                  std::invalid_argument);
  CHECK(solve_1d_exact(std::vector<double>{}, 2.0) == 0.0);
}

TEST_CASE("1-D oracle agrees with grid search on random instances") {
  for (int trial = 0; trial < 100; ++trial) {
    const CounterStream rng(stream_key({(std::uint64_t)trial, 0x3144u}));
    const int n = 1 + static_cast<int>(rng.below(0, 6));
    std::vector<double> centers(n);
    for (int i = 0; i < n; ++i) centers[i] = 2.0 * rng.uniform(i + 1) - 1.0;
    const double r = 0.05 + 2.0 * rng.uniform(100);
    const double u = solve_1d_exact(centers, r);
    const int grid = 100001;
    const double ug = grid_minimize_1d(centers, r, grid, -2.0, 2.0);
    CHECK(std::abs(u - ug) <= 4.0 / (grid - 1) + 1e-12);
  }
}

TEST_CASE("instance oracle matches the coordinate oracle and symmetry") {
  // identical centers at every node: solution is the shrunk center
  const ProblemInstance same = make_l1_saddle_from_centers(
      {{0.7, -0.3}, {0.7, -0.3}}, {{0.4}, {0.4}}, 0.5);
  const std::vector<double> x_same = solve_l1_instance(same);
  CHECK(x_same[0] ==
        doctest::Approx(solve_1d_exact(std::vector<double>{0.7, 0.7}, 0.5))
            .epsilon(1e-15));
  CHECK(x_same[2] ==
        doctest::Approx(solve_1d_exact(std::vector<double>{0.4, 0.4}, 0.5))
            .epsilon(1e-15));

  // huge regularization pins the solution to the origin
  const ProblemInstance heavy =
      make_l1_saddle_from_centers({{0.9}}, {{-0.8}}, 2e7);
  for (double v : solve_l1_instance(heavy)) CHECK(std::abs(v) <= 1e-5);

  // symmetric centers cancel
  const ProblemInstance sym = make_l1_saddle_from_centers(
      {{1.0}, {-1.0}}, {{0.25}, {-0.25}}, 1.0);
  for (double v : solve_l1_instance(sym)) CHECK(v == 0.0);
}

TEST_CASE("certificate on the one-node instance") {
  const ProblemInstance pb = make_l1_convex_from_centers({{2.0}}, 1.0);
  const std::vector<double> x_star = solve_l1_instance(pb);
  const Certificate cert = build_certificate(pb, x_star);
  CHECK(cert.delta[0][0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cert.residual <= 1e-15);
  CHECK(cert.y_star.block(0)[0] ==
        doctest::Approx(-1.0 + (2.0 / 3.0) * 1.0).epsilon(1e-15));
}

TEST_CASE("certificate sign pattern on the symmetric two-node instance") {
  const ProblemInstance pb =
      make_l1_convex_from_centers({{1.0}, {-1.0}}, 1.0);
  const std::vector<double> x_star = solve_l1_instance(pb);
  REQUIRE(x_star[0] == 0.0);
  const Certificate cert = build_certificate(pb, x_star);
  CHECK(cert.delta[0][0] == doctest::Approx(-1.0));
  CHECK(cert.delta[1][0] == doctest::Approx(1.0));
  CHECK(cert.residual == 0.0);
  const std::vector<double> zsum = block_sum(cert.z_star);
  CHECK(std::abs(zsum[0]) <= 1e-15);
}

TEST_CASE("certificates satisfy the inclusion residual and norm bounds") {
  int built = 0;
  for (double r : {1e-3, 0.1, 1.0}) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const ProblemInstance pb = random_small_saddle(seed + 900, r);
      const std::vector<double> x_star = solve_l1_instance(pb);
      const Certificate cert = build_certificate(pb, x_star);
      ++built;
      CHECK(cert.residual <= 1e-9);
      const double r_x = (2.0 / 3.0) * r;
      const double r_yz = 3.0 / r;
      CHECK(inclusion_residual(cert, pb, r_x, r_yz) <= 1e-8);
      const CertificateBounds b = certificate_norm_bounds(cert, pb, r_x);
      CHECK(b.ok());
      const std::vector<double> zsum = block_sum(cert.z_star);
      for (double v : zsum) CHECK(std::abs(v) <= 1e-9);
    }
  }
  CHECK(built == 24);
}

TEST_CASE("perturbed multipliers are detected") {
  const ProblemInstance pb = make_l1_saddle_from_centers(
      {{0.5}, {-0.25}}, {{0.75}, {-0.5}}, 1.0);
  const std::vector<double> x_star = solve_l1_instance(pb);
  Certificate cert = build_certificate(pb, x_star);
  const double r_x = (2.0 / 3.0) * pb.r();
  const double r_yz = 3.0 / pb.r();
  REQUIRE(inclusion_residual(cert, pb, r_x, r_yz) <= 1e-8);
  cert.y_star.block(1)[0] += 0.1;
  CHECK(inclusion_residual(cert, pb, r_x, r_yz) >= 0.05);
  // mismatched split parameters are refused
  CHECK_THROWS_AS(inclusion_residual(cert, pb, r_x, 2.9 / pb.r()),
                  std::invalid_argument);
}

TEST_CASE("contraction probe") {
  const Matrix p5 = build_gossip(complete_edges(5), 5);
  CHECK(contraction_probe(p5, 25, 3) <= 1e-28);

  const Matrix w2 = build_gossip({{0, 1}}, 2);
  CHECK(contraction_probe(w2, 25, 3) <= 1e-28);

  const TimeVaryingGraph g = generate_erdos_renyi(15, 0.3, 42);
  const Matrix w = build_gossip(g.base_edges, 15);
  const double chi = certify_chi(g, 1);
  CHECK(contraction_probe(w, 200, 7) <= 1.0 - 1.0 / chi + 1e-12);
}

TEST_CASE("oracle solutions beat random perturbations") {
  int instances = 0;
  for (double r : {1e-3, 0.1, 1.0}) {
    for (std::uint64_t seed = 0; seed < 17 && instances < 50; ++seed) {
      const ProblemInstance pb = random_small_saddle(seed + 300, r);
      const std::vector<double> x_star = solve_l1_instance(pb);
      ++instances;
      const CounterStream rng(stream_key({seed, 0x5045u}));
      for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x = x_star;
        const double scale = std::pow(10.0, -6.0 * rng.uniform(trial * 50));
        for (int j = 0; j < pb.dim(); ++j)
          x[j] += scale * (2.0 * rng.uniform(trial * 50 + j + 1) - 1.0);
        CHECK(gap(pb, x, x_star) >= -1e-10);
      }
    }
  }
  CHECK(instances == 50);
}

TEST_CASE("solver converges to the oracle solution on the small fixture") {
  const ProblemInstance pb = make_l1_saddle_from_centers(
      {{-1.0}, {0.5}, {1.0}}, {{0.3}, {-0.7}, {0.2}}, 1.0);
  TimeVaryingGraph g;
  g.n_nodes = 3;
  g.base_edges = {{0, 1}, {1, 2}};

  const std::vector<double> x_star = solve_l1_instance(pb);
  const MetricReference ref{&pb, x_star, CoordinateMap{1, 1, 1.0, 1.0}};

  RunOptions opts;
  opts.T = 50;
  opts.sigma = 0.0;

  opts.K = 10;
  const RunResult coarse = run(pb, g, opts, &ref);
  opts.K = 400;
  const RunResult fine = run(pb, g, opts, &ref);
  REQUIRE(coarse.finite);
  REQUIRE(fine.finite);
  CHECK(fine.rows.back().dist_to_opt <= 0.05 * coarse.rows.back().dist_to_opt);
}
