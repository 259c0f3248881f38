#include "tvfb/problems.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "tvfb/rng.hpp"

namespace tvfb {

namespace {

constexpr std::uint64_t kTagCenters = 0x4354u;
constexpr std::uint64_t kTagNoise = 0x4E4Fu;

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double subgrad_bound(const ProblemInstance& pb) {
  if (pb.family == ProblemFamily::kZero) return 1.0;
  return std::sqrt(pb.w_xi * pb.w_xi * pb.d_xi +
                   pb.w_zeta * pb.w_zeta * pb.d_zeta);
}

// Box-hull over-estimate: each coordinate of the solution lies between 0 and
// the farthest center (regularization only shrinks toward 0).
double solution_bound(const ProblemInstance& pb) {
  if (pb.family == ProblemFamily::kZero) return 0.0;
  double s = 0.0;
  for (int j = 0; j < pb.d_xi; ++j) {
    double m = 0.0;
    for (int i = 0; i < pb.n_nodes; ++i)
      m = std::max(m, std::abs(pb.centers_xi[i][j]));
    s += m * m;
  }
  for (int j = 0; j < pb.d_zeta; ++j) {
    double m = 0.0;
    for (int i = 0; i < pb.n_nodes; ++i)
      m = std::max(m, std::abs(pb.centers_zeta[i][j]));
    s += m * m;
  }
  return std::sqrt(s);
}

void finalize_bounds(ProblemInstance& pb) {
  pb.M = subgrad_bound(pb);
  pb.R_bound = solution_bound(pb);
}

std::vector<std::vector<double>> draw_centers(int n, int d,
                                              std::uint64_t seed,
                                              std::uint64_t block_tag,
                                              double scale) {
  std::vector<std::vector<double>> c(n, std::vector<double>(d));
  const CounterStream rng(stream_key({seed, kTagCenters, block_tag}));
  std::uint64_t ctr = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      c[i][j] = scale * (2.0 * rng.uniform(ctr++) - 1.0);
  return c;
}

void check_point(const ProblemInstance& pb, std::span<const double> x) {
  if (static_cast<int>(x.size()) != pb.dim())
    throw std::invalid_argument("point dimension does not match problem");
}

double l1_dist(std::span<const double> x, const std::vector<double>& c) {
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += std::abs(x[j] - c[j]);
  return s;
}

double sqnorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

double ProblemInstance::r() const {
  if (!symmetric())
    throw std::logic_error("asymmetric instance has no single r");
  return r_xi;
}

ProblemInstance make_l1_saddle(int n, int d_xi, int d_zeta, double r,
                               std::uint64_t center_seed, double center_scale) {
  ProblemInstance pb;
  pb.kind = ProblemKind::kSaddlePoint;
  pb.n_nodes = n;
  pb.d_xi = d_xi;
  pb.d_zeta = d_zeta;
  pb.r_xi = pb.r_zeta = r;
  pb.centers_xi = draw_centers(n, d_xi, center_seed, 0, center_scale);
  pb.centers_zeta = draw_centers(n, d_zeta, center_seed, 1, center_scale);
  finalize_bounds(pb);
  return pb;
}

ProblemInstance make_l1_convex(int n, int d, double r,
                               std::uint64_t center_seed, double center_scale) {
  ProblemInstance pb;
  pb.kind = ProblemKind::kConvexMin;
  pb.n_nodes = n;
  pb.d_xi = d;
  pb.d_zeta = 0;
  pb.r_xi = pb.r_zeta = r;
  pb.centers_xi = draw_centers(n, d, center_seed, 0, center_scale);
  pb.centers_zeta.assign(n, {});
  finalize_bounds(pb);
  return pb;
}

ProblemInstance make_l1_saddle_from_centers(
    std::vector<std::vector<double>> centers_xi,
    std::vector<std::vector<double>> centers_zeta, double r) {
  ProblemInstance pb;
  pb.kind = ProblemKind::kSaddlePoint;
  pb.n_nodes = static_cast<int>(centers_xi.size());
  pb.d_xi = pb.n_nodes ? static_cast<int>(centers_xi[0].size()) : 0;
  pb.d_zeta = pb.n_nodes ? static_cast<int>(centers_zeta[0].size()) : 0;
  pb.r_xi = pb.r_zeta = r;
  pb.centers_xi = std::move(centers_xi);
  pb.centers_zeta = std::move(centers_zeta);
  finalize_bounds(pb);
  return pb;
}

ProblemInstance make_l1_convex_from_centers(
    std::vector<std::vector<double>> centers, double r) {
  ProblemInstance pb;
  pb.kind = ProblemKind::kConvexMin;
  pb.n_nodes = static_cast<int>(centers.size());
  pb.d_xi = pb.n_nodes ? static_cast<int>(centers[0].size()) : 0;
  pb.d_zeta = 0;
  pb.r_xi = pb.r_zeta = r;
  pb.centers_xi = std::move(centers);
  pb.centers_zeta.assign(pb.n_nodes, {});
  finalize_bounds(pb);
  return pb;
}

ProblemInstance make_zero_problem(int n, int d_xi, int d_zeta, double r) {
  ProblemInstance pb;
  pb.kind = d_zeta > 0 ? ProblemKind::kSaddlePoint : ProblemKind::kConvexMin;
  pb.family = ProblemFamily::kZero;
  pb.n_nodes = n;
  pb.d_xi = d_xi;
  pb.d_zeta = d_zeta;
  pb.r_xi = pb.r_zeta = r;
  pb.centers_xi.assign(n, std::vector<double>(d_xi, 0.0));
  pb.centers_zeta.assign(n, std::vector<double>(d_zeta, 0.0));
  finalize_bounds(pb);
  return pb;
}

std::vector<double> query_deterministic(const OperatorOracle& o, int node,
                                        std::span<const double> x) {
  const ProblemInstance& pb = *o.problem;
  check_point(pb, x);
  std::vector<double> g(pb.dim(), 0.0);
  if (pb.family == ProblemFamily::kZero) return g;
  // T_i = (d_xi f_i, -d_zeta f_i); for the L1 family both blocks reduce to
  // the same signed selection, 0 at kinks.
  for (int j = 0; j < pb.d_xi; ++j)
    g[j] = pb.w_xi * sign0(x[j] - pb.centers_xi[node][j]);
  for (int j = 0; j < pb.d_zeta; ++j)
    g[pb.d_xi + j] =
        pb.w_zeta * sign0(x[pb.d_xi + j] - pb.centers_zeta[node][j]);
  return g;
}

std::vector<double> query_stochastic(const OperatorOracle& o, int node,
                                     std::span<const double> x, int k, int t) {
  std::vector<double> g = query_deterministic(o, node, x);
  if (o.noise_sigma == 0.0) return g;
  const int d = static_cast<int>(g.size());
  const double coord_sd = o.noise_sigma / std::sqrt(static_cast<double>(d));
  const CounterStream rng(stream_key({o.rng_seed, kTagNoise,
                                      (std::uint64_t)node, (std::uint64_t)k,
                                      (std::uint64_t)t}));
  for (int j = 0; j < d; ++j) g[j] += coord_sd * rng.normal(j);
  return g;
}

double evaluate_p(const ProblemInstance& pb, std::span<const double> x) {
  if (pb.kind != ProblemKind::kConvexMin)
    throw std::logic_error("evaluate_p is for convex instances");
  check_point(pb, x);
  double s = 0.0;
  if (pb.family == ProblemFamily::kL1Median) {
    for (int i = 0; i < pb.n_nodes; ++i)
      s += pb.w_xi * l1_dist(x, pb.centers_xi[i]);
    s /= pb.n_nodes;
  }
  return s + 0.5 * pb.r_xi * sqnorm(x);
}

double evaluate_p_saddle(const ProblemInstance& pb, std::span<const double> xi,
                         std::span<const double> zeta) {
  if (pb.kind != ProblemKind::kSaddlePoint)
    throw std::logic_error("evaluate_p_saddle is for saddle instances");
  if (static_cast<int>(xi.size()) != pb.d_xi ||
      static_cast<int>(zeta.size()) != pb.d_zeta)
    throw std::invalid_argument("block dimensions do not match problem");
  double s = 0.0;
  if (pb.family == ProblemFamily::kL1Median) {
    for (int i = 0; i < pb.n_nodes; ++i)
      s += pb.w_xi * l1_dist(xi, pb.centers_xi[i]) -
           pb.w_zeta * l1_dist(zeta, pb.centers_zeta[i]);
    s /= pb.n_nodes;
  }
  return s + 0.5 * pb.r_xi * sqnorm(xi) - 0.5 * pb.r_zeta * sqnorm(zeta);
}

double gap_cvx(const ProblemInstance& pb, std::span<const double> x_o,
               std::span<const double> x_star) {
  return evaluate_p(pb, x_o) - evaluate_p(pb, x_star);
}

double gap_spp(const ProblemInstance& pb, std::span<const double> xi_o,
               std::span<const double> zeta_o, std::span<const double> xi_star,
               std::span<const double> zeta_star) {
  return evaluate_p_saddle(pb, xi_o, zeta_star) -
         evaluate_p_saddle(pb, xi_star, zeta_o);
}

double gap(const ProblemInstance& pb, std::span<const double> x_o,
           std::span<const double> x_star) {
  check_point(pb, x_o);
  check_point(pb, x_star);
  if (pb.kind == ProblemKind::kConvexMin) return gap_cvx(pb, x_o, x_star);
  return gap_spp(pb, x_o.subspan(0, pb.d_xi), x_o.subspan(pb.d_xi),
                 x_star.subspan(0, pb.d_xi), x_star.subspan(pb.d_xi));
}

std::vector<double> CoordinateMap::forward(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (int j = 0; j < d_xi; ++j) out[j] *= s_xi;
  for (int j = 0; j < d_zeta; ++j) out[d_xi + j] *= s_zeta;
  return out;
}

std::vector<double> CoordinateMap::backward(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (int j = 0; j < d_xi; ++j) out[j] /= s_xi;
  for (int j = 0; j < d_zeta; ++j) out[d_xi + j] /= s_zeta;
  return out;
}

RescaledProblem rescale_asymmetric(const ProblemInstance& pb,
                                   AsymmetricRegularization ar) {
  if (pb.kind != ProblemKind::kSaddlePoint)
    throw std::logic_error("rescaling applies to saddle instances");
  if (!(ar.r_xi > 0.0) || !(ar.r_zeta > 0.0))
    throw std::invalid_argument("rescaling needs r_xi > 0 and r_zeta > 0");

  const double s_xi = std::sqrt(ar.r_xi);
  const double s_zeta = std::sqrt(ar.r_zeta);

  RescaledProblem out;
  out.map = CoordinateMap{pb.d_xi, pb.d_zeta, s_xi, s_zeta};
  out.problem = pb;
  out.problem.r_xi = out.problem.r_zeta = 1.0;
  out.problem.w_xi = pb.w_xi / s_xi;
  out.problem.w_zeta = pb.w_zeta / s_zeta;
  for (auto& c : out.problem.centers_xi)
    for (double& v : c) v *= s_xi;
  for (auto& c : out.problem.centers_zeta)
    for (double& v : c) v *= s_zeta;
  out.problem.R_bound = solution_bound(out.problem);
  out.problem.M = pb.M * std::sqrt(1.0 / ar.r_xi + 1.0 / ar.r_zeta);
  return out;
}

ProblemInstance regularize_monotone(const ProblemInstance& pb, double eps) {
  if (pb.r() != 0.0)
    throw std::logic_error("regularize_monotone expects r = 0");
  if (!(pb.R_bound > 0.0) || !std::isfinite(pb.R_bound))
    throw std::logic_error("regularize_monotone needs a finite R_bound");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  ProblemInstance out = pb;
  out.r_xi = out.r_zeta = eps / (pb.R_bound * pb.R_bound);
  return out;
}

std::string serialize_problem(const ProblemInstance& pb) {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "kind=%s family=%s n=%d d_xi=%d d_zeta=%d r_xi=%.17g "
                "r_zeta=%.17g w_xi=%.17g w_zeta=%.17g\n",
                pb.kind == ProblemKind::kConvexMin ? "convex" : "saddle",
                pb.family == ProblemFamily::kL1Median ? "l1" : "zero",
                pb.n_nodes, pb.d_xi, pb.d_zeta, pb.r_xi, pb.r_zeta, pb.w_xi,
                pb.w_zeta);
  os << buf;
  auto rows = [&](const char* tag, const std::vector<std::vector<double>>& c) {
    for (const auto& row : c) {
      os << tag;
      for (double v : row) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        os << buf;
      }
      os << "\n";
    }
  };
  rows("c_xi", pb.centers_xi);
  if (pb.d_zeta > 0) rows("c_zeta", pb.centers_zeta);
  return os.str();
}

ProblemInstance parse_problem(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header))
    throw std::invalid_argument("empty problem fixture");
  char kind[16], family[16];
  ProblemInstance pb;
  if (std::sscanf(header.c_str(),
                  "kind=%15s family=%15s n=%d d_xi=%d d_zeta=%d r_xi=%lg "
                  "r_zeta=%lg w_xi=%lg w_zeta=%lg",
                  kind, family, &pb.n_nodes, &pb.d_xi, &pb.d_zeta, &pb.r_xi,
                  &pb.r_zeta, &pb.w_xi, &pb.w_zeta) != 9)
    throw std::invalid_argument("bad problem fixture header: " + header);
  pb.kind = std::string(kind) == "convex" ? ProblemKind::kConvexMin
                                          : ProblemKind::kSaddlePoint;
  pb.family = std::string(family) == "l1" ? ProblemFamily::kL1Median
                                          : ProblemFamily::kZero;
  pb.centers_xi.assign(pb.n_nodes, std::vector<double>(pb.d_xi));
  pb.centers_zeta.assign(pb.n_nodes, std::vector<double>(pb.d_zeta));
  std::string tag;
  int row_xi = 0, row_zeta = 0;
  while (is >> tag) {
    if (tag == "c_xi") {
      if (row_xi >= pb.n_nodes)
        throw std::invalid_argument("too many c_xi rows");
      for (double& v : pb.centers_xi[row_xi]) is >> v;
      ++row_xi;
    } else if (tag == "c_zeta") {
      if (row_zeta >= pb.n_nodes)
        throw std::invalid_argument("too many c_zeta rows");
      for (double& v : pb.centers_zeta[row_zeta]) is >> v;
      ++row_zeta;
    } else {
      throw std::invalid_argument("unknown fixture row tag: " + tag);
    }
  }
  if (row_xi != pb.n_nodes || (pb.d_zeta > 0 && row_zeta != pb.n_nodes))
    throw std::invalid_argument("missing center rows");
  finalize_bounds(pb);
  return pb;
}

}  // namespace tvfb
