#include "tvfb/gossip.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tvfb {

namespace {

Matrix laplacian(const EdgeList& edges, int n) {
  Matrix l(n);
  for (const auto& [u, v] : edges) {
    l.at(u, u) += 1.0;
    l.at(v, v) += 1.0;
    l.at(u, v) -= 1.0;
    l.at(v, u) -= 1.0;
  }
  return l;
}

struct Spectrum {
  double lambda_min_pos;
  double lambda_max;
};

// Positive-spectrum extremes of a connected graph's Laplacian. The single
// zero eigenvalue (consensus direction) is dropped.
Spectrum laplacian_spectrum(const EdgeList& edges, int n) {
  if (!is_connected(edges, n))
    throw InfeasibleGraphError("gossip matrix needs a connected edge set");
  const std::vector<double> eig = symmetric_eigenvalues(laplacian(edges, n));
  return {eig[1], eig[n - 1]};
}

double chi_from_spectrum(const Spectrum& s) {
  const double mu_min = s.lambda_min_pos / s.lambda_max;  // in (0, 1]
  const double worst = (1.0 - mu_min) * (1.0 - mu_min);
  return worst <= 0.0 ? 1.0 : 1.0 / (1.0 - worst);
}

}  // namespace

Matrix build_gossip(const EdgeList& edges, int n) {
  const Spectrum s = laplacian_spectrum(edges, n);
  Matrix w = laplacian(edges, n);
  for (double& v : w.a) v /= s.lambda_max;
  return w;
}

std::vector<RoundSpectrum> spectral_profile(const TimeVaryingGraph& g,
                                            int rounds) {
  if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
  std::vector<RoundSpectrum> out;
  out.reserve(rounds);
  for (int k = 0; k < rounds; ++k) {
    const Spectrum s = laplacian_spectrum(edges_at(g, k), g.n_nodes);
    out.push_back({k, s.lambda_min_pos, s.lambda_max, chi_from_spectrum(s)});
    if (g.schedule_kind == ScheduleKind::kStatic) {
      // remaining rounds are identical
      for (int j = k + 1; j < rounds; ++j) {
        out.push_back(out.back());
        out.back().round = j;
      }
      break;
    }
  }
  return out;
}

double certify_chi(const TimeVaryingGraph& g, int rounds) {
  double chi = 1.0;
  for (const RoundSpectrum& s : spectral_profile(g, rounds))
    chi = std::max(chi, s.chi);
  return chi;
}

StackedVector apply_gossip(const Matrix& w, const StackedVector& x) {
  if (w.n != x.n_blocks)
    throw std::invalid_argument("gossip matrix size does not match blocks");
  StackedVector out(x.n_blocks, x.block_dim);
  for (int i = 0; i < x.n_blocks; ++i) {
    auto oi = out.block(i);
    for (int j = 0; j < x.n_blocks; ++j) {
      const double wij = w.at(i, j);
      if (wij == 0.0) continue;
      auto xj = x.block(j);
      for (int d = 0; d < x.block_dim; ++d) oi[d] += wij * xj[d];
    }
  }
  return out;
}

GossipOperator make_gossip_operator(const TimeVaryingGraph& g, int rounds,
                                    int block_dim) {
  return {g, certify_chi(g, rounds), block_dim};
}

}  // namespace tvfb
