#pragma once

#include "tvfb/linalg.hpp"
#include "tvfb/netgraph.hpp"
#include "tvfb/stacked.hpp"

namespace tvfb {

// Per-round mixing operator: W(k) = L(k)/lambda_max(L(k)) with L the
// combinatorial Laplacian of the round's edge set. Zero row/column sums,
// sparsity matching the edges, and on the zero-block-sum subspace
// ||W x - x||^2 <= (1 - 1/chi) ||x||^2.
struct GossipOperator {
  TimeVaryingGraph graph;
  double chi = 1.0;
  int block_dim = 1;
};

Matrix build_gossip(const EdgeList& edges, int n);

// Smallest chi valid for rounds 0..rounds-1 of the schedule.
double certify_chi(const TimeVaryingGraph& g, int rounds);

// Per-round spectral summary, for run metadata.
struct RoundSpectrum {
  int round = 0;
  double lambda_min_pos = 0.0;  // smallest positive Laplacian eigenvalue
  double lambda_max = 0.0;
  double chi = 1.0;
};
std::vector<RoundSpectrum> spectral_profile(const TimeVaryingGraph& g,
                                            int rounds);

// (W (x) I_blockdim) x, computed blockwise.
StackedVector apply_gossip(const Matrix& w, const StackedVector& x);

GossipOperator make_gossip_operator(const TimeVaryingGraph& g, int rounds,
                                    int block_dim);

}  // namespace tvfb
