#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tvfb {

// Undirected edge over nodes 0..n-1, stored with u < v.
using Edge = std::pair<int, int>;
using EdgeList = std::vector<Edge>;

enum class ScheduleKind { kStatic, kEdgeChurn };

struct InfeasibleGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Time-varying communication graph with a deterministic, seed-driven edge
// schedule. Every realized round stays connected.
struct TimeVaryingGraph {
  int n_nodes = 0;
  ScheduleKind schedule_kind = ScheduleKind::kStatic;
  EdgeList base_edges;           // sorted, u < v
  double churn_rate = 0.0;       // fraction of base edges toggled per round
  std::uint64_t seed = 0;
  int resample_count = 0;        // rejected disconnected draws during generation
};

bool is_connected(const EdgeList& edges, int n);

// Connected Erdos-Renyi G(n,p) sample; resamples until connected, up to
// max_resamples rejections.
TimeVaryingGraph generate_erdos_renyi(int n, double p, std::uint64_t seed,
                                      int max_resamples = 1000);

// Same base graph, edge-churn schedule.
TimeVaryingGraph with_churn(const TimeVaryingGraph& g, double churn_rate);

// Realized edge set of round k. Pure function of (g, k).
EdgeList edges_at(const TimeVaryingGraph& g, int k);

// Fixture format: "n=<n> k=<round>" header, then one "u v" line per edge
// (1-based node ids).
std::string serialize_edges(const EdgeList& edges, int n, int round);
std::pair<EdgeList, int> parse_edges(const std::string& text);

}  // namespace tvfb
