#include "tvfb/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "tvfb/rng.hpp"

namespace tvfb {

namespace {

constexpr std::uint64_t kTagEr = 0x4552u;     // ER sampling stream
constexpr std::uint64_t kTagChurn = 0x4348u;  // churn toggle stream

void check_edges(const EdgeList& edges, int n) {
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loop");
  }
}

}  // namespace

bool is_connected(const EdgeList& edges, int n) {
  if (n <= 1) return true;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

TimeVaryingGraph generate_erdos_renyi(int n, double p, std::uint64_t seed,
                                      int max_resamples) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("need 0 < p <= 1");

  TimeVaryingGraph g;
  g.n_nodes = n;
  g.seed = seed;
  for (int attempt = 0; attempt <= max_resamples; ++attempt) {
    EdgeList edges;
    std::uint64_t c = 0;
    const CounterStream rng(stream_key({seed, kTagEr, (std::uint64_t)attempt}));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j, ++c)
        if (rng.uniform(c) < p) edges.emplace_back(i, j);
    if (is_connected(edges, n)) {
      g.base_edges = std::move(edges);
      g.resample_count = attempt;
      return g;
    }
  }
  throw InfeasibleGraphError(
      "no connected G(n,p) sample within the retry budget; p too small for n");
}

TimeVaryingGraph with_churn(const TimeVaryingGraph& g, double churn_rate) {
  if (churn_rate < 0.0 || churn_rate > 1.0)
    throw std::invalid_argument("churn_rate must be in [0,1]");
  TimeVaryingGraph out = g;
  out.schedule_kind = ScheduleKind::kEdgeChurn;
  out.churn_rate = churn_rate;
  return out;
}

EdgeList edges_at(const TimeVaryingGraph& g, int k) {
  if (k < 0) throw std::invalid_argument("round index must be >= 0");
  if (g.schedule_kind == ScheduleKind::kStatic || g.churn_rate == 0.0)
    return g.base_edges;

  const int n = g.n_nodes;
  std::set<Edge> edges(g.base_edges.begin(), g.base_edges.end());
  const int n_toggles = static_cast<int>(
      std::ceil(g.churn_rate * static_cast<double>(g.base_edges.size())));
  const std::uint64_t total_pairs =
      static_cast<std::uint64_t>(n) * (n - 1) / 2;
  constexpr int kRetryBudget = 32;

  for (int s = 0; s < n_toggles; ++s) {
    const CounterStream rng(
        stream_key({g.seed, kTagChurn, (std::uint64_t)k, (std::uint64_t)s}));
    for (int retry = 0; retry < kRetryBudget; ++retry) {
      // decode pair index into (u, v), u < v
      std::uint64_t idx = rng.below(retry, total_pairs);
      int u = 0;
      std::uint64_t row = static_cast<std::uint64_t>(n) - 1;
      while (idx >= row) {
        idx -= row;
        --row;
        ++u;
      }
      const int v = u + 1 + static_cast<int>(idx);
      const Edge e{u, v};
      auto it = edges.find(e);
      if (it == edges.end()) {
        edges.insert(e);  // adding never disconnects
        break;
      }
      edges.erase(it);
      if (is_connected({edges.begin(), edges.end()}, n)) break;
      edges.insert(e);  // removal would disconnect; redraw
    }
    // retries exhausted: this toggle is skipped
  }
  return {edges.begin(), edges.end()};
}

std::string serialize_edges(const EdgeList& edges, int n, int round) {
  check_edges(edges, n);
  std::ostringstream os;
  os << "n=" << n << " k=" << round << "\n";
  EdgeList sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  for (const auto& [u, v] : sorted) os << (u + 1) << " " << (v + 1) << "\n";
  return os.str();
}

std::pair<EdgeList, int> parse_edges(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header))
    throw std::invalid_argument("empty graph fixture");
  int n = 0, round = 0;
  if (std::sscanf(header.c_str(), "n=%d k=%d", &n, &round) != 2)
    throw std::invalid_argument("bad graph fixture header: " + header);
  EdgeList edges;
  int u, v;
  while (is >> u >> v) {
    if (u > v) std::swap(u, v);
    edges.emplace_back(u - 1, v - 1);
  }
  check_edges(edges, n);
  return {edges, round};
}

}  // namespace tvfb
