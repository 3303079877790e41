#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "atp/error.hpp"
#include "atp/graph.hpp"
#include "atp/seeding.hpp"

namespace atp {

enum class RankKind { trueskill, agony, level };

inline const char* rank_kind_name(RankKind k) {
  switch (k) {
    case RankKind::trueskill: return "trueskill";
    case RankKind::agony: return "agony";
    case RankKind::level: return "level";
  }
  return "?";
}

// Per-node scores where larger means later in the hierarchy. Integral
// rankers (agony, level) store exact integers as doubles.
struct HierarchyRanking {
  RankKind kind = RankKind::level;
  std::vector<double> scores;
};

// ---------------------------------------------------------------------------
// TrueSkill

struct TrueSkillParams {
  double mu0 = 25.0;
  double sigma0 = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  int epochs = 5;
  bool conservative = false;  // score mu - 3*sigma instead of mu
  std::uint64_t seed = 0;
};

namespace detail {

inline double normal_pdf(double t) {
  return std::exp(-0.5 * t * t) * 0.3989422804014327;  // 1/sqrt(2*pi)
}

inline double normal_cdf(double t) {
  return 0.5 * std::erfc(-t * 0.7071067811865476);  // t / sqrt(2)
}

// Mean additive truncation v(t) = pdf(t)/cdf(t); for very negative t the
// ratio overflows, but v(t) -> -t there.
inline double truncation_v(double t) {
  double denom = normal_cdf(t);
  if (denom < 1e-290) return -t;
  return normal_pdf(t) / denom;
}

inline double truncation_w(double t, double v) {
  double w = v * (v + t);
  return std::clamp(w, 0.0, 1.0);
}

}  // namespace detail

// Each edge (u, v) is treated as a match that v won. Edges are replayed for
// `epochs` rounds in a per-round shuffled order.
inline HierarchyRanking rank_trueskill(const DirectedGraph& g,
                                       const TrueSkillParams& params) {
  std::size_t n = g.node_count();
  std::vector<double> mu(n, params.mu0);
  std::vector<double> var(n, params.sigma0 * params.sigma0);
  std::vector<std::size_t> order(g.edge_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(params.seed);
  const double beta2x2 = 2.0 * params.beta * params.beta;
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    shuffle_inplace(order, rng);
    for (std::size_t idx : order) {
      const Edge& e = g.edges()[idx];
      NodeId loser = e.src, winner = e.dst;
      double c2 = beta2x2 + var[winner] + var[loser];
      double c = std::sqrt(c2);
      double t = (mu[winner] - mu[loser]) / c;
      double v = detail::truncation_v(t);
      double w = detail::truncation_w(t, v);
      mu[winner] += (var[winner] / c) * v;
      mu[loser] -= (var[loser] / c) * v;
      var[winner] *= std::clamp(1.0 - (var[winner] / c2) * w, 1e-12, 1.0);
      var[loser] *= std::clamp(1.0 - (var[loser] / c2) * w, 1e-12, 1.0);
    }
  }
  HierarchyRanking r{RankKind::trueskill, std::move(mu)};
  if (params.conservative)
    for (std::size_t i = 0; i < n; ++i) r.scores[i] -= 3.0 * std::sqrt(var[i]);
  return r;
}

// ---------------------------------------------------------------------------
// Agony

// Total agony of an integer-valued ranking: sum over edges of
// max(r(src) - r(dst) + 1, 0).
inline std::int64_t agony_of(const DirectedGraph& g,
                             const std::vector<std::int64_t>& rank) {
  std::int64_t total = 0;
  for (const Edge& e : g.edges())
    total += std::max<std::int64_t>(rank[e.src] - rank[e.dst] + 1, 0);
  return total;
}

struct AgonyOptions {
  std::size_t exact_edge_cap = 2000;  // larger SCCs fall back to the heuristic
  int heuristic_max_passes = 50;
};

namespace detail {

// Exact minimum agony over one strongly connected block, via its dual: a
// maximum circulation with unit capacities (every saturated edge costs one
// unit of agony). Negative cycles in the residual graph are cancelled until
// none remain, then ranks are read back as longest-path potentials of the
// tight difference constraints:
//   f = 0  ->  r(dst) >= r(src) + 1   (edge must be agony-free)
//   f = 1  ->  r(src) >= r(dst) - 1   (edge pays exactly its saturation)
// The constraint graph has no positive cycle precisely when the residual has
// no negative cycle, so the potentials exist.
inline std::vector<std::int64_t> agony_exact_ranks(std::size_t n,
                                                   const std::vector<Edge>& edges) {
  std::vector<char> f(edges.size(), 0);
  std::vector<std::int64_t> dist(n);
  std::vector<std::int32_t> parent_edge(n);
  std::vector<std::int32_t> stamp(n);
  const std::int64_t trigger = -static_cast<std::int64_t>(n) - 1;

  // Residual arc of edge e: src->dst cost -1 when f=0, dst->src cost +1 when
  // f=1. Distances start at zero everywhere (virtual source). While a
  // negative cycle exists its nodes sink without bound; once some distance
  // falls below -(n+1) its parent walk cannot reach a root through a simple
  // path, so the walk provably closes a (negative) parent cycle.
  while (true) {
    std::fill(dist.begin(), dist.end(), 0);
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    NodeId deep = 0;
    bool converged = false;
    while (true) {
      bool changed = false;
      bool hit = false;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        NodeId from = f[i] ? edges[i].dst : edges[i].src;
        NodeId to = f[i] ? edges[i].src : edges[i].dst;
        std::int64_t cand = dist[from] + (f[i] ? 1 : -1);
        if (cand < dist[to]) {
          dist[to] = cand;
          parent_edge[to] = static_cast<std::int32_t>(i);
          changed = true;
          if (cand <= trigger) {
            deep = to;
            hit = true;
          }
        }
      }
      if (hit) break;
      if (!changed) {
        converged = true;
        break;
      }
    }
    if (converged) break;

    // Walk parent links from the deep node until a repeat closes the cycle.
    std::fill(stamp.begin(), stamp.end(), 0);
    NodeId v = deep;
    while (!stamp[v]) {
      stamp[v] = 1;
      if (parent_edge[v] < 0) throw error("agony: parent walk escaped");
      const Edge& pe = edges[parent_edge[v]];
      v = f[parent_edge[v]] ? pe.dst : pe.src;
    }
    NodeId w = v;
    do {
      std::int32_t ei = parent_edge[w];
      f[ei] ^= 1;
      // f was flipped; the arc origin is taken from the pre-flip direction.
      w = f[ei] ? edges[ei].src : edges[ei].dst;
    } while (w != v);
  }

  // Longest-path potentials of the tight constraints.
  std::vector<std::int64_t> rank(n, 0);
  for (std::size_t pass = 0; pass <= n; ++pass) {
    bool changed = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      NodeId u = edges[i].src, v = edges[i].dst;
      if (!f[i]) {
        if (rank[u] + 1 > rank[v]) rank[v] = rank[u] + 1, changed = true;
      } else {
        if (rank[v] - 1 > rank[u]) rank[u] = rank[v] - 1, changed = true;
      }
    }
    if (!changed) break;
    if (pass == n) throw error("agony rank extraction did not converge");
  }
  std::int64_t lo = *std::min_element(rank.begin(), rank.end());
  for (auto& r : rank) r += 1 - lo;
  return rank;
}

// Coordinate descent from the all-ties baseline. Each step re-optimizes one
// node's rank exactly (the per-node cost is convex piecewise linear with its
// minimum at a breakpoint), so total agony never increases and never exceeds
// the baseline's |edges|.
inline std::vector<std::int64_t> agony_heuristic_ranks(std::size_t n,
                                                       const std::vector<Edge>& edges,
                                                       int max_passes) {
  std::vector<std::int64_t> rank(n, 1);
  std::vector<std::vector<std::pair<NodeId, char>>> touch(n);  // (other, is_out)
  for (const Edge& e : edges) {
    touch[e.src].push_back({e.dst, 1});
    touch[e.dst].push_back({e.src, 0});
  }
  auto node_cost = [&](NodeId v, std::int64_t x) {
    std::int64_t cost = 0;
    for (auto [other, is_out] : touch[v])
      cost += is_out ? std::max<std::int64_t>(x - rank[other] + 1, 0)
                     : std::max<std::int64_t>(rank[other] - x + 1, 0);
    return cost;
  };
  for (int pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (NodeId v = 0; v < n; ++v) {
      std::int64_t best_x = rank[v];
      std::int64_t best_cost = node_cost(v, best_x);
      for (auto [other, is_out] : touch[v]) {
        std::int64_t x = is_out ? rank[other] - 1 : rank[other] + 1;
        std::int64_t c = node_cost(v, x);
        if (c < best_cost) {
          best_cost = c;
          best_x = x;
        }
      }
      if (best_x != rank[v]) {
        rank[v] = best_x;
        improved = true;
      }
    }
    if (!improved) break;
  }
  std::int64_t lo = *std::min_element(rank.begin(), rank.end());
  for (auto& r : rank) r += 1 - lo;
  return rank;
}

}  // namespace detail

// Minimum-agony ranking. Each strongly connected component is solved on its
// own (exactly when it has at most exact_edge_cap edges), then components are
// offset along the condensation's topological order so that every cross edge
// is agony-free. Guarantee: total agony never exceeds the baseline ranking
// (condensation levels with intra-component ties), since each block starts
// from or beats that baseline and cross edges cost zero in both.
inline HierarchyRanking rank_agony(const DirectedGraph& g,
                                   const AgonyOptions& options = {}) {
  std::size_t n = g.node_count();
  auto scc = strongly_connected_components(g);
  std::vector<std::int64_t> rank(n, 1);

  for (std::uint32_t c : scc.nontrivial) {
    const auto& nodes = scc.components[c];
    std::vector<std::uint32_t> local(n, 0);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      local[nodes[i]] = static_cast<std::uint32_t>(i);
    std::vector<Edge> local_edges;
    for (const Edge& e : g.edges())
      if (scc.component_id[e.src] == c && scc.component_id[e.dst] == c)
        local_edges.push_back({local[e.src], local[e.dst]});
    std::vector<std::int64_t> local_rank =
        local_edges.size() <= options.exact_edge_cap
            ? detail::agony_exact_ranks(nodes.size(), local_edges)
            : detail::agony_heuristic_ranks(nodes.size(), local_edges,
                                            options.heuristic_max_passes);
    for (std::size_t i = 0; i < nodes.size(); ++i) rank[nodes[i]] = local_rank[i];
  }

  // Components in descending id are in topological order; push each one far
  // enough down that all incoming cross edges strictly ascend.
  std::vector<std::int64_t> offset(scc.components.size(), 0);
  std::vector<std::vector<std::size_t>> incoming(scc.components.size());
  for (std::size_t i = 0; i < g.edge_count(); ++i) {
    const Edge& e = g.edges()[i];
    if (scc.component_id[e.src] != scc.component_id[e.dst])
      incoming[scc.component_id[e.dst]].push_back(i);
  }
  for (std::uint32_t c = static_cast<std::uint32_t>(scc.components.size()); c-- > 0;) {
    for (std::size_t i : incoming[c]) {
      const Edge& e = g.edges()[i];
      std::int64_t src_rank = offset[scc.component_id[e.src]] + rank[e.src];
      offset[c] = std::max(offset[c], src_rank + 1 - rank[e.dst]);
    }
  }
  HierarchyRanking result{RankKind::agony, std::vector<double>(n)};
  for (NodeId v = 0; v < n; ++v)
    result.scores[v] = static_cast<double>(rank[v] + offset[scc.component_id[v]]);
  return result;
}

inline std::int64_t agony_of(const DirectedGraph& g, const HierarchyRanking& r) {
  std::vector<std::int64_t> ir(r.scores.size());
  for (std::size_t i = 0; i < ir.size(); ++i)
    ir[i] = static_cast<std::int64_t>(std::llround(r.scores[i]));
  return agony_of(g, ir);
}

// ---------------------------------------------------------------------------
// Levels

// Peels zero-in-degree nodes in rounds; round o gets level o, starting at 1.
// Each level equals 1 + length of the longest path reaching the node.
// Requires an acyclic graph.
inline std::vector<std::uint32_t> assign_levels(const DirectedGraph& g) {
  std::size_t n = g.node_count();
  std::vector<std::uint32_t> indeg(n, 0), level(n, 0);
  for (const Edge& e : g.edges()) ++indeg[e.dst];
  std::vector<NodeId> frontier;
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) frontier.push_back(v);
  std::uint32_t o = 1;
  std::size_t done = 0;
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId v : frontier) {
      level[v] = o;
      ++done;
      for (NodeId w : g.out_neighbors(v))
        if (--indeg[w] == 0) next.push_back(w);
    }
    frontier = std::move(next);
    ++o;
  }
  if (done != n) throw error("assign_levels: graph contains a cycle");
  return level;
}

inline HierarchyRanking levels_as_ranking(const std::vector<std::uint32_t>& levels) {
  HierarchyRanking r{RankKind::level, std::vector<double>(levels.size())};
  for (std::size_t i = 0; i < levels.size(); ++i)
    r.scores[i] = static_cast<double>(levels[i]);
  return r;
}

// Debug dump: one "label<TAB>score" line per node.
inline void write_ranking(const std::string& path, const DirectedGraph& g,
                          const HierarchyRanking& r) {
  std::ofstream out(path);
  if (!out) throw error("cannot write ranking: " + path);
  char buf[64];
  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::snprintf(buf, sizeof buf, "%.9g", r.scores[v]);
    out << g.label(v) << '\t' << buf << '\n';
  }
  if (!out) throw error("write failed: " + path);
}

}  // namespace atp
