#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "atp/error.hpp"
#include "atp/graph.hpp"
#include "atp/hierarchy.hpp"
#include "atp/parallel.hpp"
#include "atp/seeding.hpp"

namespace atp {

// How strongly an edge contradicts a ranking: max(0, s(src) - s(dst)).
// Integral rankers add 1 on edges inside a shared strongly connected
// component, where an equal-rank edge still lies on a cycle.
inline double violation_score(const HierarchyRanking& r, NodeId src, NodeId dst,
                              bool same_scc) {
  double d = r.scores[src] - r.scores[dst];
  if (same_scc && (r.kind == RankKind::agony || r.kind == RankKind::level))
    d += 1.0;
  return d > 0.0 ? d : 0.0;
}

// Per-edge ensemble vote: each ranker's violations normalized by its own
// maximum over the edge set, then summed. A ranker that sees no violation
// anywhere abstains. All edges here are assumed intra-component.
inline std::vector<double> violation_votes(
    const std::vector<Edge>& edges, const std::vector<HierarchyRanking>& rankings) {
  std::vector<double> votes(edges.size(), 0.0);
  std::vector<double> raw(edges.size());
  for (const HierarchyRanking& r : rankings) {
    double mx = 0.0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      raw[i] = violation_score(r, edges[i].src, edges[i].dst, true);
      mx = std::max(mx, raw[i]);
    }
    if (mx <= 0.0) continue;
    for (std::size_t i = 0; i < edges.size(); ++i) votes[i] += raw[i] / mx;
  }
  return votes;
}

// Greedy edge removal with fixed votes: while a cycle remains, delete the
// highest-vote edge still inside a strongly connected block, breaking vote
// ties toward the smallest (src, dst) pair. Only edges on cycles are ever
// candidates, so the removal set never touches the acyclic part.
inline std::vector<std::size_t> greedy_break(std::size_t n,
                                             const std::vector<Edge>& edges,
                                             const std::vector<double>& votes) {
  std::vector<char> alive(edges.size(), 1);
  std::vector<std::size_t> removed;
  std::vector<std::vector<NodeId>> adj(n);
  std::vector<std::uint32_t> comp;
  std::vector<std::uint32_t> comp_size;
  while (true) {
    for (auto& a : adj) a.clear();
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (alive[i]) adj[edges[i].src].push_back(edges[i].dst);
    std::uint32_t ncomp = tarjan_components(adj, comp);
    comp_size.assign(ncomp, 0);
    for (std::size_t v = 0; v < n; ++v) ++comp_size[comp[v]];
    std::size_t best = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!alive[i]) continue;
      if (comp[edges[i].src] != comp[edges[i].dst]) continue;
      if (comp_size[comp[edges[i].src]] < 2) continue;
      if (best == edges.size() || votes[i] > votes[best] ||
          (votes[i] == votes[best] && edges[i] < edges[best]))
        best = i;
    }
    if (best == edges.size()) break;
    alive[best] = 0;
    removed.push_back(best);
  }
  return removed;
}

struct CycleBreakConfig {
  std::vector<RankKind> rankers{RankKind::trueskill, RankKind::agony};
  TrueSkillParams trueskill{};
  AgonyOptions agony{};
  std::uint64_t seed = 0;
  int threads = 1;
};

struct RemovedEdge {
  Edge edge;
  double vote;
};

struct CycleBreakReport {
  std::vector<RemovedEdge> removed;
  DirectedGraph kept;
  std::vector<RankKind> rankers;
  std::size_t nontrivial_sccs = 0;
  std::size_t largest_scc = 0;

  std::vector<Edge> removed_edges() const {
    std::vector<Edge> out;
    out.reserve(removed.size());
    for (const RemovedEdge& r : removed) out.push_back(r.edge);
    return out;
  }
};

// Voting ensemble cycle breaker. Every nontrivial strongly connected
// component is handled independently (their edge sets cannot interact):
// rankers score the component's induced subgraph once, votes are fixed, and
// greedy_break removes edges until the component unravels. Determinism does
// not depend on thread count: per-component seeds are keyed by the smallest
// node id and results are concatenated in component order.
inline CycleBreakReport break_cycles(const DirectedGraph& g,
                                     const CycleBreakConfig& cfg) {
  if (cfg.rankers.empty()) throw error("break_cycles: no rankers configured");
  for (RankKind k : cfg.rankers)
    if (k == RankKind::level)
      throw error("break_cycles: level ranker cannot vote on cyclic graphs");

  auto scc = strongly_connected_components(g);
  CycleBreakReport report;
  report.rankers = cfg.rankers;
  report.nontrivial_sccs = scc.nontrivial.size();
  for (const auto& comp : scc.components)
    report.largest_scc = std::max(report.largest_scc, comp.size());

  std::vector<std::vector<RemovedEdge>> per_comp(scc.nontrivial.size());
  parallel_for(scc.nontrivial.size(), resolve_threads(cfg.threads),
               [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      std::uint32_t c = scc.nontrivial[idx];
      const auto& nodes = scc.components[c];
      std::vector<std::uint32_t> local(g.node_count(), 0);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        local[nodes[i]] = static_cast<std::uint32_t>(i);
      std::vector<Edge> local_edges;
      std::vector<std::size_t> global_index;
      for (std::size_t i = 0; i < g.edge_count(); ++i) {
        const Edge& e = g.edges()[i];
        if (scc.component_id[e.src] == c && scc.component_id[e.dst] == c) {
          local_edges.push_back({local[e.src], local[e.dst]});
          global_index.push_back(i);
        }
      }
      GraphBuilder builder;
      for (NodeId v : nodes) builder.intern(g.label(v));
      for (const Edge& e : local_edges) builder.add_edge(e.src, e.dst);
      DirectedGraph sub = std::move(builder).build();

      std::vector<HierarchyRanking> rankings;
      for (RankKind kind : cfg.rankers) {
        if (kind == RankKind::trueskill) {
          TrueSkillParams ts = cfg.trueskill;
          ts.seed = unit_seed(cfg.seed, nodes[0]);
          rankings.push_back(rank_trueskill(sub, ts));
        } else {
          rankings.push_back(rank_agony(sub, cfg.agony));
        }
      }
      auto votes = violation_votes(local_edges, rankings);
      for (std::size_t ei : greedy_break(nodes.size(), local_edges, votes))
        per_comp[idx].push_back({g.edges()[global_index[ei]], votes[ei]});
    }
  });

  for (auto& chunk : per_comp)
    report.removed.insert(report.removed.end(), chunk.begin(), chunk.end());
  report.kept = remove_edges(g, report.removed_edges());
  if (!is_acyclic(report.kept))
    throw error("break_cycles: residual graph still has a cycle");
  return report;
}

}  // namespace atp
