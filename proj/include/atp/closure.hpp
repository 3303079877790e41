#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "atp/error.hpp"
#include "atp/graph.hpp"

namespace atp {

// Reachability of a DAG as one bitset row per node. The diagonal is unset:
// reaches(v, v) is false.
struct ReachabilityClosure {
  std::size_t node_count = 0;
  std::size_t words_per_row = 0;
  std::vector<std::uint64_t> bits;
  std::uint64_t nnz = 0;

  bool reaches(NodeId u, NodeId v) const {
    return (bits[u * words_per_row + (v >> 6)] >> (v & 63)) & 1ULL;
  }

  const std::uint64_t* row(NodeId u) const { return bits.data() + u * words_per_row; }
};

// Fills rows in reverse topological order, so row(v) is the union of
// {w} | row(w) over direct successors w, each already complete.
inline ReachabilityClosure transitive_closure(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::uint32_t> indeg(n, 0);
  for (const Edge& e : g.edges()) ++indeg[e.dst];
  std::vector<NodeId> topo;
  topo.reserve(n);
  for (NodeId v = 0; v < n; ++v)
    if (indeg[v] == 0) topo.push_back(v);
  for (std::size_t i = 0; i < topo.size(); ++i)
    for (NodeId w : g.out_neighbors(topo[i]))
      if (--indeg[w] == 0) topo.push_back(w);
  if (topo.size() != n) throw error("transitive_closure: graph contains a cycle");

  ReachabilityClosure c;
  c.node_count = n;
  c.words_per_row = (n + 63) / 64;
  c.bits.assign(n * c.words_per_row, 0);
  for (std::size_t i = n; i-- > 0;) {
    NodeId v = topo[i];
    std::uint64_t* row = c.bits.data() + v * c.words_per_row;
    for (NodeId w : g.out_neighbors(v)) {
      row[w >> 6] |= 1ULL << (w & 63);
      const std::uint64_t* src = c.bits.data() + w * c.words_per_row;
      for (std::size_t k = 0; k < c.words_per_row; ++k) row[k] |= src[k];
    }
  }
  for (std::uint64_t word : c.bits) c.nnz += std::popcount(word);
  return c;
}

}  // namespace atp
