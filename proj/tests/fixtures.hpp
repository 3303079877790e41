#pragma once

#include <random>
#include <string>
#include <vector>

#include "atp/graph.hpp"

namespace atp::testing {

// Five-node worked example used throughout: one 4-cycle tangle {B,C,D,E}
// hanging off a source A. Breaking it at {(C,B),(D,B),(E,C),(E,D)} leaves
// levels A=1, B=2, C=D=3, E=4.
inline DirectedGraph figure_graph() {
  GraphBuilder b;
  for (const char* l : {"A", "B", "C", "D", "E"}) b.intern(l);
  const std::pair<const char*, const char*> edges[] = {
      {"A", "B"}, {"B", "C"}, {"B", "D"}, {"B", "E"}, {"C", "E"},
      {"D", "E"}, {"C", "B"}, {"D", "B"}, {"E", "C"}, {"E", "D"},
  };
  for (auto [s, d] : edges) b.add_edge(s, d);
  return std::move(b).build();
}

inline std::string node_name(std::size_t i) { return "n" + std::to_string(i); }

// Random digraph over n nodes; every ordered pair kept with probability p.
inline DirectedGraph random_digraph(std::size_t n, double p, std::mt19937_64& rng) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.intern(node_name(i));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng) < p)
        b.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return std::move(b).build();
}

// Random DAG: edges only from lower to higher node id.
inline DirectedGraph random_dag(std::size_t n, double p, std::mt19937_64& rng) {
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.intern(node_name(i));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng) < p)
        b.add_edge(static_cast<NodeId>(i), static_cast<NodeId>(j));
  return std::move(b).build();
}

}  // namespace atp::testing
