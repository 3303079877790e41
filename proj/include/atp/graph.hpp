#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "atp/error.hpp"

namespace atp {

using NodeId = std::uint32_t;

struct Edge {
  NodeId src;
  NodeId dst;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::uint64_t edge_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Immutable directed graph over dense node ids. Node ids follow label
// first-appearance order; original labels are retained for output. Simple:
// no self-loops, no duplicate edges.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  std::size_t node_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }

  const std::string& label(NodeId v) const { return labels_.at(v); }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Throws when the label is unknown.
  NodeId id_of(std::string_view label) const {
    auto v = find(label);
    if (!v) throw error("unknown node label: " + std::string(label));
    return *v;
  }

  std::span<const NodeId> out_neighbors(NodeId v) const {
    return {out_[v].data(), out_[v].size()};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return {in_[v].data(), in_[v].size()};
  }

  std::size_t out_degree(NodeId v) const { return out_[v].size(); }
  std::size_t in_degree(NodeId v) const { return in_[v].size(); }

  bool has_edge(NodeId u, NodeId v) const {
    return edge_set_.count(edge_key(u, v)) != 0;
  }

 private:
  friend class GraphBuilder;

  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::unordered_set<std::uint64_t> edge_set_;
};

// Accumulates nodes and edges; duplicate edges and self-loops are dropped
// and counted rather than treated as errors.
class GraphBuilder {
 public:
  NodeId intern(std::string_view label) {
    auto it = index_.find(std::string(label));
    if (it != index_.end()) return it->second;
    NodeId id = static_cast<NodeId>(labels_.size());
    labels_.emplace_back(label);
    index_.emplace(labels_.back(), id);
    return id;
  }

  // Returns true when the edge was kept.
  bool add_edge(NodeId u, NodeId v) {
    if (u >= labels_.size() || v >= labels_.size())
      throw error("add_edge: node id out of range");
    if (u == v) {
      ++self_loops_;
      return false;
    }
    if (!edge_set_.insert(edge_key(u, v)).second) {
      ++duplicates_;
      return false;
    }
    edges_.push_back({u, v});
    return true;
  }

  bool add_edge(std::string_view src, std::string_view dst) {
    NodeId u = intern(src);
    NodeId v = intern(dst);
    return add_edge(u, v);
  }

  std::size_t duplicate_count() const { return duplicates_; }
  std::size_t self_loop_count() const { return self_loops_; }

  DirectedGraph build() && {
    DirectedGraph g;
    g.labels_ = std::move(labels_);
    g.index_ = std::move(index_);
    g.edges_ = std::move(edges_);
    g.edge_set_ = std::move(edge_set_);
    g.out_.resize(g.labels_.size());
    g.in_.resize(g.labels_.size());
    for (const Edge& e : g.edges_) {
      g.out_[e.src].push_back(e.dst);
      g.in_[e.dst].push_back(e.src);
    }
    return g;
  }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> edge_set_;
  std::size_t duplicates_ = 0;
  std::size_t self_loops_ = 0;
};

struct LoadedGraph {
  DirectedGraph graph;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;
};

// Whitespace-separated "src dst" per line; '#' starts a comment; blank lines
// are skipped; tokens past the second are ignored.
inline LoadedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open edge list: " + path);
  GraphBuilder builder;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string src, dst;
    std::size_t pos = 0;
    auto next_token = [&](std::string& tok) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' ||
                                   line[pos] == '\r' || line[pos] == '\v'))
        ++pos;
      std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' &&
             line[pos] != '\r' && line[pos] != '\v')
        ++pos;
      tok.assign(line, start, pos - start);
      return !tok.empty();
    };
    if (!next_token(src)) continue;
    if (!next_token(dst))
      throw error("malformed edge at " + path + ":" + std::to_string(lineno) +
                  ": expected two tokens");
    builder.add_edge(src, dst);
  }
  LoadedGraph result;
  result.duplicate_edges = builder.duplicate_count();
  result.self_loops = builder.self_loop_count();
  result.graph = std::move(builder).build();
  return result;
}

inline void write_edge_list(const std::string& path, const DirectedGraph& g) {
  std::ofstream out(path);
  if (!out) throw error("cannot write edge list: " + path);
  for (const Edge& e : g.edges()) out << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  if (!out) throw error("write failed: " + path);
}

// Keeps node set and ids; drops the given edges. Edge order is preserved.
inline DirectedGraph remove_edges(const DirectedGraph& g,
                                  const std::vector<Edge>& removed) {
  std::unordered_set<std::uint64_t> drop;
  drop.reserve(removed.size() * 2);
  for (const Edge& e : removed) drop.insert(edge_key(e.src, e.dst));
  GraphBuilder builder;
  for (const std::string& label : g.labels()) builder.intern(label);
  for (const Edge& e : g.edges())
    if (!drop.count(edge_key(e.src, e.dst))) builder.add_edge(e.src, e.dst);
  return std::move(builder).build();
}

// Iterative Tarjan over an out-adjacency list. Components are numbered in
// completion order, which is reverse topological order of the condensation:
// every edge crossing components goes from a higher component id to a lower.
inline std::uint32_t tarjan_components(const std::vector<std::vector<NodeId>>& out,
                                       std::vector<std::uint32_t>& comp) {
  const std::uint32_t n = static_cast<std::uint32_t>(out.size());
  constexpr std::uint32_t kUnset = 0xffffffffu;
  comp.assign(n, kUnset);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<std::uint32_t> num(n, kUnset);
  std::vector<NodeId> stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::pair<NodeId, std::size_t>> frames;
  std::uint32_t timer = 0;
  std::uint32_t ncomp = 0;
  for (NodeId root = 0; root < n; ++root) {
    if (num[root] != kUnset) continue;
    frames.emplace_back(root, 0);
    while (!frames.empty()) {
      NodeId v = frames.back().first;
      std::size_t ci = frames.back().second;
      if (ci == 0) {
        num[v] = low[v] = timer++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (ci < out[v].size()) {
        frames.back().second = ci + 1;
        NodeId w = out[v][ci];
        if (num[w] == kUnset) {
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], num[w]);
        }
      } else {
        if (low[v] == num[v]) {
          while (true) {
            NodeId w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = ncomp;
            if (w == v) break;
          }
          ++ncomp;
        }
        frames.pop_back();
        if (!frames.empty()) {
          NodeId parent = frames.back().first;
          low[parent] = std::min(low[parent], low[v]);
        }
      }
    }
  }
  return ncomp;
}

struct SCCDecomposition {
  std::vector<std::uint32_t> component_id;      // per node
  std::vector<std::vector<NodeId>> components;  // id -> ascending node list
  std::vector<std::uint32_t> nontrivial;        // component ids with >= 2 nodes

  bool same_component(NodeId u, NodeId v) const {
    return component_id[u] == component_id[v];
  }
};

inline SCCDecomposition strongly_connected_components(const DirectedGraph& g) {
  std::vector<std::vector<NodeId>> out(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto nb = g.out_neighbors(v);
    out[v].assign(nb.begin(), nb.end());
  }
  SCCDecomposition scc;
  std::uint32_t ncomp = tarjan_components(out, scc.component_id);
  scc.components.resize(ncomp);
  for (NodeId v = 0; v < g.node_count(); ++v)
    scc.components[scc.component_id[v]].push_back(v);
  for (std::uint32_t c = 0; c < ncomp; ++c)
    if (scc.components[c].size() >= 2) scc.nontrivial.push_back(c);
  return scc;
}

inline bool is_acyclic(const DirectedGraph& g) {
  std::vector<std::uint32_t> indeg(g.node_count(), 0);
  for (const Edge& e : g.edges()) ++indeg[e.dst];
  std::vector<NodeId> queue;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::size_t processed = 0;
  while (!queue.empty()) {
    NodeId v = queue.back();
    queue.pop_back();
    ++processed;
    for (NodeId w : g.out_neighbors(v))
      if (--indeg[w] == 0) queue.push_back(w);
  }
  return processed == g.node_count();
}

// Components of the underlying undirected graph, discovered in ascending
// order of their smallest node id; each component lists nodes ascending.
inline std::vector<std::vector<NodeId>> weakly_connected_components(
    const DirectedGraph& g) {
  std::vector<std::vector<NodeId>> comps;
  std::vector<char> seen(g.node_count(), 0);
  std::vector<NodeId> stack;
  for (NodeId start = 0; start < g.node_count(); ++start) {
    if (seen[start]) continue;
    std::vector<NodeId> comp;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (NodeId w : g.out_neighbors(v))
        if (!seen[w]) seen[w] = 1, stack.push_back(w);
      for (NodeId w : g.in_neighbors(v))
        if (!seen[w]) seen[w] = 1, stack.push_back(w);
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace atp
