#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "atp/closure.hpp"
#include "atp/cycle_break.hpp"
#include "atp/error.hpp"
#include "atp/factorize.hpp"
#include "atp/graph.hpp"
#include "atp/hierarchy.hpp"
#include "atp/proximity.hpp"
#include "atp/seeding.hpp"

namespace atp {

inline constexpr const char* kToolVersion = "0.1.0";

// Reachability including through cycles: closure of the condensation plus
// same-component membership.
struct Reachability {
  SCCDecomposition scc;
  std::size_t words = 0;
  std::vector<std::uint64_t> bits;

  bool reaches(NodeId u, NodeId v) const {
    auto cu = scc.component_id[u], cv = scc.component_id[v];
    if (cu == cv) return scc.components[cu].size() >= 2 || u == v;
    return (bits[cu * words + (cv >> 6)] >> (cv & 63)) & 1ULL;
  }
};

inline Reachability make_reachability(const DirectedGraph& g) {
  Reachability r;
  r.scc = strongly_connected_components(g);
  const std::size_t nc = r.scc.components.size();
  r.words = (nc + 63) / 64;
  r.bits.assign(nc * r.words, 0);
  std::vector<std::vector<std::uint32_t>> succ(nc);
  for (const Edge& e : g.edges()) {
    auto cu = r.scc.component_id[e.src], cv = r.scc.component_id[e.dst];
    if (cu != cv) succ[cu].push_back(cv);
  }
  // Component ids ascend from the sinks, so successors are always complete.
  for (std::uint32_t c = 0; c < nc; ++c) {
    std::uint64_t* row = r.bits.data() + c * r.words;
    for (std::uint32_t s : succ[c]) {
      row[s >> 6] |= 1ULL << (s & 63);
      const std::uint64_t* src = r.bits.data() + s * r.words;
      for (std::size_t k = 0; k < r.words; ++k) row[k] |= src[k];
    }
  }
  return r;
}

struct SplitConfig {
  double ratio = 0.1;  // fraction of edges held out as positives
  std::uint64_t seed = 0;
  std::uint64_t max_negative_attempts = 100;  // budget multiplier per negative
};

struct EvalSplit {
  DirectedGraph residual;       // largest weak component minus held-out edges
  std::vector<Edge> positives;  // ids in the residual graph's node space
  std::vector<Edge> negatives;
  std::size_t requested_positives = 0;

  bool shortfall() const { return positives.size() < requested_positives; }
};

// Holds out up to ceil(ratio * |E|) edges of the largest weakly connected
// component, visiting edges in seeded random order and keeping only removals
// that leave the component weakly connected. Getting fewer positives than
// requested is reported through the split, not an error. Negatives are
// uniformly sampled distinct pairs (u, v) where v reaches u but u cannot
// reach v on the pre-split component; the attempt budget makes pathological
// inputs fail loudly instead of spinning.
inline EvalSplit make_split(const DirectedGraph& g, const SplitConfig& cfg) {
  if (!(cfg.ratio > 0.0 && cfg.ratio < 1.0))
    throw error("make_split: ratio must lie in (0, 1)");
  if (g.edge_count() == 0) throw error("make_split: graph has no edges");

  auto comps = weakly_connected_components(g);
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (comps[i].size() > comps[best].size()) best = i;
  std::vector<char> keep(g.node_count(), 0);
  for (NodeId v : comps[best]) keep[v] = 1;
  GraphBuilder wb;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (keep[v]) wb.intern(g.label(v));
  for (const Edge& e : g.edges())
    if (keep[e.src] && keep[e.dst]) wb.add_edge(g.label(e.src), g.label(e.dst));
  DirectedGraph gw = std::move(wb).build();
  const std::size_t n = gw.node_count();
  const std::size_t m = gw.edge_count();
  if (m == 0) throw error("make_split: largest weak component has no edges");

  EvalSplit split;
  split.requested_positives =
      static_cast<std::size_t>(std::ceil(cfg.ratio * static_cast<double>(m)));

  // Undirected adjacency with edge ids, for the connectivity probes.
  std::vector<std::vector<std::pair<NodeId, std::size_t>>> adj(n);
  for (std::size_t i = 0; i < m; ++i) {
    adj[gw.edges()[i].src].push_back({gw.edges()[i].dst, i});
    adj[gw.edges()[i].dst].push_back({gw.edges()[i].src, i});
  }
  std::vector<char> alive(m, 1);
  std::vector<std::uint32_t> visit_mark(n, 0);
  std::uint32_t epoch = 0;
  std::vector<NodeId> stack;
  auto still_connected = [&](NodeId from, NodeId to) {
    ++epoch;
    stack.assign(1, from);
    visit_mark[from] = epoch;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      for (auto [w, ei] : adj[v])
        if (alive[ei] && visit_mark[w] != epoch) {
          visit_mark[w] = epoch;
          stack.push_back(w);
        }
    }
    return false;
  };

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle_inplace(order, rng);
  for (std::size_t idx : order) {
    if (split.positives.size() >= split.requested_positives) break;
    const Edge e = gw.edges()[idx];
    alive[idx] = 0;
    if (still_connected(e.src, e.dst)) {
      split.positives.push_back(e);
    } else {
      alive[idx] = 1;
    }
  }

  GraphBuilder rb;
  for (NodeId v = 0; v < n; ++v) rb.intern(gw.label(v));
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i]) rb.add_edge(gw.edges()[i].src, gw.edges()[i].dst);
  split.residual = std::move(rb).build();

  const std::size_t need = split.positives.size();
  if (need > 0) {
    Reachability reach = make_reachability(gw);
    std::unordered_set<std::uint64_t> seen;
    std::uint64_t budget = cfg.max_negative_attempts * (need + 10);
    while (split.negatives.size() < need && budget-- > 0) {
      NodeId u = static_cast<NodeId>(rng() % n);
      NodeId v = static_cast<NodeId>(rng() % n);
      if (u == v) continue;
      if (!reach.reaches(v, u) || reach.reaches(u, v)) continue;
      if (!seen.insert(edge_key(u, v)).second) continue;
      split.negatives.push_back({u, v});
    }
    if (split.negatives.size() < need)
      throw error("make_split: negative sampling found " +
                  std::to_string(split.negatives.size()) + " of " +
                  std::to_string(need) + " pairs before the attempt budget ran out");
  }
  return split;
}

// Exact AUC by rank sum, with average ranks across tied scores. Equals the
// mean over all (positive, negative) pairs of [p > n] + 0.5 [p == n].
inline double auc_exact(const std::vector<double>& pos,
                        const std::vector<double>& neg) {
  if (pos.empty() || neg.empty())
    throw error("auc: both score sets must be nonempty");
  std::vector<std::pair<double, char>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.push_back({s, 1});
  for (double s : neg) all.push_back({s, 0});
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t t = i; t < j; ++t)
      if (all[t].second) rank_sum_pos += avg_rank;
    i = j;
  }
  double p = static_cast<double>(pos.size());
  double u_stat = rank_sum_pos - p * (p + 1.0) / 2.0;
  return u_stat / (p * static_cast<double>(neg.size()));
}

// Scores a split against a model (matched by label) and returns the AUC.
inline double evaluate_link_prediction(const EmbeddingModel& model,
                                       const EvalSplit& split) {
  std::vector<double> pos, neg;
  pos.reserve(split.positives.size());
  neg.reserve(split.negatives.size());
  for (const Edge& e : split.positives)
    pos.push_back(model.score(split.residual.label(e.src), split.residual.label(e.dst)));
  for (const Edge& e : split.negatives)
    neg.push_back(model.score(split.residual.label(e.src), split.residual.label(e.dst)));
  return auc_exact(pos, neg);
}

struct SuiteConfig {
  double ratio = 0.1;
  std::uint64_t seed = 0;
  std::uint64_t max_negative_attempts = 100;
  CycleBreakConfig breaker{};
  FactorizationConfig factorization{};
  std::vector<ProximityVariant> variants{
      ProximityVariant::constant, ProximityVariant::linear,
      ProximityVariant::harmonic, ProximityVariant::log};
  double c = 0.0;
  std::uint64_t max_proximity_entries = 100000000;
};

struct VariantResult {
  ProximityVariant variant;
  double auc = 0.0;
  double train_seconds = 0.0;
};

struct SuiteReport {
  std::string dataset;
  std::uint64_t seed = 0;
  double ratio = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  std::size_t requested_positives = 0;
  std::vector<VariantResult> results;
};

// One shared split, cycle-break, level assignment and closure; then each
// proximity variant is built, factorized and scored on the same holdout.
inline SuiteReport run_variant_suite(const DirectedGraph& g,
                                     const std::string& dataset,
                                     const SuiteConfig& cfg) {
  SuiteReport report;
  report.dataset = dataset;
  report.seed = cfg.seed;
  report.ratio = cfg.ratio;

  SplitConfig sc;
  sc.ratio = cfg.ratio;
  sc.seed = stage_seed(cfg.seed, "split");
  sc.max_negative_attempts = cfg.max_negative_attempts;
  EvalSplit split = make_split(g, sc);
  report.n_pos = split.positives.size();
  report.n_neg = split.negatives.size();
  report.requested_positives = split.requested_positives;

  CycleBreakConfig bc = cfg.breaker;
  bc.seed = stage_seed(cfg.seed, "cycle_break");
  auto broken = break_cycles(split.residual, bc);
  auto levels = assign_levels(broken.kept);
  auto closure = transitive_closure(broken.kept);

  for (ProximityVariant variant : cfg.variants) {
    ProximityOptions po;
    po.variant = variant;
    po.c = cfg.c;
    po.max_entries = cfg.max_proximity_entries;
    auto m = proximity_matrix(closure, levels, po);
    FactorizationConfig fc = cfg.factorization;
    fc.seed = stage_seed(cfg.seed, "factorize");
    auto t0 = std::chrono::steady_clock::now();
    auto model = factorize(m, broken.kept.labels(), fc);
    auto t1 = std::chrono::steady_clock::now();
    VariantResult r;
    r.variant = variant;
    r.train_seconds = std::chrono::duration<double>(t1 - t0).count();
    r.auc = evaluate_link_prediction(model, split);
    report.results.push_back(r);
  }
  return report;
}

inline nlohmann::json suite_report_json(
    const SuiteReport& report, const std::map<std::string, std::string>& config_echo) {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["seed"] = report.seed;
  j["config_echo"] = config_echo;
  j["dataset"] = report.dataset;
  j["ratio"] = report.ratio;
  j["splits"] = {{"n_pos", report.n_pos},
                 {"n_neg", report.n_neg},
                 {"requested_positives", report.requested_positives}};
  j["results"] = nlohmann::json::array();
  for (const VariantResult& r : report.results)
    j["results"].push_back({{"variant", proximity_variant_name(r.variant)},
                            {"auc", r.auc},
                            {"train_seconds", r.train_seconds}});
  return j;
}

inline void write_suite_report(const std::string& path, const SuiteReport& report,
                               const std::map<std::string, std::string>& config_echo) {
  std::ofstream out(path);
  if (!out) throw error("cannot write report: " + path);
  out << suite_report_json(report, config_echo).dump(2) << '\n';
  if (!out) throw error("write failed: " + path);
}

}  // namespace atp
