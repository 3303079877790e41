// Acceptance gate. Each criterion prints exactly one PASS/FAIL/SKIP line
// (SKIP only for the optional public-dataset run); the exit code is the
// number of failures. Stated runtime budgets are part of each criterion.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atp/cqa.hpp"
#include "atp/linkpred.hpp"
#include "atp/pipeline.hpp"
#include "fixtures.hpp"

namespace {

using namespace atp;
using atp::testing::figure_graph;
using atp::testing::random_dag;
using atp::testing::random_digraph;

struct Outcome {
  bool pass = false;
  bool skipped = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Shared generators. Seeds here are frozen; the pilot evidence lives in the
// criterion details below.

// Striped planted hierarchy: node i sits at level i * n_levels / n, forward
// edges run strictly upward between distinct levels, and a back_fraction of
// reversed edges is injected as known noise.
struct Planted {
  DirectedGraph graph;
  std::vector<Edge> injected;
};

Planted planted_digraph(std::size_t n, std::size_t m_forward, double back_fraction,
                        std::uint32_t n_levels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GraphBuilder b;
  for (std::size_t i = 0; i < n; ++i) b.intern(atp::testing::node_name(i));
  auto level = [&](std::uint64_t v) { return v * n_levels / n; };
  std::set<std::uint64_t> used;
  std::size_t added = 0;
  while (added < m_forward) {
    std::uint64_t u = rng() % n, v = rng() % n;
    if (level(u) == level(v)) continue;
    if (level(u) > level(v)) std::swap(u, v);
    if (!used.insert((u << 32) | v).second) continue;
    b.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v));
    ++added;
  }
  Planted out;
  const auto m_back = static_cast<std::size_t>(back_fraction * m_forward + 0.5);
  added = 0;
  while (added < m_back) {
    std::uint64_t u = rng() % n, v = rng() % n;
    if (level(u) == level(v)) continue;
    if (level(u) > level(v)) std::swap(u, v);
    if (!used.insert((v << 32) | u).second) continue;
    b.add_edge(static_cast<NodeId>(v), static_cast<NodeId>(u));
    out.injected.push_back({static_cast<NodeId>(v), static_cast<NodeId>(u)});
    ++added;
  }
  out.graph = std::move(b).build();
  return out;
}

ProximityMatrix dense_matrix(std::size_t n, const std::vector<double>& cells) {
  ProximityMatrix m;
  m.n = n;
  m.row_ptr.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) m.row_ptr[i] = i * n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m.col.push_back(static_cast<NodeId>(j));
      m.val.push_back(cells[i * n + j]);
    }
  return m;
}

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(atp::testing::node_name(i));
  return out;
}

// Relative band for normal descent plus an absolute band at the evaluation
// noise floor: once the objective sits at eps * data scale, successive
// evaluations of the same minimum jitter by that much in either direction.
bool trace_nonincreasing(const std::vector<double>& trace) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i] > trace[i - 1] * (1.0 + 1e-9) + 1e-12) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 1. Worked five-node example: the kept hierarchy must order B before E,
// predict the path at alpha 0.5, and remove exactly the four back edges.

Outcome c1_worked_example() {
  Outcome o;
  DirectedGraph g = figure_graph();
  PipelineConfig cfg;
  cfg.variant = ProximityVariant::log;
  cfg.factorization.k = 4;
  cfg.seed = 7;
  EmbedResult er = embed_pipeline(g, cfg);

  std::set<std::pair<std::string, std::string>> removed;
  for (const RemovedEdge& r : er.removed)
    removed.insert({g.label(r.edge.src), g.label(r.edge.dst)});
  const std::set<std::pair<std::string, std::string>> expected = {
      {"C", "B"}, {"D", "B"}, {"E", "C"}, {"E", "D"}};

  double be = er.model.score("B", "E");
  double eb = er.model.score("E", "B");
  bool path = er.model.predict_path(er.model.id_of("B"), er.model.id_of("E"));
  o.pass = be > eb && path && removed == expected;
  o.detail = "seed=7 score(B,E)=" + fmt("%.4f", be) + " score(E,B)=" + fmt("%.4f", eb) +
             " path=" + (path ? "yes" : "no") +
             " removed=" + std::to_string(removed.size()) + "/4 expected";
  return o;
}

// ---------------------------------------------------------------------------
// 2. Variant ordering on a planted 5K-node hierarchy with 5% noise:
// log >= linear >= constant - 0.01 and log >= 0.80.

Outcome c2_variant_ordering() {
  Outcome o;
  const std::uint64_t seed = 7;  // pilot: log .9174 linear .9130 constant .9163
  Planted p = planted_digraph(5000, 25000, 0.05, 10, seed);
  SuiteConfig cfg;
  cfg.ratio = 0.1;
  cfg.seed = seed;
  cfg.breaker.seed = seed;
  cfg.factorization.k = 16;
  cfg.factorization.sweeps = 25;
  cfg.factorization.seed = seed;
  SuiteReport rep = run_variant_suite(p.graph, "planted-5k", cfg);

  double a_const = 0, a_lin = 0, a_log = 0;
  for (const VariantResult& r : rep.results) {
    if (r.variant == ProximityVariant::constant) a_const = r.auc;
    if (r.variant == ProximityVariant::linear) a_lin = r.auc;
    if (r.variant == ProximityVariant::log) a_log = r.auc;
  }
  o.pass = a_log >= a_lin && a_lin >= a_const - 0.01 && a_log >= 0.80;
  o.detail = "seed=7 auc log=" + fmt("%.4f", a_log) + " linear=" + fmt("%.4f", a_lin) +
             " constant=" + fmt("%.4f", a_const);
  return o;
}

// ---------------------------------------------------------------------------
// 3. Optional public-dataset replication; skipped when the snapshot is not on
// disk. AUC target 0.9481 +/- 0.03 for the log variant.

Outcome c3_wiki_vote() {
  Outcome o;
  std::string path;
  if (const char* dir = std::getenv("ATP_DATA_DIR"))
    path = std::string(dir) + "/wiki-Vote.txt";
  if (path.empty() || !std::filesystem::exists(path)) {
    for (const char* probe : {"data/wiki-Vote.txt", "../data/wiki-Vote.txt",
                              "../../data/wiki-Vote.txt"})
      if (std::filesystem::exists(probe)) {
        path = probe;
        break;
      }
  }
  if (path.empty() || !std::filesystem::exists(path)) {
    o.pass = true;
    o.skipped = true;
    o.detail = "wiki-Vote.txt not present (set ATP_DATA_DIR to enable)";
    return o;
  }
  LoadedGraph lg = load_edge_list(path);
  SuiteConfig cfg;
  cfg.ratio = 0.1;
  cfg.seed = 1;
  cfg.breaker.seed = 1;
  cfg.factorization.k = 64;
  cfg.factorization.sweeps = 20;
  cfg.factorization.seed = 1;
  cfg.variants = {ProximityVariant::log};
  SuiteReport rep = run_variant_suite(lg.graph, "wiki-vote", cfg);
  double auc = rep.results.at(0).auc;
  o.pass = std::abs(auc - 0.9481) <= 0.03;
  o.detail = "auc=" + fmt("%.4f", auc) + " target 0.9481 +/- 0.03";
  return o;
}

// ---------------------------------------------------------------------------
// 4. Closure equals per-node BFS reachability, bit for bit, on 200 random
// DAGs of up to 60 nodes.

Outcome c4_closure_oracle() {
  Outcome o;
  std::size_t graphs = 0, pairs = 0;
  for (int t = 0; t < 200; ++t) {
    std::mt19937_64 rng(1000 + t);
    std::size_t n = 2 + rng() % 59;
    double p = 0.02 + 0.46 * rng_unit(rng);
    DirectedGraph g = random_dag(n, p, rng);
    ReachabilityClosure cl = transitive_closure(g);
    std::uint64_t seen_nnz = 0;
    for (NodeId s = 0; s < n; ++s) {
      std::vector<char> seen(n, 0);
      std::queue<NodeId> q;
      for (NodeId w : g.out_neighbors(s))
        if (!seen[w]) {
          seen[w] = 1;
          q.push(w);
        }
      while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        for (NodeId w : g.out_neighbors(v))
          if (!seen[w]) {
            seen[w] = 1;
            q.push(w);
          }
      }
      for (NodeId v = 0; v < n; ++v) {
        ++pairs;
        if (seen[v]) ++seen_nnz;
        if (cl.reaches(s, v) != static_cast<bool>(seen[v])) {
          o.detail = "mismatch at graph " + std::to_string(t);
          return o;
        }
      }
    }
    if (seen_nnz != cl.nnz) {
      o.detail = "nnz mismatch at graph " + std::to_string(t);
      return o;
    }
    ++graphs;
  }
  o.pass = true;
  o.detail = std::to_string(graphs) + " DAGs, " + std::to_string(pairs) + " pairs";
  return o;
}

// ---------------------------------------------------------------------------
// 5. Levels: strictly increasing along every edge and equal to longest-path
// depth (1 + longest path from any source), on 200 random DAGs.

Outcome c5_level_oracle() {
  Outcome o;
  std::size_t graphs = 0, edges = 0;
  for (int t = 0; t < 200; ++t) {
    std::mt19937_64 rng(2000 + t);
    std::size_t n = 2 + rng() % 59;
    double p = 0.02 + 0.46 * rng_unit(rng);
    DirectedGraph g = random_dag(n, p, rng);
    std::vector<std::uint32_t> level = assign_levels(g);
    // Edges of the fixture always run from a lower node id to a higher one,
    // so ascending id order is topological for the oracle.
    std::vector<std::uint32_t> lp(n, 1);
    for (const Edge& e : g.edges())
      lp[e.dst] = std::max(lp[e.dst], lp[e.src] + 1);
    for (const Edge& e : g.edges()) {
      ++edges;
      if (!(level[e.src] < level[e.dst])) {
        o.detail = "edge order violated at graph " + std::to_string(t);
        return o;
      }
    }
    if (level != lp) {
      o.detail = "longest-path mismatch at graph " + std::to_string(t);
      return o;
    }
    ++graphs;
  }
  o.pass = true;
  o.detail = std::to_string(graphs) + " DAGs, " + std::to_string(edges) + " edges";
  return o;
}

// ---------------------------------------------------------------------------
// 6. Factorization: objective trace never increases, a planted rank-2 matrix
// is recovered below 1e-3 relative Frobenius error, rank-1 below 1e-6.

Outcome c6_factorization() {
  Outcome o;
  DirectedGraph fig = figure_graph();
  PipelineConfig pcfg;
  pcfg.factorization.k = 4;
  pcfg.seed = 7;
  EmbedResult er = embed_pipeline(fig, pcfg);
  if (!trace_nonincreasing(er.model.objective_trace)) {
    o.detail = "objective trace increased on the worked example";
    return o;
  }

  auto rel_error = [](const EmbeddingModel& model, const std::vector<double>& cells,
                      std::size_t n) {
    double err2 = 0.0, ref2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double d = cells[i * n + j] -
                   model.dot(static_cast<NodeId>(i), static_cast<NodeId>(j));
        err2 += d * d;
        ref2 += cells[i * n + j] * cells[i * n + j];
      }
    return std::sqrt(err2 / ref2);
  };

  const std::size_t n2 = 20;
  std::mt19937_64 gen(555);
  std::vector<double> Sx(n2 * 2), Tx(2 * n2);
  for (auto& v : Sx) v = 1.0 + rng_unit(gen);
  for (auto& v : Tx) v = 1.0 + rng_unit(gen);
  std::vector<double> cells2(n2 * n2);
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j)
      cells2[i * n2 + j] = Sx[i * 2] * Tx[j] + Sx[i * 2 + 1] * Tx[n2 + j];
  FactorizationConfig cfg2;
  cfg2.k = 2;
  cfg2.lambda = 0.0;
  cfg2.zero_weight = 1.0;
  cfg2.sweeps = 500;
  cfg2.tol = 0.0;
  cfg2.seed = 1;
  EmbeddingModel m2 = factorize(dense_matrix(n2, cells2), numbered_labels(n2), cfg2);
  double e2 = rel_error(m2, cells2, n2);

  const std::size_t n1 = 4;
  std::vector<double> u = {1.0, 2.0, 0.5, 1.5}, w = {2.0, 1.0, 3.0, 0.25};
  std::vector<double> cells1(n1 * n1);
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) cells1[i * n1 + j] = u[i] * w[j];
  FactorizationConfig cfg1 = cfg2;
  cfg1.k = 1;
  cfg1.sweeps = 50;
  cfg1.seed = 4;
  EmbeddingModel m1 = factorize(dense_matrix(n1, cells1), numbered_labels(n1), cfg1);
  double e1 = rel_error(m1, cells1, n1);

  o.pass = trace_nonincreasing(m2.objective_trace) &&
           trace_nonincreasing(m1.objective_trace) && e2 < 1e-3 && e1 < 1e-6;
  o.detail = "rank-2 err=" + fmt("%.2e", e2) + " rank-1 err=" + fmt("%.2e", e1) +
             ", traces monotone";
  return o;
}

// ---------------------------------------------------------------------------
// 7. Agony: exact mode matches the brute-force minimum over rankings into
// {1..n} on 500 seeded digraphs of up to 5 nodes; heuristic mode never
// exceeds the baseline (condensation levels with intra-component ties).

std::int64_t brute_min_agony(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::int64_t> r(n, 1);
  std::int64_t best = -1;
  while (true) {
    std::int64_t total = 0;
    for (const Edge& e : g.edges())
      total += std::max<std::int64_t>(r[e.src] - r[e.dst] + 1, 0);
    if (best < 0 || total < best) best = total;
    std::size_t i = 0;
    while (i < n && r[i] == static_cast<std::int64_t>(n)) r[i++] = 1;
    if (i == n) break;
    ++r[i];
  }
  return best;
}

std::vector<std::int64_t> condensation_baseline(const DirectedGraph& g) {
  SCCDecomposition scc = strongly_connected_components(g);
  GraphBuilder cb;
  for (std::size_t c = 0; c < scc.components.size(); ++c)
    cb.intern("c" + std::to_string(c));
  std::set<std::pair<std::uint32_t, std::uint32_t>> cross;
  for (const Edge& e : g.edges()) {
    auto a = scc.component_id[e.src], b = scc.component_id[e.dst];
    if (a != b && cross.insert({a, b}).second)
      cb.add_edge(static_cast<NodeId>(a), static_cast<NodeId>(b));
  }
  std::vector<std::uint32_t> clevel = assign_levels(std::move(cb).build());
  std::vector<std::int64_t> rank(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) rank[v] = clevel[scc.component_id[v]];
  return rank;
}

Outcome c7_agony() {
  Outcome o;
  std::size_t graphs = 0;
  for (int t = 0; t < 500; ++t) {
    std::mt19937_64 rng(3000 + t);
    std::size_t n = 1 + rng() % 5;
    double p = 0.1 + 0.8 * rng_unit(rng);
    DirectedGraph g = random_digraph(n, p, rng);

    AgonyOptions exact;
    std::int64_t got = agony_of(g, rank_agony(g, exact));
    std::int64_t want = brute_min_agony(g);
    if (got != want) {
      o.detail = "exact mismatch at seed " + std::to_string(3000 + t) + ": got " +
                 std::to_string(got) + " want " + std::to_string(want);
      return o;
    }

    AgonyOptions heur;
    heur.exact_edge_cap = 0;  // force the descent path
    std::int64_t h = agony_of(g, rank_agony(g, heur));
    std::int64_t base = agony_of(g, condensation_baseline(g));
    if (h > base) {
      o.detail = "heuristic above baseline at seed " + std::to_string(3000 + t);
      return o;
    }
    ++graphs;
  }
  o.pass = true;
  o.detail = std::to_string(graphs) + " digraphs, exact == brute force, heuristic <= baseline";
  return o;
}

// ---------------------------------------------------------------------------
// 8. Cycle breaker on planted noise: at least 80% of removed edges are
// injected back-edges, and no more than twice the injected count is removed.

Outcome c8_noise_recovery() {
  Outcome o;
  const std::uint64_t seed = 1;  // pilot precision 0.952 at this seed
  Planted p = planted_digraph(500, 2500, 0.05, 10, seed);
  std::set<std::pair<NodeId, NodeId>> injected;
  for (const Edge& e : p.injected) injected.insert({e.src, e.dst});

  CycleBreakConfig cfg;
  cfg.seed = seed;
  CycleBreakReport rep = break_cycles(p.graph, cfg);
  std::size_t hit = 0;
  for (const RemovedEdge& r : rep.removed)
    if (injected.count({r.edge.src, r.edge.dst})) ++hit;
  double prec = rep.removed.empty() ? 0.0 : double(hit) / double(rep.removed.size());
  o.pass = prec >= 0.8 && rep.removed.size() <= 2 * injected.size();
  o.detail = "seed=1 injected=" + std::to_string(injected.size()) +
             " removed=" + std::to_string(rep.removed.size()) +
             " precision=" + fmt("%.3f", prec);
  return o;
}

// ---------------------------------------------------------------------------
// 9. Every reported metric matches an independent brute-force recomputation,
// exactly, on 100 random fixtures.

Outcome c9_metric_oracles() {
  Outcome o;
  for (int t = 0; t < 100; ++t) {
    std::mt19937_64 rng(4000 + t);

    // AUC with deliberate score ties.
    std::size_t np = 1 + rng() % 20, nn = 1 + rng() % 20;
    std::vector<double> pos(np), neg(nn);
    for (auto& v : pos) v = 0.25 * double(rng() % 5);
    for (auto& v : neg) v = 0.25 * double(rng() % 5);
    double want_auc = 0.0;
    for (double a : pos)
      for (double b : neg) want_auc += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    want_auc /= double(np) * double(nn);
    if (auc_exact(pos, neg) != want_auc) {
      o.detail = "auc mismatch at fixture " + std::to_string(t);
      return o;
    }

    // Routing metrics against ranks known by construction.
    std::size_t nr = 1 + rng() % 10;
    std::vector<std::vector<std::string>> rankings(nr);
    std::vector<std::string> truths(nr);
    double mrr = 0.0, p3 = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      std::size_t m = 1 + rng() % 6;
      for (std::size_t j = 0; j < m; ++j) rankings[i].push_back("u" + std::to_string(j));
      shuffle_inplace(rankings[i], rng);
      std::size_t truth_at = rng() % m;
      truths[i] = rankings[i][truth_at];
      mrr += 1.0 / double(truth_at + 1);
      if (truth_at + 1 <= 3) p3 += 1.0;
      if (truth_at == 0) acc += 1.0;
    }
    mrr /= double(nr);
    p3 /= double(nr);
    acc /= double(nr);
    RoutingMetrics rm = routing_metrics(rankings, truths);
    if (rm.mrr != mrr || rm.precision_at_3 != p3 || rm.accuracy != acc) {
      o.detail = "routing metric mismatch at fixture " + std::to_string(t);
      return o;
    }

    // Pairwise difficulty on a random model, with a duplicate record, a
    // zero-bounty record and a question the model has never seen.
    std::size_t nq = 2 + rng() % 6, k = 1 + rng() % 3;
    EmbeddingModel model;
    model.k = static_cast<std::uint32_t>(k);
    for (std::size_t i = 0; i < nq; ++i) model.labels.push_back("q:" + std::to_string(i));
    model.S.resize(nq * k);
    model.T.resize(k * nq);
    for (auto& v : model.S) v = 2.0 * rng_unit(rng);
    for (auto& v : model.T) v = 2.0 * rng_unit(rng);
    model.build_index();
    std::vector<QARecord> records;
    for (std::size_t i = 0; i < nq; ++i) {
      QARecord r;
      r.question_id = std::to_string(i);
      r.bounty = i < 2 ? std::int64_t(i + 1) : std::int64_t(rng() % 4);
      records.push_back(r);
    }
    records.push_back(records[0]);  // duplicate id, must be ignored
    QARecord ghost;
    ghost.question_id = "absent";
    ghost.bounty = 5;
    records.push_back(ghost);

    std::vector<std::pair<NodeId, std::int64_t>> qs;
    std::set<std::string> seen;
    for (const QARecord& r : records) {
      if (r.bounty <= 0 || !seen.insert(r.question_id).second) continue;
      if (auto id = model.find(question_label(r.question_id))) qs.push_back({*id, r.bounty});
    }
    double correct = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < qs.size(); ++i)
      for (std::size_t j = i + 1; j < qs.size(); ++j) {
        if (qs[i].second == qs[j].second) continue;
        ++pairs;
        double ab = model.score(qs[i].first, qs[j].first);
        double ba = model.score(qs[j].first, qs[i].first);
        if (ab == ba)
          correct += 0.5;
        else if ((ab > ba) == (qs[j].second > qs[i].second))
          correct += 1.0;
      }
    DifficultyAccuracy da = pairwise_difficulty_accuracy(model, records);
    if (da.pairs != pairs || da.accuracy() != correct / double(pairs)) {
      o.detail = "difficulty mismatch at fixture " + std::to_string(t);
      return o;
    }
  }
  o.pass = true;
  o.detail = "100 fixtures, all five metrics bit-equal to brute force";
  return o;
}

// ---------------------------------------------------------------------------
// 10. CLI determinism: same seed -> byte-identical model files; two distinct
// seeds both reproduce criterion 1's checks.

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ATP_CLI_BIN) + " " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome c10_determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  fs::path dir = fs::path("acceptance_tmp");
  fs::create_directories(dir);
  std::string edges = (dir / "f1.tsv").string();
  {
    DirectedGraph g = figure_graph();
    std::ofstream out(edges);
    for (const Edge& e : g.edges()) out << g.label(e.src) << '\t' << g.label(e.dst) << '\n';
  }
  auto embed = [&](const std::string& model, const std::string& report,
                   std::uint64_t seed) {
    return run_cli("embed --graph " + edges + " --out " + model + " --report " + report +
                   " --k 4 --variant log --seed " + std::to_string(seed));
  };

  std::string mA = (dir / "a.model").string(), mB = (dir / "b.model").string();
  std::string mC = (dir / "c.model").string();
  if (embed(mA, (dir / "a.json").string(), 7) != 0 ||
      embed(mB, (dir / "b.json").string(), 7) != 0 ||
      embed(mC, (dir / "c.json").string(), 8) != 0) {
    o.detail = "embed run failed";
    return o;
  }
  if (slurp(mA).empty() || slurp(mA) != slurp(mB)) {
    o.detail = "same-seed model files differ";
    return o;
  }

  const std::set<std::pair<std::string, std::string>> expected = {
      {"C", "B"}, {"D", "B"}, {"E", "C"}, {"E", "D"}};
  for (const std::string& rep : {(dir / "a.json").string(), (dir / "c.json").string()}) {
    nlohmann::json j = nlohmann::json::parse(slurp(rep));
    std::set<std::pair<std::string, std::string>> removed;
    for (const auto& e : j.at("removed_edges"))
      removed.insert({e.at("src").get<std::string>(), e.at("dst").get<std::string>()});
    if (removed != expected) {
      o.detail = "removed set wrong in " + rep;
      return o;
    }
  }
  for (const std::string& path : {mA, mC}) {
    EmbeddingModel m = load_model(path);
    if (!(m.score("B", "E") > m.score("E", "B")) ||
        !m.predict_path(m.id_of("B"), m.id_of("E"))) {
      o.detail = "ordering check failed for " + path;
      return o;
    }
  }
  o.pass = true;
  o.detail = "seeds 7/7 byte-identical; seeds 7 and 8 both keep the ordering";
  return o;
}

// ---------------------------------------------------------------------------
// 11. Cold-question routing on a 30-record planted expertise ladder, through
// ingest -> competition graph -> embedding -> inductive routing.

struct LadderRec {
  int qid, asker, best;
  std::vector<int> answerers;
  int minute;
};

std::vector<LadderRec> ladder_records() {
  std::vector<LadderRec> recs;
  int qid = 100, minute = 0;
  for (int j = 0; j <= 8; ++j) recs.push_back({qid++, j, j + 1, {j + 1}, minute++});
  for (int j = 0; j <= 7; ++j) recs.push_back({qid++, j, j + 2, {j + 2}, minute++});
  for (int j = 0; j <= 2; ++j) recs.push_back({qid++, j, j + 3, {j + 3}, minute++});
  for (int i = 0; i < 10; ++i) {
    int a = i % 5;
    recs.push_back({qid++, a, a + 5, {a + 1, a + 2, a + 4, a + 5}, minute++});
  }
  return recs;
}

Outcome c11_cold_routing() {
  Outcome o;
  namespace fs = std::filesystem;
  fs::path dir = fs::path("acceptance_tmp");
  fs::create_directories(dir);
  std::string posts_path = (dir / "posts.xml").string();
  std::string votes_path = (dir / "votes.xml").string();
  {
    std::ofstream posts(posts_path);
    posts << "<posts>\n";
    int aid = 1000;
    for (const LadderRec& r : ladder_records()) {
      int accepted = 0;
      std::vector<std::pair<int, int>> answers;
      for (int u : r.answerers) {
        answers.push_back({aid, u});
        if (u == r.best) accepted = aid;
        ++aid;
      }
      char date[64];
      std::snprintf(date, sizeof(date), "2020-01-01T00:%02d:00.000", r.minute);
      posts << "  <row Id=\"" << r.qid << "\" PostTypeId=\"1\" OwnerUserId=\"" << r.asker
            << "\" CreationDate=\"" << date << "\" AcceptedAnswerId=\"" << accepted
            << "\" />\n";
      for (auto [id, owner] : answers)
        posts << "  <row Id=\"" << id << "\" PostTypeId=\"2\" ParentId=\"" << r.qid
              << "\" OwnerUserId=\"" << owner << "\" />\n";
    }
    posts << "</posts>\n";
    std::ofstream votes(votes_path);
    votes << "<votes>\n</votes>\n";
  }

  IngestResult ing = ingest_stackexchange(posts_path, votes_path);
  if (ing.records.size() != 30) {
    o.detail = "expected 30 ingested records, got " + std::to_string(ing.records.size());
    return o;
  }
  // First 20 records (by creation) train the hierarchy; the last 10 are cold.
  std::vector<QARecord> train(ing.records.begin(), ing.records.begin() + 20);
  CompetitionGraph cg = build_competition_graph(train);

  PipelineConfig cfg;
  cfg.seed = 1;  // pilot: accuracy 1.0, mrr 1.0 on seeds 1..6
  cfg.factorization.k = 16;
  cfg.factorization.sweeps = 80;
  EmbedResult er = embed_pipeline(cg.graph, cfg);
  ColdRouteOutcome out = route_cold_questions(er.model, ing.records, TextVectorTable{});

  o.pass = out.metrics.count == 10 && out.skipped == 0 && out.metrics.accuracy >= 0.8 &&
           out.metrics.mrr >= 0.85;
  o.detail = "seed=1 routed=" + std::to_string(out.metrics.count) +
             " accuracy=" + fmt("%.3f", out.metrics.accuracy) +
             " mrr=" + fmt("%.3f", out.metrics.mrr);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;  // 0 = no stated budget
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"worked-example ordering, path and removed edges", 1.0, c1_worked_example},
      {"planted 5K-node proximity-variant AUC ordering", 600.0, c2_variant_ordering},
      {"wiki-Vote link-prediction replication (optional)", 0.0, c3_wiki_vote},
      {"transitive closure equals BFS reachability", 5.0, c4_closure_oracle},
      {"levels equal longest-path depth", 5.0, c5_level_oracle},
      {"factorization monotonicity and planted recovery", 10.0, c6_factorization},
      {"agony exact minimum and heuristic bound", 60.0, c7_agony},
      {"cycle-breaker noise recovery", 30.0, c8_noise_recovery},
      {"metrics match brute-force recomputation", 5.0, c9_metric_oracles},
      {"embed determinism across runs and seeds", 2.0, c10_determinism},
      {"cold-question routing on a planted ladder", 0.0, c11_cold_routing},
  };

  int failures = 0, skips = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = c.budget_seconds <= 0.0 || secs < c.budget_seconds;
    bool pass = o.pass && in_budget;
    const char* verdict = o.skipped ? "SKIP" : pass ? "PASS" : "FAIL";
    if (!pass && !o.skipped) ++failures;
    if (o.skipped) ++skips;
    std::printf("[%2zu] %s  %-50s %7.2fs  %s%s\n", i + 1, verdict, c.name, secs,
                o.detail.c_str(), in_budget ? "" : " [over budget]");
    std::fflush(stdout);
  }
  std::printf("%zu criteria: %zu passed, %d skipped, %d failed\n", criteria.size(),
              criteria.size() - failures - skips, skips, failures);
  return failures == 0 ? 0 : 1;
}
