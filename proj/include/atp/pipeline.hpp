#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "atp/closure.hpp"
#include "atp/cycle_break.hpp"
#include "atp/error.hpp"
#include "atp/factorize.hpp"
#include "atp/graph.hpp"
#include "atp/hierarchy.hpp"
#include "atp/proximity.hpp"
#include "atp/seeding.hpp"

namespace atp {

// Everything the embedding pipeline needs, under one master seed. Per-stage
// seeds derive from it by stage name, so adding a stage never perturbs the
// randomness of earlier ones. The seed and thread fields of the nested
// factorization config are overridden.
struct PipelineConfig {
  ProximityVariant variant = ProximityVariant::log;
  double c = 0.0;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<RankKind> rankers{RankKind::trueskill, RankKind::agony};
  TrueSkillParams trueskill{};
  AgonyOptions agony{};
  FactorizationConfig factorization{};
  std::uint64_t max_proximity_entries = 100000000;
};

struct StageTiming {
  std::string name;
  double seconds = 0.0;
};

struct EmbedResult {
  EmbeddingModel model;
  std::vector<RemovedEdge> removed;
  std::size_t kept_edges = 0;
  std::size_t nontrivial_sccs = 0;
  std::size_t largest_scc = 0;
  std::vector<std::uint32_t> levels;
  std::size_t closure_nnz = 0;
  std::size_t proximity_nnz = 0;
  double final_objective = 0.0;
  std::vector<StageTiming> stages;
};

// break_cycles -> assign_levels -> transitive_closure -> proximity_matrix ->
// factorize. A stage failure propagates with the stage name prefixed.
inline EmbedResult embed_pipeline(const DirectedGraph& g, const PipelineConfig& cfg) {
  if (!(cfg.alpha >= 0.5 && cfg.alpha < 1.0))
    throw error("embed_pipeline: alpha must lie in [0.5, 1)");

  EmbedResult out;
  auto timed = [&out](const char* name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const error& e) {
      throw error(std::string(name) + ": " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.stages.push_back({name, std::chrono::duration<double>(t1 - t0).count()});
  };

  DirectedGraph kept;
  timed("cycle_break", [&] {
    CycleBreakConfig bc;
    bc.rankers = cfg.rankers;
    bc.trueskill = cfg.trueskill;
    bc.agony = cfg.agony;
    bc.seed = stage_seed(cfg.seed, "cycle_break");
    bc.threads = cfg.threads;
    CycleBreakReport rep = break_cycles(g, bc);
    out.removed = std::move(rep.removed);
    out.nontrivial_sccs = rep.nontrivial_sccs;
    out.largest_scc = rep.largest_scc;
    kept = std::move(rep.kept);
    out.kept_edges = kept.edge_count();
  });

  timed("levels", [&] { out.levels = assign_levels(kept); });

  ReachabilityClosure closure;
  timed("closure", [&] {
    closure = transitive_closure(kept);
    out.closure_nnz = closure.nnz;
  });

  ProximityMatrix M;
  timed("proximity", [&] {
    ProximityOptions po;
    po.variant = cfg.variant;
    po.c = cfg.c;
    po.max_entries = cfg.max_proximity_entries;
    M = proximity_matrix(closure, out.levels, po);
    out.proximity_nnz = M.nnz();
  });

  timed("factorize", [&] {
    FactorizationConfig fc = cfg.factorization;
    fc.seed = stage_seed(cfg.seed, "factorize");
    fc.threads = cfg.threads;
    out.model = factorize(M, kept.labels(), fc);
    out.model.alpha = cfg.alpha;
    out.final_objective =
        out.model.objective_trace.empty() ? 0.0 : out.model.objective_trace.back();
  });

  return out;
}

}  // namespace atp
