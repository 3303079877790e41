// Command-line front end: embed, break-cycles, eval-lp, and the cqa
// subcommands. Logs go to stderr; machine-readable artifacts go to files.
// Exit codes: 0 success, 1 completed with shortfall warnings, 2 errors.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "atp/cqa.hpp"
#include "atp/graph.hpp"
#include "atp/linkpred.hpp"
#include "atp/pipeline.hpp"

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T parse_value(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else if constexpr (std::is_same_v<T, int>) {
      int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
      std::uint64_t v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } else {
      static_assert(std::is_same_v<T, double>);
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
  } catch (const std::exception&) {
    throw atp::error("config: invalid value for key '" + key + "': " + s);
  }
}

// Registers options on a subcommand and mirrors them as config file keys
// (the long flag name without the leading dashes). Flat key=value lines,
// '#' starts a comment, unknown keys are rejected. Values given on the
// command line win over the file.
class ConfigBinder {
 public:
  template <typename T>
  CLI::Option* bind(CLI::App* sub, const std::string& flag, T& var, const std::string& help) {
    CLI::Option* opt = sub->add_option(flag, var, help);
    const std::string key = flag.substr(2);
    entries_[key] = {opt, [key, &var](const std::string& s) { var = parse_value<T>(key, s); }};
    return opt;
  }

  void apply(const std::string& path) const {
    std::ifstream in(path);
    if (!in) throw atp::error("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (std::size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw atp::error(path + ":" + std::to_string(lineno) + ": expected key=value");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string value = trim(trimmed.substr(eq + 1));
      auto it = entries_.find(key);
      if (it == entries_.end())
        throw atp::error(path + ":" + std::to_string(lineno) + ": unknown config key '" + key +
                         "'");
      if (it->second.opt->count() > 0) {
        std::cerr << "[atp] config key '" << key << "' overridden by command-line flag\n";
        continue;
      }
      it->second.set(value);
    }
  }

 private:
  struct Entry {
    CLI::Option* opt;
    std::function<void(const std::string&)> set;
  };
  std::map<std::string, Entry> entries_;

  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }
};

void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw atp::error(std::string(flag) + " is required");
}

std::vector<atp::RankKind> parse_rankers(const std::string& csv) {
  std::vector<atp::RankKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string name = csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (name == "trueskill")
      out.push_back(atp::RankKind::trueskill);
    else if (name == "agony")
      out.push_back(atp::RankKind::agony);
    else if (name == "level")
      out.push_back(atp::RankKind::level);
    else if (!name.empty())
      throw atp::error("unknown ranker: " + name);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw atp::error("--rankers must name at least one ranker");
  return out;
}

std::vector<atp::ProximityVariant> parse_variants(const std::string& csv) {
  std::vector<atp::ProximityVariant> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    std::string name = csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!name.empty()) out.push_back(atp::parse_proximity_variant(name));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw atp::error("--variants must name at least one variant");
  return out;
}

// Knobs shared by every pipeline-running subcommand; defaults mirror the
// library configs.
struct EmbedKnobs {
  std::string variant = "log";
  double c = 0.0;
  int k = 128;
  double lambda = 0.1;
  int sweeps = 100;
  double zero_weight = 0.05;
  double tol = 1e-5;
  double alpha = 0.5;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: ATP_THREADS, then hardware
  std::string rankers = "trueskill,agony";
  std::uint64_t agony_cap = 2000;
  std::uint64_t max_entries = 100000000;
};

void add_common_options(CLI::App* sub, EmbedKnobs& kn, ConfigBinder& cb, std::string& config) {
  cb.bind(sub, "--k", kn.k, "embedding dimension per side");
  cb.bind(sub, "--lambda", kn.lambda, "L2 regularization weight");
  cb.bind(sub, "--sweeps", kn.sweeps, "maximum factorization sweeps");
  cb.bind(sub, "--zero-weight", kn.zero_weight, "weight of unobserved cells in [0,1]");
  cb.bind(sub, "--tol", kn.tol, "relative objective improvement stop threshold");
  cb.bind(sub, "--seed", kn.seed, "master seed; per-stage seeds derive from it");
  cb.bind(sub, "--threads", kn.threads, "worker threads (0: ATP_THREADS env, then cores)");
  cb.bind(sub, "--rankers", kn.rankers, "comma list of cycle-break rankers");
  cb.bind(sub, "--agony-cap", kn.agony_cap, "max component edges for exact agony");
  cb.bind(sub, "--max-entries", kn.max_entries, "proximity matrix entry budget");
  sub->add_option("--config", config, "flat key=value config file; flags take precedence");
}

void add_variant_options(CLI::App* sub, EmbedKnobs& kn, ConfigBinder& cb) {
  cb.bind(sub, "--variant", kn.variant, "proximity weighting: constant|linear|harmonic|log");
  cb.bind(sub, "--c", kn.c, "additive constant of the log variant");
}

atp::PipelineConfig make_pipeline_config(const EmbedKnobs& kn) {
  atp::PipelineConfig cfg;
  cfg.variant = atp::parse_proximity_variant(kn.variant);
  cfg.c = kn.c;
  cfg.alpha = kn.alpha;
  cfg.seed = kn.seed;
  cfg.threads = kn.threads;
  cfg.rankers = parse_rankers(kn.rankers);
  cfg.agony.exact_edge_cap = static_cast<std::size_t>(kn.agony_cap);
  cfg.factorization.k = kn.k;
  cfg.factorization.lambda = kn.lambda;
  cfg.factorization.sweeps = kn.sweeps;
  cfg.factorization.zero_weight = kn.zero_weight;
  cfg.factorization.tol = kn.tol;
  cfg.max_proximity_entries = kn.max_entries;
  return cfg;
}

std::map<std::string, std::string> knob_echo(const EmbedKnobs& kn, bool with_variant) {
  std::map<std::string, std::string> echo;
  if (with_variant) {
    echo["variant"] = kn.variant;
    echo["c"] = fmt_double(kn.c);
  }
  echo["k"] = std::to_string(kn.k);
  echo["lambda"] = fmt_double(kn.lambda);
  echo["sweeps"] = std::to_string(kn.sweeps);
  echo["zero_weight"] = fmt_double(kn.zero_weight);
  echo["tol"] = fmt_double(kn.tol);
  echo["threads"] = std::to_string(kn.threads);
  echo["rankers"] = kn.rankers;
  echo["agony_cap"] = std::to_string(kn.agony_cap);
  echo["max_entries"] = std::to_string(kn.max_entries);
  return echo;
}

json envelope(std::uint64_t seed, const std::map<std::string, std::string>& echo) {
  json j;
  j["tool_version"] = atp::kToolVersion;
  j["seed"] = seed;
  j["config_echo"] = echo;
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw atp::error("cannot write report: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw atp::error("write failed: " + path);
}

atp::LoadedGraph load_graph_logged(const std::string& path) {
  atp::LoadedGraph lg = atp::load_edge_list(path);
  std::cerr << "[atp] " << path << ": " << lg.graph.node_count() << " nodes, "
            << lg.graph.edge_count() << " edges";
  if (lg.duplicate_edges) std::cerr << ", " << lg.duplicate_edges << " duplicates dropped";
  if (lg.self_loops) std::cerr << ", " << lg.self_loops << " self-loops dropped";
  std::cerr << "\n";
  return lg;
}

// Removes files created by a failed command so no partial artifact survives.
struct OutputGuard {
  std::vector<std::string> paths;
  bool armed = true;

  void add(const std::string& p) { paths.push_back(p); }
  void disarm() { armed = false; }
  ~OutputGuard() {
    if (!armed) return;
    for (const std::string& p : paths) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
      std::filesystem::remove(p + ".tmp", ec);
    }
  }
};

// ---- embed ----

struct EmbedOpts {
  std::string graph;
  std::string out;
  std::string report;
  std::string config;
  EmbedKnobs knobs;
};

int cmd_embed(const EmbedOpts& o) {
  require_flag(o.graph, "--graph");
  require_flag(o.out, "--out");
  atp::LoadedGraph lg = load_graph_logged(o.graph);
  atp::PipelineConfig cfg = make_pipeline_config(o.knobs);

  OutputGuard guard;
  guard.add(o.out);
  if (!o.report.empty()) guard.add(o.report);

  atp::EmbedResult r = atp::embed_pipeline(lg.graph, cfg);

  const auto t0 = std::chrono::steady_clock::now();
  atp::save_model(o.out, r.model);
  const auto t1 = std::chrono::steady_clock::now();
  r.stages.push_back({"save_model", std::chrono::duration<double>(t1 - t0).count()});

  for (const atp::StageTiming& s : r.stages)
    std::cerr << "[atp] stage " << s.name << ": " << s.seconds << " s\n";
  std::cerr << "[atp] removed " << r.removed.size() << " edges, closure nnz " << r.closure_nnz
            << ", proximity nnz " << r.proximity_nnz << ", final objective "
            << r.final_objective << "\n";
  std::cerr << "[atp] model written to " << o.out << "\n";

  if (!o.report.empty()) {
    auto echo = knob_echo(o.knobs, true);
    echo["alpha"] = fmt_double(o.knobs.alpha);
    json j = envelope(o.knobs.seed, echo);
    j["dataset"] = o.graph;
    j["model"] = o.out;
    j["stages"] = json::array();
    for (const atp::StageTiming& s : r.stages)
      j["stages"].push_back({{"name", s.name}, {"seconds", s.seconds}});
    j["removed_edges"] = json::array();
    for (const atp::RemovedEdge& e : r.removed)
      j["removed_edges"].push_back({{"src", lg.graph.label(e.edge.src)},
                                    {"dst", lg.graph.label(e.edge.dst)},
                                    {"vote", e.vote}});
    j["removed_count"] = r.removed.size();
    j["kept_edges"] = r.kept_edges;
    j["nontrivial_sccs"] = r.nontrivial_sccs;
    j["largest_scc"] = r.largest_scc;
    j["closure_nnz"] = r.closure_nnz;
    j["proximity_nnz"] = r.proximity_nnz;
    j["final_objective"] = r.final_objective;
    write_json(o.report, j);
    std::cerr << "[atp] report written to " << o.report << "\n";
  }
  guard.disarm();
  return 0;
}

// ---- break-cycles ----

struct BreakOpts {
  std::string graph;
  std::string out;
  std::string removed;
  std::string report;
  std::string config;
  EmbedKnobs knobs;
};

int cmd_break_cycles(const BreakOpts& o) {
  require_flag(o.graph, "--graph");
  require_flag(o.out, "--out");
  atp::LoadedGraph lg = load_graph_logged(o.graph);
  atp::CycleBreakConfig bc;
  bc.rankers = parse_rankers(o.knobs.rankers);
  bc.agony.exact_edge_cap = static_cast<std::size_t>(o.knobs.agony_cap);
  bc.seed = atp::stage_seed(o.knobs.seed, "cycle_break");
  bc.threads = o.knobs.threads;

  OutputGuard guard;
  guard.add(o.out);
  if (!o.removed.empty()) guard.add(o.removed);
  if (!o.report.empty()) guard.add(o.report);

  atp::CycleBreakReport rep = atp::break_cycles(lg.graph, bc);
  atp::write_edge_list(o.out, rep.kept);
  std::cerr << "[atp] removed " << rep.removed.size() << " of " << lg.graph.edge_count()
            << " edges across " << rep.nontrivial_sccs << " nontrivial components\n";

  if (!o.removed.empty()) {
    std::ofstream out(o.removed);
    if (!out) throw atp::error("cannot write removed-edge list: " + o.removed);
    char buf[64];
    for (const atp::RemovedEdge& e : rep.removed) {
      std::snprintf(buf, sizeof buf, "%.9g", e.vote);
      out << lg.graph.label(e.edge.src) << '\t' << lg.graph.label(e.edge.dst) << '\t' << buf
          << '\n';
    }
    if (!out) throw atp::error("write failed: " + o.removed);
  }
  if (!o.report.empty()) {
    std::map<std::string, std::string> echo;
    echo["rankers"] = o.knobs.rankers;
    echo["agony_cap"] = std::to_string(o.knobs.agony_cap);
    echo["threads"] = std::to_string(o.knobs.threads);
    json j = envelope(o.knobs.seed, echo);
    j["dataset"] = o.graph;
    j["removed_count"] = rep.removed.size();
    j["kept_edges"] = rep.kept.edge_count();
    j["nontrivial_sccs"] = rep.nontrivial_sccs;
    j["largest_scc"] = rep.largest_scc;
    write_json(o.report, j);
  }
  guard.disarm();
  return 0;
}

// ---- eval-lp ----

struct EvalLpOpts {
  std::string graph;
  std::string out;
  std::string config;
  double ratio = 0.1;
  std::uint64_t attempts = 100;
  std::string variants = "constant,linear,harmonic,log";
  EmbedKnobs knobs;
};

int cmd_eval_lp(const EvalLpOpts& o) {
  require_flag(o.graph, "--graph");
  require_flag(o.out, "--out");
  atp::LoadedGraph lg = load_graph_logged(o.graph);
  atp::SuiteConfig sc;
  sc.ratio = o.ratio;
  sc.seed = o.knobs.seed;
  sc.max_negative_attempts = o.attempts;
  sc.breaker.rankers = parse_rankers(o.knobs.rankers);
  sc.breaker.agony.exact_edge_cap = static_cast<std::size_t>(o.knobs.agony_cap);
  sc.breaker.threads = o.knobs.threads;
  sc.factorization.k = o.knobs.k;
  sc.factorization.lambda = o.knobs.lambda;
  sc.factorization.sweeps = o.knobs.sweeps;
  sc.factorization.zero_weight = o.knobs.zero_weight;
  sc.factorization.tol = o.knobs.tol;
  sc.factorization.threads = o.knobs.threads;
  sc.variants = parse_variants(o.variants);
  sc.c = o.knobs.c;
  sc.max_proximity_entries = o.knobs.max_entries;

  OutputGuard guard;
  guard.add(o.out);

  atp::SuiteReport rep = atp::run_variant_suite(lg.graph, o.graph, sc);
  auto echo = knob_echo(o.knobs, true);
  echo["ratio"] = fmt_double(o.ratio);
  echo["max_negative_attempts"] = std::to_string(o.attempts);
  echo["variants"] = o.variants;
  atp::write_suite_report(o.out, rep, echo);
  for (const atp::VariantResult& r : rep.results)
    std::cerr << "[atp] " << atp::proximity_variant_name(r.variant) << ": AUC " << r.auc << " ("
              << r.train_seconds << " s)\n";
  std::cerr << "[atp] report written to " << o.out << "\n";
  guard.disarm();

  if (rep.n_pos < rep.requested_positives) {
    std::cerr << "[atp] warning: only " << rep.n_pos << " of " << rep.requested_positives
              << " requested positives could be removed without disconnecting the graph\n";
    return 1;
  }
  return 0;
}

// ---- cqa ----

struct CqaIngestOpts {
  std::string posts;
  std::string votes;
  std::string records_in;
  std::string out;
  std::string graph_out;
  std::string report;
  std::string config;
};

// Two input modes: a Stack Exchange dump (--posts and --votes) or an
// existing records file (--records-in, e.g. a time-filtered training
// subset). Outputs: the records TSV and/or the competition graph edge list
// that `embed` consumes.
int cmd_cqa_ingest(const CqaIngestOpts& o) {
  const bool from_dump = !o.posts.empty() || !o.votes.empty();
  if (from_dump) {
    require_flag(o.posts, "--posts");
    require_flag(o.votes, "--votes");
    if (!o.records_in.empty())
      throw atp::error("--records-in cannot be combined with --posts/--votes");
  } else if (o.records_in.empty()) {
    throw atp::error("either --posts/--votes or --records-in is required");
  }
  if (o.out.empty() && o.graph_out.empty())
    throw atp::error("nothing to do: pass --out and/or --graph-out");

  OutputGuard guard;
  if (!o.out.empty()) guard.add(o.out);
  if (!o.graph_out.empty()) guard.add(o.graph_out);
  if (!o.report.empty()) guard.add(o.report);

  std::vector<atp::QARecord> records;
  atp::IngestStats stats;
  std::size_t n_cold = 0;
  if (from_dump) {
    atp::IngestResult r = atp::ingest_stackexchange(o.posts, o.votes);
    records = std::move(r.records);
    stats = r.stats;
    n_cold = r.cold_candidates.size();
    std::cerr << "[atp] " << stats.questions << " questions, " << stats.answers
              << " answers, " << stats.bounty_votes << " bounty votes; skipped "
              << stats.posts_skipped << " post rows, " << stats.votes_skipped
              << " vote rows\n";
  } else {
    records = atp::load_records(o.records_in);
    n_cold = atp::cold_candidates(records).size();
    std::cerr << "[atp] " << records.size() << " records read from " << o.records_in << "\n";
  }

  std::size_t self_skipped = 0;
  std::size_t graph_nodes = 0, graph_edges = 0;
  if (!o.out.empty()) {
    atp::write_records(o.out, records);
    std::cerr << "[atp] " << records.size() << " records written to " << o.out << " (" << n_cold
              << " routable when held out)\n";
  }
  if (!o.graph_out.empty()) {
    atp::CompetitionGraph cg = atp::build_competition_graph(records);
    atp::write_edge_list(o.graph_out, cg.graph);
    self_skipped = cg.self_best_skipped;
    graph_nodes = cg.graph.node_count();
    graph_edges = cg.graph.edge_count();
    std::cerr << "[atp] competition graph: " << graph_nodes << " nodes, " << graph_edges
              << " edges written to " << o.graph_out;
    if (self_skipped) std::cerr << " (" << self_skipped << " self-accepted records skipped)";
    std::cerr << "\n";
  }

  if (!o.report.empty()) {
    json j = envelope(0, {});
    if (from_dump) {
      j["posts"] = o.posts;
      j["votes"] = o.votes;
      j["stats"] = {{"questions", stats.questions},
                    {"answers", stats.answers},
                    {"posts_skipped", stats.posts_skipped},
                    {"votes_skipped", stats.votes_skipped},
                    {"bounty_votes", stats.bounty_votes}};
    } else {
      j["records_in"] = o.records_in;
    }
    j["records"] = records.size();
    j["cold_candidates"] = n_cold;
    if (!o.graph_out.empty())
      j["competition_graph"] = {{"nodes", graph_nodes},
                                {"edges", graph_edges},
                                {"self_accepted_skipped", self_skipped}};
    write_json(o.report, j);
  }
  guard.disarm();
  return 0;
}

struct CqaEvalQdeOpts {
  std::string model;
  std::string records;
  std::string out;
  std::string config;
};

int cmd_cqa_eval_qde(const CqaEvalQdeOpts& o) {
  require_flag(o.model, "--model");
  require_flag(o.records, "--records");
  require_flag(o.out, "--out");
  atp::EmbeddingModel model = atp::load_model(o.model);
  std::vector<atp::QARecord> records = atp::load_records(o.records);

  OutputGuard guard;
  guard.add(o.out);

  atp::DifficultyAccuracy acc = atp::pairwise_difficulty_accuracy(model, records);
  std::cerr << "[atp] pairwise difficulty accuracy " << acc.accuracy() << " over " << acc.pairs
            << " pairs of " << acc.questions << " bounty questions\n";

  json j = envelope(0, {{"model", o.model}});
  j["records"] = o.records;
  j["accuracy"] = acc.accuracy();
  j["correct"] = acc.correct;
  j["pairs"] = acc.pairs;
  j["questions"] = acc.questions;
  write_json(o.out, j);
  guard.disarm();
  return 0;
}

struct CqaRouteOpts {
  std::string model;
  std::string records;
  std::string vectors;
  std::string out;
  std::string config;
  int window = 5;
  int neighbors = 5;
};

int cmd_cqa_route(const CqaRouteOpts& o) {
  require_flag(o.model, "--model");
  require_flag(o.records, "--records");
  require_flag(o.out, "--out");
  atp::EmbeddingModel model = atp::load_model(o.model);
  std::vector<atp::QARecord> records = atp::load_records(o.records);
  atp::TextVectorTable vectors;
  if (!o.vectors.empty()) vectors = atp::load_text_vectors(o.vectors);

  OutputGuard guard;
  guard.add(o.out);

  atp::EgaConfig cfg;
  cfg.window = o.window;
  cfg.fallback_neighbors = o.neighbors;
  atp::ColdRouteOutcome r = atp::route_cold_questions(model, records, vectors, cfg);
  std::cerr << "[atp] routed " << r.metrics.count << " cold questions: MRR " << r.metrics.mrr
            << ", P@3 " << r.metrics.precision_at_3 << ", accuracy " << r.metrics.accuracy
            << " (" << r.skipped << " skipped)\n";

  json j = envelope(0, {{"model", o.model},
                        {"window", std::to_string(o.window)},
                        {"fallback_neighbors", std::to_string(o.neighbors)}});
  j["records"] = o.records;
  j["metrics"] = {{"mrr", r.metrics.mrr},
                  {"precision_at_3", r.metrics.precision_at_3},
                  {"accuracy", r.metrics.accuracy},
                  {"count", r.metrics.count}};
  j["skipped"] = r.skipped;
  j["per_question"] = json::array();
  for (std::size_t i = 0; i < r.routed_questions.size(); ++i)
    j["per_question"].push_back(
        {{"question", r.routed_questions[i]}, {"truth_rank", r.truth_ranks[i]}});
  write_json(o.out, j);
  guard.disarm();

  if (r.skipped > 0) {
    std::cerr << "[atp] warning: " << r.skipped << " cold questions could not be routed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asymmetric transitivity preserving graph embedding"};
  app.require_subcommand(1);

  const auto in_01_open = CLI::Validator(
      [](std::string& s) {
        double v = 0.0;
        try {
          v = std::stod(s);
        } catch (const std::exception&) {
          return std::string("must be a number");
        }
        return (v > 0.0 && v < 1.0) ? std::string()
                                    : std::string("must lie strictly between 0 and 1");
      },
      "FLOAT in (0,1)", "in_01_open");
  const auto alpha_range = CLI::Validator(
      [](std::string& s) {
        double v = 0.0;
        try {
          v = std::stod(s);
        } catch (const std::exception&) {
          return std::string("must be a number");
        }
        return (v >= 0.5 && v < 1.0) ? std::string() : std::string("must lie in [0.5, 1)");
      },
      "FLOAT in [0.5,1)", "alpha_range");

  std::function<int()> action;

  EmbedOpts eo;
  ConfigBinder ecb;
  CLI::App* embed = app.add_subcommand("embed", "run the full embedding pipeline");
  embed->add_option("--graph", eo.graph, "input edge list (required)");
  embed->add_option("--out", eo.out, "output model file (required)");
  embed->add_option("--report", eo.report, "stage report JSON");
  ecb.bind(embed, "--alpha", eo.knobs.alpha, "path prediction threshold")->check(alpha_range);
  add_variant_options(embed, eo.knobs, ecb);
  add_common_options(embed, eo.knobs, ecb, eo.config);
  embed->callback([&] {
    action = [&] {
      if (!eo.config.empty()) ecb.apply(eo.config);
      return cmd_embed(eo);
    };
  });

  BreakOpts bo;
  ConfigBinder bcb;
  CLI::App* brk = app.add_subcommand("break-cycles", "reduce a digraph to a DAG");
  brk->add_option("--graph", bo.graph, "input edge list (required)");
  brk->add_option("--out", bo.out, "output edge list of the kept DAG (required)");
  brk->add_option("--removed", bo.removed, "removed edges TSV (src dst vote)");
  brk->add_option("--report", bo.report, "summary JSON");
  add_common_options(brk, bo.knobs, bcb, bo.config);
  brk->callback([&] {
    action = [&] {
      if (!bo.config.empty()) bcb.apply(bo.config);
      return cmd_break_cycles(bo);
    };
  });

  EvalLpOpts lo;
  ConfigBinder lcb;
  CLI::App* lp = app.add_subcommand("eval-lp", "link prediction evaluation over variants");
  lp->add_option("--graph", lo.graph, "input edge list (required)");
  lp->add_option("--out", lo.out, "report JSON (required)");
  lcb.bind(lp, "--ratio", lo.ratio, "held-out positive edge fraction")->check(in_01_open);
  lcb.bind(lp, "--attempts", lo.attempts, "negative sampling attempt multiplier");
  lcb.bind(lp, "--variants", lo.variants, "comma list of proximity variants");
  add_variant_options(lp, lo.knobs, lcb);
  add_common_options(lp, lo.knobs, lcb, lo.config);
  lp->callback([&] {
    action = [&] {
      if (!lo.config.empty()) lcb.apply(lo.config);
      return cmd_eval_lp(lo);
    };
  });

  CLI::App* cqa = app.add_subcommand("cqa", "community question answering tasks");
  cqa->require_subcommand(1);

  CqaIngestOpts io;
  CLI::App* ingest = cqa->add_subcommand(
      "ingest", "parse a Stack Exchange dump or records file into pipeline inputs");
  ingest->add_option("--posts", io.posts, "Posts.xml path");
  ingest->add_option("--votes", io.votes, "Votes.xml path");
  ingest->add_option("--records-in", io.records_in, "existing records TSV instead of a dump");
  ingest->add_option("--out", io.out, "records TSV");
  ingest->add_option("--graph-out", io.graph_out, "competition graph edge list for embed");
  ingest->add_option("--report", io.report, "ingest stats JSON");
  ingest->callback([&] { action = [&] { return cmd_cqa_ingest(io); }; });

  CqaEvalQdeOpts qo;
  CLI::App* qde = cqa->add_subcommand("eval-qde", "pairwise question difficulty accuracy");
  qde->add_option("--model", qo.model, "trained model file (required)");
  qde->add_option("--records", qo.records, "records TSV (required)");
  qde->add_option("--out", qo.out, "report JSON (required)");
  qde->callback([&] { action = [&] { return cmd_cqa_eval_qde(qo); }; });

  CqaRouteOpts ro;
  ConfigBinder rcb;
  CLI::App* route = cqa->add_subcommand("route", "route cold questions to answerers");
  route->add_option("--model", ro.model, "trained model file (required)");
  route->add_option("--records", ro.records, "records TSV, training and cold together (required)");
  route->add_option("--vectors", ro.vectors, "text vector TSV for history-free questions");
  rcb.bind(route, "--window", ro.window, "history window size");
  rcb.bind(route, "--neighbors", ro.neighbors, "text fallback neighbor count");
  route->add_option("--out", ro.out, "report JSON (required)");
  route->add_option("--config", ro.config, "flat key=value config file; flags take precedence");
  route->callback([&] {
    action = [&] {
      if (!ro.config.empty()) rcb.apply(ro.config);
      return cmd_cqa_route(ro);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (!action) {
    std::cerr << app.help();
    return 2;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
