#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "atp/error.hpp"
#include "atp/factorize.hpp"
#include "atp/graph.hpp"

namespace atp {

// One resolved or pending question. best_answerer_id is empty while the
// question has no accepted answer; answerer_ids lists everyone who answered,
// accepted or not. creation_time is any monotone integer timestamp.
struct QARecord {
  std::string question_id;
  std::string asker_id;
  std::string best_answerer_id;
  std::vector<std::string> answerer_ids;
  std::int64_t creation_time = 0;
  std::int64_t bounty = 0;

  bool resolved() const { return !best_answerer_id.empty(); }
};

inline std::string user_label(std::string_view user_id) {
  return "u:" + std::string(user_id);
}

inline std::string question_label(std::string_view question_id) {
  return "q:" + std::string(question_id);
}

enum class NodeKind : std::uint8_t { user, question };

// Users and questions share one node id space; labels carry a "u:"/"q:"
// prefix so the two id universes cannot collide.
struct CompetitionGraph {
  DirectedGraph graph;
  std::vector<NodeKind> kinds;  // by node id
  std::size_t self_best_skipped = 0;
};

// asker -> question -> best answerer for every resolved record. Unresolved
// records contribute nothing. A record whose asker accepted their own answer
// is skipped and counted: it carries no competition signal.
inline CompetitionGraph build_competition_graph(const std::vector<QARecord>& records) {
  CompetitionGraph out;
  GraphBuilder b;
  for (const QARecord& r : records) {
    if (!r.resolved()) continue;
    if (r.asker_id == r.best_answerer_id) {
      ++out.self_best_skipped;
      continue;
    }
    const std::string q = question_label(r.question_id);
    b.add_edge(user_label(r.asker_id), q);
    b.add_edge(q, user_label(r.best_answerer_id));
  }
  out.graph = std::move(b).build();
  out.kinds.resize(out.graph.node_count());
  for (NodeId v = 0; v < out.graph.node_count(); ++v)
    out.kinds[v] = out.graph.label(v)[0] == 'q' ? NodeKind::question : NodeKind::user;
  return out;
}

// ---- difficulty evaluation ----

struct DifficultyAccuracy {
  double correct = 0.0;  // 1 per agreeing pair, 0.5 per score tie
  std::size_t pairs = 0;
  std::size_t questions = 0;

  double accuracy() const { return pairs == 0 ? 0.0 : correct / static_cast<double>(pairs); }
};

// Higher bounty is treated as harder; the model calls question b harder than
// question a when score(a, b) > score(b, a). Records without a positive
// bounty or absent from the model are ignored; equal-bounty pairs are not
// gradable and are excluded.
inline DifficultyAccuracy pairwise_difficulty_accuracy(const EmbeddingModel& model,
                                                       const std::vector<QARecord>& records) {
  std::vector<std::pair<NodeId, std::int64_t>> qs;
  std::unordered_set<std::string> seen;
  for (const QARecord& r : records) {
    if (r.bounty <= 0) continue;
    if (!seen.insert(r.question_id).second) continue;
    if (auto id = model.find(question_label(r.question_id))) qs.emplace_back(*id, r.bounty);
  }
  if (qs.size() < 2)
    throw error("pairwise_difficulty_accuracy: need at least two bounty questions in the model");
  DifficultyAccuracy out;
  out.questions = qs.size();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::size_t j = i + 1; j < qs.size(); ++j) {
      if (qs[i].second == qs[j].second) continue;
      const double ab = model.score(qs[i].first, qs[j].first);
      const double ba = model.score(qs[j].first, qs[i].first);
      const bool truth_b_harder = qs[j].second > qs[i].second;
      ++out.pairs;
      if (ab == ba)
        out.correct += 0.5;
      else if ((ab > ba) == truth_b_harder)
        out.correct += 1.0;
    }
  }
  if (out.pairs == 0)
    throw error("pairwise_difficulty_accuracy: no question pairs with unequal bounty");
  return out;
}

// ---- cold question embedding and routing ----

// A question unseen during training. candidate_answerers and
// true_best_answerer come from the held-out record itself.
struct ColdQuestion {
  std::string question_id;
  std::string asker_id;
  std::vector<std::string> candidate_answerers;
  std::string true_best_answerer;
  std::int64_t creation_time = 0;
};

using TextVectorTable = std::map<std::string, std::vector<double>>;

struct EgaConfig {
  int window = 5;
  int fallback_neighbors = 5;
};

struct EgaEmbedding {
  std::vector<double> source;  // s*, length k
  std::vector<double> target;  // t*, length k
  std::string donor_question;  // set when the window supplied the embedding
  std::vector<std::string> donor_neighbors;  // set on the text-vector fallback
};

namespace detail {

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, na = 0.0, nb = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    num += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return num / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// Inherits the embedding of the hardest question in the asker's recent
// history: the window entry that every other entry has a path to and that
// has a path to no other entry under the model's directional scores. When no
// entry strictly dominates (score ties or cyclic comparisons), the most
// recent entry wins, then the larger question id. With an empty usable
// history the question falls back to averaging the vectors of its
// text-nearest training questions; with no text vector either it cannot be
// embedded.
inline EgaEmbedding ega_embed(const EmbeddingModel& model, const ColdQuestion& cold,
                              const std::vector<std::string>& asker_history,
                              const TextVectorTable& vectors, const EgaConfig& cfg = {}) {
  if (cfg.window < 1) throw error("ega_embed: window must be at least 1");
  if (cfg.fallback_neighbors < 1) throw error("ega_embed: fallback_neighbors must be at least 1");

  // asker_history is oldest-first; keep the most recent `window` entries the
  // model actually knows.
  std::vector<std::pair<NodeId, std::string>> window_qs;
  for (const std::string& qid : asker_history) {
    if (auto id = model.find(question_label(qid))) window_qs.emplace_back(*id, qid);
  }
  if (window_qs.size() > static_cast<std::size_t>(cfg.window))
    window_qs.erase(window_qs.begin(),
                    window_qs.end() - static_cast<std::ptrdiff_t>(cfg.window));

  const std::size_t k = model.k;
  EgaEmbedding out;

  if (!window_qs.empty()) {
    std::size_t best = window_qs.size();  // strict dominance winner, if any
    for (std::size_t h = 0; h < window_qs.size() && best == window_qs.size(); ++h) {
      bool dominates = true;
      for (std::size_t i = 0; i < window_qs.size() && dominates; ++i) {
        if (i == h) continue;
        dominates = model.score(window_qs[i].first, window_qs[h].first) >
                    model.score(window_qs[h].first, window_qs[i].first);
      }
      if (dominates) best = h;
    }
    // No strict winner (score ties or cyclic comparisons): the most recent
    // entry wins. Window positions are unique, so no further tie-break fires.
    if (best == window_qs.size()) best = window_qs.size() - 1;
    const NodeId q = window_qs[best].first;
    const std::size_t n = model.labels.size();
    out.source.assign(model.S.begin() + static_cast<std::ptrdiff_t>(q * k),
                      model.S.begin() + static_cast<std::ptrdiff_t>((q + 1) * k));
    out.target.resize(k);
    for (std::size_t d = 0; d < k; ++d) out.target[d] = model.T[d * n + q];
    out.donor_question = window_qs[best].second;
    return out;
  }

  auto own = vectors.find(cold.question_id);
  if (own == vectors.end() || own->second.empty())
    throw error("cannot embed cold question: no usable history and no text vector for " +
                cold.question_id);

  // Nearest training questions by text cosine; ties resolve to the smaller
  // question id. The table iterates in key order, so the selection is
  // deterministic.
  std::vector<std::pair<double, std::string>> sims;
  for (const auto& [qid, vec] : vectors) {
    if (qid == cold.question_id) continue;
    if (!model.find(question_label(qid))) continue;
    sims.emplace_back(detail::cosine(own->second, vec), qid);
  }
  if (sims.empty())
    throw error("cannot embed cold question: no training questions with text vectors");
  std::stable_sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const std::size_t take = std::min(sims.size(), static_cast<std::size_t>(cfg.fallback_neighbors));
  out.source.assign(k, 0.0);
  out.target.assign(k, 0.0);
  const std::size_t n = model.labels.size();
  for (std::size_t i = 0; i < take; ++i) {
    const NodeId q = model.id_of(question_label(sims[i].second));
    for (std::size_t d = 0; d < k; ++d) {
      out.source[d] += model.S[q * k + d];
      out.target[d] += model.T[d * n + q];
    }
    out.donor_neighbors.push_back(sims[i].second);
  }
  for (std::size_t d = 0; d < k; ++d) {
    out.source[d] /= static_cast<double>(take);
    out.target[d] /= static_cast<double>(take);
  }
  return out;
}

struct RoutedCandidate {
  std::string user_id;
  double score = 0.0;
};

// Candidates ranked by sigmoid(<s*, t_user>) descending; ties break by user
// label ascending. Every candidate must be a user node of the model.
inline std::vector<RoutedCandidate> route(const EmbeddingModel& model, const EgaEmbedding& emb,
                                          const std::vector<std::string>& candidate_answerers) {
  if (candidate_answerers.empty()) throw error("route: no candidate answerers");
  if (emb.source.size() != model.k || emb.target.size() != model.k)
    throw error("route: embedding dimension does not match the model");
  const std::size_t n = model.labels.size();
  std::vector<RoutedCandidate> out;
  out.reserve(candidate_answerers.size());
  for (const std::string& uid : candidate_answerers) {
    const std::string lab = user_label(uid);
    auto id = model.find(lab);
    if (!id) throw error("route: candidate user not in model: " + lab);
    double acc = 0.0;
    for (std::size_t d = 0; d < model.k; ++d) acc += emb.source[d] * model.T[d * n + *id];
    out.push_back({uid, 1.0 / (1.0 + std::exp(-acc))});
  }
  std::stable_sort(out.begin(), out.end(), [](const RoutedCandidate& a, const RoutedCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return user_label(a.user_id) < user_label(b.user_id);
  });
  return out;
}

struct RoutingMetrics {
  double mrr = 0.0;
  double precision_at_3 = 0.0;
  double accuracy = 0.0;
  std::size_t count = 0;
};

// rankings[i] lists user ids best-first; truths[i] must appear in it.
inline RoutingMetrics routing_metrics(const std::vector<std::vector<std::string>>& rankings,
                                      const std::vector<std::string>& truths) {
  if (rankings.empty()) throw error("routing_metrics: no questions");
  if (rankings.size() != truths.size())
    throw error("routing_metrics: rankings and truths differ in length");
  RoutingMetrics m;
  m.count = rankings.size();
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    auto it = std::find(rankings[i].begin(), rankings[i].end(), truths[i]);
    if (it == rankings[i].end())
      throw error("routing_metrics: true answerer missing from ranking " + std::to_string(i));
    const std::size_t rank = static_cast<std::size_t>(it - rankings[i].begin()) + 1;
    m.mrr += 1.0 / static_cast<double>(rank);
    if (rank <= 3) m.precision_at_3 += 1.0;
    if (rank == 1) m.accuracy += 1.0;
  }
  m.mrr /= static_cast<double>(m.count);
  m.precision_at_3 /= static_cast<double>(m.count);
  m.accuracy /= static_cast<double>(m.count);
  return m;
}

// ---- record and vector files ----

// Tab-separated, one record per line:
//   question_id  asker_id  best_answerer_id|-  bounty  creation_time  answerers
// answerers is comma-separated; "-" stands for an empty field in both the
// best-answerer and answerers columns.
inline std::vector<QARecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open records file: " + path);
  std::vector<QARecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      f.push_back(line.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (f.size() != 6)
      throw error(path + ":" + std::to_string(lineno) + ": expected 6 tab-separated fields, got " +
                  std::to_string(f.size()));
    QARecord r;
    r.question_id = f[0];
    r.asker_id = f[1];
    if (f[2] != "-") r.best_answerer_id = f[2];
    try {
      r.bounty = std::stoll(f[3]);
      r.creation_time = std::stoll(f[4]);
    } catch (const std::exception&) {
      throw error(path + ":" + std::to_string(lineno) + ": malformed numeric field");
    }
    if (r.bounty < 0)
      throw error(path + ":" + std::to_string(lineno) + ": negative bounty");
    if (f[5] != "-" && !f[5].empty()) {
      std::size_t s = 0;
      while (true) {
        std::size_t comma = f[5].find(',', s);
        r.answerer_ids.push_back(f[5].substr(s, comma == std::string::npos ? comma : comma - s));
        if (comma == std::string::npos) break;
        s = comma + 1;
      }
    }
    if (r.resolved() &&
        std::find(r.answerer_ids.begin(), r.answerer_ids.end(), r.best_answerer_id) ==
            r.answerer_ids.end())
      throw error(path + ":" + std::to_string(lineno) +
                  ": best answerer is not among the answerers");
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_records(const std::string& path, const std::vector<QARecord>& records) {
  std::ofstream out(path);
  if (!out) throw error("cannot open records file for writing: " + path);
  for (const QARecord& r : records) {
    out << r.question_id << '\t' << r.asker_id << '\t'
        << (r.best_answerer_id.empty() ? "-" : r.best_answerer_id) << '\t' << r.bounty << '\t'
        << r.creation_time << '\t';
    if (r.answerer_ids.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < r.answerer_ids.size(); ++i) {
        if (i) out << ',';
        out << r.answerer_ids[i];
      }
    }
    out << '\n';
  }
  if (!out) throw error("failed writing records file: " + path);
}

// Whitespace-separated: question_id then the vector components. Every row
// must have the same dimension.
inline TextVectorTable load_text_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open vectors file: " + path);
  TextVectorTable out;
  std::string line;
  std::size_t lineno = 0, dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string qid;
    ss >> qid;
    if (qid.empty()) continue;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (vec.empty())
      throw error(path + ":" + std::to_string(lineno) + ": vector row has no components");
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim)
      throw error(path + ":" + std::to_string(lineno) + ": vector dimension mismatch");
    if (!out.emplace(qid, std::move(vec)).second)
      throw error(path + ":" + std::to_string(lineno) + ": duplicate question id " + qid);
  }
  return out;
}

// ---- Stack Exchange dump ingestion ----

namespace detail {

inline std::string xml_unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out += s[i++];
      continue;
    }
    std::size_t semi = s.find(';', i);
    if (semi == std::string_view::npos) {
      out += s[i++];
      continue;
    }
    std::string_view ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp")
      out += '&';
    else if (ent == "lt")
      out += '<';
    else if (ent == "gt")
      out += '>';
    else if (ent == "quot")
      out += '"';
    else if (ent == "apos")
      out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      long code = 0;
      try {
        code = (ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X'))
                   ? std::stol(std::string(ent.substr(2)), nullptr, 16)
                   : std::stol(std::string(ent.substr(1)));
      } catch (const std::exception&) {
        code = -1;
      }
      if (code >= 0 && code < 128)
        out += static_cast<char>(code);
      // Non-ASCII references are dropped; attribute values we consume are
      // ids, types, and timestamps.
    } else {
      // Unknown entity: keep it verbatim.
      out += std::string(s.substr(i, semi - i + 1));
    }
    i = semi + 1;
  }
  return out;
}

// Parses the attributes of one <row .../> element. Throws on structurally
// broken markup (unterminated quote, missing '='); returns false when the
// line holds no row element at all.
inline bool parse_row_attrs(const std::string& line,
                            std::unordered_map<std::string, std::string>& out) {
  std::size_t pos = line.find("<row");
  if (pos == std::string::npos) return false;
  pos += 4;
  out.clear();
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos >= line.size()) throw error("malformed XML: unterminated row element");
    if (line[pos] == '/' || line[pos] == '>') return true;
    std::size_t name_start = pos;
    while (pos < line.size() && line[pos] != '=' &&
           !std::isspace(static_cast<unsigned char>(line[pos])))
      ++pos;
    if (pos >= line.size() || line[pos] != '=')
      throw error("malformed XML: attribute without value");
    std::string name = line.substr(name_start, pos - name_start);
    ++pos;
    if (pos >= line.size() || line[pos] != '"')
      throw error("malformed XML: attribute value must be quoted");
    ++pos;
    std::size_t close = line.find('"', pos);
    if (close == std::string::npos) throw error("malformed XML: unterminated attribute value");
    out[std::move(name)] = xml_unescape(std::string_view(line).substr(pos, close - pos));
    pos = close + 1;
  }
  throw error("malformed XML: row element not closed");
}

// "2017-06-12T10:20:30.123" -> 20170612102030123. Timestamps without a
// fractional part are scaled so mixed precision stays monotone.
inline std::int64_t timestamp_to_int(std::string_view iso) {
  std::string digits;
  for (char c : iso)
    if (c >= '0' && c <= '9') digits += c;
  if (digits.empty()) return 0;
  if (digits.size() == 14) digits += "000";
  if (digits.size() > 17) digits.resize(17);
  return std::stoll(digits);
}

}  // namespace detail

struct IngestStats {
  std::size_t questions = 0;
  std::size_t answers = 0;
  std::size_t posts_skipped = 0;  // rows missing a required attribute
  std::size_t votes_skipped = 0;
  std::size_t bounty_votes = 0;
};

struct IngestResult {
  std::vector<QARecord> records;          // file order of the question rows
  std::vector<ColdQuestion> cold_candidates;  // resolved records with answerers
  IngestStats stats;
};

// Posts.xml: PostTypeId 1 rows are questions (need Id, OwnerUserId,
// CreationDate), PostTypeId 2 rows are answers (need Id, ParentId,
// OwnerUserId). The accepted answer's owner becomes the best answerer.
// Votes.xml: VoteTypeId 9 rows close a bounty; their BountyAmount sums into
// the owning question, resolving answer post ids through ParentId.
inline IngestResult ingest_stackexchange(const std::string& posts_xml,
                                         const std::string& votes_xml) {
  IngestResult out;

  struct Question {
    std::string asker;
    std::string accepted_answer_id;
    std::int64_t creation = 0;
    std::vector<std::string> answerers;   // file order, deduplicated
    std::unordered_map<std::string, bool> seen_answerer;
    std::int64_t bounty = 0;
  };
  std::unordered_map<std::string, Question> questions;
  std::vector<std::string> question_order;
  std::unordered_map<std::string, std::pair<std::string, std::string>> answers;  // id -> (parent, owner)

  {
    std::ifstream in(posts_xml);
    if (!in) throw error("cannot open posts file: " + posts_xml);
    std::string line;
    std::unordered_map<std::string, std::string> attrs;
    while (std::getline(in, line)) {
      if (!detail::parse_row_attrs(line, attrs)) continue;
      auto get = [&](const char* name) -> const std::string* {
        auto it = attrs.find(name);
        return it == attrs.end() || it->second.empty() ? nullptr : &it->second;
      };
      const std::string* id = get("Id");
      const std::string* type = get("PostTypeId");
      if (!id || !type) {
        ++out.stats.posts_skipped;
        continue;
      }
      if (*type == "1") {
        const std::string* owner = get("OwnerUserId");
        const std::string* created = get("CreationDate");
        if (!owner || !created || questions.count(*id)) {
          ++out.stats.posts_skipped;
          continue;
        }
        Question& q = questions[*id];
        q.asker = *owner;
        q.creation = detail::timestamp_to_int(*created);
        if (const std::string* acc = get("AcceptedAnswerId")) q.accepted_answer_id = *acc;
        question_order.push_back(*id);
        ++out.stats.questions;
      } else if (*type == "2") {
        const std::string* parent = get("ParentId");
        const std::string* owner = get("OwnerUserId");
        if (!parent || !owner) {
          ++out.stats.posts_skipped;
          continue;
        }
        answers[*id] = {*parent, *owner};
        ++out.stats.answers;
      }
      // Other post types (wiki, tag info) are not part of the exchange.
    }
  }

  for (const auto& [aid, pa] : answers) {
    (void)aid;
    auto it = questions.find(pa.first);
    if (it == questions.end()) continue;
    if (!it->second.seen_answerer.emplace(pa.second, true).second) continue;
    it->second.answerers.push_back(pa.second);
  }
  // answers is an unordered map; restore a stable answerer order.
  for (auto& [qid, q] : questions) {
    (void)qid;
    std::sort(q.answerers.begin(), q.answerers.end());
  }

  {
    std::ifstream in(votes_xml);
    if (!in) throw error("cannot open votes file: " + votes_xml);
    std::string line;
    std::unordered_map<std::string, std::string> attrs;
    while (std::getline(in, line)) {
      if (!detail::parse_row_attrs(line, attrs)) continue;
      auto it = attrs.find("VoteTypeId");
      if (it == attrs.end()) {
        ++out.stats.votes_skipped;
        continue;
      }
      if (it->second != "9") continue;
      auto post = attrs.find("PostId");
      auto amount = attrs.find("BountyAmount");
      if (post == attrs.end() || amount == attrs.end()) {
        ++out.stats.votes_skipped;
        continue;
      }
      std::int64_t value = 0;
      try {
        value = std::stoll(amount->second);
      } catch (const std::exception&) {
        ++out.stats.votes_skipped;
        continue;
      }
      std::string qid = post->second;
      if (!questions.count(qid)) {
        auto ans = answers.find(qid);
        if (ans == answers.end()) {
          ++out.stats.votes_skipped;
          continue;
        }
        qid = ans->second.first;
      }
      auto q = questions.find(qid);
      if (q == questions.end()) {
        ++out.stats.votes_skipped;
        continue;
      }
      q->second.bounty += value;
      ++out.stats.bounty_votes;
    }
  }

  out.records.reserve(question_order.size());
  for (const std::string& qid : question_order) {
    const Question& q = questions.at(qid);
    QARecord r;
    r.question_id = qid;
    r.asker_id = q.asker;
    r.creation_time = q.creation;
    r.bounty = q.bounty;
    r.answerer_ids = q.answerers;
    if (!q.accepted_answer_id.empty()) {
      auto a = answers.find(q.accepted_answer_id);
      if (a != answers.end()) r.best_answerer_id = a->second.second;
    }
    if (r.resolved() && !r.answerer_ids.empty()) {
      ColdQuestion c;
      c.question_id = r.question_id;
      c.asker_id = r.asker_id;
      c.candidate_answerers = r.answerer_ids;
      c.true_best_answerer = r.best_answerer_id;
      c.creation_time = r.creation_time;
      out.cold_candidates.push_back(std::move(c));
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ColdQuestion> cold_candidates(const std::vector<QARecord>& records) {
  std::vector<ColdQuestion> out;
  for (const QARecord& r : records) {
    if (!r.resolved() || r.answerer_ids.empty()) continue;
    ColdQuestion c;
    c.question_id = r.question_id;
    c.asker_id = r.asker_id;
    c.candidate_answerers = r.answerer_ids;
    c.true_best_answerer = r.best_answerer_id;
    c.creation_time = r.creation_time;
    out.push_back(std::move(c));
  }
  return out;
}

// ---- end-to-end cold routing ----

struct ColdRouteOutcome {
  RoutingMetrics metrics;
  std::vector<std::string> routed_questions;
  std::vector<std::size_t> truth_ranks;
  std::size_t skipped = 0;  // unroutable: truth or every candidate missing, or unembeddable
};

// Replays the records in creation order. Questions the model was trained on
// feed each asker's history; the rest are routed cold. Candidates absent
// from the model are dropped; a question is skipped when its true answerer
// is absent, no candidate survives, or no embedding can be formed.
inline ColdRouteOutcome route_cold_questions(const EmbeddingModel& model,
                                             const std::vector<QARecord>& records,
                                             const TextVectorTable& vectors,
                                             const EgaConfig& cfg = {}) {
  std::vector<const QARecord*> order;
  order.reserve(records.size());
  for (const QARecord& r : records) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const QARecord* a, const QARecord* b) {
    if (a->creation_time != b->creation_time) return a->creation_time < b->creation_time;
    return a->question_id < b->question_id;
  });

  std::unordered_map<std::string, std::vector<std::string>> history;  // asker -> qids, oldest first
  std::vector<std::vector<std::string>> rankings;
  std::vector<std::string> truths;
  ColdRouteOutcome out;

  for (const QARecord* r : order) {
    if (model.find(question_label(r->question_id))) {
      history[r->asker_id].push_back(r->question_id);
      continue;
    }
    if (!r->resolved() || r->answerer_ids.empty()) continue;
    std::vector<std::string> candidates;
    for (const std::string& uid : r->answerer_ids)
      if (model.find(user_label(uid))) candidates.push_back(uid);
    if (candidates.empty() ||
        std::find(candidates.begin(), candidates.end(), r->best_answerer_id) == candidates.end()) {
      ++out.skipped;
      continue;
    }
    ColdQuestion cold;
    cold.question_id = r->question_id;
    cold.asker_id = r->asker_id;
    cold.candidate_answerers = candidates;
    cold.true_best_answerer = r->best_answerer_id;
    cold.creation_time = r->creation_time;
    EgaEmbedding emb;
    try {
      emb = ega_embed(model, cold, history[r->asker_id], vectors, cfg);
    } catch (const error&) {
      ++out.skipped;
      continue;
    }
    std::vector<RoutedCandidate> ranked = route(model, emb, candidates);
    std::vector<std::string> names;
    names.reserve(ranked.size());
    for (const RoutedCandidate& c : ranked) names.push_back(c.user_id);
    const auto pos = std::find(names.begin(), names.end(), r->best_answerer_id);
    out.truth_ranks.push_back(static_cast<std::size_t>(pos - names.begin()) + 1);
    out.routed_questions.push_back(r->question_id);
    rankings.push_back(std::move(names));
    truths.push_back(r->best_answerer_id);
  }

  if (rankings.empty()) throw error("route_cold_questions: no routable cold questions");
  out.metrics = routing_metrics(rankings, truths);
  return out;
}

}  // namespace atp
