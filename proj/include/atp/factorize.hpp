#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "atp/error.hpp"
#include "atp/parallel.hpp"
#include "atp/proximity.hpp"
#include "atp/seeding.hpp"

namespace atp {

struct FactorizationConfig {
  int k = 128;
  double lambda = 0.1;       // L2 on both factors
  int sweeps = 100;
  double zero_weight = 0.05; // weight of unobserved cells, pulled toward 0
  double tol = 1e-5;         // stop when the relative objective drop falls below
  std::uint64_t seed = 0;
  int threads = 1;
};

// Nonnegative factors: S holds one source row per node (n x k), T one target
// column per node (k x n). A pair score is sigmoid(<s_i, t_j>), never below
// 0.5 since the dot product cannot go negative.
struct EmbeddingModel {
  std::uint32_t k = 0;
  std::vector<std::string> labels;
  std::vector<double> S;  // n x k, row-major
  std::vector<double> T;  // k x n, row-major
  double alpha = 0.5;
  std::vector<double> objective_trace;  // per completed sweep; not serialized

  std::size_t node_count() const { return labels.size(); }

  NodeId id_of(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) throw error("unknown node label: " + std::string(label));
    return it->second;
  }

  std::optional<NodeId> find(std::string_view label) const {
    auto it = index_.find(std::string(label));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double dot(NodeId i, NodeId j) const {
    check(i), check(j);
    const std::size_t n = labels.size();
    double acc = 0.0;
    for (std::uint32_t d = 0; d < k; ++d) acc += S[i * k + d] * T[d * n + j];
    return acc;
  }

  double score(NodeId i, NodeId j) const { return 1.0 / (1.0 + std::exp(-dot(i, j))); }

  double score(std::string_view i, std::string_view j) const {
    return score(id_of(i), id_of(j));
  }

  bool predict_path(NodeId i, NodeId j) const {
    if (!(alpha >= 0.5 && alpha < 1.0))
      throw error("predict_path: alpha must lie in [0.5, 1)");
    return score(i, j) > alpha;
  }

  void build_index() {
    index_.clear();
    for (NodeId v = 0; v < labels.size(); ++v) index_.emplace(labels[v], v);
  }

 private:
  void check(NodeId v) const {
    if (v >= labels.size()) throw error("node id out of range");
  }
  std::unordered_map<std::string, NodeId> index_;
};

// Cyclic coordinate descent, one rank at a time: for each dimension d, all
// source coordinates S[., d] are re-optimized exactly, then all target
// coordinates T[d, .]. Unobserved cells participate with weight zero_weight
// through the Gram matrices of both factors, so a sweep costs
// O(k * nnz + n * k^2) instead of touching the dense complement.
inline EmbeddingModel factorize(const ProximityMatrix& m,
                                const std::vector<std::string>& labels,
                                const FactorizationConfig& cfg) {
  const std::size_t n = m.n;
  const std::size_t nnz = m.nnz();
  if (labels.size() != n) throw error("factorize: label count does not match matrix");
  if (nnz == 0) throw error("factorize: empty proximity matrix");
  if (cfg.k < 1) throw error("factorize: k must be positive");
  if (cfg.sweeps < 1) throw error("factorize: sweeps must be positive");
  if (cfg.lambda < 0) throw error("factorize: lambda must be nonnegative");
  if (!(cfg.zero_weight >= 0.0 && cfg.zero_weight <= 1.0))
    throw error("factorize: zero_weight must lie in [0, 1]");
  for (double v : m.val)
    if (!std::isfinite(v) || v < 0.0)
      throw error("factorize: proximity entries must be finite and nonnegative");

  const std::size_t k = static_cast<std::size_t>(cfg.k);
  const double rho = cfg.zero_weight;
  const double lambda = cfg.lambda;
  const int threads = resolve_threads(cfg.threads);

  EmbeddingModel model;
  model.k = static_cast<std::uint32_t>(cfg.k);
  model.labels = labels;
  model.build_index();
  model.S.resize(n * k);
  model.T.resize(k * n);

  // Uniform init in (0, 1/sqrt(k)]: keeps first products near the data scale.
  std::mt19937_64 rng(cfg.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (double& s : model.S) s = (1.0 - rng_unit(rng)) * scale;
  for (double& t : model.T) t = (1.0 - rng_unit(rng)) * scale;

  // Column-major view of the observed cells: position into the CSR arrays.
  std::vector<std::size_t> csc_ptr(n + 1, 0);
  std::vector<NodeId> csc_row(nnz);
  std::vector<std::size_t> csc_pos(nnz);
  for (std::size_t p = 0; p < nnz; ++p) ++csc_ptr[m.col[p] + 1];
  for (std::size_t j = 0; j < n; ++j) csc_ptr[j + 1] += csc_ptr[j];
  {
    std::vector<std::size_t> cursor(csc_ptr.begin(), csc_ptr.end() - 1);
    for (NodeId i = 0; i < n; ++i)
      for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
        std::size_t q = cursor[m.col[p]]++;
        csc_row[q] = i;
        csc_pos[q] = p;
      }
  }

  std::vector<double>& S = model.S;
  std::vector<double>& T = model.T;
  std::vector<double> E(nnz);  // residual on observed cells, CSR order
  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
        double acc = 0.0;
        for (std::size_t d = 0; d < k; ++d) acc += S[i * k + d] * T[d * n + m.col[p]];
        E[p] = m.val[p] - acc;
      }
  });

  std::vector<double> GS(k * k), GT(k * k);
  auto refresh_grams = [&] {
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a; b < k; ++b) {
        double s = 0.0, t = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += S[i * k + a] * S[i * k + b];
        for (std::size_t j = 0; j < n; ++j) t += T[a * n + j] * T[b * n + j];
        GS[a * k + b] = GS[b * k + a] = s;
        GT[a * k + b] = GT[b * k + a] = t;
      }
  };
  refresh_grams();

  for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
    for (std::size_t d = 0; d < k; ++d) {
      parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          const double s_old = S[i * k + d];
          double num_obs = 0.0, sum_t2 = 0.0, sum_pt = 0.0;
          for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
            const double tdj = T[d * n + m.col[p]];
            const double r = E[p] + s_old * tdj;  // residual without dim d
            num_obs += r * tdj;
            sum_t2 += tdj * tdj;
            sum_pt += ((m.val[p] - E[p]) - s_old * tdj) * tdj;
          }
          double full_pt = -s_old * GT[d * k + d];
          for (std::size_t a = 0; a < k; ++a) full_pt += S[i * k + a] * GT[a * k + d];
          const double num = num_obs - rho * (full_pt - sum_pt);
          const double den = sum_t2 + rho * (GT[d * k + d] - sum_t2) + lambda + 1e-12;
          double s_new = num / den;
          if (s_new < 0.0) s_new = 0.0;
          if (s_new != s_old) {
            for (std::size_t p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p)
              E[p] += (s_old - s_new) * T[d * n + m.col[p]];
            S[i * k + d] = s_new;
          }
        }
      });
      for (std::size_t a = 0; a < k; ++a) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += S[i * k + d] * S[i * k + a];
        GS[d * k + a] = GS[a * k + d] = acc;
      }

      parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
          const double t_old = T[d * n + j];
          double num_obs = 0.0, sum_s2 = 0.0, sum_ps = 0.0;
          for (std::size_t q = csc_ptr[j]; q < csc_ptr[j + 1]; ++q) {
            const std::size_t p = csc_pos[q];
            const double sid = S[csc_row[q] * k + d];
            const double r = E[p] + sid * t_old;
            num_obs += r * sid;
            sum_s2 += sid * sid;
            sum_ps += ((m.val[p] - E[p]) - sid * t_old) * sid;
          }
          double full_ps = -t_old * GS[d * k + d];
          for (std::size_t a = 0; a < k; ++a) full_ps += GS[d * k + a] * T[a * n + j];
          const double num = num_obs - rho * (full_ps - sum_ps);
          const double den = sum_s2 + rho * (GS[d * k + d] - sum_s2) + lambda + 1e-12;
          double t_new = num / den;
          if (t_new < 0.0) t_new = 0.0;
          if (t_new != t_old) {
            for (std::size_t q = csc_ptr[j]; q < csc_ptr[j + 1]; ++q)
              E[csc_pos[q]] += S[csc_row[q] * k + d] * (t_old - t_new);
            T[d * n + j] = t_new;
          }
        }
      });
      for (std::size_t a = 0; a < k; ++a) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += T[d * n + j] * T[a * n + j];
        GT[d * k + a] = GT[a * k + d] = acc;
      }
    }

    // Objective, with Grams rebuilt from scratch to wash out drift:
    //   sum_obs (M - ST)^2 + rho * sum_unobs (ST)^2 + lambda * frobenius
    // where sum_all (ST)^2 = sum_ab GS_ab * GT_ab.
    refresh_grams();
    double sum_e2 = 0.0, sum_fit2 = 0.0;
    for (std::size_t p = 0; p < nnz; ++p) {
      sum_e2 += E[p] * E[p];
      const double pred = m.val[p] - E[p];
      sum_fit2 += pred * pred;
    }
    double total_pred2 = 0.0, frob = 0.0;
    for (std::size_t a = 0; a < k * k; ++a) total_pred2 += GS[a] * GT[a];
    for (std::size_t a = 0; a < k; ++a) frob += GS[a * k + a] + GT[a * k + a];
    double zero_part = total_pred2 - sum_fit2;
    if (zero_part < 0.0) zero_part = 0.0;
    const double objective = sum_e2 + rho * zero_part + lambda * frob;
    model.objective_trace.push_back(objective);

    if (sweep > 0) {
      const double prev = model.objective_trace[sweep - 1];
      if (prev <= 0.0 || (prev - objective) / prev < cfg.tol) break;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Model file: magic, version, k, node count, label table, S, T, alpha.
// Fixed little-endian-native layout; rewritten atomically (temp + rename).

namespace detail {

constexpr char kModelMagic[4] = {'A', 'T', 'P', 'M'};
constexpr std::uint32_t kModelVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof v);
}

}  // namespace detail

inline void save_model(const std::string& path, const EmbeddingModel& model) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot write model: " + tmp);
    out.write(detail::kModelMagic, 4);
    detail::put(out, detail::kModelVersion);
    detail::put(out, model.k);
    detail::put(out, static_cast<std::uint64_t>(model.labels.size()));
    for (const std::string& label : model.labels) {
      detail::put(out, static_cast<std::uint32_t>(label.size()));
      out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    out.write(reinterpret_cast<const char*>(model.S.data()),
              static_cast<std::streamsize>(model.S.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(model.T.data()),
              static_cast<std::streamsize>(model.T.size() * sizeof(double)));
    detail::put(out, model.alpha);
    if (!out) throw error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw error("cannot move model into place: " + path + ": " + ec.message());
}

inline EmbeddingModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open model: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, detail::kModelMagic, 4) != 0)
    throw error("not a model file: " + path);
  std::uint32_t version = 0;
  detail::get(in, version);
  if (version != detail::kModelVersion)
    throw error("unsupported model version in " + path);
  EmbeddingModel model;
  std::uint64_t n = 0;
  detail::get(in, model.k);
  detail::get(in, n);
  if (!in || model.k == 0) throw error("corrupt model header: " + path);
  model.labels.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t len = 0;
    detail::get(in, len);
    if (!in) throw error("corrupt model label table: " + path);
    model.labels[i].resize(len);
    in.read(model.labels[i].data(), len);
  }
  model.S.resize(n * model.k);
  model.T.resize(model.k * n);
  in.read(reinterpret_cast<char*>(model.S.data()),
          static_cast<std::streamsize>(model.S.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(model.T.data()),
          static_cast<std::streamsize>(model.T.size() * sizeof(double)));
  detail::get(in, model.alpha);
  if (!in) throw error("truncated model file: " + path);
  if (!(model.alpha >= 0.5 && model.alpha < 1.0))
    throw error("model alpha out of range in " + path);
  model.build_index();
  return model;
}

// Text export: "label<TAB>v1<TAB>...<TAB>vk" per node; source rows to one
// file, target columns to the other.
inline void write_embeddings(const std::string& source_path,
                             const std::string& target_path,
                             const EmbeddingModel& model) {
  const std::size_t n = model.labels.size();
  char buf[64];
  auto dump = [&](const std::string& path, bool source) {
    std::ofstream out(path);
    if (!out) throw error("cannot write embeddings: " + path);
    for (NodeId v = 0; v < n; ++v) {
      out << model.labels[v];
      for (std::uint32_t d = 0; d < model.k; ++d) {
        double x = source ? model.S[v * model.k + d] : model.T[d * n + v];
        std::snprintf(buf, sizeof buf, "%.9g", x);
        out << '\t' << buf;
      }
      out << '\n';
    }
    if (!out) throw error("write failed: " + path);
  };
  dump(source_path, true);
  dump(target_path, false);
}

}  // namespace atp
