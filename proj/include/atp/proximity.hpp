#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "atp/closure.hpp"
#include "atp/error.hpp"
#include "atp/graph.hpp"

namespace atp {

enum class ProximityVariant { constant, linear, harmonic, log };

inline const char* proximity_variant_name(ProximityVariant v) {
  switch (v) {
    case ProximityVariant::constant: return "constant";
    case ProximityVariant::linear: return "linear";
    case ProximityVariant::harmonic: return "harmonic";
    case ProximityVariant::log: return "log";
  }
  return "?";
}

inline ProximityVariant parse_proximity_variant(std::string_view name) {
  if (name == "constant") return ProximityVariant::constant;
  if (name == "linear") return ProximityVariant::linear;
  if (name == "harmonic") return ProximityVariant::harmonic;
  if (name == "log") return ProximityVariant::log;
  throw error("unknown proximity variant: " + std::string(name));
}

// Sparse row-major proximity matrix. Support is exactly the reachability
// closure: an entry exists iff src reaches dst.
struct ProximityMatrix {
  ProximityVariant variant = ProximityVariant::log;
  double c = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  // n + 1 entries
  std::vector<NodeId> col;
  std::vector<double> val;

  std::size_t nnz() const { return col.size(); }
};

struct ProximityOptions {
  ProximityVariant variant = ProximityVariant::log;
  double c = 0.0;  // additive shift, log variant only
  std::uint64_t max_entries = 100000000;
};

// Entry for a reachable pair is a function of the level gap
// delta = level(dst) - level(src), which is at least 1 by construction:
//   constant  1
//   linear    delta
//   harmonic  1 + 1/2 + ... + 1/delta
//   log       c + ln(e + delta)
inline ProximityMatrix proximity_matrix(const ReachabilityClosure& closure,
                                        const std::vector<std::uint32_t>& levels,
                                        const ProximityOptions& opt = {}) {
  if (levels.size() != closure.node_count)
    throw error("proximity_matrix: level count does not match closure");
  if (closure.nnz > opt.max_entries)
    throw error("proximity_matrix: " + std::to_string(closure.nnz) +
                " entries exceed the cap of " + std::to_string(opt.max_entries));

  const std::size_t n = closure.node_count;
  std::uint32_t max_level = 0;
  for (std::uint32_t l : levels) max_level = std::max(max_level, l);
  std::vector<double> harmonic(static_cast<std::size_t>(max_level) + 1, 0.0);
  for (std::size_t d = 1; d < harmonic.size(); ++d)
    harmonic[d] = harmonic[d - 1] + 1.0 / static_cast<double>(d);

  ProximityMatrix m;
  m.variant = opt.variant;
  m.c = opt.c;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  m.col.reserve(closure.nnz);
  m.val.reserve(closure.nnz);
  for (NodeId u = 0; u < n; ++u) {
    const std::uint64_t* row = closure.row(u);
    for (std::size_t k = 0; k < closure.words_per_row; ++k) {
      std::uint64_t word = row[k];
      while (word) {
        NodeId v = static_cast<NodeId>((k << 6) + std::countr_zero(word));
        word &= word - 1;
        std::int64_t delta =
            static_cast<std::int64_t>(levels[v]) - static_cast<std::int64_t>(levels[u]);
        if (delta < 1)
          throw error("proximity_matrix: reachable pair without level gap");
        double value = 1.0;
        switch (opt.variant) {
          case ProximityVariant::constant: value = 1.0; break;
          case ProximityVariant::linear: value = static_cast<double>(delta); break;
          case ProximityVariant::harmonic: value = harmonic[delta]; break;
          case ProximityVariant::log:
            value = opt.c + std::log(std::numbers::e + static_cast<double>(delta));
            break;
        }
        m.col.push_back(v);
        m.val.push_back(value);
      }
    }
    m.row_ptr[u + 1] = m.col.size();
  }
  return m;
}

// Debug dump: "src<TAB>dst<TAB>value" with original labels, %.9g values.
inline void write_proximity(const std::string& path, const DirectedGraph& g,
                            const ProximityMatrix& m) {
  std::ofstream out(path);
  if (!out) throw error("cannot write proximity dump: " + path);
  char buf[64];
  for (NodeId u = 0; u < m.n; ++u)
    for (std::size_t p = m.row_ptr[u]; p < m.row_ptr[u + 1]; ++p) {
      std::snprintf(buf, sizeof buf, "%.9g", m.val[p]);
      out << g.label(u) << '\t' << g.label(m.col[p]) << '\t' << buf << '\n';
    }
  if (!out) throw error("write failed: " + path);
}

}  // namespace atp
