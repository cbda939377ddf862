#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/vertex_set.hpp"

namespace hgest {

// Explicit k-uniform hypergraph on [n]. Edges are kept as one flat array of
// canonically sorted k-tuples in lexicographic order, so all edges whose
// smallest vertex is v form a contiguous block.
class Hypergraph {
public:
  Hypergraph() = default;

  Hypergraph(std::size_t n, std::size_t k, std::vector<std::vector<Vertex>> edges) : n_(n), k_(k) {
    require(k >= 2, "k must be at least 2 (got " + std::to_string(k) + ")");
    require(k <= n, "k must not exceed n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    for (auto& e : edges) {
      if (e.size() != k) throw PreconditionError("edge " + show(e) + " has " + std::to_string(e.size()) +
                                                 " vertices, expected " + std::to_string(k));
      std::sort(e.begin(), e.end());
      for (std::size_t j = 0; j < k; ++j) {
        if (e[j] < 1 || e[j] > n) throw PreconditionError("edge " + show(e) + " has vertex out of range [1," +
                                                          std::to_string(n) + "]");
        if (j > 0 && e[j] == e[j - 1]) throw PreconditionError("edge " + show(e) + " repeats a vertex");
      }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    flat_.reserve(edges.size() * k);
    for (const auto& e : edges) flat_.insert(flat_.end(), e.begin(), e.end());
    index();
  }

  // Trusted constructor: `flat` holds m sorted, distinct, lexicographically ordered k-tuples.
  static Hypergraph from_sorted_flat(std::size_t n, std::size_t k, std::vector<Vertex> flat) {
    Hypergraph g;
    g.n_ = n;
    g.k_ = k;
    g.flat_ = std::move(flat);
    g.index();
    return g;
  }

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t m() const { return k_ == 0 ? 0 : flat_.size() / k_; }

  std::span<const Vertex> edge(std::size_t i) const { return {flat_.data() + i * k_, k_}; }
  const std::vector<Vertex>& flat() const { return flat_; }

  // Edges whose smallest vertex is v, as an index range [first, last).
  std::pair<std::size_t, std::size_t> lead_range(Vertex v) const { return {lead_[v], lead_[v + 1]}; }

  std::span<const std::uint32_t> incident(Vertex v) const {
    return {inc_.data() + inc_off_[v], inc_off_[v + 1] - inc_off_[v]};
  }
  std::size_t degree(Vertex v) const { return inc_off_[v + 1] - inc_off_[v]; }

  std::optional<std::size_t> find_edge(std::span<const Vertex> sorted) const {
    if (sorted.size() != k_ || sorted[0] < 1 || sorted[0] > n_) return std::nullopt;
    std::size_t lo = lead_[sorted[0]], hi = lead_[sorted[0] + 1];
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto e = edge(mid);
      if (std::lexicographical_compare(e.begin(), e.end(), sorted.begin(), sorted.end())) lo = mid + 1;
      else hi = mid;
    }
    if (lo < lead_[sorted[0] + 1]) {
      auto e = edge(lo);
      if (std::equal(e.begin(), e.end(), sorted.begin())) return lo;
    }
    return std::nullopt;
  }
  bool has_edge(std::span<const Vertex> sorted) const { return find_edge(sorted).has_value(); }

  std::vector<std::vector<Vertex>> edge_list() const {
    std::vector<std::vector<Vertex>> out;
    out.reserve(m());
    for (std::size_t i = 0; i < m(); ++i) out.emplace_back(edge(i).begin(), edge(i).end());
    return out;
  }

  friend bool operator==(const Hypergraph& a, const Hypergraph& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.flat_ == b.flat_;
  }

private:
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<Vertex> flat_;
  std::vector<std::size_t> lead_;     // size n+2
  std::vector<std::size_t> inc_off_;  // size n+2
  std::vector<std::uint32_t> inc_;

  static std::string show(const std::vector<Vertex>& e) {
    std::string s = "{";
    for (std::size_t i = 0; i < e.size(); ++i) s += (i ? "," : "") + std::to_string(e[i]);
    return s + "}";
  }

  void index() {
    std::size_t m = this->m();
    lead_.assign(n_ + 2, 0);
    inc_off_.assign(n_ + 2, 0);
    for (std::size_t i = 0; i < m; ++i) {
      ++lead_[flat_[i * k_] + 1];
      for (std::size_t j = 0; j < k_; ++j) ++inc_off_[flat_[i * k_ + j] + 1];
    }
    for (std::size_t v = 1; v < n_ + 2; ++v) {
      lead_[v] += lead_[v - 1];
      inc_off_[v] += inc_off_[v - 1];
    }
    inc_.assign(m * k_, 0);
    std::vector<std::size_t> pos(inc_off_.begin(), inc_off_.end());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k_; ++j) inc_[pos[flat_[i * k_ + j]]++] = static_cast<std::uint32_t>(i);
  }
};

inline Hypergraph build_hypergraph(std::size_t n, std::size_t k, std::vector<std::vector<Vertex>> edges) {
  return Hypergraph(n, k, std::move(edges));
}

// |{e in E(G) : e subset of S}|, by direct scan.
inline std::size_t exact_edge_count(const Hypergraph& g, std::span<const Vertex> s) {
  std::vector<char> in(g.n() + 1, 0);
  for (Vertex v : s) {
    if (v >= 1 && v <= g.n()) in[v] = 1;
  }
  std::size_t c = 0;
  for (std::size_t i = 0; i < g.m(); ++i) {
    auto e = g.edge(i);
    bool all = true;
    for (Vertex v : e) all = all && in[v];
    c += all;
  }
  return c;
}

inline std::size_t exact_edge_count(const Hypergraph& g) { return g.m(); }

// Edges with exactly one vertex in each of the k (disjoint) sets.
inline std::vector<std::size_t> colourful_edge_ids(const Hypergraph& g, const std::vector<VertexSet>& cls) {
  std::vector<std::uint32_t> label(g.n() + 1, 0);
  for (std::size_t c = 0; c < cls.size(); ++c)
    for (Vertex v : cls[c])
      if (v >= 1 && v <= g.n()) label[v] = static_cast<std::uint32_t>(c + 1);
  std::vector<std::size_t> out;
  if (cls.size() != g.k()) return out;
  std::vector<char> seen(g.k() + 1);
  for (std::size_t i = 0; i < g.m(); ++i) {
    std::fill(seen.begin(), seen.end(), 0);
    bool ok = true;
    for (Vertex v : g.edge(i)) {
      auto l = label[v];
      if (l == 0 || seen[l]) { ok = false; break; }
      seen[l] = 1;
    }
    if (ok) out.push_back(i);
  }
  return out;
}

inline std::size_t colourful_edge_count(const Hypergraph& g, const std::vector<VertexSet>& cls) {
  return colourful_edge_ids(g, cls).size();
}

// A hypergraph together with k disjoint vertex classes.
struct PartitionedHypergraph {
  Hypergraph base;
  std::vector<VertexSet> classes;
  bool partite = true;

  PartitionedHypergraph() = default;

  // With strict=true every edge must meet every class in exactly one vertex.
  PartitionedHypergraph(Hypergraph g, std::vector<VertexSet> cls, bool strict = true)
      : base(std::move(g)), classes(std::move(cls)), partite(strict) {
    require(classes.size() == base.k(), "expected " + std::to_string(base.k()) + " classes, got " +
                                            std::to_string(classes.size()));
    for (auto& c : classes) {
      normalize(c);
      for (Vertex v : c) require(v >= 1 && v <= base.n(), "class vertex " + std::to_string(v) + " out of range");
    }
    require(pairwise_disjoint(classes), "vertex classes are not pairwise disjoint");
    if (strict) {
      std::size_t cc = colourful_edge_count(base, classes);
      require(cc == base.m(), std::to_string(base.m() - cc) + " edge(s) are not k-partite w.r.t. the classes");
    }
  }

  std::size_t k() const { return base.k(); }
  std::size_t n() const { return base.n(); }
};

// Classes V1={1..t1}, V2={t1+1..t1+t2}, ...
inline std::vector<VertexSet> consecutive_classes(const std::vector<std::size_t>& sizes) {
  std::vector<VertexSet> cls;
  Vertex next = 1;
  for (std::size_t t : sizes) {
    cls.push_back(range_set(next, static_cast<Vertex>(next + t - 1)));
    next = static_cast<Vertex>(next + t);
  }
  return cls;
}

struct HgFile {
  Hypergraph graph;
  std::optional<std::vector<std::size_t>> part_sizes;
};

// `.hg` format: header "k n m", optional "P t1 .. tk", then m edge lines; '#' starts a comment line.
inline HgFile read_hg(std::istream& in, const std::string& source = "<stream>") {
  auto fail = [&](std::size_t line, const std::string& msg) -> IoError {
    return IoError(source + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&](std::string& out) -> bool {
    while (std::getline(in, out)) {
      ++lineno;
      auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line(line)) throw fail(lineno, "missing header line 'k n m'");
  std::size_t k = 0, n = 0, m = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> k >> n >> m)) throw fail(lineno, "malformed header, expected 'k n m'");
    std::string extra;
    if (hs >> extra) throw fail(lineno, "trailing tokens in header");
  }
  HgFile out;
  std::vector<std::vector<Vertex>> edges;
  edges.reserve(m);
  bool have_line = next_line(line);
  if (have_line) {
    auto p = line.find_first_not_of(" \t");
    if (line[p] == 'P') {
      std::istringstream ps(line.substr(p + 1));
      std::vector<std::size_t> sizes;
      std::size_t t;
      while (ps >> t) sizes.push_back(t);
      if (!ps.eof()) throw fail(lineno, "malformed partition line");
      if (sizes.size() != k) throw fail(lineno, "partition line must list k=" + std::to_string(k) + " class sizes");
      std::size_t tot = 0;
      for (auto s : sizes) tot += s;
      if (tot > n) throw fail(lineno, "partition classes exceed n");
      out.part_sizes = sizes;
      have_line = next_line(line);
    }
  }
  while (have_line) {
    std::istringstream es(line);
    std::vector<Vertex> e;
    long long v;
    while (es >> v) {
      if (v < 1 || static_cast<std::size_t>(v) > n) throw fail(lineno, "vertex " + std::to_string(v) + " out of range");
      e.push_back(static_cast<Vertex>(v));
    }
    if (!es.eof()) throw fail(lineno, "non-numeric token in edge line");
    if (e.size() != k) throw fail(lineno, "edge has " + std::to_string(e.size()) + " vertices, expected " + std::to_string(k));
    for (std::size_t j = 1; j < e.size(); ++j)
      if (e[j] <= e[j - 1]) throw fail(lineno, "edge vertices must be strictly increasing");
    edges.push_back(std::move(e));
    have_line = next_line(line);
  }
  if (edges.size() != m) throw fail(lineno, "header announces " + std::to_string(m) + " edges, found " + std::to_string(edges.size()));
  try {
    out.graph = Hypergraph(n, k, std::move(edges));
  } catch (const PreconditionError& e) {
    throw IoError(source + ": " + e.what());
  }
  return out;
}

inline void write_hg(std::ostream& os, const Hypergraph& g, const std::optional<std::vector<std::size_t>>& parts = std::nullopt) {
  os << g.k() << ' ' << g.n() << ' ' << g.m() << '\n';
  if (parts) {
    os << 'P';
    for (auto t : *parts) os << ' ' << t;
    os << '\n';
  }
  for (std::size_t i = 0; i < g.m(); ++i) {
    auto e = g.edge(i);
    for (std::size_t j = 0; j < e.size(); ++j) os << (j ? " " : "") << e[j];
    os << '\n';
  }
}

}  // namespace hgest
