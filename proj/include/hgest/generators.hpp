#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/rng.hpp"
#include "hgest/sampling.hpp"

namespace hgest {

namespace detail {

// Number of failures before the next success of a p-coin.
inline std::uint64_t geometric_skip(double p, RngStream& rng) {
  if (p >= 1.0) return 0;
  double u = 1.0 - rng.uniform01();  // (0,1]
  double s = std::floor(std::log(u) / std::log1p(-p));
  return s >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(s);
}

inline bool next_combination(VertexSet& c, std::size_t n) {
  const std::size_t k = c.size();
  std::size_t j = k;
  while (j > 0 && c[j - 1] == n - k + j) --j;
  if (j == 0) return false;
  ++c[j - 1];
  for (std::size_t q = j; q < k; ++q) c[q] = c[q - 1] + 1;
  return true;
}

}  // namespace detail

// Erdos-Renyi k-hypergraph: every k-subset of [n] independently with probability p.
inline Hypergraph gen_er(std::size_t n, std::size_t k, double p, RngStream& rng) {
  require(k >= 2 && k <= n, "gen_er: need 2 <= k <= n");
  require(p >= 0 && p <= 1, "gen_er: p must lie in [0,1]");
  std::vector<Vertex> flat;
  if (p <= 0) return Hypergraph::from_sorted_flat(n, k, flat);
  VertexSet c(k);
  for (std::size_t j = 0; j < k; ++j) c[j] = static_cast<Vertex>(j + 1);
  bool alive = true;
  while (alive) {
    std::uint64_t skip = detail::geometric_skip(p, rng);
    for (std::uint64_t s = 0; s < skip && alive; ++s) alive = detail::next_combination(c, n);
    if (!alive) break;
    flat.insert(flat.end(), c.begin(), c.end());
    alive = detail::next_combination(c, n);
  }
  return Hypergraph::from_sorted_flat(n, k, std::move(flat));
}

// Uniformly random k-hypergraph with exactly m distinct edges.
inline Hypergraph gen_er_m(std::size_t n, std::size_t k, std::size_t m, RngStream& rng) {
  require(k >= 2 && k <= n, "gen_er_m: need 2 <= k <= n");
  double total = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  require(static_cast<double>(m) <= total / 2 + 0.5, "gen_er_m: m must be at most half of C(n,k)");
  std::unordered_set<VertexSet, EdgeKeyHash> seen;
  std::vector<std::vector<Vertex>> edges;
  const VertexSet all = full_set(n);
  while (edges.size() < m) {
    VertexSet e = uniform_k_subset(all, k, rng);
    if (seen.insert(e).second) edges.push_back(std::move(e));
  }
  return Hypergraph(n, k, std::move(edges));
}

// k-partite Erdos-Renyi graph over consecutive classes of the given sizes.
inline PartitionedHypergraph gen_er_partite(const std::vector<std::size_t>& sizes, double p, RngStream& rng) {
  const std::size_t k = sizes.size();
  require(k >= 2, "gen_er_partite: need at least two classes");
  require(p >= 0 && p <= 1, "gen_er_partite: p must lie in [0,1]");
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  auto cls = consecutive_classes(sizes);
  std::vector<std::vector<Vertex>> edges;
  long double total = 1;
  for (auto s : sizes) total *= s;
  if (p > 0 && total > 0) {
    std::uint64_t idx = detail::geometric_skip(p, rng);
    while (static_cast<long double>(idx) < total) {
      std::vector<Vertex> e(k);
      std::uint64_t r = idx;
      for (std::size_t c = k; c-- > 0;) {
        e[c] = cls[c][r % sizes[c]];
        r /= sizes[c];
      }
      edges.push_back(std::move(e));
      std::uint64_t s = detail::geometric_skip(p, rng);
      if (s == UINT64_MAX) break;
      idx += s + 1;
    }
  }
  return PartitionedHypergraph(Hypergraph(n, k, std::move(edges)), std::move(cls), true);
}

// k-partite graph whose edges use only `roots[c]` vertices of class c when
// roots[c] > 0 (the first roots[c] vertices of the class), any vertex of the
// class otherwise; each admissible tuple is an edge with probability p.
inline PartitionedHypergraph gen_planted_core(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& roots,
                                              double p, RngStream& rng) {
  const std::size_t k = sizes.size();
  require(roots.size() == k, "gen_planted_core: roots must list one count per class");
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  auto cls = consecutive_classes(sizes);
  std::vector<VertexSet> allowed(k);
  for (std::size_t c = 0; c < k; ++c) {
    require(roots[c] <= sizes[c], "gen_planted_core: more roots than class vertices");
    std::size_t take = roots[c] ? roots[c] : sizes[c];
    allowed[c].assign(cls[c].begin(), cls[c].begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::vector<std::vector<Vertex>> edges;
  std::vector<std::size_t> pick(k, 0);
  bool any = true;
  for (const auto& a : allowed) any = any && !a.empty();
  while (any) {
    if (rng.bernoulli(p)) {
      std::vector<Vertex> e(k);
      for (std::size_t c = 0; c < k; ++c) e[c] = allowed[c][pick[c]];
      edges.push_back(std::move(e));
    }
    std::size_t c = 0;
    while (c < k && ++pick[c] == allowed[c].size()) pick[c++] = 0;
    if (c == k) break;
  }
  return PartitionedHypergraph(Hypergraph(n, k, std::move(edges)), std::move(cls), true);
}

// Star: m distinct k-sets of [n], each containing vertex 1.
inline Hypergraph gen_star(std::size_t n, std::size_t k, std::size_t m, RngStream& rng) {
  require(k >= 2 && k <= n, "gen_star: need 2 <= k <= n");
  double total = std::exp(std::lgamma(static_cast<double>(n)) - std::lgamma(static_cast<double>(k)) -
                          std::lgamma(static_cast<double>(n - k + 1)));
  require(static_cast<double>(m) <= total + 0.5, "gen_star: m exceeds C(n-1,k-1)");
  const VertexSet rest = range_set(2, static_cast<Vertex>(n));
  std::vector<std::vector<Vertex>> edges;
  std::unordered_set<VertexSet, EdgeKeyHash> seen;
  if (static_cast<double>(m) > total / 2) {
    // Dense: enumerate all and keep a uniform m-subset.
    std::vector<VertexSet> all;
    VertexSet c(k - 1);
    for (std::size_t j = 0; j < k - 1; ++j) c[j] = static_cast<Vertex>(j + 1);
    do all.push_back(c); while (detail::next_combination(c, n - 1));
    VertexSet idx = uniform_k_subset(full_set(all.size()), m, rng);
    for (Vertex i : idx) {
      std::vector<Vertex> e{1};
      for (Vertex v : all[i - 1]) e.push_back(v + 1);
      edges.push_back(std::move(e));
    }
  } else {
    while (edges.size() < m) {
      VertexSet s = uniform_k_subset(rest, k - 1, rng);
      if (!seen.insert(s).second) continue;
      std::vector<Vertex> e{1};
      e.insert(e.end(), s.begin(), s.end());
      edges.push_back(std::move(e));
    }
  }
  return Hypergraph(n, k, std::move(edges));
}

}  // namespace hgest
