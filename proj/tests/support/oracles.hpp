#pragma once

// Brute-force reference implementations used by the unit and acceptance tests.
// Each one recomputes its answer from first principles, independent of the
// library's indexing, enumeration and exponent bookkeeping.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "hgest/hgest.hpp"

namespace oracles {

using hgest::Rational;
using hgest::Vertex;
using hgest::VertexSet;
using EdgeSet = std::set<std::vector<Vertex>>;

inline EdgeSet edge_set(const hgest::Hypergraph& g) {
  EdgeSet s;
  for (auto& e : g.edge_list()) s.insert(e);
  return s;
}

// Calls f on every k-subset of `pool` (sorted output).
inline void for_each_subset(const std::vector<Vertex>& pool, std::size_t k,
                            const std::function<void(const std::vector<Vertex>&)>& f) {
  std::vector<Vertex> sorted = pool;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const std::size_t n = sorted.size();
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<Vertex> cur(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) cur[i] = sorted[idx[i]];
    f(cur);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// e(G[S]) by checking every k-subset of S against the edge set.
inline std::size_t count_in(const EdgeSet& edges, std::size_t k, const std::vector<Vertex>& s) {
  std::size_t c = 0;
  for_each_subset(s, k, [&](const std::vector<Vertex>& t) { c += edges.count(t); });
  return c;
}

inline bool indora(const EdgeSet& edges, std::size_t k, const std::vector<Vertex>& s) {
  return count_in(edges, k, s) == 0;
}

// Number of edges with exactly one vertex in each class, by walking the product.
inline std::size_t colourful_count(const EdgeSet& edges, const std::vector<VertexSet>& cls) {
  const std::size_t k = cls.size();
  for (const auto& c : cls)
    if (c.empty()) return 0;
  std::size_t cnt = 0;
  std::vector<std::size_t> pick(k, 0);
  while (true) {
    std::vector<Vertex> e(k);
    for (std::size_t i = 0; i < k; ++i) e[i] = cls[i][pick[i]];
    std::sort(e.begin(), e.end());
    if (std::adjacent_find(e.begin(), e.end()) == e.end()) cnt += edges.count(e);
    std::size_t i = 0;
    while (i < k && ++pick[i] == cls[i].size()) pick[i++] = 0;
    if (i == k) break;
  }
  return cnt;
}

inline std::set<std::vector<Vertex>> colourful_edges(const EdgeSet& edges, const std::vector<VertexSet>& cls) {
  std::set<std::vector<Vertex>> out;
  for (const auto& e : edges) {
    std::vector<int> hit(cls.size(), 0);
    bool ok = true;
    for (Vertex v : e) {
      int where = -1;
      for (std::size_t i = 0; i < cls.size(); ++i)
        if (std::find(cls[i].begin(), cls[i].end(), v) != cls[i].end()) where = static_cast<int>(i);
      if (where < 0 || hit[where]++) ok = false;
    }
    if (ok) out.insert(e);
  }
  return out;
}

inline bool cindora(const EdgeSet& edges, const std::vector<VertexSet>& cls) { return colourful_count(edges, cls) == 0; }

// Half-up rounding floor(x + 1/2) on a rational, via integer division.
inline std::int64_t round_half(const Rational& x) {
  std::int64_t num = 2 * x.num() + x.den(), den = 2 * x.den();
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

// g(k,beta) = (1/k) * r * (k - beta - r), r = round_half((k - beta)/2).
inline Rational g(std::int64_t k, const Rational& beta) {
  Rational d = Rational(k) - beta;
  Rational r(oracles::round_half(d / Rational(2)));
  return r * (d - r) / Rational(k);
}

// log2 F_i from the closed form F_i = n^((L+gamma)(k-L)/k) * max{2^-i, n^-gamma}, n = 2^ell,
// where L + gamma = ik/ell, L its integer part.
inline Rational log2_F(unsigned ell, std::int64_t k, unsigned i) {
  Rational lg = Rational(static_cast<std::int64_t>(i) * k, ell);
  Rational L(lg.floor());
  Rational gamma = lg - L;
  Rational first = Rational(ell) * lg * (Rational(k) - L) / Rational(k);
  Rational a = Rational(-static_cast<std::int64_t>(i)), b = Rational(0) - Rational(ell) * gamma;
  return first + (a > b ? a : b);
}

// Upper tail probability of the chi-square statistic.
inline double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected,
                                std::size_t params_fitted = 0) {
  double stat = 0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0) continue;
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    ++cells;
  }
  if (cells < 2 + params_fitted) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1 - params_fitted));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Merges cells from the tail until every expected count is at least `min_expected`.
inline void pool_cells(std::vector<double>& obs, std::vector<double>& exp, double min_expected = 5.0) {
  std::vector<double> o2, e2;
  double oa = 0, ea = 0;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    oa += obs[i];
    ea += exp[i];
    if (ea >= min_expected) {
      o2.push_back(oa);
      e2.push_back(ea);
      oa = ea = 0;
    }
  }
  if (ea > 0 || oa > 0) {
    if (e2.empty()) {
      o2.push_back(oa);
      e2.push_back(ea);
    } else {
      o2.back() += oa;
      e2.back() += ea;
    }
  }
  obs = o2;
  exp = e2;
}

inline double binom_pmf(std::size_t n, std::size_t x, double p) {
  if (p <= 0) return x == 0 ? 1.0 : 0.0;
  if (p >= 1) return x == n ? 1.0 : 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) + x * std::log(p) +
                  (n - x) * std::log1p(-p));
}

// Direct evaluation of the three core clauses.
struct CoreVerdict {
  bool enough = false, small = false, root_free = false;
  bool ok() const { return enough && small && root_free; }
};

inline CoreVerdict check_core(const hgest::PartitionedHypergraph& h, const hgest::Core& c) {
  const EdgeSet all = edge_set(h.base);
  const std::size_t k = h.classes.size();
  const std::size_t eH = colourful_count(all, h.classes);
  const auto kept = colourful_edges(all, c.Y);
  const std::size_t eY = kept.size();
  CoreVerdict v;
  // e(Y) >= e(H)/(2k)^k  <=>  e(Y) * (2k)^k >= e(H)
  long double scale = std::pow(2.0L * k, static_cast<long double>(k));
  v.enough = static_cast<long double>(eY) * scale >= static_cast<long double>(eH);
  v.small = true;
  for (std::size_t i = 0; i < k; ++i)
    if ((c.I >> i) & 1u) {
      // |Y_i| <= 2/zeta  <=>  |Y_i| * zeta <= 2
      if (Rational(static_cast<std::int64_t>(c.Y[i].size())) * c.zeta > Rational(2)) v.small = false;
    }
  v.root_free = true;
  if (eY > 0) {
    for (std::size_t i = 0; i < k; ++i) {
      if ((c.I >> i) & 1u) continue;
      for (Vertex u : c.Y[i]) {
        std::size_t d = 0;
        for (const auto& e : kept) d += std::find(e.begin(), e.end(), u) != e.end();
        if (Rational(static_cast<std::int64_t>(d)) >= c.zeta * Rational(static_cast<std::int64_t>(eY))) v.root_free = false;
      }
    }
  }
  return v;
}

// Every tuple in [0, 2 ell]^k that meets the three constraints of the verifier.
inline std::vector<std::vector<unsigned>> verifier_tuples(std::size_t k, unsigned ell, std::uint32_t I, double l2iz,
                                                          unsigned log2M) {
  std::vector<std::vector<unsigned>> out;
  const double capI = std::floor(2.0 * l2iz + 1.0 + std::ldexp(1.0, -40));
  const double need = std::ceil(static_cast<double>(log2M) - static_cast<double>(k) * std::log2(2.0 * k) - std::ldexp(1.0, -40));
  std::vector<unsigned> a(k, 0);
  while (true) {
    bool ok = true;
    double sum = 0;
    for (std::size_t i = 0; i < k; ++i) {
      if (a[i] > 2 * ell) ok = false;
      if (((I >> i) & 1u) && a[i] > capI) ok = false;
      sum += a[i];
    }
    if (ok && sum >= need) out.push_back(a);
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (++a[i] <= 2 * ell) break;
      a[i] = 0;
      if (i == 0) return out;
    }
    if (k == 0) return out;
  }
}

}  // namespace oracles
