#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hgest/boosting.hpp"
#include "hgest/errors.hpp"
#include "hgest/estimate.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/math.hpp"
#include "hgest/oracle.hpp"
#include "hgest/rational.hpp"
#include "hgest/sampling.hpp"
#include "hgest/uncol.hpp"

namespace hgest {

// Class-index subsets of [k] are bitmasks: bit i set means class i (0-based) is in the set.
using ClassMask = std::uint32_t;

inline std::size_t mask_size(ClassMask m) { return static_cast<std::size_t>(std::popcount(m)); }
inline bool mask_has(ClassMask m, std::size_t i) { return (m >> i) & 1u; }
inline ClassMask full_mask(std::size_t k) { return k >= 32 ? ~ClassMask{0} : ((ClassMask{1} << k) - 1); }

// ---------------------------------------------------------------------------
// Cores

struct Core {
  ClassMask I = 0;
  std::vector<VertexSet> Y;
  Rational zeta;
};

struct CoreCheck {
  bool enough_edges = false;   // e(H[Y]) (2k)^k >= e(H)
  bool small_root_classes = false;  // |Y_i| <= 2/zeta for i in I
  bool root_free = false;      // no zeta-root of H[Y] in Y_i for i not in I
  bool ok() const { return enough_edges && small_root_classes && root_free; }
};

namespace detail {

// Degrees inside H[Y] (indexed by vertex) and e(H[Y]).
inline std::size_t core_degrees(const Hypergraph& g, const std::vector<VertexSet>& y, std::vector<std::uint64_t>& deg) {
  deg.assign(g.n() + 1, 0);
  auto ids = colourful_edge_ids(g, y);
  const std::size_t k = g.k();
  for (auto id : ids)
    for (std::size_t j = 0; j < k; ++j) ++deg[g.flat()[id * k + j]];
  return ids.size();
}

// d >= zeta * e with zeta = num/den, exactly; no vertex is a root of an edgeless graph.
inline bool is_root(std::uint64_t d, std::uint64_t e, const Rational& zeta) {
  if (e == 0) return false;
  return static_cast<unsigned __int128>(d) * static_cast<unsigned __int128>(zeta.den()) >=
         static_cast<unsigned __int128>(e) * static_cast<unsigned __int128>(zeta.num());
}

}  // namespace detail

// Checks the three core clauses directly.
inline CoreCheck check_core(const PartitionedHypergraph& h, const Core& c) {
  const std::size_t k = h.k();
  std::vector<std::uint64_t> deg;
  const std::uint64_t e = detail::core_degrees(h.base, c.Y, deg);
  const std::uint64_t eh = colourful_edge_count(h.base, h.classes);
  CoreCheck r;
  unsigned __int128 lhs = e;
  for (std::size_t i = 0; i < k; ++i) lhs *= 2 * k;
  r.enough_edges = lhs >= eh;
  r.small_root_classes = true;
  for (std::size_t i = 0; i < k; ++i)
    if (mask_has(c.I, i))
      r.small_root_classes = r.small_root_classes && Rational(static_cast<std::int64_t>(c.Y[i].size())) * c.zeta <= Rational(2);
  r.root_free = true;
  for (std::size_t i = 0; i < k; ++i)
    if (!mask_has(c.I, i))
      for (Vertex v : c.Y[i]) r.root_free = r.root_free && !detail::is_root(deg[v], e, c.zeta);
  return r;
}

// Iterative core construction: while some class outside I carries more than
// e(J)/(2k) of the edges on its (zeta/2)-roots, shrink it to those roots and
// add it to I; otherwise delete the (zeta/2)-roots outside I and stop.
inline Core find_core(const PartitionedHypergraph& h, const Rational& zeta) {
  require(zeta > Rational(0) && zeta <= Rational(1), "find_core: zeta must lie in (0,1]");
  const std::size_t k = h.k();
  const Rational half = zeta / Rational(2);
  Core core{0, h.classes, zeta};
  std::vector<std::uint64_t> deg;
  for (std::size_t round = 0; round <= k; ++round) {
    const std::uint64_t e = detail::core_degrees(h.base, core.Y, deg);
    std::vector<VertexSet> roots(k);
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (mask_has(core.I, i)) continue;
      unsigned __int128 sum = 0;
      for (Vertex v : core.Y[i])
        if (detail::is_root(deg[v], e, half)) {
          roots[i].push_back(v);
          sum += deg[v];
        }
      if (pick == k && sum * (2 * k) > e) pick = i;
    }
    if (pick < k) {
      core.Y[pick] = roots[pick];
      core.I |= ClassMask{1} << pick;
      continue;
    }
    for (std::size_t i = 0; i < k; ++i)
      if (!mask_has(core.I, i)) core.Y[i] = set_difference(core.Y[i], roots[i]);
    break;
  }
  if (!check_core(h, core).ok()) throw std::logic_error("find_core produced an invalid core");
  return core;
}

// ---------------------------------------------------------------------------
// Colourful enumeration

struct EnumResult {
  enum class Tag { list, too_dense, rte };
  Tag tag = Tag::list;
  std::vector<VertexSet> edges;
  std::uint64_t queries = 0;
};

namespace detail {

inline VertexSet tuple_union(const std::vector<VertexSet>& cls) { return union_of(cls); }

inline EnumStatus colourful_enum_impl(OracleSession& o, const std::vector<VertexSet>& cls,
                                      const std::function<bool(const VertexSet&)>& emit, QueryBudget& budget,
                                      RngStream& rng) {
  const std::size_t k = cls.size();
  bool singletons = true;
  for (const auto& c : cls) singletons = singletons && c.size() == 1;
  if (singletons) return emit(tuple_union(cls)) ? EnumStatus::done : EnumStatus::stopped;
  std::vector<std::vector<VertexSet>> parts(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (cls[c].size() == 1) {
      parts[c].push_back(cls[c]);
    } else {
      auto [a, b] = balanced_split(cls[c], rng);
      parts[c].push_back(std::move(a));
      parts[c].push_back(std::move(b));
    }
  }
  std::vector<std::size_t> pick(k, 0);
  std::vector<VertexSet> child(k);
  while (true) {
    for (std::size_t c = 0; c < k; ++c) child[c] = parts[c][pick[c]];
    if (!budget.take()) return EnumStatus::budget_exhausted;
    if (!o.cindora(child)) {
      EnumStatus st = colourful_enum_impl(o, child, emit, budget, rng);
      if (st != EnumStatus::done) return st;
    }
    std::size_t c = 0;
    while (c < k && ++pick[c] == parts[c].size()) pick[c++] = 0;
    if (c == k) break;
  }
  return EnumStatus::done;
}

}  // namespace detail

// Lists the edges of G[X_1..X_k] if there are at most M of them, else TooDense;
// RTE once the query budget is spent.
inline EnumResult colourful_enumerate(OracleSession& o, const std::vector<VertexSet>& cls, std::uint64_t M,
                                      RngStream& rng, std::uint64_t budget = std::numeric_limits<std::uint64_t>::max()) {
  require(cls.size() == o.k(), "colourful_enumerate: need exactly k classes");
  require(pairwise_disjoint(cls), "colourful_enumerate: classes must be disjoint");
  EnumResult r;
  QueryBudget qb{budget, 0};
  for (const auto& c : cls)
    if (c.empty()) return r;
  if (!qb.take()) {
    r.tag = EnumResult::Tag::rte;
    return r;
  }
  bool empty = o.cindora(cls);
  if (!empty) {
    bool too_dense = false;
    auto emit = [&](const VertexSet& e) {
      if (r.edges.size() >= M) {
        too_dense = true;
        return false;
      }
      r.edges.push_back(e);
      return true;
    };
    EnumStatus st = detail::colourful_enum_impl(o, cls, emit, qb, rng);
    if (st == EnumStatus::budget_exhausted) r.tag = EnumResult::Tag::rte;
    if (too_dense) r.tag = EnumResult::Tag::too_dense;
    if (r.tag != EnumResult::Tag::list) r.edges.clear();
  }
  r.queries = qb.used;
  std::sort(r.edges.begin(), r.edges.end());
  return r;
}

// ---------------------------------------------------------------------------
// Parameters

struct ColParams {
  Profile profile = Profile::theory;
  std::optional<double> alpha;               // cost index used by the dispatcher; default from the session
  std::optional<double> p_out;               // verify_guess success floor
  std::optional<std::uint64_t> verify_calls; // N per guess M
  std::optional<double> b_large;             // large-core approximation factor
  std::optional<std::size_t> repetitions;    // median repetitions for the boosted coarse counters
  std::optional<std::size_t> t;              // small-core block size
  std::optional<double> log2_inv_zeta;       // log2(1/zeta) used by the dispatcher
  std::optional<double> fine_b;              // coarse factor assumed by fine_count
  double s0_factor = 64.0;                   // s0 = s0_factor / eps^2
  std::optional<double> c_f;                 // fine_count repetition constant
  std::optional<double> inner_delta;         // failure probability of the small-core inner counter
};

// Fast-profile defaults.
struct ColFast {
  static constexpr double p_out = 0.5;
  static constexpr std::uint64_t verify_calls = 8;
  static constexpr std::size_t repetitions = 1;
  static constexpr double fine_b = 4.0;
  static constexpr double c_f = 1.0 / 16.0;
  static constexpr double inner_delta = 1e-3;
};

inline double ipow(double b, std::size_t e) {
  double r = 1;
  for (std::size_t i = 0; i < e; ++i) r *= b;
  return r;
}

inline double log2_inv(const Rational& zeta) {
  return std::log2(static_cast<double>(zeta.den())) - std::log2(static_cast<double>(zeta.num()));
}

inline double verify_p_out(std::size_t k, std::size_t isize, double l2iz, unsigned ell) {
  return 1.0 / (ipow(2.0, 5 * k) * ipow(l2iz, isize) * ipow(static_cast<double>(ell), k - isize));
}

inline double large_core_b(std::size_t k, std::size_t isize, double l2iz, unsigned ell, const ColParams& p) {
  if (p.b_large) return *p.b_large;
  if (p.profile == Profile::fast) return ipow(2.0 * k, k);
  return ipow(2.0 * k, 5 * k) * ipow(static_cast<double>(ell), k - isize) * ipow(l2iz, isize);
}

inline double small_core_b(std::size_t k) { return ipow(2.0 * k, k + 2); }

// ---------------------------------------------------------------------------
// VerifyGuess

struct GuessVerdict {
  bool yes = false;
  std::uint64_t tuples_tried = 0;
};

// Bounds of the tuple set A for guess 2^log2M.
struct TupleBounds {
  std::vector<unsigned> cap;  // per-class maximum of a_i
  std::int64_t min_sum = 0;
};

inline TupleBounds verify_bounds(std::size_t k, unsigned ell, ClassMask I, double l2iz, unsigned log2M) {
  constexpr double guard = 0x1p-40;
  TupleBounds b;
  const double root_cap = std::floor(2.0 * l2iz + 1.0 + guard);
  for (std::size_t i = 0; i < k; ++i) {
    double c = 2.0 * ell;
    if (mask_has(I, i)) c = std::min(c, root_cap);
    b.cap.push_back(static_cast<unsigned>(std::max(0.0, c)));
  }
  b.min_sum = static_cast<std::int64_t>(std::ceil(static_cast<double>(log2M) - k * std::log2(2.0 * k) - guard));
  return b;
}

// Visits A in lexicographic order; f returns false to stop.
template <class F>
void for_each_tuple(const TupleBounds& b, F&& f) {
  const std::size_t k = b.cap.size();
  std::vector<unsigned> a(k, 0);
  std::int64_t sum = 0;
  while (true) {
    if (sum >= b.min_sum && !f(a)) return;
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (a[i] < b.cap[i]) {
        ++a[i];
        ++sum;
        break;
      }
      sum -= a[i];
      a[i] = 0;
      if (i == 0) return;
    }
    if (k == 0) return;
  }
}

inline std::vector<std::vector<unsigned>> verify_tuples(std::size_t k, unsigned ell, ClassMask I, double l2iz,
                                                        unsigned log2M) {
  std::vector<std::vector<unsigned>> out;
  for_each_tuple(verify_bounds(k, ell, I, l2iz, log2M), [&](const std::vector<unsigned>& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

// Yes iff some tuple a in A has an edge across (Z_{1,a_1},...,Z_{k,a_k}), where
// Z_{i,j} keeps each vertex of X_i with probability 2^-j.
inline GuessVerdict verify_guess_l2(OracleSession& o, unsigned log2M, const std::vector<VertexSet>& x, ClassMask I,
                                    double l2iz, RngStream& rng) {
  const std::size_t k = o.k();
  const unsigned ell = log2_exact(next_pow2(o.n()));
  require(ell >= 5, "verify_guess: n must be at least 32");
  require(x.size() == k, "verify_guess: need exactly k classes");
  require(l2iz > 5.0, "verify_guess: zeta must be below 1/32");
  std::vector<std::vector<std::optional<VertexSet>>> z(k, std::vector<std::optional<VertexSet>>(2 * ell + 1));
  auto zset = [&](std::size_t i, unsigned j) -> const VertexSet& {
    auto& slot = z[i][j];
    if (!slot) {
      RngStream r = rng.child(i).child(j);
      slot = bernoulli_subset(x[i], std::ldexp(1.0, -static_cast<int>(j)), r);
    }
    return *slot;
  };
  GuessVerdict v;
  std::vector<VertexSet> q(k);
  for_each_tuple(verify_bounds(k, ell, I, l2iz, log2M), [&](const std::vector<unsigned>& a) {
    ++v.tuples_tried;
    bool any_empty = false;
    for (std::size_t i = 0; i < k; ++i) {
      q[i] = zset(i, a[i]);
      any_empty = any_empty || q[i].empty();
    }
    if (any_empty) return true;
    if (!o.cindora(q)) {
      v.yes = true;
      return false;
    }
    return true;
  });
  return v;
}

inline GuessVerdict verify_guess(OracleSession& o, std::uint64_t M, const std::vector<VertexSet>& x, ClassMask I,
                                 const Rational& zeta, RngStream& rng) {
  require(is_pow2(M), "verify_guess: M must be a power of two");
  require(zeta > Rational(0) && zeta < Rational(1, 32), "verify_guess: zeta must lie in (0,1/32)");
  return verify_guess_l2(o, log2_exact(M), x, I, log2_inv(zeta), rng);
}

// ---------------------------------------------------------------------------
// Large-core coarse counter

inline double large_core_helper(OracleSession& o, const std::vector<VertexSet>& x, ClassMask I, double l2iz,
                                RngStream& rng, const ColParams& p) {
  const std::size_t k = o.k();
  const unsigned ell = log2_exact(next_pow2(o.n()));
  require(ell >= 5, "coarse_large_core: n must be at least 32");
  const std::size_t is = mask_size(I);
  const bool fast = p.profile == Profile::fast;
  const double pout = p.p_out ? *p.p_out : fast ? ColFast::p_out : verify_p_out(k, is, l2iz, ell);
  const std::uint64_t N = p.verify_calls ? *p.verify_calls
                          : fast ? ColFast::verify_calls
                                 : static_cast<std::uint64_t>(std::ceil(24.0 * std::log(12.0 * k * ell) / pout));
  const double b = large_core_b(k, is, l2iz, ell, p);
  for (const auto& c : x)
    if (c.empty()) return 0.0;
  if (o.cindora(x)) return 0.0;
  const unsigned top = static_cast<unsigned>(k * ell);
  std::optional<unsigned> best;
  for (unsigned lm = 0; lm <= top; ++lm) {
    RngStream mr = rng.child(lm);
    std::uint64_t s = 0;
    for (std::uint64_t c = 0; c < N; ++c) {
      RngStream cr = mr.child(c);
      s += verify_guess_l2(o, lm, x, I, l2iz, cr).yes;
    }
    if (static_cast<double>(s) >= 3.0 * pout * static_cast<double>(N) / 4.0) best = lm;
  }
  const unsigned lm = best ? *best : top;
  return 2.0 * std::ldexp(1.0, static_cast<int>(lm)) / b;
}

inline std::size_t col_repetitions(double delta, const ColParams& p) {
  if (p.repetitions) return *p.repetitions;
  if (p.profile == Profile::fast) return ColFast::repetitions;
  return median_repetitions(1.0 / 3.0, delta);
}

inline double coarse_large_core_l2(OracleSession& o, const std::vector<VertexSet>& x, ClassMask I, double l2iz,
                                   double delta, RngStream& rng, const ColParams& p = {}) {
  require(delta > 0 && delta < 1.0 / 32, "coarse_large_core: delta must lie in (0,1/32)");
  require(l2iz > 5.0, "coarse_large_core: zeta must be below 1/32");
  auto run = [&](RngStream& r) -> std::optional<double> { return large_core_helper(o, x, I, l2iz, r, p); };
  return median_boost(run, col_repetitions(delta, p), rng);
}

inline double coarse_large_core(OracleSession& o, const std::vector<VertexSet>& x, ClassMask I, const Rational& zeta,
                                double delta, RngStream& rng, const ColParams& p = {}) {
  require(zeta > Rational(0) && zeta < Rational(1, 32), "coarse_large_core: zeta must lie in (0,1/32)");
  return coarse_large_core_l2(o, x, I, log2_inv(zeta), delta, rng, p);
}

// ---------------------------------------------------------------------------
// Inner counter and small-core coarse counter

// (eps, delta)-counter for e(G[X_1..X_k]): exact enumeration when there are at
// most 8 s0 edges, otherwise class-wise Bernoulli(p) subsampling with p
// halved until every draw enumerates, averaged over the draws.
inline std::optional<double> fine_core(OracleSession& o, const std::vector<VertexSet>& x, double eps, double delta,
                                       RngStream& rng, const ColParams& p = {}) {
  const std::size_t k = o.k();
  const double s0 = p.s0_factor / (eps * eps);
  const auto M = static_cast<std::uint64_t>(std::ceil(8.0 * s0));
  RngStream er = rng.child(0);
  EnumResult first = colourful_enumerate(o, x, M, er);
  if (first.tag == EnumResult::Tag::list) return static_cast<double>(first.edges.size());
  if (first.tag == EnumResult::Tag::rte) return std::nullopt;
  const auto T = static_cast<std::uint64_t>(std::max(1.0, std::ceil(2.0 * std::log(2.0 / delta))));
  double q = 0.5;
  for (unsigned attempt = 1; attempt < 64; ++attempt, q /= 2) {
    RngStream ar = rng.child(attempt);
    double sum = 0;
    bool dense = false;
    for (std::uint64_t d = 0; d < T && !dense; ++d) {
      RngStream dr = ar.child(d);
      RngStream sr = dr.child(0), cr = dr.child(1);
      std::vector<VertexSet> sub(k);
      for (std::size_t i = 0; i < k; ++i) {
        RngStream ir = sr.child(i);
        sub[i] = bernoulli_subset(x[i], q, ir);
      }
      EnumResult r = colourful_enumerate(o, sub, M, cr);
      if (r.tag == EnumResult::Tag::rte) return std::nullopt;
      if (r.tag == EnumResult::Tag::too_dense) dense = true;
      else sum += static_cast<double>(r.edges.size());
    }
    if (!dense) return sum / static_cast<double>(T) / ipow(q, k);
  }
  return std::nullopt;
}

inline double small_core_helper(OracleSession& o, const std::vector<VertexSet>& x, ClassMask I, std::size_t t,
                                RngStream& rng, const ColParams& p) {
  const std::size_t k = o.k();
  const std::uint64_t n = next_pow2(o.n());
  RngStream sr = rng.child(0), fr = rng.child(1);
  std::vector<std::vector<VertexSet>> blocks(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (mask_has(I, i)) {
      for (std::size_t s = 0; s < x[i].size(); s += t)
        blocks[i].emplace_back(x[i].begin() + static_cast<std::ptrdiff_t>(s),
                               x[i].begin() + static_cast<std::ptrdiff_t>(std::min(s + t, x[i].size())));
    } else {
      RngStream ir = sr.child(i);
      VertexSet keep = bernoulli_subset(x[i], static_cast<double>(t) / static_cast<double>(n), ir);
      if (keep.size() > 2 * t) return 0.0;
      blocks[i].push_back(std::move(keep));
    }
    if (blocks[i].empty()) return 0.0;
  }
  const double inner_delta = p.inner_delta ? *p.inner_delta
                             : p.profile == Profile::fast ? ColFast::inner_delta
                                                          : 1.0 / (12.0 * std::pow(static_cast<double>(n), static_cast<double>(k)));
  double sum = 0;
  std::vector<std::size_t> pick(k, 0);
  std::vector<VertexSet> hp(k);
  std::uint64_t idx = 0;
  while (true) {
    bool empty = false;
    for (std::size_t i = 0; i < k; ++i) {
      hp[i] = blocks[i][pick[i]];
      empty = empty || hp[i].empty();
    }
    if (!empty) {
      RngStream pr = fr.child(idx);
      auto c = fine_core(o, hp, 0.5, inner_delta, pr, p);
      sum += c ? *c : 0.0;
    }
    ++idx;
    std::size_t c = 0;
    while (c < k && ++pick[c] == blocks[c].size()) pick[c++] = 0;
    if (c == k) break;
  }
  return ipow(static_cast<double>(n) / static_cast<double>(t), k - mask_size(I)) * sum;
}

inline double coarse_small_core(OracleSession& o, const std::vector<VertexSet>& x, ClassMask I, std::size_t t,
                                double delta, RngStream& rng, const ColParams& p = {}) {
  const std::size_t k = o.k();
  require(x.size() == k, "coarse_small_core: need exactly k classes");
  require(I != full_mask(k), "coarse_small_core: I must be a proper subset of [k]");
  require(t >= 1 && t <= next_pow2(o.n()), "coarse_small_core: need n >= t");
  require(static_cast<double>(t) >= 12.0 * std::log2(static_cast<double>(k)), "coarse_small_core: need t >= 12 log k");
  require(delta > 0 && delta < 1, "coarse_small_core: delta must lie in (0,1)");
  auto run = [&](RngStream& r) -> std::optional<double> { return small_core_helper(o, x, I, t, r, p); };
  return median_boost(run, col_repetitions(delta, p), rng);
}

// ---------------------------------------------------------------------------
// Dispatcher

struct CoarseSetup {
  std::uint64_t n = 0;
  unsigned ell = 0;
  double alpha = 0;
  int alpha_prime = -1;
  std::size_t t = 0;
  double log2_inv_zeta = 0;
  bool brute_force = false;
};

inline CoarseSetup coarse_setup(const OracleSession& o, const ColParams& p) {
  CoarseSetup s;
  const std::size_t k = o.k();
  s.n = next_pow2(o.n());
  s.ell = log2_exact(s.n);
  s.alpha = p.alpha ? *p.alpha : o.model().alpha;
  require(s.alpha >= 0 && s.alpha <= static_cast<double>(k), "colour_coarse: alpha must lie in [0,k]");
  s.alpha_prime = static_cast<int>(std::ceil(s.alpha)) - 1;
  const double gap = s.alpha - s.alpha_prime;
  const double lg = std::max(1.0, static_cast<double>(s.ell));
  double t = p.t ? static_cast<double>(*p.t)
             : p.profile == Profile::fast ? std::floor(static_cast<double>(s.n) / std::sqrt(lg))
                                          : std::floor(static_cast<double>(s.n) / std::pow(lg, 20.0 * k / gap));
  s.t = static_cast<std::size_t>(std::max(0.0, t));
  const double kk = 2.0 * k * (static_cast<double>(k) - s.alpha_prime);
  s.log2_inv_zeta = p.log2_inv_zeta ? *p.log2_inv_zeta
                    : s.t == 0 ? std::numeric_limits<double>::infinity()
                               : kk * std::log2(static_cast<double>(s.n) / static_cast<double>(s.t)) + std::log2(8.0 * k);
  s.brute_force = s.n < 32 || static_cast<double>(s.t) < 12.0 * std::log2(static_cast<double>(k));
  return s;
}

// Approximation factor of colour_coarse.
inline double colour_coarse_b(std::size_t k, const CoarseSetup& s, const ColParams& p) {
  if (p.profile == Profile::fast)
    return std::max(small_core_b(k), large_core_b(k, 0, s.log2_inv_zeta, s.ell, p));
  const double gap = s.alpha - s.alpha_prime;
  const double inner = 8.0 * k * std::pow(static_cast<double>(s.ell), 40.0 * k * (k - s.alpha_prime) / gap);
  return ipow(2.0 * k, 5 * k) * ipow(static_cast<double>(s.ell), static_cast<std::size_t>(k - s.alpha_prime - 1)) *
         ipow(std::log2(inner), k);
}

struct CoarseResult {
  double value = 0;
  bool brute_force = false;
  CoarseSetup setup;
  std::vector<double> per_R;  // indexed by the R bitmask
};

inline CoarseResult colour_coarse(OracleSession& o, const std::vector<VertexSet>& x, RngStream& rng,
                                  const ColParams& p = {}) {
  const std::size_t k = o.k();
  require(x.size() == k, "colour_coarse: need exactly k classes");
  require(pairwise_disjoint(x), "colour_coarse: classes must be disjoint");
  CoarseResult res;
  res.setup = coarse_setup(o, p);
  const auto& s = res.setup;
  if (s.brute_force) {
    RngStream br = rng.child(0);
    EnumResult e = colourful_enumerate(o, x, std::numeric_limits<std::uint64_t>::max(), br);
    res.value = static_cast<double>(e.edges.size());
    res.brute_force = true;
    return res;
  }
  const double delta = std::ldexp(1.0, -static_cast<int>(k + 5));
  res.per_R.assign(std::size_t{1} << k, 0.0);
  for (ClassMask R = 0; R <= full_mask(k); ++R) {
    RngStream rr = rng.child(R + 1);
    double z = static_cast<int>(mask_size(R)) <= s.alpha_prime
                   ? coarse_small_core(o, x, R, s.t, delta, rr, p)
                   : coarse_large_core_l2(o, x, R, s.log2_inv_zeta, delta, rr, p);
    res.per_R[R] = z;
    res.value = std::max(res.value, z);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Fine counter

struct FineDetail {
  double coarse = 0;      // coarse estimate of the counted quantity
  double b = 0;
  double p = 1;
  std::uint64_t draws = 0;
  bool exact_path = false;
};

inline bool use_new_coarse(std::size_t k, unsigned ell) {
  const double l = static_cast<double>(ell);
  const double ll = std::log2(std::max(l, 2.0));
  return static_cast<double>(k) <= l / (ll * ll);
}

// Median-boosted coarse estimate of e(G[X_1..X_k]) and its factor b.
inline std::pair<double, double> boosted_coarse(OracleSession& o, const std::vector<VertexSet>& x, double delta,
                                                RngStream& rng, const ColParams& p) {
  const std::size_t k = o.k();
  CoarseSetup s = coarse_setup(o, p);
  if (s.n < 32) {
    RngStream br = rng.child(0);
    EnumResult e = colourful_enumerate(o, x, std::numeric_limits<std::uint64_t>::max(), br);
    return {static_cast<double>(e.edges.size()), 1.0};
  }
  if (use_new_coarse(k, s.ell)) {
    auto run = [&](RngStream& r) -> std::optional<double> { return colour_coarse(o, x, r, p).value; };
    return {median_boost(run, col_repetitions(delta, p), rng), colour_coarse_b(k, s, p)};
  }
  const double l2iz = std::log2(33.0);
  auto run = [&](RngStream& r) -> std::optional<double> { return large_core_helper(o, x, 0, l2iz, r, p); };
  return {median_boost(run, col_repetitions(delta, p), rng), large_core_b(k, 0, l2iz, s.ell, p)};
}

// eps-approximation of e(G[X_1..X_k]) when classes are given, else of e(G)
// (each draw then colours V uniformly at random and rescales by k^k/k!).
inline Estimate fine_count(OracleSession& sess, const Rational& eps_r, double delta, RngStream& rng,
                           const ColParams& p = {}, const std::optional<std::vector<VertexSet>>& classes = std::nullopt,
                           FineDetail* detail = nullptr) {
  require(sess.mode() == OracleKind::cindora, "fine_count needs a cindora session");
  require(eps_r > Rational(0) && eps_r < Rational(1), "fine_count: eps must lie in (0,1)");
  require(delta > 0 && delta < 1, "fine_count: delta must lie in (0,1)");
  const std::size_t k = sess.k();
  const double eps = eps_r.to_double();
  Estimate est;
  est.seed = rng.seed();
  est.stream = rng.stream_id();
  LedgerMark mark(sess);
  FineDetail fd;
  const VertexSet all = full_set(sess.real_n());
  const double colour_scale = classes ? 1.0 : std::exp(static_cast<double>(k) * std::log(static_cast<double>(k)) -
                                                       std::lgamma(static_cast<double>(k) + 1.0));
  auto colouring = [&](RngStream& r) { return classes ? *classes : uniform_k_partition(all, k, r); };

  RngStream cr = rng.child(0), br = rng.child(1), sr = rng.child(2);
  std::vector<VertexSet> cx = colouring(cr);
  auto [coarse, bc] = boosted_coarse(sess, cx, delta / 3.0, br, p);
  fd.coarse = coarse * colour_scale;
  const bool fast = p.profile == Profile::fast;
  const double b = p.fine_b ? *p.fine_b : fast ? ColFast::fine_b : bc;
  fd.b = b;
  const double s0 = p.s0_factor / (eps * eps);
  const auto M = static_cast<std::uint64_t>(std::ceil(8.0 * s0));
  const double cf = p.c_f ? *p.c_f : fast ? ColFast::c_f : 1.0;
  const auto T = static_cast<std::uint64_t>(std::max(1.0, std::ceil(cf * b * b * std::log(3.0 / delta) / (eps * eps))));

  double q = fd.coarse * b <= s0 ? 1.0 : std::pow(s0 / (fd.coarse * b), 1.0 / static_cast<double>(k));
  if (classes && q >= 1.0) {
    RngStream er = sr.child(0);
    EnumResult r = colourful_enumerate(sess, *classes, M, er);
    if (r.tag == EnumResult::Tag::list) {
      est.value = static_cast<double>(r.edges.size());
      fd.exact_path = true;
      fd.draws = 1;
      mark.fill(est, sess);
      if (detail) *detail = fd;
      return est;
    }
    if (r.tag == EnumResult::Tag::rte) {
      mark.fill(est, sess);
      if (detail) *detail = fd;
      return est;
    }
    q = 0.5;
  }
  for (unsigned attempt = 1; attempt < 64; ++attempt, q /= 2) {
    RngStream ar = sr.child(attempt);
    double sum = 0;
    bool dense = false;
    for (std::uint64_t d = 0; d < T && !dense; ++d) {
      RngStream dr = ar.child(d);
      RngStream colr = dr.child(0), subr = dr.child(1), enr = dr.child(2);
      std::vector<VertexSet> cls = colouring(colr);
      for (std::size_t i = 0; i < k; ++i) {
        RngStream ir = subr.child(i);
        cls[i] = bernoulli_subset(cls[i], q, ir);
      }
      EnumResult r = colourful_enumerate(sess, cls, M, enr);
      if (r.tag == EnumResult::Tag::rte) {
        mark.fill(est, sess);
        if (detail) *detail = fd;
        return est;
      }
      if (r.tag == EnumResult::Tag::too_dense) dense = true;
      else sum += static_cast<double>(r.edges.size());
    }
    if (!dense) {
      fd.p = q;
      fd.draws = T;
      est.value = colour_scale * sum / static_cast<double>(T) / ipow(q, k);
      break;
    }
  }
  mark.fill(est, sess);
  if (detail) *detail = fd;
  return est;
}

}  // namespace hgest
