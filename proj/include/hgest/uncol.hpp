#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_set>
#include <vector>

#include "hgest/boosting.hpp"
#include "hgest/errors.hpp"
#include "hgest/estimate.hpp"
#include "hgest/math.hpp"
#include "hgest/oracle.hpp"
#include "hgest/rational.hpp"
#include "hgest/sampling.hpp"

namespace hgest {

// ---------------------------------------------------------------------------
// RecEnum

enum class EnumStatus { done, stopped, budget_exhausted };

struct QueryBudget {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t used = 0;
  bool take() {
    if (used >= limit) return false;
    ++used;
    return true;
  }
};

namespace detail {

inline VertexSet union_of(const std::vector<VertexSet>& cls) {
  VertexSet u;
  for (const auto& c : cls) u.insert(u.end(), c.begin(), c.end());
  std::sort(u.begin(), u.end());
  return u;
}

template <IndoraOracle O>
EnumStatus rec_enum_impl(O& o, const std::vector<VertexSet>& cls, bool known_dense,
                         const std::function<bool(const VertexSet&)>& emit, QueryBudget& budget, RngStream& rng) {
  const std::size_t k = cls.size();
  std::size_t total = 0;
  for (const auto& c : cls) {
    if (c.empty()) return EnumStatus::done;
    total += c.size();
  }
  if (total <= k) {
    VertexSet e = union_of(cls);
    bool dense = known_dense;
    if (!dense) {
      if (!budget.take()) return EnumStatus::budget_exhausted;
      dense = !o.indora(e);
    }
    if (dense && !emit(e)) return EnumStatus::stopped;
    return EnumStatus::done;
  }
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
    if (!o.indora(union_of(child))) {
      EnumStatus st = rec_enum_impl(o, child, true, emit, budget, rng);
      if (st != EnumStatus::done) return st;
    }
    std::size_t c = 0;
    while (c < k && ++pick[c] == parts[c].size()) pick[c++] = 0;
    if (c == k) break;
  }
  return EnumStatus::done;
}

}  // namespace detail

// Emits every edge that is colourful w.r.t. the disjoint classes U_1..U_k.
// `emit` returns false to stop the enumeration early. `known_dense` states
// that the union of the classes is already known to contain an edge.
template <IndoraOracle O>
EnumStatus rec_enum(O& o, const std::vector<VertexSet>& cls, const std::function<bool(const VertexSet&)>& emit,
                    QueryBudget& budget, RngStream& rng, bool known_dense = false) {
  require(cls.size() == o.k(), "rec_enum: need exactly k classes");
  require(pairwise_disjoint(cls), "rec_enum: classes must be disjoint");
  return detail::rec_enum_impl(o, cls, known_dense, emit, budget, rng);
}

// ---------------------------------------------------------------------------
// SparseCount

struct SparseCountOutcome {
  enum class Tag { count, too_dense, rte };
  Tag tag = Tag::count;
  std::uint64_t value = 0;
  std::uint64_t colourings = 0;
  std::uint64_t queries = 0;

  bool is_count() const { return tag == Tag::count; }
};

inline const char* to_string(SparseCountOutcome::Tag t) {
  switch (t) {
    case SparseCountOutcome::Tag::count: return "count";
    case SparseCountOutcome::Tag::too_dense: return "TooDense";
    case SparseCountOutcome::Tag::rte: return "RTE";
  }
  return "?";
}

struct SparseCountParams {
  Profile profile = Profile::theory;
  double c_cc = 1.0;                         // theory: t = ceil(c_cc e^(2k) ln(|U|+2)); fast: t = ceil(e^k)
  std::optional<std::uint64_t> colourings;   // explicit override
};

inline double binom_double(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Colourings needed so that, with probability >= 1 - miss, every edge of a
// set of at most `edges` edges is colourful under at least one colouring.
inline std::uint64_t colourings_for_miss(std::size_t k, double edges, double miss) {
  double q = std::exp(std::lgamma(k + 1.0) - static_cast<double>(k) * std::log(static_cast<double>(k)));
  double t = std::log(std::max(edges, 1.0) / miss) / -std::log1p(-q);
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(t)));
}

inline std::uint64_t sparse_count_colourings(std::size_t k, std::size_t u, std::uint64_t M, double delta,
                                             const SparseCountParams& p) {
  if (p.colourings) return *p.colourings;
  if (p.profile == Profile::fast) return static_cast<std::uint64_t>(std::ceil(std::exp(static_cast<double>(k))));
  double edges = std::min(static_cast<double>(M) + 1.0, binom_double(u, k));
  std::uint64_t t_miss = colourings_for_miss(k, edges, delta * 1e-4);
  double t = std::ceil(p.c_cc * std::exp(2.0 * static_cast<double>(k)) * std::log(u + 2.0));
  return std::max<std::uint64_t>(t_miss, static_cast<std::uint64_t>(t));
}

// Query allowance: expected-use bound divided by delta (Markov), saturating.
inline std::uint64_t sparse_count_budget(std::size_t k, std::size_t u, std::uint64_t M, std::uint64_t colourings,
                                         double delta) {
  double depth = std::ceil(std::log2(static_cast<double>(u) + 1.0)) + 1.0;
  double edges = std::min(static_cast<double>(M), binom_double(u, k)) + 1.0;
  double expected = 1.0 + static_cast<double>(colourings) * (std::ldexp(1.0, static_cast<int>(k)) * depth * edges + 1.0);
  double b = std::ceil(expected / delta);
  return b >= 9.0e18 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(b);
}

// Exact e(G[U]) if it is at most M, TooDense if it exceeds M, or RTE if the
// query allowance runs out.
template <IndoraOracle O>
SparseCountOutcome sparse_count(O& o, const VertexSet& u, std::size_t k, std::uint64_t M, double delta,
                                RngStream& rng, const SparseCountParams& params = {}) {
  require(delta > 0 && delta < 1, "sparse_count: delta must lie in (0,1)");
  require(k == o.k(), "sparse_count: k does not match the oracle");
  SparseCountOutcome out;
  if (u.size() < k) return out;
  const std::uint64_t t = sparse_count_colourings(k, u.size(), M, delta, params);
  QueryBudget budget{sparse_count_budget(k, u.size(), M, t, delta), 0};
  auto finish = [&](SparseCountOutcome::Tag tag, std::uint64_t v) {
    out.tag = tag;
    out.value = v;
    out.queries = budget.used;
    return out;
  };
  budget.take();
  if (o.indora(u)) return finish(SparseCountOutcome::Tag::count, 0);
  std::unordered_set<VertexSet, EdgeKeyHash> found;
  bool too_dense = false;
  auto emit = [&](const VertexSet& e) {
    found.insert(e);
    if (found.size() > M) {
      too_dense = true;
      return false;
    }
    return true;
  };
  for (std::uint64_t c = 0; c < t; ++c) {
    RngStream crng = rng.child(c);
    auto cls = uniform_k_partition(u, k, crng);
    out.colourings = c + 1;
    EnumStatus st = detail::rec_enum_impl(o, cls, true, emit, budget, crng);
    if (st == EnumStatus::budget_exhausted) return finish(SparseCountOutcome::Tag::rte, 0);
    if (too_dense) return finish(SparseCountOutcome::Tag::too_dense, 0);
  }
  return finish(SparseCountOutcome::Tag::count, found.size());
}

// ---------------------------------------------------------------------------
// UncolApprox and Uncol

struct UncolParams {
  Profile profile = Profile::theory;
  std::optional<Rational> t_multiplier;  // overrides eps^-2 10 k^2 2^k log n
  std::optional<double> sparse_delta;    // overrides n^(-5k)/120 (theory) or 1e-3 (fast)
  SparseCountParams sparse;              // its profile is replaced by `profile`
};

inline SparseCountParams uncol_sparse_params(const UncolParams& p) {
  SparseCountParams sp = p.sparse;
  sp.profile = p.profile;
  return sp;
}

// Fast-profile t_i multiplier eps^-2.
inline Rational fast_multiplier(std::size_t, const Rational& eps) { return Rational(1) / (eps * eps); }

inline Schedule uncol_schedule(std::uint64_t n_pow2, std::size_t k, const Rational& eps, const UncolParams& p) {
  std::optional<Rational> mult = p.t_multiplier;
  if (!mult && p.profile == Profile::fast) mult = fast_multiplier(k, eps);
  return build_schedule(n_pow2, k, eps, mult);
}

// True when n^k <= eps^-2 or n <= k^5 (the exhaustive branch).
inline bool uncol_exhaustive(std::size_t n, std::size_t k, const Rational& eps) {
  long double nk = std::pow(static_cast<long double>(n), static_cast<long double>(k));
  long double inv = static_cast<long double>(eps.den()) * eps.den() / (static_cast<long double>(eps.num()) * eps.num());
  long double k5 = std::pow(static_cast<long double>(k), 5.0L);
  return nk <= inv || static_cast<long double>(n) <= k5;
}

namespace detail {

// Visits all k-subsets of [n] in lexicographic order.
template <class F>
void for_each_k_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  VertexSet c(k);
  for (std::size_t j = 0; j < k; ++j) c[j] = static_cast<Vertex>(j + 1);
  while (true) {
    f(c);
    std::size_t j = k;
    while (j > 0 && c[j - 1] == n - k + j) --j;
    if (j == 0) return;
    ++c[j - 1];
    for (std::size_t q = j; q < k; ++q) c[q] = c[q - 1] + 1;
  }
}

}  // namespace detail

// One run of the sampling-schedule estimator on an indora session.
inline Estimate uncol_approx(OracleSession& sess, const Rational& eps, RngStream& rng, const UncolParams& params = {}) {
  require(sess.mode() == OracleKind::indora, "uncol_approx needs an indora session");
  require(eps > Rational(0) && eps < Rational(1), "uncol_approx: eps must lie in (0,1)");
  Estimate est;
  est.seed = rng.seed();
  est.stream = rng.stream_id();
  LedgerMark mark(sess);
  const std::size_t n = sess.real_n(), k = sess.k();

  if (uncol_exhaustive(n, k, eps)) {
    std::uint64_t c = 0;
    detail::for_each_k_subset(n, k, [&](const VertexSet& s) { c += !sess.indora(s); });
    est.value = static_cast<double>(c);
    est.exhaustive = true;
    mark.fill(est, sess);
    return est;
  }

  const std::uint64_t np = next_pow2(n);
  sess.set_padded_n(np);
  const Schedule sch = uncol_schedule(np, k, eps, params);
  const SparseCountParams sparse = uncol_sparse_params(params);
  const double lnn = std::log(static_cast<double>(np));
  const double sdelta = params.sparse_delta ? *params.sparse_delta
                        : params.profile == Profile::fast
                            ? 1e-3
                            : std::max(std::pow(static_cast<double>(np), -5.0 * static_cast<double>(k)) / 120.0,
                                       std::numeric_limits<double>::min());
  // Sampling budget 20 * sum_i t_i (i + ceil(n / 2^i)) elementary steps.
  long double budget = 0;
  for (const auto& r : sch.rows) budget += static_cast<long double>(r.t) * (r.i + ((np + (1ULL << r.i) - 1) >> r.i));
  budget *= 20;
  SampleOps ops;

  for (const auto& row : sch.rows) {
    const unsigned i = row.i;
    const double cap = std::max(7.0 * static_cast<double>(np >> i), 7.0 * static_cast<double>(k) * lnn);
    std::uint64_t Mij = row.M;
    long double sum = 0;
    bool too_dense = false;
    RngStream irng = rng.child(i);
    for (std::uint64_t j = 0; j < row.t; ++j) {
      RngStream jrng = irng.child(j);
      RngStream srng = jrng.child(0), crng = jrng.child(1);
      VertexSet u = sample_subset(np, i, srng, &ops);
      if (static_cast<long double>(ops.steps) > budget || static_cast<double>(u.size()) > cap) {
        mark.fill(est, sess);
        est.halted_i = static_cast<int>(i);
        return est;
      }
      SparseCountOutcome c = sparse_count(sess, u, k, Mij, sdelta, crng, sparse);
      if (c.tag == SparseCountOutcome::Tag::too_dense) {
        too_dense = true;
        break;
      }
      if (c.tag == SparseCountOutcome::Tag::rte) {
        mark.fill(est, sess);
        est.halted_i = static_cast<int>(i);
        return est;
      }
      Mij -= c.value;
      sum += c.value;
    }
    if (!too_dense) {
      est.value = static_cast<double>(std::ldexp(sum, static_cast<int>(i * k)) / static_cast<long double>(row.t));
      est.halted_i = static_cast<int>(i);
      mark.fill(est, sess);
      return est;
    }
  }
  // Every level was too dense; unreachable for consistent oracles since at
  // i = log n - 1 the budget M exceeds any sample's edge count w.h.p.
  mark.fill(est, sess);
  return est;
}

struct UncolBoostParams {
  UncolParams inner;
  double base_delta = 1.0 / 3.0;                // failure probability of one capped run
  double fast_base_delta = 0.2;                 // fast profile: measured single-run failure rate bound
  std::optional<std::size_t> repetitions;       // overrides the median-boosting count
  std::size_t cap_attempts = 2;                 // attempts per capped run
  std::optional<double> cost_cap;               // per-attempt oracle-cost cap; default from the schedule
};

// Worst-case style oracle-cost allowance for one uncol_approx run: every
// scheduled SparseCount hits its query allowance on a maximal sample.
inline double uncol_cost_cap(const OracleSession& sess, const Rational& eps, const UncolParams& p) {
  const std::size_t n = sess.real_n(), k = sess.k();
  if (uncol_exhaustive(n, k, eps)) return std::numeric_limits<double>::infinity();
  const std::uint64_t np = next_pow2(n);
  const Schedule sch = uncol_schedule(np, k, eps, p);
  double total = 0;
  for (const auto& r : sch.rows) {
    double size = std::max(7.0 * static_cast<double>(np >> r.i), 7.0 * k * std::log(static_cast<double>(np)));
    auto u = static_cast<std::size_t>(std::min<double>(size, static_cast<double>(np)));
    double sd = p.sparse_delta ? *p.sparse_delta : (p.profile == Profile::fast ? 1e-3 : 1e-12);
    auto t = sparse_count_colourings(k, u, r.M, sd, uncol_sparse_params(p));
    double q = static_cast<double>(sparse_count_budget(k, u, r.M, t, sd));
    total += static_cast<double>(r.t) * q * sess.model().cost(std::min<std::size_t>(u, n));
  }
  return total;
}

// Median of capped uncol_approx runs; fails with probability at most delta.
inline Estimate uncol(OracleSession& sess, const Rational& eps, double delta, RngStream& rng,
                      const UncolBoostParams& params = {}) {
  require(delta > 0 && delta < 1, "uncol: delta must lie in (0,1)");
  Estimate est;
  est.seed = rng.seed();
  est.stream = rng.stream_id();
  LedgerMark mark(sess);
  const std::size_t reps = params.repetitions                      ? *params.repetitions
                           : params.inner.profile == Profile::fast ? hoeffding_repetitions(params.fast_base_delta, delta)
                                                                   : median_repetitions(params.base_delta, delta);
  const double cap = params.cost_cap ? *params.cost_cap : uncol_cost_cap(sess, eps, params.inner);
  auto one = [&](RngStream& r) -> std::optional<double> {
    auto run = [&](RngStream& rr) -> std::optional<double> { return uncol_approx(sess, eps, rr, params.inner).value; };
    return capped_retry(sess, cap, params.cap_attempts, run, r);
  };
  est.value = median_boost(one, reps, rng);
  mark.fill(est, sess);
  return est;
}

}  // namespace hgest
