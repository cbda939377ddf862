#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/generators.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/oracle.hpp"
#include "hgest/rational.hpp"
#include "hgest/rng.hpp"

namespace hgest {

// ---------------------------------------------------------------------------
// Uncoloured pairs: G1 = H1 (Erdos-Renyi at p1), G2 = H1 u H2 where H2 holds
// every k-set containing a root; roots are r-sets kept with probability p2.

struct UncolPairOverrides {
  std::optional<double> p1;
  std::optional<double> p2;
  double c_root = 240.0;      // p2 = c_root r!/n^r
  double c_sqrt = 1.0e4;      // hypothesis sqrt(n)/c_sqrt >= k
  bool relaxed = false;       // skip the hypothesis checks (reported, not enforced)
};

struct UncolPairParams {
  std::size_t n = 0, k = 0, r = 0;
  Rational eps;
  double p1 = 0, p2 = 0;
  UncolPairOverrides over;
  bool hypotheses_hold = false;
  std::string hypothesis_note;
};

struct UncolPair {
  Hypergraph g1, g2;
  std::vector<VertexSet> roots;
  UncolPairParams params;
};

inline double factorial_d(std::size_t m) { return std::exp(std::lgamma(static_cast<double>(m) + 1.0)); }

// p1 = k!/(eps n^r), p2 = c_root r!/n^r and the hypothesis check.
inline UncolPairParams uncol_pair_params(std::size_t n, std::size_t k, std::size_t r, const Rational& eps,
                                         const UncolPairOverrides& over = {}) {
  require(r >= 1 && r <= k && k <= n, "gen_uncol_pair: need 1 <= r <= k <= n");
  require(k >= 2, "gen_uncol_pair: need k >= 2");
  require(eps > Rational(0) && eps < Rational(1), "gen_uncol_pair: eps must lie in (0,1)");
  UncolPairParams p;
  p.n = n;
  p.k = k;
  p.r = r;
  p.eps = eps;
  p.over = over;
  const double nr = std::pow(static_cast<double>(n), static_cast<double>(r));
  p.p1 = over.p1 ? *over.p1 : factorial_d(k) / (eps.to_double() * nr);
  p.p2 = over.p2 ? *over.p2 : over.c_root * factorial_d(r) / nr;
  const bool h1 = std::sqrt(static_cast<double>(n)) / over.c_sqrt >= static_cast<double>(k);
  const bool h2 = over.c_root * factorial_d(k) / nr <= eps.to_double() * (1 + 1e-12);
  p.hypotheses_hold = h1 && h2;
  if (!h1) p.hypothesis_note += "sqrt(n)/" + std::to_string(over.c_sqrt) + " >= k fails; ";
  if (!h2) p.hypothesis_note += std::to_string(over.c_root) + " k!/n^r <= eps fails; ";
  if (!over.relaxed && !p.hypotheses_hold)
    throw PreconditionError("gen_uncol_pair: " + p.hypothesis_note + "(pass relaxed overrides to proceed)");
  require(p.p1 >= 0 && p.p1 <= 1, "gen_uncol_pair: p1 = k!/(eps n^r) = " + std::to_string(p.p1) + " exceeds 1");
  require(p.p2 >= 0 && p.p2 <= 1, "gen_uncol_pair: p2 = c r!/n^r = " + std::to_string(p.p2) + " exceeds 1");
  return p;
}

// Smallest n with sqrt(n)/c_sqrt >= k and c_root k!/n^r <= eps.
inline std::size_t uncol_min_n(std::size_t k, std::size_t r, const Rational& eps, const UncolPairOverrides& over = {}) {
  for (std::size_t n = k; n < (std::size_t{1} << 40); ++n) {
    const double nr = std::pow(static_cast<double>(n), static_cast<double>(r));
    if (std::sqrt(static_cast<double>(n)) / over.c_sqrt >= static_cast<double>(k) &&
        over.c_root * factorial_d(k) / nr <= eps.to_double() * (1 + 1e-12))
      return n;
  }
  throw PreconditionError("uncol_min_n: no n below 2^40 satisfies the hypotheses");
}

inline UncolPair gen_uncol_pair(std::size_t n, std::size_t k, std::size_t r, const Rational& eps, RngStream& rng,
                                const UncolPairOverrides& over = {}) {
  UncolPair pair;
  pair.params = uncol_pair_params(n, k, r, eps, over);
  RngStream h1r = rng.child(0), rr = rng.child(1);
  pair.g1 = gen_er(n, k, pair.params.p1, h1r);
  if (pair.params.p2 > 0) {
    if (r >= 2) {
      pair.roots = gen_er(n, r, pair.params.p2, rr).edge_list();
    } else {
      for (Vertex v = 1; v <= n; ++v)
        if (rr.bernoulli(pair.params.p2)) pair.roots.push_back({v});
    }
  }
  std::unordered_set<VertexSet, EdgeKeyHash> seen;
  std::vector<std::vector<Vertex>> edges = pair.g1.edge_list();
  for (const auto& e : edges) seen.insert(e);
  for (const auto& root : pair.roots) {
    VertexSet rest = set_difference(full_set(n), root);
    const std::size_t need = k - r;
    if (need == 0) {
      if (seen.insert(root).second) edges.push_back(root);
      continue;
    }
    VertexSet c(need);
    for (std::size_t j = 0; j < need; ++j) c[j] = static_cast<Vertex>(j + 1);
    do {
      VertexSet e = root;
      for (Vertex idx : c) e.push_back(rest[idx - 1]);
      std::sort(e.begin(), e.end());
      if (seen.insert(e).second) edges.push_back(std::move(e));
    } while (detail::next_combination(c, rest.size()));
  }
  pair.g2 = Hypergraph(n, k, std::move(edges));
  return pair;
}

// ---------------------------------------------------------------------------
// Colourful pairs on k classes of size t.
//   p = t^-((k + fa + 2)/2), x = p t^(fa + 2) = t^(-m/2) with fa = floor(alpha), m = k - fa - 2.
//   Q_i = 2^c5 x^(j_i/beta), integer j_i in [0,B], sum j_i = beta, so prod Q_i = 2^(c5 m) x,
//   and grid points with some Q_i > 1 are excluded.

struct ColPairOverrides {
  std::optional<std::int64_t> beta;
  std::optional<std::int64_t> B;
  std::int64_t c5 = 5;
  bool relaxed = true;  // the t >= 2^(400 k^6) hypothesis is never reachable
};

// Exact power 2^two * t^texp.
struct PowerOfT {
  std::int64_t two = 0;
  Rational texp;
  friend bool operator==(const PowerOfT& a, const PowerOfT& b) { return a.two == b.two && a.texp == b.texp; }
  double value(std::size_t t) const {
    return std::ldexp(std::pow(static_cast<double>(t), texp.to_double()), static_cast<int>(two));
  }
};

struct ColPairParams {
  std::size_t t = 0, k = 0;
  double alpha = 0;
  std::int64_t fa = 0, m = 0;
  PowerOfT p, x;
  std::int64_t beta = 0, B = 0, c5 = 5;
  std::int64_t beta_formula = 0, B_formula = 0;
  bool hypotheses_hold = false;
};

struct ColPair {
  PartitionedHypergraph g1, g2;
  std::vector<std::int64_t> j;   // grid exponents of the non-rooted classes
  std::vector<PowerOfT> Q;       // Q_i per non-rooted class
  std::vector<Vertex> roots;     // root vertex of each rooted class, in class order
  std::vector<VertexSet> X;      // the sets spanning H2, one per class
  ColPairParams params;
};

inline ColPairParams col_pair_params(std::size_t t, std::size_t k, double alpha, const ColPairOverrides& over = {}) {
  require(k >= 3, "gen_col_pair: need k >= 3 so that alpha in [0,k-3] exists");
  require(alpha >= 0 && alpha <= static_cast<double>(k) - 3, "gen_col_pair: alpha must lie in [0,k-3]");
  require(t >= 4, "gen_col_pair: t must be at least 4");
  ColPairParams c;
  c.t = t;
  c.k = k;
  c.alpha = alpha;
  c.fa = static_cast<std::int64_t>(std::floor(alpha));
  c.m = static_cast<std::int64_t>(k) - c.fa - 2;
  c.c5 = over.c5;
  c.p = {0, Rational(-(static_cast<std::int64_t>(k) + c.fa + 2), 2)};
  c.x = {0, c.p.texp + Rational(c.fa + 2)};
  const double lt = std::log2(static_cast<double>(t));
  const double llt = std::log2(std::max(lt, 1.0));
  c.beta_formula = llt > 0 ? static_cast<std::int64_t>(std::floor(lt / (20.0 * std::pow(k, 4) * llt))) : 0;
  c.beta = over.beta ? *over.beta : c.beta_formula;
  require(c.beta >= 1, "gen_col_pair: beta = " + std::to_string(c.beta) + " < 1; supply a beta override");
  // Largest B with x^(B/beta) >= 24 log t / t.
  const double lx = c.x.texp.to_double() * lt;  // log2 x
  const double target = std::log2(24.0 * lt / static_cast<double>(t));
  c.B_formula = static_cast<std::int64_t>(std::floor(c.beta * target / lx + 1e-12));
  c.B = over.B ? *over.B : c.B_formula;
  c.hypotheses_hold = lt >= 400.0 * std::pow(k, 6);
  return c;
}

// exponent j is admissible when 2^c5 x^(j/beta) <= 1.
inline bool col_grid_admissible(const ColPairParams& c, std::int64_t j) {
  // c5 + (j/beta) * texp(x) * log2 t <= 0
  const double v = static_cast<double>(c.c5) + static_cast<double>(j) / static_cast<double>(c.beta) *
                                                   c.x.texp.to_double() * std::log2(static_cast<double>(c.t));
  return j >= 0 && j <= c.B && v <= 1e-12;
}

// All admissible compositions of beta into m parts.
inline std::vector<std::vector<std::int64_t>> col_grid(const ColPairParams& c, std::size_t limit = 1000000) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> cur;
  std::function<void(std::int64_t)> rec = [&](std::int64_t left) {
    if (out.size() >= limit) return;
    if (static_cast<std::int64_t>(cur.size()) == c.m - 1) {
      if (col_grid_admissible(c, left)) {
        cur.push_back(left);
        out.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (std::int64_t j = 0; j <= std::min(left, c.B); ++j) {
      if (!col_grid_admissible(c, j)) continue;
      cur.push_back(j);
      rec(left - j);
      cur.pop_back();
    }
  };
  if (c.m >= 1) rec(c.beta);
  return out;
}

inline PowerOfT col_q(const ColPairParams& c, std::int64_t j) {
  return {c.c5, c.x.texp * Rational(j, c.beta)};
}

inline ColPair gen_col_pair(std::size_t t, std::size_t k, double alpha, RngStream& rng, const ColPairOverrides& over = {}) {
  ColPair pair;
  pair.params = col_pair_params(t, k, alpha, over);
  const auto& c = pair.params;
  auto grid = col_grid(c);
  require(!grid.empty(), "gen_col_pair: no valid Q grid point for beta=" + std::to_string(c.beta) +
                             ", B=" + std::to_string(c.B));
  RngStream qr = rng.child(0), xr = rng.child(1), rr = rng.child(2), hr = rng.child(3);
  pair.j = grid[qr.below(grid.size())];
  const std::vector<std::size_t> sizes(k, t);
  auto cls = consecutive_classes(sizes);
  pair.X.resize(k);
  for (std::int64_t i = 0; i < c.m; ++i) {
    pair.Q.push_back(col_q(c, pair.j[static_cast<std::size_t>(i)]));
    RngStream ir = xr.child(static_cast<std::uint64_t>(i));
    pair.X[static_cast<std::size_t>(i)] = bernoulli_subset(cls[static_cast<std::size_t>(i)], pair.Q.back().value(t), ir);
  }
  for (std::size_t i = static_cast<std::size_t>(c.m); i < k; ++i) {
    Vertex root = cls[i][rr.below(t)];
    pair.roots.push_back(root);
    pair.X[i] = {root};
  }
  pair.g1 = gen_er_partite(sizes, c.p.value(t), hr);
  std::unordered_set<VertexSet, EdgeKeyHash> seen;
  std::vector<std::vector<Vertex>> edges = pair.g1.base.edge_list();
  for (const auto& e : edges) seen.insert(e);
  bool empty = false;
  for (const auto& s : pair.X) empty = empty || s.empty();
  if (!empty) {
    std::vector<std::size_t> pick(k, 0);
    while (true) {
      VertexSet e(k);
      for (std::size_t i = 0; i < k; ++i) e[i] = pair.X[i][pick[i]];
      if (seen.insert(e).second) edges.push_back(std::move(e));
      std::size_t i = 0;
      while (i < k && ++pick[i] == pair.X[i].size()) pick[i++] = 0;
      if (i == k) break;
    }
  }
  pair.g2 = PartitionedHypergraph(Hypergraph(k * t, k, std::move(edges)), cls, true);
  return pair;
}

// E[e(H2) | Q] = prod_i (Q_i t) over non-rooted classes (rooted classes contribute 1).
inline PowerOfT col_expected_h2(const ColPair& pair) {
  PowerOfT r;
  for (const auto& q : pair.Q) {
    r.two += q.two;
    r.texp = r.texp + q.texp + Rational(1);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gap checks and the distinguishing game

// Fraction of draws with e(G2) > factor e(G1) (strict) or >= (non-strict).
template <class Gen, class Counts>
double gap_check(Gen&& gen, Counts&& counts, double factor, bool strict, std::size_t trials, RngStream& rng) {
  require(trials >= 1, "gap_check: trials must be at least 1");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    RngStream r = rng.child(i);
    auto pair = gen(r);
    auto [e1, e2] = counts(pair);
    const double lhs = static_cast<double>(e2), rhs = factor * static_cast<double>(e1);
    hits += strict ? lhs > rhs : lhs >= rhs;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

inline double uncol_gap_rate(std::size_t n, std::size_t k, std::size_t r, const Rational& eps, std::size_t trials,
                             RngStream& rng, const UncolPairOverrides& over = {}) {
  return gap_check([&](RngStream& s) { return gen_uncol_pair(n, k, r, eps, s, over); },
                   [](const UncolPair& p) { return std::pair{p.g1.m(), p.g2.m()}; }, 1.0 + eps.to_double(), true,
                   trials, rng);
}

inline double col_gap_rate(std::size_t t, std::size_t k, double alpha, std::size_t trials, RngStream& rng,
                           const ColPairOverrides& over = {}) {
  return gap_check([&](RngStream& s) { return gen_col_pair(t, k, alpha, s, over); },
                   [](const ColPair& p) { return std::pair{p.g1.base.m(), p.g2.base.m()}; }, 4.0, false, trials, rng);
}

// A strategy: any oracle algorithm, deterministic given its stream.
using Strategy = std::function<std::optional<double>(OracleSession&, RngStream&)>;

struct TrialOutcome {
  bool distinguished = false;
  double cost_g1 = 0;
  std::uint64_t queries_g1 = 0;
  std::optional<double> out1, out2;
  std::uint64_t audit_violations = 0;
};

struct DistinguishReport {
  std::vector<TrialOutcome> trials;
  double rate = 0;
  double median_cost = 0;
  std::uint64_t audit_violations = 0;
};

struct PairView {
  const Hypergraph* g1;
  const Hypergraph* g2;
  const std::vector<VertexSet>* classes;  // set for colourful pairs
};

inline PairView view_of(const UncolPair& p) { return {&p.g1, &p.g2, nullptr}; }
inline PairView view_of(const ColPair& p) { return {&p.g1.base, &p.g2.base, &p.g1.classes}; }

// Runs `strategy` on the oracles of both graphs with the same stream.
template <class PairGen>
DistinguishReport distinguish_experiment(const Strategy& strategy, PairGen&& gen, OracleKind kind, const CostModel& model,
                                         std::size_t trials, RngStream& rng) {
  DistinguishReport rep;
  std::vector<double> costs;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    RngStream tr = rng.child(i);
    RngStream pr = tr.child(0), sr = tr.child(1);
    auto pair = gen(pr);
    PairView v = view_of(pair);
    OracleSession s1(*v.g1, model, kind), s2(*v.g2, model, kind);
    if (v.classes && kind == OracleKind::cindora) {
      s1.set_class_audit(*v.classes);
      s2.set_class_audit(*v.classes);
    }
    RngStream a = sr, b = sr;
    TrialOutcome o;
    o.out1 = strategy(s1, a);
    o.out2 = strategy(s2, b);
    o.distinguished = o.out1 != o.out2;
    o.cost_g1 = s1.total().cost;
    o.queries_g1 = s1.total().queries;
    o.audit_violations = s1.audit_violations() + s2.audit_violations();
    rep.audit_violations += o.audit_violations;
    hits += o.distinguished;
    costs.push_back(o.cost_g1);
    rep.trials.push_back(o);
  }
  if (trials) {
    rep.rate = static_cast<double>(hits) / static_cast<double>(trials);
    std::sort(costs.begin(), costs.end());
    rep.median_cost = costs[(costs.size() - 1) / 2];
  }
  return rep;
}

}  // namespace hgest
