#pragma once

#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgest/cost_model.hpp"
#include "hgest/errors.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/rng.hpp"
#include "hgest/sampling.hpp"

namespace hgest {

enum class OracleKind { indora, cindora };

inline const char* to_string(OracleKind k) { return k == OracleKind::indora ? "indora" : "cindora"; }

struct QueryRecord {
  OracleKind kind;
  std::size_t size;  // queried vertex count after the padding strip
  double charge;
  bool answer;
};

struct LedgerTotal {
  double cost = 0.0;
  std::uint64_t queries = 0;
  bool exact = false;
  unsigned __int128 exact_cost = 0;  // meaningful when exact
};

// Access handle bundling a graph, a cost model and an append-only ledger.
// Vertex ids in (g.n(), padded_n] are padding: accepted in queries but
// removed before answering and charging. Single-writer.
class OracleSession {
public:
  OracleSession(const Hypergraph& g, CostModel model, OracleKind mode, std::size_t padded_n = 0)
      : g_(&g), model_(model), mode_(mode), padded_n_(std::max(padded_n, g.n())),
        mark_(g.n() + 1, 0) {}

  std::size_t n() const { return padded_n_; }
  std::size_t real_n() const { return g_->n(); }
  std::size_t k() const { return g_->k(); }
  OracleKind mode() const { return mode_; }
  const CostModel& model() const { return model_; }
  std::size_t padding() const { return padded_n_ - g_->n(); }
  void set_padded_n(std::size_t p) { padded_n_ = std::max(p, g_->n()); }

  void keep_records(bool on) { keep_ = on; }
  const std::vector<QueryRecord>& records() const { return records_; }

  // Caps on the running totals; a query that would exceed either throws ResourceExceeded
  // before it is answered or charged.
  void set_cost_cap(std::optional<double> cap) { cost_cap_ = cap; }
  void set_query_cap(std::optional<std::uint64_t> cap) { query_cap_ = cap; }

  // Class-respecting audit for cindora queries: counts queries with some S_i not inside V_i.
  void set_class_audit(std::vector<VertexSet> classes) {
    audit_class_.assign(padded_n_ + 1, 0);
    for (std::size_t c = 0; c < classes.size(); ++c)
      for (Vertex v : classes[c])
        if (v <= padded_n_) audit_class_[v] = static_cast<std::uint32_t>(c + 1);
    audit_on_ = true;
  }
  std::uint64_t audit_violations() const { return audit_violations_; }

  LedgerTotal total() const {
    LedgerTotal t;
    t.queries = queries_;
    t.exact = model_.exact();
    t.exact_cost = exact_sum_;
    t.cost = t.exact ? static_cast<double>(exact_sum_) : sum_ + comp_;
    return t;
  }

  // 1 iff G[S] has no edge. S sorted and duplicate-free.
  bool indora(std::span<const Vertex> s) {
    require(mode_ == OracleKind::indora, "indora query on a cindora session");
    std::size_t size = check_and_count(s);
    precharge(size);
    bool ans = eval_indora(s);
    charge(OracleKind::indora, size, ans);
    return ans;
  }

  // 1 iff no edge has exactly one vertex in each S_i. Sets must be pairwise disjoint.
  bool cindora(const std::vector<VertexSet>& sets) {
    require(mode_ == OracleKind::cindora, "cindora query on an indora session");
    require(sets.size() == k(), "cindora query needs exactly k sets");
    std::size_t size = 0;
    for (const auto& s : sets) size += check_and_count(s);
    require(pairwise_disjoint(sets), "cindora query sets overlap");
    if (audit_on_) {
      bool bad = false;
      for (std::size_t c = 0; c < sets.size() && !bad; ++c)
        for (Vertex v : sets[c])
          if (audit_class_[v] != c + 1) { bad = true; break; }
      audit_violations_ += bad;
    }
    precharge(size);
    bool ans = eval_cindora(sets);
    charge(OracleKind::cindora, size, ans);
    return ans;
  }

private:
  const Hypergraph* g_;
  CostModel model_;
  OracleKind mode_;
  std::size_t padded_n_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 0;

  bool keep_ = false;
  std::vector<QueryRecord> records_;
  std::uint64_t queries_ = 0;
  double sum_ = 0.0, comp_ = 0.0;
  unsigned __int128 exact_sum_ = 0;
  std::optional<double> cost_cap_;
  std::optional<std::uint64_t> query_cap_;

  bool audit_on_ = false;
  std::vector<std::uint32_t> audit_class_;
  std::uint64_t audit_violations_ = 0;

  std::size_t check_and_count(std::span<const Vertex> s) const {
    std::size_t real = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      require(s[i] >= 1 && s[i] <= padded_n_, "query vertex " + std::to_string(s[i]) + " out of range");
      require(i == 0 || s[i] > s[i - 1], "query sets must be sorted and duplicate-free");
      real += s[i] <= g_->n();
    }
    return real;
  }

  void next_epoch() {
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
  }

  void precharge(std::size_t size) {
    if (query_cap_ && queries_ + 1 > *query_cap_) throw ResourceExceeded("query cap reached");
    if (cost_cap_ && total().cost + model_.cost(size) > *cost_cap_) throw ResourceExceeded("cost cap reached");
  }

  void charge(OracleKind kind, std::size_t size, bool ans) {
    double c = model_.cost(size);
    ++queries_;
    if (model_.exact()) {
      unsigned __int128 e = model_.cost_exact(size);
      exact_sum_ = (exact_sum_ + e < exact_sum_) ? ~static_cast<unsigned __int128>(0) : exact_sum_ + e;
    } else {
      // Neumaier compensated summation.
      double t = sum_ + c;
      if (std::abs(sum_) >= std::abs(c)) comp_ += (sum_ - t) + c;
      else comp_ += (c - t) + sum_;
      sum_ = t;
    }
    if (keep_) records_.push_back({kind, size, c, ans});
  }

  bool eval_indora(std::span<const Vertex> s) {
    next_epoch();
    const std::size_t rn = g_->n(), k = g_->k();
    for (Vertex v : s)
      if (v <= rn) mark_[v] = epoch_;
    for (Vertex v : s) {
      if (v > rn) break;
      auto [lo, hi] = g_->lead_range(v);
      for (std::size_t e = lo; e < hi; ++e) {
        auto ed = g_->edge(e);
        bool all = true;
        for (std::size_t j = 1; j < k && all; ++j) all = mark_[ed[j]] == epoch_;
        if (all) return false;
      }
    }
    return true;
  }

  bool eval_cindora(const std::vector<VertexSet>& sets) {
    const std::size_t rn = g_->n(), k = g_->k();
    // Class c is marked with a fresh stamp base+c. Scan edges around the class
    // of smallest total degree, or all edges if that is cheaper.
    std::size_t best = 0, best_deg = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t deg = 0, real = 0;
      for (Vertex v : sets[c])
        if (v <= rn) { deg += g_->degree(v); ++real; }
      if (real == 0) return true;
      if (deg < best_deg) { best_deg = deg; best = c; }
    }
    if (epoch_ > std::numeric_limits<std::uint32_t>::max() - static_cast<std::uint32_t>(k) - 2) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 0;
    }
    const std::uint32_t base = epoch_ + 1;
    epoch_ += static_cast<std::uint32_t>(k);
    for (std::size_t c = 0; c < k; ++c)
      for (Vertex v : sets[c])
        if (v <= rn) mark_[v] = base + static_cast<std::uint32_t>(c);
    auto colourful = [&](std::span<const Vertex> ed) {
      std::uint64_t seen = 0;
      for (Vertex u : ed) {
        std::uint32_t l = mark_[u];
        if (l < base || l >= base + k) return false;
        std::uint64_t bit = std::uint64_t{1} << (l - base);
        if (seen & bit) return false;
        seen |= bit;
      }
      return true;
    };
    if (best_deg <= g_->m()) {
      // Padding ids exceed real ones and come last in the sorted set.
      for (Vertex v : sets[best]) {
        if (v > rn) break;
        for (auto e : g_->incident(v))
          if (colourful(g_->edge(e))) return false;
      }
    } else {
      for (std::size_t e = 0; e < g_->m(); ++e)
        if (colourful(g_->edge(e))) return false;
    }
    return true;
  }
};

inline LedgerTotal ledger_total(const OracleSession& s) { return s.total(); }

template <class O>
concept IndoraOracle = requires(O& o, std::span<const Vertex> s) {
  { o.indora(s) } -> std::same_as<bool>;
  { o.n() } -> std::convertible_to<std::size_t>;
  { o.k() } -> std::convertible_to<std::size_t>;
};

template <class O>
concept CindoraOracle = requires(O& o, const std::vector<VertexSet>& s) {
  { o.cindora(s) } -> std::same_as<bool>;
  { o.n() } -> std::convertible_to<std::size_t>;
  { o.k() } -> std::convertible_to<std::size_t>;
};

// Answers as if the graph were G[X]: every query is intersected with X first;
// charging happens on the intersected query in the parent's ledger.
template <IndoraOracle Parent = OracleSession>
class IndoraView {
public:
  IndoraView(Parent& parent, VertexSet x) : parent_(&parent), x_(std::move(x)) {}
  std::size_t n() const { return parent_->n(); }
  std::size_t k() const { return parent_->k(); }
  const VertexSet& domain() const { return x_; }
  bool indora(std::span<const Vertex> s) { return parent_->indora(set_intersection(s, x_)); }

private:
  Parent* parent_;
  VertexSet x_;
};

template <IndoraOracle Parent>
IndoraView<Parent> induced_view(Parent& parent, VertexSet x) {
  return IndoraView<Parent>(parent, std::move(x));
}

// One-sided simulation of indora from cindora through random k-partitions of S.
template <CindoraOracle O>
bool simulate_indora_via_cindora(O& sess, std::span<const Vertex> s, std::size_t trials, RngStream& rng) {
  require(trials >= 1, "simulate_indora_via_cindora: trials must be at least 1");
  for (std::size_t t = 0; t < trials; ++t) {
    auto parts = uniform_k_partition(s, sess.k(), rng);
    if (!sess.cindora(parts)) return false;
  }
  return true;
}

}  // namespace hgest
