#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "hgest/col.hpp"
#include "hgest/errors.hpp"
#include "hgest/estimate.hpp"
#include "hgest/generators.hpp"
#include "hgest/hypergraph.hpp"
#include "hgest/oracle.hpp"
#include "hgest/uncol.hpp"

namespace hgest {

// ---------------------------------------------------------------------------
// Records and CSV

struct ExperimentRecord {
  std::string experiment;
  std::string family;
  std::size_t n = 0;
  std::size_t k = 0;
  double alpha = 0;
  std::string eps;
  double delta = 0;
  std::string profile;
  std::uint64_t seed = 0;
  std::optional<double> estimate;
  std::optional<double> exact;
  bool within_eps = false;
  double total_cost = 0;
  std::uint64_t queries = 0;
  double runtime_ms = 0;
};

inline const char* csv_header() {
  return "experiment,family,n,k,alpha,eps,delta,profile,seed,estimate,exact,within_eps,total_cost,queries,runtime_ms";
}

inline std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string to_csv_row(const ExperimentRecord& r) {
  std::string s;
  s += r.experiment + "," + r.family + "," + std::to_string(r.n) + "," + std::to_string(r.k) + "," + fmt_num(r.alpha) +
       "," + r.eps + "," + fmt_num(r.delta) + "," + r.profile + "," + std::to_string(r.seed) + ",";
  s += r.estimate ? fmt_num(*r.estimate) : std::string("RTE");
  s += ",";
  s += r.exact ? fmt_num(*r.exact) : std::string();
  s += std::string(",") + (r.within_eps ? "1" : "0") + "," + fmt_num(r.total_cost) + "," + std::to_string(r.queries) + "," +
       fmt_num(r.runtime_ms);
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<ExperimentRecord>& rows) {
  os << csv_header() << "\n";
  for (const auto& r : rows) os << to_csv_row(r) << "\n";
}

// |estimate - exact| <= eps * exact.
inline bool within_eps(std::optional<double> est, std::optional<double> exact, double eps) {
  if (!est || !exact) return false;
  return std::abs(*est - *exact) <= eps * *exact + 1e-9 * std::max(1.0, *exact);
}

// ---------------------------------------------------------------------------
// Instance families

struct FamilySpec {
  std::string name = "er";        // er, er-m, er-partite, star, planted-core, empty
  std::size_t n = 64;
  std::size_t k = 2;
  double p = 0.3;                 // edge probability (er, er-partite, planted-core)
  std::size_t m = 0;              // edge count (er-m, star)
  std::vector<std::size_t> sizes; // class sizes (er-partite, planted-core); default n/k each
  std::vector<std::size_t> roots; // rooted vertex counts per class (planted-core)

  std::string label() const {
    std::string s = name + "(n=" + std::to_string(n) + ";k=" + std::to_string(k);
    if (name == "er" || name == "er-partite" || name == "planted-core") s += ";p=" + fmt_num(p);
    if (name == "er-m" || name == "star") s += ";m=" + std::to_string(m);
    return s + ")";
  }
};

struct Instance {
  Hypergraph g;
  std::optional<std::vector<VertexSet>> classes;
};

inline Instance make_instance(const FamilySpec& f, RngStream& rng) {
  auto sizes = f.sizes;
  if (sizes.empty() && (f.name == "er-partite" || f.name == "planted-core"))
    sizes.assign(f.k, f.n / f.k);
  if (f.name == "er") return {gen_er(f.n, f.k, f.p, rng), std::nullopt};
  if (f.name == "er-m") return {gen_er_m(f.n, f.k, f.m, rng), std::nullopt};
  if (f.name == "star") return {gen_star(f.n, f.k, f.m, rng), std::nullopt};
  if (f.name == "empty") return {Hypergraph(f.n, f.k, {}), std::nullopt};
  if (f.name == "er-partite") {
    auto h = gen_er_partite(sizes, f.p, rng);
    return {std::move(h.base), std::move(h.classes)};
  }
  if (f.name == "planted-core") {
    auto roots = f.roots;
    roots.resize(sizes.size(), 0);
    auto h = gen_planted_core(sizes, roots, f.p, rng);
    return {std::move(h.base), std::move(h.classes)};
  }
  throw PreconditionError("unknown family '" + f.name + "'");
}

// ---------------------------------------------------------------------------
// Worker pool

// Calls f(i) for i in [0,count) on up to `threads` workers; f must only write
// to per-index state.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& f) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) f(i);
    });
  for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------------------
// Estimator runners

enum class EstimatorKind { uncol_approx, uncol, fine };

inline EstimatorKind parse_estimator(const std::string& s) {
  if (s == "uncol-approx") return EstimatorKind::uncol_approx;
  if (s == "uncol") return EstimatorKind::uncol;
  if (s == "fine" || s == "count-col") return EstimatorKind::fine;
  throw PreconditionError("unknown estimator '" + s + "' (expected uncol-approx, uncol or fine)");
}

inline const char* to_string(EstimatorKind e) {
  switch (e) {
    case EstimatorKind::uncol_approx: return "uncol-approx";
    case EstimatorKind::uncol: return "uncol";
    case EstimatorKind::fine: return "fine";
  }
  return "?";
}

inline Estimate run_estimator(EstimatorKind kind, const Instance& inst, const CostModel& model, const Rational& eps,
                              double delta, Profile profile, RngStream& rng) {
  if (kind == EstimatorKind::fine) {
    OracleSession s(inst.g, model, OracleKind::cindora);
    ColParams cp;
    cp.profile = profile;
    return fine_count(s, eps, delta, rng, cp, inst.classes);
  }
  OracleSession s(inst.g, model, OracleKind::indora);
  UncolParams up;
  up.profile = profile;
  if (kind == EstimatorKind::uncol_approx) return uncol_approx(s, eps, rng, up);
  UncolBoostParams bp;
  bp.inner = up;
  return uncol(s, eps, delta, rng, bp);
}

// ---------------------------------------------------------------------------
// Accuracy suite

struct AccuracyConfig {
  std::vector<FamilySpec> families;
  EstimatorKind estimator = EstimatorKind::uncol_approx;
  Rational eps = Rational(1, 2);
  double delta = 0.1;
  std::size_t trials = 10;
  Profile profile = Profile::fast;
  double alpha = 0;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

inline std::vector<ExperimentRecord> run_accuracy_suite(const AccuracyConfig& cfg) {
  std::vector<ExperimentRecord> rows;
  RngStream root(cfg.seed);
  const CostModel model = CostModel::power(cfg.alpha);
  for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
    const auto& f = cfg.families[fi];
    RngStream fr = root.child(fi);
    RngStream gr = fr.child(0), tr = fr.child(1);
    Instance inst = make_instance(f, gr);
    const double exact = inst.classes ? static_cast<double>(colourful_edge_count(inst.g, *inst.classes))
                                      : static_cast<double>(inst.g.m());
    std::vector<ExperimentRecord> part(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
      RngStream r = tr.child(t);
      auto t0 = std::chrono::steady_clock::now();
      Estimate e = run_estimator(cfg.estimator, inst, model, cfg.eps, cfg.delta, cfg.profile, r);
      auto t1 = std::chrono::steady_clock::now();
      ExperimentRecord rec;
      rec.experiment = std::string("accuracy-") + to_string(cfg.estimator);
      rec.family = f.label();
      rec.n = f.n;
      rec.k = f.k;
      rec.alpha = cfg.alpha;
      rec.eps = cfg.eps.str();
      rec.delta = cfg.delta;
      rec.profile = to_string(cfg.profile);
      rec.seed = cfg.seed;
      rec.estimate = e.value;
      rec.exact = exact;
      rec.within_eps = within_eps(e.value, exact, cfg.eps.to_double());
      rec.total_cost = e.cost;
      rec.queries = e.queries;
      rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      part[t] = std::move(rec);
    });
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Cost scaling

// Least-squares slope of log(y) against log(x) over the top half of the points.
inline std::optional<double> top_half_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const std::size_t from = n / 2;
  if (n - from < 2) return std::nullopt;
  double mx = 0, my = 0;
  const double c = static_cast<double>(n - from);
  for (std::size_t i = from; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= c;
  my /= c;
  double sxy = 0, sxx = 0;
  for (std::size_t i = from; i < n; ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

inline double median_value(std::vector<double> v) {
  require(!v.empty(), "median of an empty list");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

struct ScalingConfig {
  std::size_t k = 2;
  std::vector<double> alphas{0.0, 1.0};
  std::vector<std::size_t> ns;       // powers of two
  std::size_t trials = 50;
  Rational eps = Rational(1, 2);
  Profile profile = Profile::fast;
  double density = 1.0;              // edges per vertex: m = density * n
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct ScalingResult {
  std::vector<ExperimentRecord> records;
  std::map<double, std::vector<std::pair<std::size_t, double>>> medians;  // alpha -> (n, median cost)
  std::map<double, std::optional<double>> slopes;                         // alpha -> fitted slope
};

// Median oracle cost of single uncol_approx runs on m = density*n random edges.
inline ScalingResult run_cost_scaling(const ScalingConfig& cfg) {
  ScalingResult res;
  RngStream root(cfg.seed);
  for (std::size_t n : cfg.ns) require(is_pow2(n), "scaling: n grid must hold powers of two, got " + std::to_string(n));
  for (std::size_t ni = 0; ni < cfg.ns.size(); ++ni) {
    const std::size_t n = cfg.ns[ni];
    RngStream nr = root.child(ni);
    RngStream gr = nr.child(0), tr = nr.child(1);
    const auto m = static_cast<std::size_t>(std::llround(cfg.density * static_cast<double>(n)));
    FamilySpec f{"er-m", n, cfg.k, 0.0, m, {}, {}};
    Instance inst = make_instance(f, gr);
    for (double a : cfg.alphas) {
      const CostModel model = CostModel::power(a);
      std::vector<ExperimentRecord> part(cfg.trials);
      parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        RngStream r = tr.child(t);
        auto t0 = std::chrono::steady_clock::now();
        Estimate e = run_estimator(EstimatorKind::uncol_approx, inst, model, cfg.eps, 0.0, cfg.profile, r);
        auto t1 = std::chrono::steady_clock::now();
        ExperimentRecord rec;
        rec.experiment = "scaling";
        rec.family = f.label();
        rec.n = n;
        rec.k = cfg.k;
        rec.alpha = a;
        rec.eps = cfg.eps.str();
        rec.delta = 0;
        rec.profile = to_string(cfg.profile);
        rec.seed = cfg.seed;
        rec.estimate = e.value;
        rec.exact = static_cast<double>(inst.g.m());
        rec.within_eps = within_eps(e.value, rec.exact, cfg.eps.to_double());
        rec.total_cost = e.cost;
        rec.queries = e.queries;
        rec.runtime_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        part[t] = std::move(rec);
      });
      std::vector<double> costs;
      for (const auto& r : part) costs.push_back(r.total_cost);
      res.medians[a].push_back({n, median_value(costs)});
      res.records.insert(res.records.end(), part.begin(), part.end());
    }
  }
  for (const auto& [a, pts] : res.medians) {
    std::vector<double> x, y;
    for (const auto& [n, c] : pts) {
      x.push_back(static_cast<double>(n));
      y.push_back(std::max(c, 1e-300));
    }
    res.slopes[a] = top_half_slope(x, y);
  }
  return res;
}

// Two-column "n median_cost" export per alpha, blocks separated by blank lines.
inline void write_gnuplot(std::ostream& os, const ScalingResult& r) {
  for (const auto& [a, pts] : r.medians) {
    os << "# alpha=" << fmt_num(a) << "\n";
    for (const auto& [n, c] : pts) os << n << " " << fmt_num(c) << "\n";
    os << "\n\n";
  }
}

}  // namespace hgest
