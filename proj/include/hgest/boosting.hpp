#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/oracle.hpp"
#include "hgest/rng.hpp"

namespace hgest {

// Number of repetitions ceil(6 ln(2/gamma) / xi^2), xi = 1 - 1/(2(1 - delta)),
// for a base algorithm that lands in its target interval with probability >= 1 - delta.
inline std::size_t median_repetitions(double base_delta, double gamma) {
  require(base_delta >= 0 && base_delta < 0.5, "median boosting needs base failure probability < 1/2");
  require(gamma > 0 && gamma < 1, "median boosting needs gamma in (0,1)");
  double xi = 1.0 - 1.0 / (2.0 * (1.0 - base_delta));
  return static_cast<std::size_t>(std::ceil(6.0 * std::log(2.0 / gamma) / (xi * xi)));
}

// Odd repetition count ceil(ln(1/gamma) / (2 (1/2 - delta)^2)) from Hoeffding's bound
// on the number of runs outside the target interval.
inline std::size_t hoeffding_repetitions(double base_delta, double gamma) {
  require(base_delta >= 0 && base_delta < 0.5, "median boosting needs base failure probability < 1/2");
  require(gamma > 0 && gamma < 1, "median boosting needs gamma in (0,1)");
  const double gap = 0.5 - base_delta;
  auto r = static_cast<std::size_t>(std::ceil(std::log(1.0 / gamma) / (2.0 * gap * gap)));
  return std::max<std::size_t>(1, r | 1);
}

// Lower median of the outputs; non-numeric outputs (nullopt) count as -1.
inline double median_of(std::vector<double> v) {
  require(!v.empty(), "median of an empty list");
  std::size_t mid = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  return v[mid];
}

// Runs `run(child_rng)` `reps` times on independent child streams and returns the median.
template <class Run>
double median_boost(Run&& run, std::size_t reps, RngStream& rng, std::vector<double>* outputs = nullptr) {
  require(reps >= 1, "median_boost: at least one repetition");
  std::vector<double> vals;
  vals.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    RngStream child = rng.child(r);
    std::optional<double> v = run(child);
    vals.push_back(v ? *v : -1.0);
  }
  if (outputs) *outputs = vals;
  return median_of(std::move(vals));
}

// ceil(log_delta(gamma)): attempts needed so that all of them overrunning has probability <= gamma.
inline std::size_t capped_attempts(double delta, double gamma) {
  require(delta > 0 && delta < 1 && gamma > 0 && gamma < 1, "capped_attempts: delta, gamma must lie in (0,1)");
  return static_cast<std::size_t>(std::ceil(std::log(gamma) / std::log(delta) - 1e-12));
}

// Runs `run(child_rng)` under a per-attempt oracle-cost cap: an attempt whose
// next query would push its own cost above `cost_cap` is aborted, and a fresh
// attempt starts. Returns nullopt (RTE) once `attempts` attempts were aborted.
template <class Run>
auto capped_retry(OracleSession& sess, double cost_cap, std::size_t attempts, Run&& run, RngStream& rng)
    -> decltype(run(rng)) {
  for (std::size_t a = 0; a < attempts; ++a) {
    RngStream child = rng.child(a);
    sess.set_cost_cap(sess.total().cost + cost_cap);
    try {
      auto v = run(child);
      sess.set_cost_cap(std::nullopt);
      return v;
    } catch (const ResourceExceeded&) {
      sess.set_cost_cap(std::nullopt);
    }
  }
  return std::nullopt;
}

}  // namespace hgest
