#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hgest/oracle.hpp"
#include "hgest/rng.hpp"

namespace hgest {

enum class Profile { theory, fast };

inline const char* to_string(Profile p) { return p == Profile::theory ? "theory" : "fast"; }

inline Profile parse_profile(const std::string& s) {
  if (s == "theory") return Profile::theory;
  if (s == "fast") return Profile::fast;
  throw PreconditionError("unknown profile '" + s + "' (expected theory or fast)");
}

// Output of an estimator: a value or the RTE sentinel, plus accounting.
struct Estimate {
  std::optional<double> value;  // nullopt means RTE
  int halted_i = -1;            // schedule index that produced the value; -1 for exhaustive paths
  bool exhaustive = false;
  double cost = 0.0;            // oracle cost charged by this call
  std::uint64_t queries = 0;
  std::uint64_t seed = 0;
  std::string stream;

  bool rte() const { return !value.has_value(); }
};

// Snapshot of a ledger, to attribute cost to a single call.
struct LedgerMark {
  double cost;
  std::uint64_t queries;
  explicit LedgerMark(const OracleSession& s) : cost(s.total().cost), queries(s.total().queries) {}
  void fill(Estimate& e, const OracleSession& s) const {
    auto t = s.total();
    e.cost = t.cost - cost;
    e.queries = t.queries - queries;
  }
};

}  // namespace hgest
