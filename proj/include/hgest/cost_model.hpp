#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "hgest/errors.hpp"

namespace hgest {

// Slowly-varying multiplier of the cost function.
enum class SlowFactor { identity, log_power, exp_log_power };

// cost(x) = x^alpha * sigma(x) with
//   identity:       sigma(x) = 1
//   log_power:      sigma(x) = (1 + ln x)^param
//   exp_log_power:  sigma(x) = exp(sign * (ln x)^param), 0 < param < 1
struct CostModel {
  double alpha = 0.0;
  SlowFactor slow = SlowFactor::identity;
  double param = 0.0;
  int sign = 1;

  static CostModel power(double alpha) { return CostModel{alpha, SlowFactor::identity, 0.0, 1}; }
  static CostModel log_power(double alpha, double beta) { return CostModel{alpha, SlowFactor::log_power, beta, 1}; }
  static CostModel exp_log(double alpha, double gamma, int sign) {
    return CostModel{alpha, SlowFactor::exp_log_power, gamma, sign >= 0 ? 1 : -1};
  }

  // Integer alpha with identity sigma: charges are exact integers.
  bool exact() const {
    return slow == SlowFactor::identity && alpha == std::floor(alpha) && alpha >= 0 && alpha <= 62;
  }

  double sigma(double x) const {
    switch (slow) {
      case SlowFactor::identity: return 1.0;
      case SlowFactor::log_power: return std::pow(1.0 + std::log(x), param);
      case SlowFactor::exp_log_power: return std::exp(sign * std::pow(std::log(x), param));
    }
    return 1.0;
  }

  double cost(std::size_t x) const {
    if (x == 0) return 0.0;
    if (exact()) return static_cast<double>(cost_exact(x));
    return std::pow(static_cast<double>(x), alpha) * sigma(static_cast<double>(x));
  }

  // Exact charge for exact() models; saturates at the top of the 128-bit range.
  unsigned __int128 cost_exact(std::size_t x) const {
    if (x == 0) return 0;
    unsigned __int128 r = 1;
    auto a = static_cast<int>(alpha);
    for (int i = 0; i < a; ++i) {
      if (r > (~static_cast<unsigned __int128>(0)) / x) return ~static_cast<unsigned __int128>(0);
      r *= x;
    }
    return r;
  }

  std::string describe() const {
    std::string s = "x^" + trim(alpha);
    switch (slow) {
      case SlowFactor::identity: break;
      case SlowFactor::log_power: s += "*(1+ln x)^" + trim(param); break;
      case SlowFactor::exp_log_power: s += std::string("*exp(") + (sign < 0 ? "-" : "") + "(ln x)^" + trim(param) + ")"; break;
    }
    return s;
  }

  // Checks alpha in [0,k], cost(0)=0, 0 < cost(x) <= x^k for x in 1..n and
  // monotonicity when alpha > 0. Throws PreconditionError naming the first failure.
  void validate(std::size_t k, std::size_t n) const {
    require(alpha >= 0 && alpha <= static_cast<double>(k), "cost index alpha must lie in [0,k]");
    if (slow == SlowFactor::exp_log_power) require(param > 0 && param < 1, "exp-log exponent must lie in (0,1)");
    require(cost(0) == 0.0, "cost(0) must be 0");
    double prev = 0.0;
    for (std::size_t x = 1; x <= n; ++x) {
      double c = cost(x);
      double cap = std::pow(static_cast<double>(x), static_cast<double>(k));
      require(c > 0, "cost(" + std::to_string(x) + ") must be positive");
      require(c <= cap * (1 + 1e-12), "cost(" + std::to_string(x) + ") exceeds x^k");
      if (alpha > 0) require(c >= prev * (1 - 1e-12), "cost is not monotone at x=" + std::to_string(x));
      prev = c;
    }
  }

private:
  static std::string trim(double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
};

}  // namespace hgest
