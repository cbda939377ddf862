#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/rational.hpp"

namespace hgest {

// Nearest integer, ties rounded up: floor(x + 1/2).
inline std::int64_t round_half(const Rational& x) { return (x + Rational(1, 2)).floor(); }

// g(k, beta) = (1/k) * r * (k - beta - r) with r = round_half((k - beta)/2).
inline Rational g_exponent(std::int64_t k, const Rational& beta) {
  require(k >= 2, "g: k must be at least 2");
  require(beta >= Rational(0) && beta <= Rational(k), "g: beta must lie in [0,k], got " + beta.str());
  Rational d = Rational(k) - beta;
  Rational r(round_half(d / Rational(2)));
  return r * (d - r) / Rational(k);
}

inline bool is_pow2(std::uint64_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline unsigned log2_exact(std::uint64_t n) {
  require(is_pow2(n), "expected a power of two, got " + std::to_string(n));
  return static_cast<unsigned>(std::countr_zero(n));
}

inline std::uint64_t next_pow2(std::uint64_t n) {
  std::uint64_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// One row of the sampling schedule for n = 2^ell:
//   p_i = 2^-i, n^(L + gamma) = 2^(ik) with gamma = gamma_num/ell,
//   F_i = 2^log2F, t_i = ceil(mult * F_i), M_i = 2^(k+1) t_i.
struct ScheduleEntry {
  unsigned i = 0;
  std::int64_t L = 0;
  std::int64_t gamma_num = 0;
  std::int64_t log2F = 0;
  std::uint64_t t = 0;
  std::uint64_t M = 0;

  Rational gamma(unsigned ell) const { return Rational(gamma_num, ell); }
};

struct Schedule {
  std::uint64_t n = 0;
  unsigned ell = 0;
  std::size_t k = 0;
  Rational multiplier;
  std::vector<ScheduleEntry> rows;
};

// Integer log2 of F_i: i(k - L) - min(i, gamma_num).
inline ScheduleEntry schedule_row(unsigned ell, std::size_t k, unsigned i) {
  ScheduleEntry e;
  e.i = i;
  std::int64_t ik = static_cast<std::int64_t>(i) * static_cast<std::int64_t>(k);
  e.L = ik / ell;
  e.gamma_num = ik - static_cast<std::int64_t>(ell) * e.L;
  e.log2F = static_cast<std::int64_t>(i) * (static_cast<std::int64_t>(k) - e.L) -
            std::min<std::int64_t>(i, e.gamma_num);
  return e;
}

// Paper multiplier eps^-2 * 10 k^2 2^k log n.
inline Rational theory_multiplier(std::size_t k, unsigned ell, const Rational& eps) {
  return Rational(10 * static_cast<std::int64_t>(k * k) * (std::int64_t{1} << k) * ell) / (eps * eps);
}

// Schedule for n a power of two; `multiplier` overrides the t_i multiplier.
inline Schedule build_schedule(std::uint64_t n_pow2, std::size_t k, const Rational& eps,
                               std::optional<Rational> multiplier = std::nullopt) {
  require(is_pow2(n_pow2) && n_pow2 >= 2, "build_schedule: n must be a power of two >= 2, got " + std::to_string(n_pow2));
  require(eps > Rational(0) && eps < Rational(1), "build_schedule: eps must lie in (0,1)");
  require(k >= 2 && k <= 20, "build_schedule: k out of supported range");
  Schedule s;
  s.n = n_pow2;
  s.ell = log2_exact(n_pow2);
  s.k = k;
  s.multiplier = multiplier ? *multiplier : theory_multiplier(k, s.ell, eps);
  require(s.multiplier > Rational(0), "build_schedule: multiplier must be positive");
  const unsigned __int128 sat = static_cast<unsigned __int128>(UINT64_MAX);
  for (unsigned i = 0; i < s.ell; ++i) {
    ScheduleEntry e = schedule_row(s.ell, k, i);
    unsigned __int128 num = static_cast<unsigned __int128>(s.multiplier.num());
    auto den = static_cast<unsigned __int128>(s.multiplier.den());
    unsigned __int128 t;
    if (e.log2F >= 60) t = sat;
    else {
      num <<= e.log2F;
      t = (num + den - 1) / den;
    }
    e.t = t > sat ? UINT64_MAX : static_cast<std::uint64_t>(t);
    unsigned __int128 M = static_cast<unsigned __int128>(e.t) << (k + 1);
    e.M = M > sat ? UINT64_MAX : static_cast<std::uint64_t>(M);
    s.rows.push_back(e);
  }
  return s;
}

// max_i F_i 2^(-i beta) versus n^g(k,beta), both as base-2 exponents.
struct OverheadCheck {
  Rational lhs_log2;       // max_i (log2 F_i - i beta)
  Rational rhs_log2;       // ell * g(k, beta)
  unsigned argmax_i = 0;
  bool integral = false;   // ell*beta and ell*g both integers
  bool equal = false;
};

inline OverheadCheck max_overhead(std::uint64_t n_pow2, std::size_t k, const Rational& beta) {
  unsigned ell = log2_exact(n_pow2);
  require(ell >= 1, "max_overhead: n must be at least 2");
  OverheadCheck c;
  bool first = true;
  for (unsigned i = 0; i < ell; ++i) {
    ScheduleEntry e = schedule_row(ell, k, i);
    Rational v = Rational(e.log2F) - Rational(i) * beta;
    if (first || v > c.lhs_log2) {
      c.lhs_log2 = v;
      c.argmax_i = i;
      first = false;
    }
  }
  c.rhs_log2 = Rational(ell) * g_exponent(static_cast<std::int64_t>(k), beta);
  c.integral = (Rational(ell) * beta).is_integer() && c.rhs_log2.is_integer();
  c.equal = c.lhs_log2 == c.rhs_log2;
  return c;
}

// Conclusion of the Karamata-type bound: sum s_i^r <= W c^(r - alpha).
// Whenever sum s_i^alpha <= W and every s_i lies in [0,c], this must hold.
inline bool karamata_check(std::span<const double> s, double alpha, double r, double c, double w) {
  require(r >= alpha && alpha >= 0, "karamata_check: need r >= alpha >= 0");
  require(c > 0, "karamata_check: need c > 0");
  double lhs = 0;
  for (double x : s) {
    require(x >= 0 && x <= c, "karamata_check: entries must lie in [0,c]");
    lhs += std::pow(x, r);
  }
  double rhs = w * std::pow(c, r - alpha);
  return lhs <= rhs * (1 + 1e-12) + 1e-300;
}

}  // namespace hgest
