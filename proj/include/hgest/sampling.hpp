#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "hgest/errors.hpp"
#include "hgest/rng.hpp"
#include "hgest/vertex_set.hpp"

namespace hgest {

// Optional counter of elementary sampling steps (coin flips, rejection draws, thinning rounds).
struct SampleOps {
  std::uint64_t steps = 0;
};

template <class T>
void shuffle(std::vector<T>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.below(i);
    std::swap(v[i - 1], v[j]);
  }
}

// Exact Bin(m, 1/2): popcount of m fair bits.
inline std::uint64_t fair_binomial(std::uint64_t m, RngStream& rng) {
  std::uint64_t c = 0;
  for (; m >= 64; m -= 64) c += std::popcount(rng.next());
  if (m) c += std::popcount(rng.next() & ((std::uint64_t{1} << m) - 1));
  return c;
}

// Bin(n, 2^-i) by i rounds of fair thinning.
inline std::uint64_t sample_binomial(std::uint64_t n, unsigned i, RngStream& rng, SampleOps* ops = nullptr) {
  std::uint64_t x = n;
  for (unsigned r = 0; r < i && x > 0; ++r) x = fair_binomial(x, rng);
  if (ops) ops->steps += i;
  return x;
}

namespace detail {

// Uniformly random s-subset of {0..N-1} as a sorted index list.
// Hash-set rejection, capped at 64*s*ln(N+2) draws, then a sparse
// partial Fisher-Yates restricted to the not-yet-chosen indices.
inline std::vector<std::uint64_t> random_indices(std::uint64_t N, std::uint64_t s, RngStream& rng, SampleOps* ops) {
  std::vector<std::uint64_t> out;
  if (s == 0) return out;
  if (s == N) {
    out.resize(N);
    for (std::uint64_t i = 0; i < N; ++i) out[i] = i;
    if (ops) ops->steps += N;
    return out;
  }
  const double cap = 64.0 * static_cast<double>(s) * std::log(static_cast<double>(N) + 2.0);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(s * 2);
  std::uint64_t draws = 0;
  while (chosen.size() < s && static_cast<double>(draws) < cap) {
    chosen.insert(rng.below(N));
    ++draws;
  }
  if (chosen.size() < s) {
    // Complete with a uniform (s - |chosen|)-subset of the remaining indices:
    // sparse Fisher-Yates over a virtual array of the N - |chosen| free slots.
    std::vector<std::uint64_t> taken(chosen.begin(), chosen.end());
    std::sort(taken.begin(), taken.end());
    std::uint64_t free_n = N - taken.size();
    auto nth_free = [&](std::uint64_t r) {
      // r-th (0-based) index not in `taken`.
      std::uint64_t lo = r, hi = r + taken.size();
      while (lo < hi) {
        std::uint64_t mid = (lo + hi) / 2;
        std::uint64_t below = mid + 1 - static_cast<std::uint64_t>(std::upper_bound(taken.begin(), taken.end(), mid) - taken.begin());
        if (below > r) hi = mid; else lo = mid + 1;
      }
      return lo;
    };
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto at = [&](std::uint64_t i) { auto it = swapped.find(i); return it == swapped.end() ? i : it->second; };
    std::uint64_t need = s - chosen.size();
    for (std::uint64_t j = 0; j < need; ++j) {
      std::uint64_t r = j + rng.below(free_n - j);
      std::uint64_t vr = at(r), vj = at(j);
      swapped[r] = vj;
      swapped[j] = vr;
      chosen.insert(nth_free(vr));
      ++draws;
    }
  }
  if (ops) ops->steps += draws;
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Random subset of [n] containing each element independently with probability 2^-i.
inline VertexSet sample_subset(std::size_t n, unsigned i, RngStream& rng, SampleOps* ops = nullptr) {
  VertexSet x;
  if (i == 0) {
    if (ops) ops->steps += n;
    return full_set(n);
  }
  if (i <= 2) {
    x.reserve(n >> i);
    for (std::size_t base = 0; base < n; base += 64) {
      std::uint64_t bits = rng.next();
      if (i == 2) bits &= rng.next();
      std::size_t lim = std::min<std::size_t>(64, n - base);
      for (std::size_t b = 0; b < lim; ++b)
        if ((bits >> b) & 1) x.push_back(static_cast<Vertex>(base + b + 1));
    }
    if (ops) ops->steps += n;
    return x;
  }
  std::uint64_t s = sample_binomial(n, i, rng, ops);
  auto idx = detail::random_indices(n, s, rng, ops);
  x.reserve(idx.size());
  for (auto j : idx) x.push_back(static_cast<Vertex>(j + 1));
  return x;
}

// Subset of an arbitrary sorted base set at rate 2^-i, via sample_subset on indices.
inline VertexSet subset_pow2(std::span<const Vertex> base, unsigned i, RngStream& rng, SampleOps* ops = nullptr) {
  if (i > 63) return {};
  VertexSet idx = sample_subset(base.size(), i, rng, ops);
  VertexSet out;
  out.reserve(idx.size());
  for (Vertex j : idx) out.push_back(base[j - 1]);
  return out;
}

// Independent inclusion with probability p (p a double).
inline VertexSet bernoulli_subset(std::span<const Vertex> base, double p, RngStream& rng) {
  VertexSet out;
  if (p >= 1.0) return VertexSet(base.begin(), base.end());
  if (p <= 0.0) return out;
  for (Vertex v : base)
    if (rng.uniform01() < p) out.push_back(v);
  return out;
}

// Uniformly random size-s subset of S.
inline VertexSet uniform_k_subset(std::span<const Vertex> s_set, std::size_t s, RngStream& rng) {
  require(s <= s_set.size(), "uniform_k_subset: s=" + std::to_string(s) + " exceeds |S|=" + std::to_string(s_set.size()));
  auto idx = detail::random_indices(s_set.size(), s, rng, nullptr);
  VertexSet out;
  out.reserve(s);
  for (auto j : idx) out.push_back(s_set[j]);
  return out;
}

// Each element of U receives an independent uniform colour in [k].
inline std::vector<VertexSet> uniform_k_partition(std::span<const Vertex> u, std::size_t k, RngStream& rng) {
  require(k >= 1, "uniform_k_partition: k must be at least 1");
  std::vector<VertexSet> cls(k);
  for (Vertex v : u) cls[k == 1 ? 0 : rng.below(k)].push_back(v);
  return cls;
}

// Uniformly random split into two parts of sizes floor(|S|/2) and ceil(|S|/2).
inline std::pair<VertexSet, VertexSet> balanced_split(std::span<const Vertex> s, RngStream& rng) {
  VertexSet all(s.begin(), s.end());
  shuffle(all, rng);
  std::size_t h = all.size() / 2;
  VertexSet a(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(h));
  VertexSet b(all.begin() + static_cast<std::ptrdiff_t>(h), all.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return {std::move(a), std::move(b)};
}

}  // namespace hgest
