#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace hgest {

// Vertices are 1-based.
using Vertex = std::uint32_t;
// Sorted, duplicate-free list of vertices.
using VertexSet = std::vector<Vertex>;

inline void normalize(VertexSet& s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
}

inline VertexSet range_set(Vertex first, Vertex last) {
  VertexSet s;
  if (last < first) return s;
  s.reserve(last - first + 1);
  for (Vertex v = first; v <= last; ++v) s.push_back(v);
  return s;
}

inline VertexSet full_set(std::size_t n) { return range_set(1, static_cast<Vertex>(n)); }

inline VertexSet set_union(std::span<const Vertex> a, std::span<const Vertex> b) {
  VertexSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_intersection(std::span<const Vertex> a, std::span<const Vertex> b) {
  VertexSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline VertexSet set_difference(std::span<const Vertex> a, std::span<const Vertex> b) {
  VertexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline bool is_subset(std::span<const Vertex> a, std::span<const Vertex> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool contains(std::span<const Vertex> s, Vertex v) {
  return std::binary_search(s.begin(), s.end(), v);
}

inline bool pairwise_disjoint(const std::vector<VertexSet>& sets) {
  std::vector<Vertex> all;
  for (const auto& s : sets) all.insert(all.end(), s.begin(), s.end());
  std::sort(all.begin(), all.end());
  return std::adjacent_find(all.begin(), all.end()) == all.end();
}

inline std::size_t total_size(const std::vector<VertexSet>& sets) {
  std::size_t t = 0;
  for (const auto& s : sets) t += s.size();
  return t;
}

struct EdgeKeyHash {
  std::size_t operator()(const std::vector<Vertex>& e) const noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (Vertex v : e) {
      h ^= v;
      h *= 0x100000001B3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace hgest
