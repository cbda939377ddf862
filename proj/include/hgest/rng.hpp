#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hgest {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based splittable generator. Output j of a stream is a hash of
// (stream key, j); the key is a hash of the seed and the child-index path,
// so distinct paths never share an input block.
class RngStream {
public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0)
      : seed_(seed), key_(detail::mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  // Dotted child path, e.g. "" for the root, "3.0.17" for a grandchild.
  std::string stream_id() const {
    std::string s;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(path_[i]);
    }
    return s;
  }

  RngStream child(std::uint64_t i) const {
    RngStream c;
    c.seed_ = seed_;
    c.path_ = path_;
    c.path_.push_back(i);
    c.key_ = detail::mix64(key_ ^ detail::mix64((i + 1) * detail::kGolden + 0x3C6EF372FE94F82BULL));
    return c;
  }

  // Next child in a sequence of splits from this stream.
  RngStream split() { return child(splits_++); }

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  std::uint64_t next() {
    return detail::mix64(key_ ^ detail::mix64(++ctr_ * detail::kGolden));
  }

  // Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t thresh = (0 - n) % n;
      while (lo < thresh) {
        m = static_cast<unsigned __int128>(next()) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform01() < p;
  }

private:
  std::uint64_t seed_ = 0;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
  std::uint64_t splits_ = 0;
};

}  // namespace hgest
