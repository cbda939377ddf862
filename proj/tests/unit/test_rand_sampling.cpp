#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"

using namespace hgest;

TEST(RngStream, DeterministicAndSplittable) {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  RngStream c1 = RngStream(42).child(1), c2 = RngStream(42).child(2);
  EXPECT_NE(c1.next(), c2.next());
  EXPECT_EQ(RngStream(42).child(3).child(4).stream_id(), "3.4");
  EXPECT_EQ(RngStream(42).child(7).next(), RngStream(42).child(7).next());
}

TEST(SampleBinomial, TrivialCases) {
  RngStream r(1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_binomial(37, 0, r), 37u);
    EXPECT_EQ(sample_binomial(0, 5, r), 0u);
  }
}

TEST(SampleBinomial, MeanWithinThreeSigma) {
  RngStream r(2);
  const int N = 100000;
  double sum = 0;
  for (int i = 0; i < N; ++i) sum += static_cast<double>(sample_binomial(1024, 3, r));
  EXPECT_GE(sum / N, 126.9);
  EXPECT_LE(sum / N, 129.1);
}

TEST(SampleBinomial, DistributionChiSquare) {
  RngStream r(3);
  const int N = 50000;
  const std::size_t n = 40;
  std::vector<double> obs(n + 1, 0), exp(n + 1, 0);
  for (int i = 0; i < N; ++i) obs[sample_binomial(n, 2, r)] += 1;
  for (std::size_t x = 0; x <= n; ++x) exp[x] = N * oracles::binom_pmf(n, x, 0.25);
  oracles::pool_cells(obs, exp);
  EXPECT_GT(oracles::chi_square_pvalue(obs, exp), 1e-3);
}

TEST(SampleSubset, TrivialCases) {
  RngStream r(4);
  EXPECT_EQ(sample_subset(17, 0, r), full_set(17));
  EXPECT_TRUE(sample_subset(0, 3, r).empty());
}

TEST(SampleSubset, SortedDistinctInRange) {
  RngStream r(5);
  for (unsigned i = 0; i <= 6; ++i)
    for (int rep = 0; rep < 200; ++rep) {
      auto x = sample_subset(100, i, r);
      for (std::size_t j = 0; j < x.size(); ++j) {
        ASSERT_GE(x[j], 1u);
        ASSERT_LE(x[j], 100u);
        if (j) {
          ASSERT_LT(x[j - 1], x[j]);
        }
      }
    }
}

TEST(SampleSubset, MarginalsAndSizeAtBranchBoundary) {
  RngStream r(6);
  const int N = 100000;
  const std::size_t n = 8;
  std::vector<double> incl(n, 0), sizes(n + 1, 0);
  for (int d = 0; d < N; ++d) {
    auto x = sample_subset(n, 3, r);
    sizes[x.size()] += 1;
    for (Vertex v : x) incl[v - 1] += 1;
  }
  for (std::size_t v = 0; v < n; ++v) {
    const double p = 1.0 / 8, sd = std::sqrt(p * (1 - p) / N);
    EXPECT_NEAR(incl[v] / N, p, 4 * sd);
  }
  std::vector<double> exp(n + 1);
  for (std::size_t s = 0; s <= n; ++s) exp[s] = N * oracles::binom_pmf(n, s, 1.0 / 8);
  oracles::pool_cells(sizes, exp);
  EXPECT_GT(oracles::chi_square_pvalue(sizes, exp), 1e-3);
}

TEST(SampleSubset, TwoStageAgreesWithNaiveCoins) {
  // Naive per-element coins at rate 1/8 versus the library's two-stage path (i = 3).
  RngStream r(7), q(8);
  const int N = 40000;
  const std::size_t n = 32;
  std::vector<double> lib(n + 1, 0), naive(n + 1, 0);
  for (int d = 0; d < N; ++d) {
    lib[sample_subset(n, 3, r).size()] += 1;
    std::size_t c = 0;
    for (std::size_t v = 0; v < n; ++v) c += (q.next() & 7) == 0;
    naive[c] += 1;
  }
  // Two-sample chi-square over pooled cells.
  std::vector<double> stat_obs, stat_exp;
  double chi = 0;
  std::size_t cells = 0;
  double la = 0, na = 0;
  for (std::size_t s = 0; s <= n; ++s) {
    la += lib[s];
    na += naive[s];
    if (la + na >= 20 || s == n) {
      if (la + na > 0) {
        chi += (la - na) * (la - na) / (la + na);
        ++cells;
      }
      la = na = 0;
    }
  }
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, chi)), 1e-3);
}

TEST(SampleSubset, DeterministicGivenStream) {
  RngStream a(9), b(9);
  for (unsigned i = 0; i < 8; ++i) EXPECT_EQ(sample_subset(500, i, a), sample_subset(500, i, b));
}

TEST(UniformKPartition, Cases) {
  RngStream r(10);
  auto e = uniform_k_partition(std::vector<Vertex>{}, 3, r);
  ASSERT_EQ(e.size(), 3u);
  for (auto& c : e) EXPECT_TRUE(c.empty());
  auto one = uniform_k_partition(full_set(5), 1, r);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], full_set(5));
  const int N = 100000;
  std::vector<double> hits(4, 0);
  for (int i = 0; i < N; ++i) {
    auto p = uniform_k_partition(std::vector<Vertex>{7}, 4, r);
    for (std::size_t j = 0; j < 4; ++j)
      if (!p[j].empty()) hits[j] += 1;
  }
  for (double h : hits) EXPECT_NEAR(h / N, 0.25, 3 * std::sqrt(0.25 * 0.75 / N) + 1e-3);
}

TEST(UniformKSubset, Cases) {
  RngStream r(11);
  const VertexSet s{1, 2, 3};
  EXPECT_TRUE(uniform_k_subset(s, 0, r).empty());
  EXPECT_EQ(uniform_k_subset(s, 3, r), s);
  EXPECT_THROW(uniform_k_subset(s, 4, r), PreconditionError);
  const int N = 30000;
  std::map<VertexSet, double> freq;
  for (int i = 0; i < N; ++i) freq[uniform_k_subset(s, 2, r)] += 1;
  EXPECT_EQ(freq.size(), 3u);
  for (auto& [k, v] : freq) EXPECT_NEAR(v / N, 1.0 / 3, 3 * std::sqrt((1.0 / 3) * (2.0 / 3) / N) + 1e-3);
}

TEST(BalancedSplit, SizesDifferByAtMostOne) {
  RngStream r(12);
  for (std::size_t n = 0; n < 20; ++n) {
    auto [a, b] = balanced_split(full_set(n), r);
    EXPECT_EQ(a.size() + b.size(), n);
    EXPECT_LE(b.size() - a.size(), 1u);
    EXPECT_EQ(set_union(a, b), full_set(n));
  }
}
