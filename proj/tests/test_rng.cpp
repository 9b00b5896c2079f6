#include "dalpha/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

using namespace dalpha;

// Known-answer vectors published with the reference Philox implementation.
TEST(Philox, KnownAnswers) {
  using B = Philox::Block;
  EXPECT_EQ(Philox::encrypt(B{0, 0, 0, 0}, {0, 0}), (B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox::encrypt(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox::encrypt(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, FirstOutputIsBlockZero) {
  Philox g(0);
  const auto b = Philox::encrypt({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(g(), (static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
  EXPECT_EQ(g(), (static_cast<std::uint64_t>(b[3]) << 32) | b[2]);
}

TEST(Philox, Deterministic) {
  Philox a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    differs |= x != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Philox, ChildrenAreDistinctAndReproducible) {
  const Philox root(9);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Philox a = root.child(i), b = root.child(i);
    const auto x = a();
    EXPECT_EQ(x, b());
    firsts.insert(x);
  }
  EXPECT_EQ(firsts.size(), 50u);
  Philox r = root;
  EXPECT_NE(root.child(0)(), r());
}

TEST(Philox, Uniform01Range) {
  Philox g(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // sd of the mean is 1/sqrt(12 n)
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Philox, UniformIndexIsUniform) {
  Philox g(5);
  const int n = 7, draws = 140000;
  std::vector<int> count(n, 0);
  for (int i = 0; i < draws; ++i) {
    const auto v = g.uniform_index(n);
    ASSERT_LT(v, static_cast<std::uint64_t>(n));
    ++count[v];
  }
  const double p = 1.0 / n, se = std::sqrt(draws * p * (1 - p));
  for (int c : count) EXPECT_NEAR(c, draws * p, 4.0 * se);
  EXPECT_EQ(g.uniform_index(1), 0u);
}

TEST(Philox, WorksWithStdDistributions) {
  Philox g(2);
  std::normal_distribution<double> normal;
  double s = 0.0, s2 = 0.0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const double z = normal(g);
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(SplitMix, KnownValue) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafull);
}
