#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "glab/rng.hpp"

using namespace glab;

TEST(Rng, SplitMixKnownValue) {
  // First output of the reference SplitMix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, DerivedSeedsDoNotCollideOnMillionReplications) {
  constexpr std::uint64_t kCount = 1'000'000;
  const std::uint64_t tag = string_tag("convergence");
  std::vector<std::uint64_t> seeds;
  seeds.reserve(kCount);
  for (std::uint64_t i = 0; i < kCount; ++i) seeds.push_back(replication_seed(mix64(42, tag), i));
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
}

TEST(Rng, VertexStreamIsDeterministicAndBalanced) {
  int ones = 0;
  for (int x = 0; x < 200; ++x)
    for (int y = 0; y < 200; ++y) {
      const auto w = vertex_bernoulli(9, x, y, 0.5);
      ASSERT_EQ(w, vertex_bernoulli(9, x, y, 0.5));
      ones += w;
    }
  // 40000 fair draws: 5 sigma = 500.
  EXPECT_NEAR(ones, 20000, 500);
}

TEST(Rng, UniformIntStaysInRange) {
  CounterRng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const auto v = rng.uniform_int(-3, 5);
    ASSERT_GE(v, -3);
    ASSERT_LE(v, 5);
  }
}

TEST(Rng, StringTagsAreStable) {
  EXPECT_EQ(string_tag("oracle-suite"), string_tag("oracle-suite"));
  EXPECT_NE(string_tag("oracle-suite"), string_tag("resample-suite"));
}
