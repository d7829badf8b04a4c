#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glab/lcs.hpp"
#include "glab/oracle.hpp"

using namespace glab;

namespace {

WordPair from_strings(const std::string& a, const std::string& b) {
  std::vector<Symbol> x, y;
  for (char c : a) x.push_back(static_cast<Symbol>(c - 'A'));
  for (char c : b) y.push_back(static_cast<Symbol>(c - 'A'));
  return word_pair_from(4, x, y);
}

}  // namespace

TEST(Lcs, TextbookExample) {
  EXPECT_EQ(lcs_length(from_strings("ABCBDAB", "BDCABA")), 4u);
  EXPECT_EQ(lcs_length(from_strings("AAAA", "AA")), 2u);
  EXPECT_EQ(lcs_length(from_strings("ABCD", "DCBA")), 1u);
}

TEST(Lcs, MatchesSubsequenceEnumeration) {
  const auto uniform3 = uniform_distribution(3);
  const std::vector<double> skewed{0.7, 0.2, 0.1};
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int a = 1 + static_cast<int>(seed % 12);
    const int b = 1 + static_cast<int>((seed / 12) % 12);
    const auto pair = generate_word_pair(a, b, 3, seed % 2 ? uniform3 : skewed, seed);
    ASSERT_EQ(lcs_length(pair), oracle::lcs_length(pair)) << seed;
  }
}

TEST(Lcs, SymmetricAndBounded) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto p = generate_word_pair(30, 17, 2, uniform_distribution(2), seed);
    WordPair q = p;
    std::swap(q.first, q.second);
    EXPECT_EQ(lcs_length(p), lcs_length(q));
    EXPECT_LE(lcs_length(p), 17u);
  }
}

TEST(AlignmentEnvelope, MatchesEnumeratedAlignments) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int a = 1 + static_cast<int>(seed % 8);
    const int b = 1 + static_cast<int>((seed / 8) % 8);
    const auto pair = generate_word_pair(a, b, 2, uniform_distribution(2), seed);
    const auto env = alignment_envelope(pair);
    const auto u = oracle::alignment_union(pair);
    ASSERT_EQ(env.lcs, u.lcs);
    for (int i = 0; i <= a; ++i) {
      int lo = -1, hi = -1;
      for (int j = 0; j <= b; ++j)
        if (u.mask(i, j)) {
          if (lo < 0) lo = j;
          hi = j;
        }
      ASSERT_EQ(env.jmin[static_cast<std::size_t>(i)], lo) << seed << " i=" << i;
      ASSERT_EQ(env.jmax[static_cast<std::size_t>(i)], hi) << seed << " i=" << i;
    }
    ASSERT_EQ(alignment_max_deviation(env), u.max_deviation);
  }
}

TEST(AlignmentEnvelope, IdenticalWordsStayOnTheDiagonal) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto pair = generate_word_pair(40, 4, uniform_distribution(4), seed);
    pair.second = pair.first;
    const auto env = alignment_envelope(pair);
    EXPECT_EQ(env.lcs, 40u);
    EXPECT_EQ(alignment_max_deviation(env), 0);
  }
}

TEST(AlignmentEnvelope, DisjointAlphabetsFillTheRectangle) {
  const auto pair = word_pair_from(2, std::vector<Symbol>(6, 0), std::vector<Symbol>(9, 1));
  const auto env = alignment_envelope(pair);
  EXPECT_EQ(env.lcs, 0u);
  for (std::size_t i = 0; i < env.jmin.size(); ++i) {
    EXPECT_EQ(env.jmin[i], 0);
    EXPECT_EQ(env.jmax[i], 9);
  }
  EXPECT_EQ(alignment_max_deviation(env), 9);
}

TEST(WordGeneration, Validation) {
  EXPECT_THROW(generate_word_pair(5, 2, std::vector<double>{0.5, 0.4}, 1), DomainError);
  EXPECT_THROW(generate_word_pair(5, 2, std::vector<double>{0.5, 0.5, 0.0}, 1), DomainError);
  EXPECT_THROW(generate_word_pair(5, 1, std::vector<double>{1.0}, 1), DomainError);
  EXPECT_THROW(generate_word_pair(0, 2, uniform_distribution(2), 1), DomainError);
  EXPECT_THROW(word_pair_from(2, {0, 2}, {1}), DomainError);
  EXPECT_NO_THROW(generate_word_pair(5, 2, std::vector<double>{0.5, 0.5 + 1e-13}, 1));
}

TEST(WordGeneration, DeterministicAndIndependentWords) {
  const auto a = generate_word_pair(50, 2, uniform_distribution(2), 8);
  const auto b = generate_word_pair(50, 2, uniform_distribution(2), 8);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(a.first, a.second);
  // A longer draw extends the shorter one.
  const auto c = generate_word_pair(80, 2, uniform_distribution(2), 8);
  EXPECT_TRUE(std::equal(a.first.begin(), a.first.end(), c.first.begin()));
}

TEST(WordGeneration, FrequenciesFollowTheDistribution) {
  const std::vector<double> dist{0.6, 0.0, 0.3, 0.1};
  const auto pair = generate_word_pair(100000, 4, dist, 3);
  std::vector<double> counts(4, 0.0);
  for (Symbol c : pair.first) counts[c] += 1;
  EXPECT_EQ(counts[1], 0.0);
  for (std::size_t i = 0; i < 4; ++i) {
    const double se = std::sqrt(dist[i] * (1 - dist[i]) / 100000.0);
    EXPECT_NEAR(counts[i] / 100000.0, dist[i], 6 * se + 1e-12);
  }
  EXPECT_EQ(distribution_descriptor(std::vector<double>{0.5, 0.5}), "0.5|0.5");
}

TEST(LcsProfile, ShapeAndDeterminism) {
  const std::vector<int> lens{16, 32};
  const auto dist = uniform_distribution(2);
  const auto a = lcs_deviation_profile(lens, 2, dist, 10, 4, 1);
  const auto b = lcs_deviation_profile(lens, 2, dist, 10, 4, 8);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].values, b[0].values);
  EXPECT_EQ(a[1].mode, "lcs");
  EXPECT_EQ(a[1].descriptor, "0.5|0.5");
  EXPECT_TRUE(std::isnan(a[1].s));
  const std::vector<int> big{1000};
  EXPECT_THROW(lcs_deviation_profile(big, 2, dist, 1, 4, 1, Capacity{1000}), CapacityError);
}
