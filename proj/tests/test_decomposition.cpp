#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "glab/decomposition.hpp"
#include "support.hpp"

using namespace glab;

namespace {

constexpr PathMode kModes[] = {PathMode::LastPassage, PathMode::FirstPassage};

struct Exhaustive {
  std::uint32_t best = 0;
  int max_skew = 0;
  std::size_t count = 0;
};

// Walks every non-decreasing cut sequence and keeps the optimal value and
// the largest skew count among decompositions attaining it.
Exhaustive enumerate_decompositions(const WeightField& f, int k, const SkewPolicy& policy, PathMode mode) {
  const int n = f.nx();
  Decomposition d{k, std::vector<int>(static_cast<std::size_t>(n / k) + 1, 0)};
  d.r.back() = n;
  Exhaustive out;
  bool have = false;
  auto recurse = [&](auto& self, int i) -> void {
    if (i == d.m()) {
      const auto t = decomposition_time(f, d, mode);
      int skew = 0;
      for (int b = 1; b <= d.m(); ++b)
        skew += policy.square(k, d.r[static_cast<std::size_t>(b)] - d.r[static_cast<std::size_t>(b) - 1]) ? 0 : 1;
      if (!have || better(mode, t, out.best)) {
        out.best = t;
        out.max_skew = skew;
      } else if (t == out.best) {
        out.max_skew = std::max(out.max_skew, skew);
      }
      have = true;
      ++out.count;
      return;
    }
    for (int y = d.r[static_cast<std::size_t>(i) - 1]; y <= n; ++y) {
      d.r[static_cast<std::size_t>(i)] = y;
      self(self, i + 1);
    }
  };
  recurse(recurse, 1);
  return out;
}

}  // namespace

TEST(SkewPolicy, Validation) {
  EXPECT_NO_THROW((SkewPolicy{0.5, 0.5, 2.0}.validate()));
  EXPECT_THROW((SkewPolicy{0.0, 0.5, 2.0}.validate()), DomainError);
  EXPECT_THROW((SkewPolicy{1.0, 0.5, 2.0}.validate()), DomainError);
  EXPECT_THROW((SkewPolicy{0.5, 1.0, 2.0}.validate()), DomainError);
  EXPECT_THROW((SkewPolicy{0.5, 0.5, 1.0}.validate()), DomainError);
  const SkewPolicy p;
  EXPECT_TRUE(p.square(4, 2));
  EXPECT_TRUE(p.square(4, 8));
  EXPECT_FALSE(p.square(4, 1));
  EXPECT_FALSE(p.square(4, 9));
  EXPECT_EQ(p.max_skewed(5), 2);
}

TEST(Decomposition, Validity) {
  EXPECT_TRUE((Decomposition{2, {0, 1, 4}}.valid_for(4)));
  EXPECT_FALSE((Decomposition{2, {0, 3, 1, 6}}.valid_for(6)));
  EXPECT_FALSE((Decomposition{2, {0, 1, 3}}.valid_for(4)));
  EXPECT_FALSE((Decomposition{3, {0, 1, 4}}.valid_for(4)));
  EXPECT_THROW(decomposition_time(WeightField::filled(4, 4, 1), Decomposition{2, {0, 5, 4}}), DomainError);
}

TEST(Decomposition, ConstantFieldValues) {
  const auto f = WeightField::filled(6, 6, 1);
  EXPECT_EQ(decomposition_time(f, Decomposition{2, {0, 0, 6, 6}}), 12u);
  EXPECT_EQ(decomposition_time(WeightField::filled(6, 6, 0), Decomposition{3, {0, 2, 6}}), 0u);
}

TEST(Decomposition, NeverBeatsThePassageTime) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto f = fixtures::random_field(8, 8, seed);
    CounterRng rng(seed);
    std::vector<int> r{0};
    for (int i = 1; i < 4; ++i) r.push_back(static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(r.back()), 8)));
    r.push_back(8);
    const Decomposition d{2, r};
    EXPECT_LE(decomposition_time(f, d), passage_time(f));
    EXPECT_GE(decomposition_time(f, d, PathMode::FirstPassage), passage_time(f, PathMode::FirstPassage));
  }
}

TEST(GeodesicDecomposition, IsOptimal) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto f = fixtures::random_field(12, 12, seed);
    for (auto mode : kModes)
      for (int k : {1, 2, 3, 4, 6, 12})
        for (auto rule : {TieRule::PreferUp, TieRule::PreferRight, TieRule::SeededRandom}) {
          const auto d = geodesic_decomposition(f, k, rule, mode, seed);
          ASSERT_TRUE(d.valid_for(12));
          ASSERT_EQ(decomposition_time(f, d, mode), passage_time(f, mode)) << seed << " k=" << k;
        }
  }
  EXPECT_THROW(geodesic_decomposition(WeightField::filled(6, 6, 0), 4), DomainError);
  EXPECT_THROW(geodesic_decomposition(WeightField::filled(6, 4, 0), 2), DomainError);
}

TEST(EventA, AllZerosIsMaximallySkewed) {
  const auto report = check_event_A(WeightField::filled(8, 8, 0), 2, SkewPolicy{});
  EXPECT_EQ(report.m, 4);
  EXPECT_EQ(report.max_skew_count, 4);
  EXPECT_EQ(report.threshold, 2);
  EXPECT_FALSE(report.holds);
  EXPECT_EQ(report.passage_time, 0u);
}

TEST(EventA, SingleBlockIsTrivial) {
  const auto report = check_event_A(fixtures::random_field(6, 6, 1), 6, SkewPolicy{});
  EXPECT_EQ(report.m, 1);
  EXPECT_EQ(report.max_skew_count, 0);
  EXPECT_TRUE(report.holds);
}

TEST(EventA, MatchesExhaustiveEnumeration) {
  const SkewPolicy policies[] = {{0.5, 0.5, 2.0}, {0.3, 0.7, 1.5}, {0.75, 0.25, 3.0}};
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const int n = seed % 2 ? 8 : 6;
    const auto f = fixtures::random_field(n, n, seed);
    for (auto mode : kModes)
      for (const auto& policy : policies)
        for (int k : {1, 2, n / 2}) {
          if (n / k > 4) continue;  // keep the enumeration small
          const auto truth = enumerate_decompositions(f, k, policy, mode);
          const auto report = check_event_A(f, k, policy, mode);
          ASSERT_EQ(report.passage_time, truth.best);
          ASSERT_EQ(report.passage_time, passage_time(f, mode));
          ASSERT_EQ(report.max_skew_count, truth.max_skew) << seed << " k=" << k;
          ASSERT_EQ(report.holds, truth.max_skew <= policy.max_skewed(n / k));
        }
  }
}

TEST(EventA, MonotoneInEta) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto f = fixtures::random_field(12, 12, seed);
    bool held = false;
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const bool holds = check_event_A(f, 2, SkewPolicy{eta, 0.5, 2.0}).holds;
      if (held) {
        EXPECT_TRUE(holds) << seed << " eta=" << eta;
      }
      held = held || holds;
    }
  }
}

TEST(EventA, Guards) {
  EXPECT_THROW(check_event_A(WeightField::filled(6, 4, 0), 2, SkewPolicy{}), DomainError);
  EXPECT_THROW(check_event_A(WeightField::filled(6, 6, 0), 4, SkewPolicy{}), DomainError);
  EXPECT_THROW(check_event_A(WeightField::filled(6, 6, 0), 2, SkewPolicy{}, PathMode::LastPassage, Capacity{10}),
               CapacityError);
}

TEST(EventA, EstimateIsDeterministicAndWarnsForSmallBlocks) {
  const auto a = estimate_event_A_prob(16, 4, 0.5, SkewPolicy{}, 20, 9, 1);
  const auto b = estimate_event_A_prob(16, 4, 0.5, SkewPolicy{}, 20, 9, 8);
  EXPECT_EQ(a.p_hat, b.p_hat);
  EXPECT_EQ(a.std_error, b.std_error);
  ASSERT_EQ(a.reports.size(), 20u);
  EXPECT_FALSE(a.warnings.empty());
  EXPECT_GE(a.p_hat, 0.0);
  EXPECT_LE(a.p_hat, 1.0);
}

TEST(EventA, BlockWidth) {
  EXPECT_EQ(block_width_for(64, 0.5), 8);
  EXPECT_EQ(block_width_for(12, 0.5), 4);
  EXPECT_EQ(block_width_for(7, 0.5), 7);
  EXPECT_EQ(block_width_for(100, 6.0 / 7.0), 100);
  EXPECT_EQ(block_width_for(100, 0.8), 50);
}

TEST(Resampling, StrictlyDecreasingSets) {
  const std::vector<Point> square{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  EXPECT_FALSE(is_strictly_decreasing(square));
  const std::vector<Point> diag{{0, 3}, {1, 2}, {2, 1}, {3, 0}};
  EXPECT_TRUE(is_strictly_decreasing(diag));
  const std::vector<Point> shuffled{{2, 1}, {0, 3}, {3, 0}};
  EXPECT_TRUE(is_strictly_decreasing(shuffled));
  EXPECT_TRUE(is_strictly_decreasing({}));
  const std::vector<Point> chain{{0, 0}, {1, 1}};
  EXPECT_FALSE(is_strictly_decreasing(chain));
  const auto f = fixtures::random_field(4, 4, 1);
  EXPECT_THROW(resampling_deviation_trial(f, {0, 0}, {4, 4}, square, 1), DomainError);
}

TEST(Resampling, DeviationIsAtMostOne) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto f = fixtures::random_field(10, 10, seed);
    CounterRng rng(seed);
    std::vector<Point> set;
    int y = 10;
    for (int x = 0; x <= 10 && y >= 0; ++x) {
      if (rng.uniform() < 0.5) set.push_back({x, y});
      y -= static_cast<int>(rng.uniform_int(1, 2));
    }
    for (auto mode : kModes) EXPECT_LE(resampling_deviation_trial(f, {0, 0}, {10, 10}, set, seed, mode), 1u);
  }
}

TEST(Partition, IdentityHoldsOnSmallGrids) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (auto [n, k] : {std::pair{1, 2}, {2, 2}, {2, 3}, {3, 2}, {4, 3}, {3, 4}, {6, 2}}) {
      const auto f = fixtures::random_field(n * k, n * k, seed);
      for (auto mode : kModes) {
        const auto check = partition_identity_check(f, n, k, mode);
        ASSERT_TRUE(check.equal) << seed << " n=" << n << " k=" << k;
        ASSERT_GT(check.partitions, 0u);
      }
    }
  }
  EXPECT_THROW(partition_identity_check(WeightField::filled(14, 14, 0), 7, 2), CapacityError);
  EXPECT_THROW(partition_identity_check(WeightField::filled(6, 6, 0), 2, 2), DomainError);
}

TEST(Partition, CountsMonotoneChains) {
  // k = 2 on a 2n x 2n grid: V_1 ranges over the 2n + 1 points of x + y = 2n.
  const auto check = partition_identity_check(WeightField::filled(4, 4, 1), 2, 2);
  EXPECT_EQ(check.partitions, 5u);
  EXPECT_EQ(check.lhs, 8u);
  EXPECT_EQ(check.rhs, 8u);
}
