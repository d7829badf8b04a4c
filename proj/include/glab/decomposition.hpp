#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"
#include "glab/shape.hpp"
#include "glab/stats.hpp"

namespace glab {

/// Cut points 0 = r_0 <= r_1 <= ... <= r_m = n on the y axis, splitting an
/// n x n grid into m blocks of width k. Block i (1-based) spans
/// ((i-1)k, r_{i-1}) to (ik, r_i).
struct Decomposition {
  int k = 1;
  std::vector<int> r;

  int m() const noexcept { return static_cast<int>(r.size()) - 1; }

  bool valid_for(int n) const {
    if (k < 1 || r.size() < 2 || static_cast<long long>(k) * m() != n) return false;
    if (r.front() != 0 || r.back() != n) return false;
    return std::is_sorted(r.begin(), r.end());
  }

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// Close-to-square test for blocks: a block of height h is square when
/// k p1 <= h <= k p2.
struct SkewPolicy {
  double eta = 0.5;
  double p1 = 0.5;
  double p2 = 2.0;

  void validate() const {
    require(eta > 0.0 && eta < 1.0, "policy eta must lie in (0,1)");
    require(p1 > 0.0 && p1 < 1.0, "policy p1 must lie in (0,1)");
    require(p2 > 1.0 && std::isfinite(p2), "policy p2 must exceed 1");
  }

  bool square(int k, int height) const noexcept {
    return k * p1 <= height && height <= k * p2;
  }

  /// Largest number of skewed blocks a decomposition in R may have: floor(eta m).
  int max_skewed(int m) const noexcept { return static_cast<int>(std::floor(eta * m)); }

  friend bool operator==(const SkewPolicy&, const SkewPolicy&) = default;
};

struct EventAReport {
  bool holds = false;
  int max_skew_count = 0;  // over all optimal decompositions
  int threshold = 0;       // floor(eta m); holds iff max_skew_count <= threshold
  int m = 0;
  std::uint32_t passage_time = 0;
};

inline void require_square(const WeightField& field) {
  require(field.nx() == field.ny(), "decompositions need a square grid");
}

inline std::uint32_t block_time(const WeightField& field, const Decomposition& d, int block,
                                PathMode mode) {
  const auto i = static_cast<std::size_t>(block);
  return passage_time(field, {(block - 1) * d.k, d.r[i - 1]}, {block * d.k, d.r[i]}, mode);
}

/// Sum of the m block passage times, each block left-open.
inline std::uint32_t decomposition_time(const WeightField& field, const Decomposition& d,
                                        PathMode mode = PathMode::LastPassage) {
  require_square(field);
  if (!d.valid_for(field.nx())) throw DomainError("decomposition does not match the grid");
  std::uint32_t total = 0;
  for (int i = 1; i <= d.m(); ++i) total += block_time(field, d, i, mode);
  return total;
}

/// Decomposition induced by a geodesic: r_i is where the tie-rule geodesic
/// crosses x = ik. A geodesic may run vertically along x = ik; PreferUp then
/// takes the topmost vertex of that run, the other rules the bottom one.
inline Decomposition geodesic_decomposition(const WeightField& field, int k,
                                            TieRule tie_rule = TieRule::PreferUp,
                                            PathMode mode = PathMode::LastPassage,
                                            std::uint64_t tie_seed = 0) {
  require_square(field);
  const int n = field.nx();
  require(k >= 1 && n % k == 0, "block width k must divide n");
  const auto path = sample_geodesic(field, {0, 0}, field.corner(), mode, tie_rule, tie_seed);
  Decomposition d{k, std::vector<int>(static_cast<std::size_t>(n / k) + 1, -1)};
  for (Point v : path.vertices) {
    if (v.x % k != 0) continue;
    int& cut = d.r[static_cast<std::size_t>(v.x / k)];
    if (cut < 0) cut = v.y;
    else cut = tie_rule == TieRule::PreferUp ? std::max(cut, v.y) : std::min(cut, v.y);
  }
  d.r.front() = 0;
  d.r.back() = n;
  return d;
}

/// Exact test of event A: every optimal decomposition has at most
/// floor(eta m) skewed blocks.
///
/// Column DP over states (i, y): M(i, y) is the best value of a prefix of i
/// blocks ending at height y, and S(i, y) the largest skewed-block count
/// among prefixes attaining M(i, y). A decomposition is optimal iff its
/// value is M(m, n) = T, and then each of its prefixes attains M at its
/// endpoint (otherwise swapping in a better prefix would beat T). So the
/// optimal decompositions are exactly the chains of value-attaining
/// transitions, and S(m, n) is the maximal skew count among them. The
/// maximum is the right statistic because A fails as soon as one optimal
/// decomposition is skewed too often.
///
/// Cost is O(m k n^2) time and O(n) memory.
inline EventAReport check_event_A(const WeightField& field, int k, const SkewPolicy& policy,
                                  PathMode mode = PathMode::LastPassage, const Capacity& capacity = {}) {
  require_square(field);
  policy.validate();
  const int n = field.nx();
  require(k >= 1 && n % k == 0, "block width k must divide n");
  const auto states = static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(n + 1);
  if (states > capacity.max_cells)
    throw CapacityError("event-A DP over " + std::to_string(states) + " states exceeds capacity");
  const int m = n / k;
  constexpr std::int64_t kUnset = std::numeric_limits<std::int64_t>::min();

  std::vector<std::int64_t> value(static_cast<std::size_t>(n) + 1, kUnset), next_value;
  std::vector<int> skew(static_cast<std::size_t>(n) + 1, 0), next_skew;
  value[0] = 0;
  std::vector<std::uint32_t> row(static_cast<std::size_t>(k) + 1);

  for (int block = 1; block <= m; ++block) {
    const int x0 = (block - 1) * k;
    next_value.assign(static_cast<std::size_t>(n) + 1, kUnset);
    next_skew.assign(static_cast<std::size_t>(n) + 1, 0);
    for (int y0 = 0; y0 <= n; ++y0) {
      const std::int64_t base = value[static_cast<std::size_t>(y0)];
      if (base == kUnset) continue;
      const int base_skew = skew[static_cast<std::size_t>(y0)];
      // Row-rolling passage times from (x0, y0) to (x0 + k, y) for all y >= y0.
      for (int y = y0; y <= n; ++y) {
        const auto w = field.row(y).subspan(static_cast<std::size_t>(x0), static_cast<std::size_t>(k) + 1);
        if (y == y0) {
          row[0] = 0;
          for (int i = 1; i <= k; ++i) row[static_cast<std::size_t>(i)] = row[static_cast<std::size_t>(i) - 1] + w[static_cast<std::size_t>(i)];
        } else {
          row[0] += w[0];
          for (int i = 1; i <= k; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            row[ui] = w[ui] + best_of(mode, row[ui - 1], row[ui]);
          }
        }
        const std::int64_t candidate = base + row[static_cast<std::size_t>(k)];
        const int candidate_skew = base_skew + (policy.square(k, y - y0) ? 0 : 1);
        auto& slot = next_value[static_cast<std::size_t>(y)];
        auto& slot_skew = next_skew[static_cast<std::size_t>(y)];
        if (slot == kUnset || better(mode, candidate, slot)) {
          slot = candidate;
          slot_skew = candidate_skew;
        } else if (candidate == slot) {
          slot_skew = std::max(slot_skew, candidate_skew);
        }
      }
    }
    value.swap(next_value);
    skew.swap(next_skew);
  }

  EventAReport report;
  report.m = m;
  report.passage_time = static_cast<std::uint32_t>(value[static_cast<std::size_t>(n)]);
  report.max_skew_count = skew[static_cast<std::size_t>(n)];
  report.threshold = policy.max_skewed(m);
  report.holds = report.max_skew_count <= report.threshold;
  return report;
}

struct EventAEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::vector<EventAReport> reports;  // one per replication, in order
  std::vector<std::string> warnings;
};

/// Smallest divisor of n that is >= ceil(n^alpha).
inline int block_width_for(int n, double alpha) {
  require(n >= 1, "n must be positive");
  const int target = std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), alpha) - 1e-9)));
  for (int k = target; k <= n; ++k)
    if (n % k == 0) return k;
  return n;
}

/// Monte Carlo frequency of event A over i.i.d. fields.
inline EventAEstimate estimate_event_A_prob(int n, int k, double s, const SkewPolicy& policy, int reps,
                                            std::uint64_t seed, unsigned workers = 1,
                                            const FieldSource& source = bernoulli_source()) {
  policy.validate();
  require(reps >= 1, "reps must be positive");
  require(k >= 1 && n % k == 0, "block width k must divide n");
  EventAEstimate est;
  // The rate statement needs (1 + ln k)/k <= delta^2 eta^2 / 16 for some
  // delta below the unknown gap delta*; delta* <= 2 bounds what is possible.
  if ((1.0 + std::log(static_cast<double>(k))) / k > 4.0 * policy.eta * policy.eta / 16.0)
    est.warnings.push_back("k=" + std::to_string(k) +
                           " is too small for the exponential rate regime at this eta");
  est.reports = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    return check_event_A(source(n, n, s, replication_seed(seed, r)), k, policy);
  });
  std::vector<double> hits;
  hits.reserve(est.reports.size());
  for (const auto& rep : est.reports) hits.push_back(rep.holds ? 1.0 : 0.0);
  const auto ms = stats::mean_stderr(hits);
  est.p_hat = ms.mean;
  est.std_error = ms.std_error;
  return est;
}

/// True when the vertices can be ordered with x strictly increasing and y
/// strictly decreasing, so that any directed path meets the set at most once.
inline bool is_strictly_decreasing(std::span<const Point> vertices) {
  std::vector<Point> sorted(vertices.begin(), vertices.end());
  std::sort(sorted.begin(), sorted.end(), [](Point a, Point b) { return a.x < b.x; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i].x > sorted[i - 1].x && sorted[i].y < sorted[i - 1].y)) return false;
  return true;
}

/// |T(v1,v2) - T^S(v1,v2)| after resampling the weights on S; always 0 or 1.
inline std::uint32_t resampling_deviation_trial(const WeightField& field, Point v1, Point v2,
                                                std::span<const Point> vertices,
                                                std::uint64_t resample_seed,
                                                PathMode mode = PathMode::LastPassage) {
  if (!is_strictly_decreasing(vertices))
    throw DomainError("resampling set is not strictly decreasing");
  const auto before = passage_time(field, v1, v2, mode);
  const auto after = passage_time(resample_vertex_set(field, vertices, resample_seed), v1, v2, mode);
  return before > after ? before - after : after - before;
}

struct PartitionCheck {
  std::uint32_t lhs = 0;
  std::uint32_t rhs = 0;
  bool equal = false;
  std::uint64_t partitions = 0;
};

inline constexpr int kPartitionMaxSide = 12;

/// On a kn x kn grid, compares T with the maximum over partitions
/// (0,0) = V_0, V_1, ..., V_k = (kn,kn) (coordinatewise monotone, consecutive
/// points 2n apart in l1) of the summed segment passage times.
inline PartitionCheck partition_identity_check(const WeightField& field, int n, int k,
                                               PathMode mode = PathMode::LastPassage) {
  require(n >= 1 && k >= 1, "partition parameters must be positive");
  const int side = n * k;
  require(field.nx() == side && field.ny() == side, "field must be kn x kn");
  if (side > kPartitionMaxSide) throw CapacityError("partition enumeration limited to kn <= 12");

  PartitionCheck out;
  out.lhs = passage_time(field, mode);
  bool have = false;
  std::vector<Point> points{{0, 0}};
  auto recurse = [&](auto& self, int index) -> void {
    const Point prev = points.back();
    if (index == k) {
      std::uint32_t total = 0;
      for (std::size_t i = 0; i + 1 < points.size(); ++i) total += passage_time(field, points[i], points[i + 1], mode);
      total += passage_time(field, points.back(), {side, side}, mode);
      if (!have || better(mode, total, out.rhs)) out.rhs = total;
      have = true;
      ++out.partitions;
      return;
    }
    const int level = 2 * n * index;
    const int lo = std::max(prev.x, level - side);
    const int hi = std::min(side, level - prev.y);
    for (int x = lo; x <= hi; ++x) {
      points.push_back({x, level - x});
      self(self, index + 1);
      points.pop_back();
    }
  };
  recurse(recurse, 1);
  out.equal = out.lhs == out.rhs;
  return out;
}

}  // namespace glab
