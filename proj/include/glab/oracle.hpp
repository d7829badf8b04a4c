#pragma once

// Exhaustive reference computations. Everything here enumerates paths or
// subsequences directly and shares no code with the dynamic programs it is
// used to check. Only feasible at toy scale.

#include <cstdint>
#include <span>
#include <vector>

#include "glab/decomposition.hpp"
#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/lcs.hpp"
#include "glab/passage.hpp"

namespace glab::oracle {

/// Union of the vertices of all optimal directed paths from v1 to v2, as a
/// local (width x height) mask, together with every optimal path.
struct GeodesicUnion {
  std::uint32_t passage_time = 0;
  Table<std::uint8_t> mask;
  std::vector<std::vector<Point>> geodesics;
};

inline GeodesicUnion geodesic_union(const WeightField& field, Point v1, Point v2, PathMode mode) {
  check_corners(field, v1, v2);
  if (l1_distance(v1, v2) > kBruteForceMaxLength) throw CapacityError("oracle limited to small grids");
  GeodesicUnion out;
  bool first = true;
  for_each_directed_path(v1, v2, [&](std::span<const Point> path) {
    const auto w = path_weight(field, path);
    if (first || better(mode, w, out.passage_time)) {
      out.passage_time = w;
      out.geodesics.clear();
      first = false;
    }
    if (w == out.passage_time) out.geodesics.emplace_back(path.begin(), path.end());
  });
  out.mask = {v2.x - v1.x + 1, v2.y - v1.y + 1, {}};
  out.mask.cells.assign(static_cast<std::size_t>(out.mask.width) * static_cast<std::size_t>(out.mask.height), 0);
  for (const auto& g : out.geodesics)
    for (Point p : g) out.mask(p.x - v1.x, p.y - v1.y) = 1;
  return out;
}

/// Largest |y - x| (relative to v1) over every vertex of every geodesic.
inline int max_geodesic_deviation(const GeodesicUnion& u, Point v1) {
  int dev = 0;
  for (const auto& g : u.geodesics)
    for (Point p : g) dev = std::max(dev, std::abs((p.y - v1.y) - (p.x - v1.x)));
  return dev;
}

inline bool is_subsequence(std::span<const Symbol> needle, std::span<const Symbol> hay) {
  std::size_t k = 0;
  for (Symbol c : hay)
    if (k < needle.size() && needle[k] == c) ++k;
  return k == needle.size();
}

/// LCS by testing all 2^len1 subsequences of the first word.
inline std::uint32_t lcs_length(const WordPair& pair) {
  if (pair.len1() > 20) throw CapacityError("subsequence enumeration limited to length 20");
  std::uint32_t best = 0;
  std::vector<Symbol> sub;
  const std::uint32_t subsets = 1u << pair.len1();
  for (std::uint32_t mask = 0; mask < subsets; ++mask) {
    const auto size = static_cast<std::uint32_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    sub.clear();
    for (int i = 0; i < pair.len1(); ++i)
      if (mask >> i & 1u) sub.push_back(pair.first[static_cast<std::size_t>(i)]);
    if (is_subsequence(sub, pair.second)) best = size;
  }
  return best;
}

struct AlignmentUnion {
  std::uint32_t lcs = 0;
  Table<std::uint8_t> mask;  // (len1 + 1) x (len2 + 1), indexed (i, j)
  int max_deviation = 0;     // max |i - j| over optimal alignment vertices
};

/// Enumerates every alignment path (right, up, or diagonal on a match) and
/// collects the vertices of those with the maximal number of matches.
inline AlignmentUnion alignment_union(const WordPair& pair) {
  if (pair.len1() + pair.len2() > 20) throw CapacityError("alignment enumeration limited to small words");
  const int rows = pair.len1() + 1;
  const int cols = pair.len2() + 1;
  AlignmentUnion out;
  out.mask = {rows, cols, std::vector<std::uint8_t>(static_cast<std::size_t>(rows) * cols, 0)};
  std::vector<std::vector<Point>> best_paths;
  std::vector<Point> path{{0, 0}};
  bool have = false;
  auto recurse = [&](auto& self, std::uint32_t score) -> void {
    const Point p = path.back();
    if (p.x == rows - 1 && p.y == cols - 1) {
      if (!have || score > out.lcs) {
        out.lcs = score;
        best_paths.clear();
        have = true;
      }
      if (score == out.lcs) best_paths.push_back(path);
      return;
    }
    if (p.x + 1 < rows) {
      path.push_back({p.x + 1, p.y});
      self(self, score);
      path.pop_back();
    }
    if (p.y + 1 < cols) {
      path.push_back({p.x, p.y + 1});
      self(self, score);
      path.pop_back();
    }
    if (p.x + 1 < rows && p.y + 1 < cols &&
        pair.first[static_cast<std::size_t>(p.x)] == pair.second[static_cast<std::size_t>(p.y)]) {
      path.push_back({p.x + 1, p.y + 1});
      self(self, score + 1);
      path.pop_back();
    }
  };
  recurse(recurse, 0);
  for (const auto& bp : best_paths)
    for (Point p : bp) {
      out.mask(p.x, p.y) = 1;
      out.max_deviation = std::max(out.max_deviation, std::abs(p.x - p.y));
    }
  return out;
}

struct EventAEnumeration {
  std::uint32_t best = 0;        // optimal decomposition value
  int max_skew = 0;              // largest skew count among optimal decompositions
  std::uint64_t decompositions = 0;
  std::uint64_t optimal = 0;
};

/// Walks every cut sequence 0 <= r_1 <= ... <= r_{m-1} <= n. Block times are
/// tabulated once per (block, r_{i-1}, r_i) by the plain row DP.
inline EventAEnumeration event_a(const WeightField& field, int k, const SkewPolicy& policy,
                                 PathMode mode = PathMode::LastPassage) {
  require_square(field);
  const int n = field.nx();
  require(k >= 1 && n % k == 0, "block width k must divide n");
  if (n > 12) throw CapacityError("decomposition enumeration limited to n <= 12");
  const int m = n / k;
  const auto side = static_cast<std::size_t>(n) + 1;
  std::vector<std::uint32_t> block(static_cast<std::size_t>(m) * side * side, 0);
  auto at = [&](int b, int y0, int y1) -> std::uint32_t& {
    return block[(static_cast<std::size_t>(b) * side + static_cast<std::size_t>(y0)) * side + static_cast<std::size_t>(y1)];
  };
  for (int b = 0; b < m; ++b)
    for (int y0 = 0; y0 <= n; ++y0)
      for (int y1 = y0; y1 <= n; ++y1) at(b, y0, y1) = passage_time(field, {b * k, y0}, {(b + 1) * k, y1}, mode);

  EventAEnumeration out;
  bool have = false;
  auto recurse = [&](auto& self, int b, int y0, std::uint32_t total, int skew) -> void {
    const bool last = b == m - 1;
    for (int y1 = last ? n : y0; y1 <= n; ++y1) {
      const std::uint32_t t = total + at(b, y0, y1);
      const int sk = skew + (policy.square(k, y1 - y0) ? 0 : 1);
      if (!last) {
        self(self, b + 1, y1, t, sk);
        continue;
      }
      ++out.decompositions;
      if (!have || better(mode, t, out.best)) {
        out.best = t;
        out.max_skew = sk;
        out.optimal = 0;
      } else if (t == out.best) {
        out.max_skew = std::max(out.max_skew, sk);
      }
      if (t == out.best) ++out.optimal;
      have = true;
    }
  };
  recurse(recurse, 0, 0, 0u, 0);
  return out;
}

}  // namespace glab::oracle
