#pragma once

#include <algorithm>
#include <barrier>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/rng.hpp"

namespace glab {

enum class PathMode { LastPassage, FirstPassage };

enum class TieRule { PreferUp, PreferRight, SeededRandom };

inline std::string to_string(PathMode mode) {
  return mode == PathMode::LastPassage ? "dlpp" : "dfpp";
}

/// The optimum of two candidate values under `mode` (max for last passage,
/// min for first passage).
template <typename T>
constexpr T best_of(PathMode mode, T a, T b) noexcept {
  return mode == PathMode::LastPassage ? std::max(a, b) : std::min(a, b);
}

/// True when `a` is strictly better than `b` under `mode`.
template <typename T>
constexpr bool better(PathMode mode, T a, T b) noexcept {
  return mode == PathMode::LastPassage ? a > b : a < b;
}

/// Ordered list of lattice points joined by unit up/right steps.
struct DirectedPath {
  std::vector<Point> vertices;

  bool valid_between(Point v1, Point v2) const {
    if (vertices.empty() || vertices.front() != v1 || vertices.back() != v2) return false;
    if (vertices.size() != static_cast<std::size_t>(l1_distance(v1, v2)) + 1) return false;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
      const int dx = vertices[i].x - vertices[i - 1].x;
      const int dy = vertices[i].y - vertices[i - 1].y;
      if (!((dx == 1 && dy == 0) || (dx == 0 && dy == 1))) return false;
    }
    return true;
  }
};

/// Sum of weights along a path, excluding its first vertex.
inline std::uint32_t path_weight(const WeightField& field, std::span<const Point> path) {
  std::uint32_t total = 0;
  for (std::size_t i = 1; i < path.size(); ++i) total += field(path[i]);
  return total;
}

/// Memory guard for full-table computations (forward/backward tables,
/// envelopes, event-A DP). The default admits a 6000 x 6000 grid.
struct Capacity {
  std::uint64_t max_cells = 6001ULL * 6001ULL;
};

inline void check_corners(const WeightField& field, Point v1, Point v2) {
  if (!field.contains(v1) || !field.contains(v2))
    throw DomainError("passage time endpoint outside the grid");
  if (!dominated(v1, v2)) throw DomainError("passage time requires v1 <= v2 coordinatewise");
}

/// Passage time from v1 to v2 with the weight of v1 excluded.
///
/// Row-rolling dynamic program T(x,y) = w(x,y) + opt(T(x-1,y), T(x,y-1)),
/// with the two boundary edges accumulated directly. O(area) time and
/// O(width) memory.
inline std::uint32_t passage_time(const WeightField& field, Point v1, Point v2,
                                  PathMode mode = PathMode::LastPassage) {
  check_corners(field, v1, v2);
  const auto width = static_cast<std::size_t>(v2.x - v1.x) + 1;
  std::vector<std::uint32_t> row(width);
  {
    const auto w = field.row(v1.y).subspan(static_cast<std::size_t>(v1.x), width);
    row[0] = 0;
    for (std::size_t i = 1; i < width; ++i) row[i] = row[i - 1] + w[i];
  }
  for (int y = v1.y + 1; y <= v2.y; ++y) {
    const auto w = field.row(y).subspan(static_cast<std::size_t>(v1.x), width);
    row[0] += w[0];
    if (mode == PathMode::LastPassage) {
      for (std::size_t i = 1; i < width; ++i) row[i] = w[i] + std::max(row[i - 1], row[i]);
    } else {
      for (std::size_t i = 1; i < width; ++i) row[i] = w[i] + std::min(row[i - 1], row[i]);
    }
  }
  return row[width - 1];
}

inline std::uint32_t passage_time(const WeightField& field, PathMode mode = PathMode::LastPassage) {
  return passage_time(field, {0, 0}, field.corner(), mode);
}

/// Anti-diagonal wavefront variant of passage_time. Each diagonal is split
/// into contiguous chunks across `workers` threads, synchronized by a barrier.
/// Integer arithmetic makes the result identical to the sequential DP.
inline std::uint32_t passage_time_wavefront(const WeightField& field, Point v1, Point v2,
                                            PathMode mode, unsigned workers) {
  check_corners(field, v1, v2);
  const int width = v2.x - v1.x + 1;
  const int height = v2.y - v1.y + 1;
  const int diagonals = width + height - 1;
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(width)));

  std::vector<std::uint32_t> prev(static_cast<std::size_t>(width), 0);
  std::vector<std::uint32_t> cur(static_cast<std::size_t>(width), 0);
  int diag = 0;

  // Fills cells i in [lo, hi) of diagonal `diag` (local coordinates).
  auto fill = [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const int j = diag - i;
      const std::uint32_t w = field(v1.x + i, v1.y + j);
      std::uint32_t value;
      if (i == 0 && j == 0) {
        value = 0;
      } else if (i == 0) {
        value = prev[0] + w;
      } else if (j == 0) {
        value = prev[static_cast<std::size_t>(i - 1)] + w;
      } else {
        value = w + best_of(mode, prev[static_cast<std::size_t>(i - 1)], prev[static_cast<std::size_t>(i)]);
      }
      cur[static_cast<std::size_t>(i)] = value;
    }
  };
  auto range = [&](unsigned t) {
    const int lo = std::max(0, diag - height + 1);
    const int hi = std::min(diag, width - 1) + 1;
    const int len = hi - lo;
    const int a = lo + static_cast<int>(static_cast<long long>(len) * t / threads);
    const int b = lo + static_cast<int>(static_cast<long long>(len) * (t + 1) / threads);
    return std::pair{a, b};
  };

  if (threads == 1) {
    for (diag = 0; diag < diagonals; ++diag) {
      auto [a, b] = range(0);
      fill(a, b);
      std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(width - 1)];
  }

  auto advance = [&]() noexcept {
    std::swap(prev, cur);
    ++diag;
  };
  std::barrier sync(static_cast<std::ptrdiff_t>(threads), advance);
  auto worker = [&](unsigned t) {
    while (diag < diagonals) {
      auto [a, b] = range(t);
      fill(a, b);
      sync.arrive_and_wait();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker, t);
    worker(0);
  }
  return prev[static_cast<std::size_t>(width - 1)];
}

/// Calls fn(std::span<const Point>) for every directed path from v1 to v2,
/// in lexicographic order of step sequences with "up" before "right".
template <typename Fn>
void for_each_directed_path(Point v1, Point v2, Fn&& fn) {
  std::vector<Point> path{v1};
  path.reserve(static_cast<std::size_t>(l1_distance(v1, v2)) + 1);
  auto recurse = [&](auto& self) -> void {
    const Point here = path.back();
    if (here == v2) {
      fn(std::span<const Point>(path));
      return;
    }
    if (here.y < v2.y) {
      path.push_back({here.x, here.y + 1});
      self(self);
      path.pop_back();
    }
    if (here.x < v2.x) {
      path.push_back({here.x + 1, here.y});
      self(self);
      path.pop_back();
    }
  };
  recurse(recurse);
}

inline constexpr int kBruteForceMaxLength = 24;

/// Reference semantics for passage_time: enumerates every directed path.
inline std::uint32_t brute_force_passage_time(const WeightField& field, Point v1, Point v2,
                                              PathMode mode = PathMode::LastPassage) {
  check_corners(field, v1, v2);
  if (l1_distance(v1, v2) > kBruteForceMaxLength)
    throw CapacityError("brute-force enumeration limited to paths of length <= 24");
  bool first = true;
  std::uint32_t best = 0;
  for_each_directed_path(v1, v2, [&](std::span<const Point> path) {
    const std::uint32_t w = path_weight(field, path);
    if (first || better(mode, w, best)) best = w;
    first = false;
  });
  return best;
}

/// Dense (width x height) table over the rectangle [v1, v2], local coordinates.
template <typename Cell>
struct Table {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;

  Cell operator()(int i, int j) const noexcept {
    return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)];
  }
  Cell& operator()(int i, int j) noexcept {
    return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)];
  }
};

template <typename Cell>
void check_table_capacity(Point v1, Point v2, const Capacity& capacity) {
  const auto cells = static_cast<std::uint64_t>(v2.x - v1.x + 1) * static_cast<std::uint64_t>(v2.y - v1.y + 1);
  if (cells > capacity.max_cells)
    throw CapacityError("table of " + std::to_string(cells) + " cells exceeds capacity of " +
                        std::to_string(capacity.max_cells));
  if (static_cast<std::uint64_t>(l1_distance(v1, v2)) > std::numeric_limits<Cell>::max())
    throw CapacityError("cell type too narrow for this path length");
}

/// F(x,y): passage time from v1 to (x,y), weight of v1 excluded.
template <typename Cell = std::uint32_t>
Table<Cell> forward_table(const WeightField& field, Point v1, Point v2, PathMode mode,
                          const Capacity& capacity = {}) {
  check_corners(field, v1, v2);
  check_table_capacity<Cell>(v1, v2, capacity);
  Table<Cell> f{v2.x - v1.x + 1, v2.y - v1.y + 1, {}};
  f.cells.resize(static_cast<std::size_t>(f.width) * static_cast<std::size_t>(f.height));
  for (int j = 0; j < f.height; ++j) {
    const auto w = field.row(v1.y + j).subspan(static_cast<std::size_t>(v1.x), static_cast<std::size_t>(f.width));
    Cell* out = f.cells.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(f.width);
    const Cell* below = j > 0 ? out - f.width : nullptr;
    out[0] = j == 0 ? 0 : static_cast<Cell>(below[0] + w[0]);
    for (int i = 1; i < f.width; ++i) {
      const Cell left = out[i - 1];
      out[i] = static_cast<Cell>(w[static_cast<std::size_t>(i)] + (j == 0 ? left : best_of(mode, left, below[i])));
    }
  }
  return f;
}

/// B(x,y): passage time from (x,y) to v2 with the weight of (x,y) excluded.
template <typename Cell = std::uint32_t>
Table<Cell> backward_table(const WeightField& field, Point v1, Point v2, PathMode mode,
                           const Capacity& capacity = {}) {
  check_corners(field, v1, v2);
  check_table_capacity<Cell>(v1, v2, capacity);
  Table<Cell> b{v2.x - v1.x + 1, v2.y - v1.y + 1, {}};
  b.cells.resize(static_cast<std::size_t>(b.width) * static_cast<std::size_t>(b.height));
  for (int j = b.height - 1; j >= 0; --j) {
    for (int i = b.width - 1; i >= 0; --i) {
      const bool right = i + 1 < b.width;
      const bool up = j + 1 < b.height;
      Cell value = 0;
      if (right && up) {
        value = best_of(mode, static_cast<Cell>(field(v1.x + i + 1, v1.y + j) + b(i + 1, j)),
                        static_cast<Cell>(field(v1.x + i, v1.y + j + 1) + b(i, j + 1)));
      } else if (right) {
        value = static_cast<Cell>(field(v1.x + i + 1, v1.y + j) + b(i + 1, j));
      } else if (up) {
        value = static_cast<Cell>(field(v1.x + i, v1.y + j + 1) + b(i, j + 1));
      }
      b(i, j) = value;
    }
  }
  return b;
}

/// Per-column extent of the union of all geodesics from v1 to v2.
struct GeodesicEnvelope {
  Point v1;
  Point v2;
  std::uint32_t passage_time = 0;
  std::vector<int> ymin;  // indexed by x - v1.x
  std::vector<int> ymax;

  int lower(int x) const { return ymin[static_cast<std::size_t>(x - v1.x)]; }
  int upper(int x) const { return ymax[static_cast<std::size_t>(x - v1.x)]; }
};

/// On-geodesic indicator over [v1, v2] (local coordinates, row-major):
/// a vertex is on some geodesic iff F + B equals the passage time.
template <typename Cell = std::uint32_t>
Table<std::uint8_t> geodesic_mask(const WeightField& field, Point v1, Point v2, PathMode mode,
                                  const Capacity& capacity = {}) {
  const auto f = forward_table<Cell>(field, v1, v2, mode, capacity);
  const auto b = backward_table<Cell>(field, v1, v2, mode, capacity);
  const Cell total = f(f.width - 1, f.height - 1);
  Table<std::uint8_t> mask{f.width, f.height, std::vector<std::uint8_t>(f.cells.size())};
  for (std::size_t k = 0; k < f.cells.size(); ++k)
    mask.cells[k] = static_cast<Cell>(f.cells[k] + b.cells[k]) == total ? 1 : 0;
  return mask;
}

/// Geodesic envelope via the forward/backward identity F + B == T.
/// The forward table is stored in full; the backward table is rolled one row
/// at a time from the top, so memory is one table plus two rows.
template <typename Cell = std::uint32_t>
GeodesicEnvelope geodesic_envelope(const WeightField& field, Point v1, Point v2,
                                   PathMode mode = PathMode::LastPassage,
                                   const Capacity& capacity = {}) {
  const auto f = forward_table<Cell>(field, v1, v2, mode, capacity);
  const int width = f.width;
  const int height = f.height;
  const Cell total = f(width - 1, height - 1);

  GeodesicEnvelope env;
  env.v1 = v1;
  env.v2 = v2;
  env.passage_time = total;
  env.ymin.assign(static_cast<std::size_t>(width), std::numeric_limits<int>::max());
  env.ymax.assign(static_cast<std::size_t>(width), std::numeric_limits<int>::min());

  std::vector<Cell> above(static_cast<std::size_t>(width)), here(static_cast<std::size_t>(width));
  for (int j = height - 1; j >= 0; --j) {
    const auto w_row = field.row(v1.y + j).subspan(static_cast<std::size_t>(v1.x), static_cast<std::size_t>(width));
    const bool has_above = j + 1 < height;
    const auto w_above = has_above
        ? field.row(v1.y + j + 1).subspan(static_cast<std::size_t>(v1.x), static_cast<std::size_t>(width))
        : std::span<const std::uint8_t>{};
    for (int i = width - 1; i >= 0; --i) {
      const auto ui = static_cast<std::size_t>(i);
      Cell value = 0;
      const bool has_right = i + 1 < width;
      if (has_right && has_above) {
        value = best_of(mode, static_cast<Cell>(w_row[ui + 1] + here[ui + 1]),
                        static_cast<Cell>(w_above[ui] + above[ui]));
      } else if (has_right) {
        value = static_cast<Cell>(w_row[ui + 1] + here[ui + 1]);
      } else if (has_above) {
        value = static_cast<Cell>(w_above[ui] + above[ui]);
      }
      here[ui] = value;
      if (static_cast<Cell>(f(i, j) + value) == total) {
        const int y = v1.y + j;
        env.ymin[ui] = std::min(env.ymin[ui], y);
        env.ymax[ui] = std::max(env.ymax[ui], y);
      }
    }
    std::swap(above, here);
  }
  return env;
}

inline GeodesicEnvelope geodesic_envelope(const WeightField& field, PathMode mode = PathMode::LastPassage,
                                          const Capacity& capacity = {}) {
  return geodesic_envelope(field, {0, 0}, field.corner(), mode, capacity);
}

/// One geodesic, recovered by backtracking the forward table from v2.
///
/// Among optimal predecessors, PreferUp steps back left (keeping y high), so
/// it yields the uppermost geodesic; PreferRight steps back down and yields
/// the lowest one; SeededRandom flips a per-vertex coin keyed by `tie_seed`.
inline DirectedPath sample_geodesic(const WeightField& field, Point v1, Point v2,
                                    PathMode mode = PathMode::LastPassage,
                                    TieRule tie_rule = TieRule::PreferUp, std::uint64_t tie_seed = 0,
                                    const Capacity& capacity = {}) {
  const auto f = forward_table(field, v1, v2, mode, capacity);
  DirectedPath path;
  path.vertices.reserve(static_cast<std::size_t>(l1_distance(v1, v2)) + 1);
  int i = f.width - 1;
  int j = f.height - 1;
  path.vertices.push_back(v2);
  while (i > 0 || j > 0) {
    const std::uint32_t here = f(i, j);
    const std::uint32_t w = field(v1.x + i, v1.y + j);
    const bool left_ok = i > 0 && f(i - 1, j) + w == here;
    const bool down_ok = j > 0 && f(i, j - 1) + w == here;
    bool go_left;
    if (left_ok && down_ok) {
      switch (tie_rule) {
        case TieRule::PreferUp: go_left = true; break;
        case TieRule::PreferRight: go_left = false; break;
        default: go_left = (mix64(tie_seed, vertex_counter(v1.x + i, v1.y + j)) & 1) != 0; break;
      }
    } else {
      go_left = left_ok;
    }
    if (go_left) --i; else --j;
    path.vertices.push_back({v1.x + i, v1.y + j});
  }
  std::reverse(path.vertices.begin(), path.vertices.end());
  return path;
}

}  // namespace glab
