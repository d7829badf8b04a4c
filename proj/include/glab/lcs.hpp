#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "glab/error.hpp"
#include "glab/fluctuation.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"

namespace glab {

using Symbol = std::uint8_t;

struct WordPair {
  int alphabet_size = 2;
  std::vector<double> dist;
  std::uint64_t seed = 0;
  std::vector<Symbol> first;
  std::vector<Symbol> second;

  int len1() const noexcept { return static_cast<int>(first.size()); }
  int len2() const noexcept { return static_cast<int>(second.size()); }
};

inline void validate_distribution(int alphabet_size, std::span<const double> dist) {
  require(alphabet_size >= 2 && alphabet_size <= 256, "alphabet size must lie in [2, 256]");
  require(dist.size() == static_cast<std::size_t>(alphabet_size), "distribution length must equal alphabet size");
  double total = 0.0;
  for (double p : dist) {
    require(p >= 0.0 && std::isfinite(p), "distribution entries must be non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "distribution must sum to 1");
}

inline std::vector<double> uniform_distribution(int alphabet_size) {
  require(alphabet_size >= 2, "alphabet size must be at least 2");
  return std::vector<double>(static_cast<std::size_t>(alphabet_size), 1.0 / alphabet_size);
}

/// Short CSV-safe description of a distribution, e.g. "0.5|0.5".
inline std::string distribution_descriptor(std::span<const double> dist) {
  std::string out;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (i) out += '|';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", dist[i]);
    out += buf;
  }
  return out;
}

/// I.i.d. words; symbol i of word w (w = 1, 2) is the inverse CDF of
/// to_unit(mix64(seed, w, i)).
inline WordPair generate_word_pair(int len1, int len2, int alphabet_size, std::span<const double> dist,
                                   std::uint64_t seed) {
  validate_distribution(alphabet_size, dist);
  require(len1 >= 1 && len2 >= 1, "word lengths must be positive");
  std::vector<double> cdf(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) cdf[i] = (acc += dist[i]);
  cdf.back() = std::numeric_limits<double>::infinity();

  auto draw = [&](std::uint64_t word, int len) {
    std::vector<Symbol> out(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
      const double u = to_unit(mix64(seed, word, static_cast<std::uint64_t>(i)));
      // Zero-probability symbols share their cdf with the previous one and are never selected.
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      out[static_cast<std::size_t>(i)] = static_cast<Symbol>(it - cdf.begin());
    }
    return out;
  };
  WordPair pair;
  pair.alphabet_size = alphabet_size;
  pair.dist.assign(dist.begin(), dist.end());
  pair.seed = seed;
  pair.first = draw(1, len1);
  pair.second = draw(2, len2);
  return pair;
}

inline WordPair generate_word_pair(int len, int alphabet_size, std::span<const double> dist, std::uint64_t seed) {
  return generate_word_pair(len, len, alphabet_size, dist, seed);
}

/// Fixture pair from explicit words; the distribution is recorded as uniform.
inline WordPair word_pair_from(int alphabet_size, std::vector<Symbol> first, std::vector<Symbol> second) {
  require(!first.empty() && !second.empty(), "words must be non-empty");
  for (auto c : first) require(c < alphabet_size, "symbol outside alphabet");
  for (auto c : second) require(c < alphabet_size, "symbol outside alphabet");
  WordPair pair;
  pair.alphabet_size = alphabet_size;
  pair.dist = uniform_distribution(alphabet_size);
  pair.first = std::move(first);
  pair.second = std::move(second);
  return pair;
}

inline void check_lcs_capacity(const WordPair& pair, const Capacity& capacity) {
  const auto cells = static_cast<std::uint64_t>(pair.len1() + 1) * static_cast<std::uint64_t>(pair.len2() + 1);
  if (cells > capacity.max_cells)
    throw CapacityError("LCS table of " + std::to_string(cells) + " cells exceeds capacity");
}

/// L(i,j) = L(i-1,j-1) + 1 on a match, else max(L(i-1,j), L(i,j-1)); one row of memory.
inline std::uint32_t lcs_length(const WordPair& pair, const Capacity& capacity = {}) {
  check_lcs_capacity(pair, capacity);
  const auto cols = static_cast<std::size_t>(pair.len2()) + 1;
  std::vector<std::uint32_t> row(cols, 0);
  for (Symbol a : pair.first) {
    std::uint32_t diag = 0;  // L(i-1, j-1)
    for (std::size_t j = 1; j < cols; ++j) {
      const std::uint32_t up = row[j];
      row[j] = a == pair.second[j - 1] ? diag + 1 : std::max(up, row[j - 1]);
      diag = up;
    }
  }
  return row[cols - 1];
}

/// Per-i extent of grid points lying on some optimal alignment path.
///
/// An alignment path is a monotone staircase through {0..len1} x {0..len2}
/// with unit right/up steps and diagonal steps on matching symbols; its
/// score is its number of diagonal steps. (i, j) lies on an optimal one iff
/// F(i,j) + B(i,j) == LC, where F is the LCS of the prefixes and B of the
/// suffixes.
struct AlignmentEnvelope {
  std::uint32_t lcs = 0;
  std::vector<int> jmin;  // indexed by i
  std::vector<int> jmax;
};

inline AlignmentEnvelope alignment_envelope(const WordPair& pair, const Capacity& capacity = {}) {
  check_lcs_capacity(pair, capacity);
  const int rows = pair.len1() + 1;
  const int cols = pair.len2() + 1;
  const auto ucols = static_cast<std::size_t>(cols);
  std::vector<std::uint32_t> f(static_cast<std::size_t>(rows) * ucols, 0);
  for (int i = 1; i < rows; ++i) {
    const Symbol a = pair.first[static_cast<std::size_t>(i - 1)];
    std::uint32_t* cur = f.data() + static_cast<std::size_t>(i) * ucols;
    const std::uint32_t* prev = cur - cols;
    for (int j = 1; j < cols; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      cur[uj] = a == pair.second[uj - 1] ? prev[uj - 1] + 1 : std::max(prev[uj], cur[uj - 1]);
    }
  }
  AlignmentEnvelope env;
  env.lcs = f.back();
  env.jmin.assign(static_cast<std::size_t>(rows), std::numeric_limits<int>::max());
  env.jmax.assign(static_cast<std::size_t>(rows), std::numeric_limits<int>::min());

  std::vector<std::uint32_t> below(ucols, 0), here(ucols, 0);  // B rows i+1 and i
  for (int i = rows - 1; i >= 0; --i) {
    for (int j = cols - 1; j >= 0; --j) {
      const auto uj = static_cast<std::size_t>(j);
      std::uint32_t b = 0;
      if (i + 1 < rows && j + 1 < cols && pair.first[static_cast<std::size_t>(i)] == pair.second[uj]) {
        b = below[uj + 1] + 1;
      } else {
        if (i + 1 < rows) b = std::max(b, below[uj]);
        if (j + 1 < cols) b = std::max(b, here[uj + 1]);
      }
      here[uj] = b;
      if (f[static_cast<std::size_t>(i) * ucols + uj] + b == env.lcs) {
        env.jmin[static_cast<std::size_t>(i)] = std::min(env.jmin[static_cast<std::size_t>(i)], j);
        env.jmax[static_cast<std::size_t>(i)] = std::max(env.jmax[static_cast<std::size_t>(i)], j);
      }
    }
    std::swap(below, here);
  }
  return env;
}

/// max |i - j| over the envelope.
inline int alignment_max_deviation(const AlignmentEnvelope& env) {
  int dev = 0;
  for (std::size_t i = 0; i < env.jmin.size(); ++i) {
    const int x = static_cast<int>(i);
    if (env.jmin[i] > env.jmax[i]) continue;
    dev = std::max({dev, std::abs(env.jmax[i] - x), std::abs(x - env.jmin[i])});
  }
  return dev;
}

/// Alignment deviation quantiles over random equal-length pairs. Length n
/// draws pairs from base seed mix64(seed, n), replication r from
/// replication_seed(base, r).
inline std::vector<DeviationSummary> lcs_deviation_profile(std::span<const int> len_list, int alphabet_size,
                                                           std::span<const double> dist, int reps,
                                                           std::uint64_t seed, unsigned workers = 1,
                                                           const Capacity& capacity = {}) {
  validate_distribution(alphabet_size, dist);
  require(reps >= 1, "reps must be positive");
  std::vector<DeviationSummary> out;
  for (int len : len_list) {
    require(len >= 1, "word lengths must be positive");
    const auto cells = static_cast<std::uint64_t>(len + 1) * static_cast<std::uint64_t>(len + 1);
    if (cells > capacity.max_cells)
      throw CapacityError("LCS profile at length " + std::to_string(len) + " exceeds capacity");
    const std::uint64_t base = mix64(seed, static_cast<std::uint64_t>(len));
    auto values = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
      const auto pair = generate_word_pair(len, alphabet_size, dist, replication_seed(base, r));
      return static_cast<double>(alignment_max_deviation(alignment_envelope(pair, capacity)));
    });
    auto summary = summarize_deviations(len, std::numeric_limits<double>::quiet_NaN(), "lcs",
                                        std::move(values), base);
    summary.descriptor = distribution_descriptor(dist);
    out.push_back(std::move(summary));
  }
  return out;
}

}  // namespace glab
