#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "glab/decomposition.hpp"
#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/lcs.hpp"
#include "glab/oracle.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"

namespace glab {

// Invariant suites: exhaustive and randomized checks of the dynamic programs
// against oracles and provable bounds. Each check counts trials and failures;
// replications run on the worker pool and are reduced in index order.

struct CheckResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::string first_failure;  // empty when everything passed
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (c.failures) return false;
    return true;
  }
};

struct SuiteOptions {
  std::uint64_t seed = 0;
  int trials = 0;  // 0 selects the suite's default
  unsigned workers = 1;
  std::vector<int> k_list{2, 5};
  int max_side = 10;
};

inline constexpr PathMode kBothModes[] = {PathMode::LastPassage, PathMode::FirstPassage};

namespace detail {

struct TrialOutcome {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  std::string first_failure;

  void record(bool ok, const std::string& what) {
    ++trials;
    if (ok) return;
    if (!failures) first_failure = what;
    ++failures;
  }
};

template <typename Fn>
CheckResult run_check(std::string name, int count, unsigned workers, Fn&& trial) {
  const auto outcomes = parallel_map(static_cast<std::size_t>(count), workers, [&](std::size_t r) {
    TrialOutcome out;
    trial(static_cast<std::uint64_t>(r), out);
    return out;
  });
  CheckResult result{std::move(name), 0, 0, {}};
  for (const auto& o : outcomes) {
    result.trials += o.trials;
    if (o.failures && !result.failures) result.first_failure = o.first_failure;
    result.failures += o.failures;
  }
  return result;
}

inline double trial_s(std::uint64_t key) { return 0.05 + 0.9 * to_unit(key); }

inline std::string where(std::uint64_t r, int nx, int ny, PathMode mode) {
  return "replication " + std::to_string(r) + " grid " + std::to_string(nx) + "x" + std::to_string(ny) + " " +
         to_string(mode);
}

}  // namespace detail

/// Every grid with nx + ny <= 12, both modes: row DP and wavefront against
/// path enumeration.
inline CheckResult check_passage_oracle(std::uint64_t seed, int seeds, unsigned workers) {
  return detail::run_check("passage-time", seeds, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    for (int nx = 1; nx <= 11; ++nx)
      for (int ny = 1; nx + ny <= 12; ++ny) {
        const std::uint64_t key = mix64(seed, r, vertex_counter(nx, ny));
        const auto field = generate_field(nx, ny, detail::trial_s(key), key);
        for (auto mode : kBothModes) {
          const auto truth = brute_force_passage_time(field, {0, 0}, field.corner(), mode);
          out.record(passage_time(field, mode) == truth &&
                         passage_time_wavefront(field, {0, 0}, field.corner(), mode, 3) == truth,
                     detail::where(r, nx, ny, mode));
        }
      }
  });
}

/// Every grid up to 4 x 4, both modes: the F + B envelope and mask against the
/// union of enumerated geodesics.
inline CheckResult check_envelope_oracle(std::uint64_t seed, int seeds, unsigned workers) {
  return detail::run_check("geodesic-envelope", seeds, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    for (int nx = 1; nx <= 4; ++nx)
      for (int ny = 1; ny <= 4; ++ny) {
        const std::uint64_t key = mix64(seed ^ 0xe1, r, vertex_counter(nx, ny));
        const auto field = generate_field(nx, ny, detail::trial_s(key), key);
        for (auto mode : kBothModes) {
          const auto u = oracle::geodesic_union(field, {0, 0}, field.corner(), mode);
          const auto env = geodesic_envelope(field, mode);
          bool ok = env.passage_time == u.passage_time &&
                    geodesic_mask(field, {0, 0}, field.corner(), mode).cells == u.mask.cells;
          for (int x = 0; ok && x <= nx; ++x) {
            int lo = -1, hi = -1;
            for (int y = 0; y <= ny; ++y)
              if (u.mask(x, y)) {
                if (lo < 0) lo = y;
                hi = y;
              }
            ok = env.lower(x) == lo && env.upper(x) == hi;
          }
          out.record(ok, detail::where(r, nx, ny, mode));
        }
      }
  });
}

/// All length pairs up to 12 x 12 against subsequence enumeration.
inline CheckResult check_lcs_oracle(std::uint64_t seed, int seeds, unsigned workers) {
  return detail::run_check("lcs-length", seeds, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    const int k = 2 + static_cast<int>(r % 3);
    const auto dist = uniform_distribution(k);
    for (int a = 1; a <= 12; ++a)
      for (int b = 1; b <= 12; ++b) {
        const auto pair = generate_word_pair(a, b, k, dist, mix64(seed ^ 0x1c5, r, vertex_counter(a, b)));
        out.record(lcs_length(pair) == oracle::lcs_length(pair),
                   "replication " + std::to_string(r) + " lengths " + std::to_string(a) + "," + std::to_string(b));
      }
  });
}

/// Alignment envelopes up to length 8 against enumerated optimal alignments.
/// Replication r covers the length pair r mod 64.
inline CheckResult check_alignment_oracle(std::uint64_t seed, int seeds, unsigned workers) {
  return detail::run_check("alignment-envelope", seeds, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    const int a = 1 + static_cast<int>(r % 8);
    const int b = 1 + static_cast<int>((r / 8) % 8);
    const int k = 2 + static_cast<int>((r / 64) % 2);
    const auto pair = generate_word_pair(a, b, k, uniform_distribution(k), mix64(seed ^ 0xa11, r));
    const auto env = alignment_envelope(pair);
    const auto u = oracle::alignment_union(pair);
    bool ok = env.lcs == u.lcs && alignment_max_deviation(env) == u.max_deviation;
    for (int i = 0; ok && i <= a; ++i) {
      int lo = -1, hi = -1;
      for (int j = 0; j <= b; ++j)
        if (u.mask(i, j)) {
          if (lo < 0) lo = j;
          hi = j;
        }
      ok = env.jmin[static_cast<std::size_t>(i)] == lo && env.jmax[static_cast<std::size_t>(i)] == hi;
    }
    out.record(ok, "replication " + std::to_string(r));
  });
}

/// Every square grid up to 8, k in {1, 2, 4} where k divides n, both modes:
/// the event-A column DP against enumeration of all decompositions.
inline CheckResult check_event_a_oracle(std::uint64_t seed, int seeds, unsigned workers) {
  const SkewPolicy policies[] = {{0.5, 0.5, 2.0}, {0.25, 0.75, 1.5}};
  return detail::run_check("event-a", seeds, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    for (int n = 1; n <= 8; ++n) {
      const std::uint64_t key = mix64(seed ^ 0xea, r, static_cast<std::uint64_t>(n));
      const auto field = generate_field(n, n, detail::trial_s(key), key);
      for (int k : {1, 2, 4}) {
        if (n % k) continue;
        for (auto mode : kBothModes) {
          const auto& policy = policies[r % 2];
          const auto truth = oracle::event_a(field, k, policy, mode);
          const auto report = check_event_A(field, k, policy, mode);
          out.record(report.passage_time == truth.best && truth.best == passage_time(field, mode) &&
                         report.max_skew_count == truth.max_skew &&
                         report.holds == (truth.max_skew <= policy.max_skewed(n / k)),
                     detail::where(r, n, n, mode) + " k=" + std::to_string(k));
        }
      }
    }
  });
}

/// Resampling a strictly decreasing set (a random subset of an
/// anti-diagonal) moves the passage time by at most one.
inline CheckResult check_resampling(std::uint64_t seed, int trials, unsigned workers) {
  return detail::run_check("resampling-bound", trials, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    CounterRng rng(mix64(seed ^ 0x5e5, r));
    const int nx = static_cast<int>(rng.uniform_int(1, 24));
    const int ny = static_cast<int>(rng.uniform_int(1, 24));
    const double s = detail::trial_s(rng());
    const auto field = generate_field(nx, ny, s, rng());
    const int d = static_cast<int>(rng.uniform_int(0, static_cast<std::uint64_t>(nx + ny)));
    std::vector<Point> set;
    const bool whole = rng.uniform() < 0.5;
    for (Point p : anti_diagonal(field, d))
      if (whole || rng.uniform() < 0.5) set.push_back(p);
    const std::uint64_t resample_seed = rng();
    for (auto mode : kBothModes) {
      const auto dev = resampling_deviation_trial(field, {0, 0}, field.corner(), set, resample_seed, mode);
      out.record(dev <= 1, detail::where(r, nx, ny, mode) + " diagonal " + std::to_string(d));
    }
  });
}

/// T over a kn x kn grid equals the optimum over anti-diagonal partitions.
/// Instance i uses k = k_list[i mod |k_list|] and cycles n through
/// 1..floor(max_side / k).
inline CheckResult check_partitions(std::uint64_t seed, int instances, unsigned workers,
                                    const std::vector<int>& k_list, int max_side) {
  require(!k_list.empty(), "k_list must not be empty");
  require(max_side >= 2 && max_side <= kPartitionMaxSide, "max_side must lie in [2, 12]");
  for (int k : k_list) require(k >= 1 && k <= max_side, "k_list entries must lie in [1, max_side]");
  return detail::run_check("partition-identity", instances, workers, [&](std::uint64_t r, detail::TrialOutcome& out) {
    const int k = k_list[r % k_list.size()];
    const int n_max = max_side / k;
    const int n = 1 + static_cast<int>((r / k_list.size()) % static_cast<std::uint64_t>(n_max));
    const std::uint64_t key = mix64(seed ^ 0x9a7, r);
    const auto field = generate_field(n * k, n * k, detail::trial_s(key), key);
    for (auto mode : kBothModes)
      out.record(partition_identity_check(field, n, k, mode).equal,
                 detail::where(r, n * k, n * k, mode) + " k=" + std::to_string(k));
  });
}

inline constexpr std::string_view kSuiteNames[] = {"oracle-suite", "resample-suite", "partition-suite"};

inline int default_trials(std::string_view suite) {
  if (suite == "oracle-suite") return 1000;
  if (suite == "resample-suite") return 10000;
  if (suite == "partition-suite") return 500;
  throw DomainError("unknown suite '" + std::string(suite) + "'");
}

inline SuiteResult run_suite(std::string_view suite, const SuiteOptions& opt) {
  const int trials = opt.trials > 0 ? opt.trials : default_trials(suite);
  SuiteResult result{std::string(suite), {}};
  if (suite == "oracle-suite") {
    result.checks.push_back(check_passage_oracle(opt.seed, trials, opt.workers));
    result.checks.push_back(check_envelope_oracle(opt.seed, trials, opt.workers));
    result.checks.push_back(check_lcs_oracle(opt.seed, trials, opt.workers));
    result.checks.push_back(check_alignment_oracle(opt.seed, trials, opt.workers));
  } else if (suite == "resample-suite") {
    result.checks.push_back(check_resampling(opt.seed, trials, opt.workers));
  } else if (suite == "partition-suite") {
    result.checks.push_back(check_partitions(opt.seed, trials, opt.workers, opt.k_list, opt.max_side));
    result.checks.push_back(check_event_a_oracle(opt.seed, trials, opt.workers));
  } else {
    default_trials(suite);
  }
  return result;
}

}  // namespace glab
