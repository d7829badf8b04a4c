#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"
#include "glab/stats.hpp"

namespace glab {

struct DeviationRecord {
  int n = 0;
  double s = 0.0;
  PathMode mode = PathMode::LastPassage;
  std::uint64_t seed = 0;
  int max_dev = 0;
  std::uint32_t passage_time = 0;
};

/// Largest |y - x| over all geodesic vertices, measured from v1. Equals the
/// smallest w such that every geodesic stays within |y - x| <= w.
inline int max_deviation(const GeodesicEnvelope& env) {
  if (env.v2.x - env.v1.x != env.v2.y - env.v1.y)
    throw DomainError("max_deviation needs an envelope over a square grid");
  int dev = 0;
  for (std::size_t i = 0; i < env.ymin.size(); ++i) {
    const int x = static_cast<int>(i);
    dev = std::max(dev, std::abs(env.ymax[i] - env.v1.y - x));
    dev = std::max(dev, std::abs(x - (env.ymin[i] - env.v1.y)));
  }
  return dev;
}

inline DeviationRecord deviation_record(const WeightField& field, PathMode mode,
                                        const Capacity& capacity = {}) {
  const auto env = geodesic_envelope(field, mode, capacity);
  return {field.nx(), field.s(), mode, field.seed(), max_deviation(env), env.passage_time};
}

struct QuantileSummary {
  double level = 0.5;
  double value = 0.0;
  stats::Interval ci;  // 95% percentile bootstrap
};

/// Per-scale summary of maximal deviations across replications. Shared by
/// the percolation and LCS profiles; `mode` is "dlpp", "dfpp" or "lcs".
struct DeviationSummary {
  int n = 0;
  double s = 0.0;  // NaN for LCS
  std::string mode;
  std::string descriptor;  // LCS alphabet distribution, empty otherwise
  int reps = 0;
  std::vector<double> values;  // max deviation per replication, in order
  std::vector<QuantileSummary> quantiles;

  const QuantileSummary& at(double level) const {
    for (const auto& q : quantiles)
      if (q.level == level) return q;
    throw DomainError("quantile level not summarized: " + std::to_string(level));
  }
};

inline constexpr double kSummaryLevels[] = {0.5, 0.9, 1.0};
inline constexpr std::size_t kBootstrapResamples = 1000;

inline DeviationSummary summarize_deviations(int n, double s, std::string mode, std::vector<double> values,
                                             std::uint64_t seed) {
  require(!values.empty(), "no deviation samples");
  DeviationSummary out;
  out.n = n;
  out.s = s;
  out.mode = std::move(mode);
  out.reps = static_cast<int>(values.size());
  out.values = std::move(values);
  std::vector<double> sorted = out.values;
  std::sort(sorted.begin(), sorted.end());
  for (double level : kSummaryLevels) {
    const auto tag = static_cast<std::uint64_t>(std::lround(level * 1000));
    out.quantiles.push_back({level, stats::quantile_sorted(sorted, level),
                             stats::bootstrap_quantile_ci(sorted, level, 0.95, kBootstrapResamples,
                                                          mix64(seed, 0xb007, tag))});
  }
  return out;
}

/// Maximal geodesic deviation over `reps` fields at each n. Scale n draws
/// its fields from base seed mix64(seed, n), replication r from
/// replication_seed(base, r).
inline std::vector<DeviationSummary> deviation_profile(double s, std::span<const int> n_list, int reps,
                                                       PathMode mode, std::uint64_t seed,
                                                       unsigned workers = 1, const Capacity& capacity = {}) {
  require(reps >= 1, "reps must be positive");
  std::vector<DeviationSummary> out;
  for (int n : n_list) {
    const auto cells = static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(n + 1);
    if (cells > capacity.max_cells)
      throw CapacityError("deviation profile at n=" + std::to_string(n) + " exceeds envelope capacity");
    const std::uint64_t base = mix64(seed, static_cast<std::uint64_t>(n));
    auto values = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
      const auto field = generate_field(n, n, s, replication_seed(base, r));
      return static_cast<double>(deviation_record(field, mode, capacity).max_dev);
    });
    out.push_back(summarize_deviations(n, s, to_string(mode), std::move(values), base));
  }
  return out;
}

struct ExponentFit {
  double xi_hat = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double xi_stderr = 0.0;
  double ci_half_width = 0.0;  // 95% Student-t
};

struct XiFit {
  double quantile = 0.5;
  int n_lo = 0;
  int n_hi = 0;
  std::size_t points = 0;
  std::vector<int> excluded_n;  // non-positive quantile values
  ExponentFit raw;              // ln(dev) against ln n
  ExponentFit log_corrected;    // ln(dev / sqrt(ln n)) against ln n

  double xi_hat() const noexcept { return raw.xi_hat; }
};

inline ExponentFit fit_power_law(std::span<const double> ln_n, std::span<const double> ln_value) {
  const auto line = stats::fit_line(ln_n, ln_value);
  return {line.slope, line.intercept, line.r_squared, line.slope_stderr,
          stats::t_half_width(line.slope_stderr, ln_n.size() - 2)};
}

/// Log-log least squares of the chosen deviation quantile against n.
inline XiFit fit_transversal_exponent(std::span<const DeviationSummary> profile, double quantile = 0.5) {
  XiFit fit;
  fit.quantile = quantile;
  std::vector<double> lx, ly, ly_corrected;
  for (const auto& summary : profile) {
    std::vector<double> sorted = summary.values;
    std::sort(sorted.begin(), sorted.end());
    const double value = stats::quantile_sorted(sorted, quantile);
    if (!(value > 0.0)) {
      fit.excluded_n.push_back(summary.n);
      continue;
    }
    const double ln_n = std::log(static_cast<double>(summary.n));
    lx.push_back(ln_n);
    ly.push_back(std::log(value));
    ly_corrected.push_back(std::log(value / std::sqrt(ln_n)));
    fit.n_lo = fit.points == 0 ? summary.n : std::min(fit.n_lo, summary.n);
    fit.n_hi = std::max(fit.n_hi, summary.n);
    ++fit.points;
  }
  if (fit.points < 4)
    throw FitError("fit_transversal_exponent: " + std::to_string(fit.points) +
                   " usable scales (" + std::to_string(fit.excluded_n.size()) + " excluded); need 4");
  fit.raw = fit_power_law(lx, ly);
  fit.log_corrected = fit_power_law(lx, ly_corrected);
  return fit;
}

struct ContainmentEstimate {
  double p_hat = 0.0;
  double std_error = 0.0;
  std::vector<int> max_devs;  // per replication
};

inline ContainmentEstimate containment_from(std::vector<int> max_devs, double width) {
  std::vector<double> hits;
  hits.reserve(max_devs.size());
  for (int d : max_devs) hits.push_back(d <= width ? 1.0 : 0.0);
  const auto ms = stats::mean_stderr(hits);
  return {ms.mean, ms.std_error, std::move(max_devs)};
}

/// Frequency of {every geodesic stays within |y - x| <= width}. Uses the same
/// fields as deviation_profile at this n for the same seed.
inline ContainmentEstimate cylinder_containment_prob(int n, double s, double width, PathMode mode, int reps,
                                                     std::uint64_t seed, unsigned workers = 1,
                                                     const Capacity& capacity = {}) {
  require(width >= 0.0 && width <= n, "width must lie in [0, n]");
  require(reps >= 1, "reps must be positive");
  const std::uint64_t base = mix64(seed, static_cast<std::uint64_t>(n));
  auto devs = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    return deviation_record(generate_field(n, n, s, replication_seed(base, r)), mode, capacity).max_dev;
  });
  return containment_from(std::move(devs), width);
}

}  // namespace glab
