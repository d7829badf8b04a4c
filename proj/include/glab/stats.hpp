#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "glab/error.hpp"
#include "glab/rng.hpp"

namespace glab::stats {

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;  // stddev / sqrt(count), unbiased variance
  std::size_t count = 0;
};

/// Mean and standard error, summed in index order so that the result is
/// bit-reproducible for a given input sequence.
inline MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.count = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double var = ss / static_cast<double>(xs.size() - 1);
  out.std_error = std::sqrt(var / static_cast<double>(xs.size()));
  return out;
}

/// Standard error of the difference of two independent estimates.
inline double joint_stderr(double a, double b) { return std::sqrt(a * a + b * b); }

/// Linear-interpolation quantile of sorted data (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double q) {
  require(!sorted.empty(), "quantile of empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile level must lie in [0,1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  return quantile_sorted(xs, q);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval for a quantile. Resampling indices come from
/// a counter RNG keyed by `seed`, so the interval is deterministic.
inline Interval bootstrap_quantile_ci(std::span<const double> xs, double q, double level,
                                      std::size_t resamples, std::uint64_t seed) {
  require(!xs.empty(), "bootstrap of empty sample");
  CounterRng rng(seed);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<double> draw(xs.size());
  const auto last = static_cast<std::int64_t>(xs.size()) - 1;
  for (std::size_t b = 0; b < resamples; ++b) {
    for (auto& d : draw) d = xs[static_cast<std::size_t>(rng.uniform_int(0, last))];
    std::sort(draw.begin(), draw.end());
    stats.push_back(quantile_sorted(draw, q));
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  return {quantile_sorted(stats, alpha), quantile_sorted(stats, 1.0 - alpha)};
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_stderr = 0.0;  // zero when only two points
  std::vector<double> residuals;
};

/// Ordinary least squares y = intercept + slope * x.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "fit_line: size mismatch");
  if (x.size() < 2) throw FitError("fit_line: need at least two points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitError("fit_line: abscissae are all equal");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  fit.residuals.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  if (x.size() > 2) fit.slope_stderr = std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

/// Two-sided Student-t confidence half-width for a slope with `dof` degrees of freedom.
inline double t_half_width(double std_error, std::size_t dof, double level = 0.95) {
  if (dof == 0 || std_error == 0.0) return 0.0;
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0)) * std_error;
}

struct RunsTest {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t runs = 0;
  double p_value = 1.0;  // two-sided, exact conditional distribution
};

namespace detail {

inline double log_choose(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// P(R = r) for the Wald-Wolfowitz runs count given n1 and n2 symbols.
inline double runs_pmf(std::size_t r, std::size_t n1, std::size_t n2) {
  const double a = static_cast<double>(n1), b = static_cast<double>(n2);
  const double total = log_choose(a + b, a);
  if (r < 2) return 0.0;
  if (r % 2 == 0) {
    const double k = static_cast<double>(r / 2);
    if (k - 1 > a - 1 || k - 1 > b - 1) return 0.0;
    return 2.0 * std::exp(log_choose(a - 1, k - 1) + log_choose(b - 1, k - 1) - total);
  }
  const double k = static_cast<double>((r - 1) / 2);
  double p = 0.0;
  if (k <= a - 1 && k - 1 <= b - 1 && k >= 1)
    p += std::exp(log_choose(a - 1, k) + log_choose(b - 1, k - 1) - total);
  if (k - 1 <= a - 1 && k <= b - 1 && k >= 1)
    p += std::exp(log_choose(a - 1, k - 1) + log_choose(b - 1, k) - total);
  return p;
}

}  // namespace detail

/// Wald-Wolfowitz runs test on the signs of `values` (zeros are dropped).
/// The p-value sums the exact probabilities of run counts no more likely
/// than the observed one.
inline RunsTest runs_test(std::span<const double> values) {
  RunsTest out;
  int prev = 0;
  for (double v : values) {
    if (v == 0.0) continue;
    const int sign = v > 0.0 ? 1 : -1;
    (sign > 0 ? out.positives : out.negatives)++;
    if (sign != prev) ++out.runs;
    prev = sign;
  }
  if (out.positives == 0 || out.negatives == 0) return out;
  const std::size_t total = out.positives + out.negatives;
  const double observed = detail::runs_pmf(out.runs, out.positives, out.negatives);
  double p = 0.0;
  for (std::size_t r = 2; r <= total; ++r) {
    const double pr = detail::runs_pmf(r, out.positives, out.negatives);
    if (pr <= observed * (1.0 + 1e-9)) p += pr;
  }
  out.p_value = std::min(1.0, p);
  return out;
}

}  // namespace glab::stats
