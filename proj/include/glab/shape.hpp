#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glab/error.hpp"
#include "glab/lattice.hpp"
#include "glab/parallel.hpp"
#include "glab/passage.hpp"
#include "glab/rng.hpp"
#include "glab/stats.hpp"

namespace glab {

enum class DirectionKind { Perp, Slope, Vector };

/// A direction in the positive quadrant, in one of three parametrizations:
///   Perp(q):     the point (1-q, 1+q), q in (-1, 1)
///   Slope(p):    the grid (1, p) normalized by its half-perimeter, p > 0
///   Vector(x,y): the point (x, y), x, y > 0
class Direction {
 public:
  static Direction perp(double q) {
    require(q > -1.0 && q < 1.0, "direction q must lie in (-1,1)");
    return Direction(DirectionKind::Perp, q, 0.0);
  }
  static Direction slope(double p) {
    require(p > 0.0 && std::isfinite(p), "direction p must be positive");
    return Direction(DirectionKind::Slope, p, 0.0);
  }
  static Direction vector(double x, double y) {
    require(x > 0.0 && y > 0.0 && std::isfinite(x) && std::isfinite(y),
            "direction (x,y) must be positive");
    return Direction(DirectionKind::Vector, x, y);
  }

  DirectionKind kind() const noexcept { return kind_; }
  double first() const noexcept { return a_; }
  double second() const noexcept { return b_; }

  /// The q with g_perp(q) equal to this direction's normalized shape value
  /// (Perp and Slope only).
  double as_perp() const {
    switch (kind_) {
      case DirectionKind::Perp: return a_;
      case DirectionKind::Slope: return (a_ - 1.0) / (a_ + 1.0);
      default: throw DomainError("vector directions have no q parametrization");
    }
  }

  /// Real-valued endpoint at scale n, before rounding to the lattice.
  std::pair<double, double> target(int n) const {
    const double dn = n;
    switch (kind_) {
      case DirectionKind::Perp: return {dn * (1.0 - a_), dn * (1.0 + a_)};
      case DirectionKind::Slope: return {dn, dn * a_};
      default: return {dn * a_, dn * b_};
    }
  }

  double normalizer(int n) const {
    return kind_ == DirectionKind::Slope ? n * (1.0 + a_) / 2.0 : static_cast<double>(n);
  }

  /// CSV value column: "q", "p" or "x;y".
  std::string label() const;

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  Direction(DirectionKind k, double a, double b) : kind_(k), a_(a), b_(b) {}
  DirectionKind kind_;
  double a_;
  double b_;
};

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string Direction::label() const {
  if (kind_ == DirectionKind::Vector) return format_real(a_) + ";" + format_real(b_);
  return format_real(a_);
}

inline std::string to_string(DirectionKind k) {
  switch (k) {
    case DirectionKind::Perp: return "q";
    case DirectionKind::Slope: return "p";
    default: return "xy";
  }
}

enum class Normalization { PerN, PerHalfPerimeter };

inline std::string to_string(Normalization n) {
  return n == Normalization::PerN ? "per-n" : "per-half-perimeter";
}

struct ShapeEstimate {
  Direction direction = Direction::perp(0.0);
  int n = 0;
  int reps = 0;
  double s = 0.0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double std_error = 0.0;
  Normalization normalization = Normalization::PerN;
  Point endpoint;
  // Lattice rounding of the endpoint: rounded minus real coordinates.
  double rounding_bias_x = 0.0;
  double rounding_bias_y = 0.0;
};

/// Builds the field for one replication; swapped out by fixtures.
using FieldSource = std::function<WeightField(int nx, int ny, double s, std::uint64_t seed)>;

inline FieldSource bernoulli_source() { return generate_field; }

/// Monte Carlo estimate of the normalized passage time in `direction` at
/// scale n: the endpoint is the rounded real target, replication r uses the
/// field seed replication_seed(seed, r), and the reduction runs in
/// replication order.
inline ShapeEstimate estimate_point(const Direction& direction, int n, int reps, double s,
                                    std::uint64_t seed, unsigned workers = 1,
                                    const FieldSource& source = bernoulli_source()) {
  require(reps >= 2, "estimate_point needs reps >= 2");
  require(n >= 1, "estimate_point needs n >= 1");
  require(s > 0.0 && s < 1.0, "Bernoulli parameter s must lie in (0,1)");
  const auto [tx, ty] = direction.target(n);
  const Point end{static_cast<int>(std::lround(tx)), static_cast<int>(std::lround(ty))};
  if (end.x < 1 || end.y < 1)
    throw DomainError("direction rounds to a degenerate grid at n=" + std::to_string(n));
  const double norm = direction.normalizer(n);

  const auto values = parallel_map(static_cast<std::size_t>(reps), workers, [&](std::size_t r) {
    const WeightField field = source(end.x, end.y, s, replication_seed(seed, r));
    return static_cast<double>(passage_time(field, {0, 0}, end)) / norm;
  });
  const auto ms = stats::mean_stderr(values);

  ShapeEstimate est;
  est.direction = direction;
  est.n = n;
  est.reps = reps;
  est.s = s;
  est.seed = seed;
  est.mean = ms.mean;
  est.std_error = ms.std_error;
  est.normalization =
      direction.kind() == DirectionKind::Slope ? Normalization::PerHalfPerimeter : Normalization::PerN;
  est.endpoint = end;
  est.rounding_bias_x = end.x - tx;
  est.rounding_bias_y = end.y - ty;
  return est;
}

/// Upper bound 2s + 2 sqrt(2 - 2|q|) sqrt(s(1-s)) on g_perp(q).
inline double gperp_upper_bound(double q, double s) {
  require(q > -1.0 && q < 1.0, "q must lie in (-1,1)");
  require(s > 0.0 && s < 1.0, "s must lie in (0,1)");
  return 2.0 * s + 2.0 * std::sqrt(2.0 - 2.0 * std::abs(q)) * std::sqrt(s * (1.0 - s));
}

/// Lower bound 3s - s^2 on g_perp(0), from the diagonal 1x1 block construction.
inline double gperp_lower_bound_at_zero(double s) {
  require(s > 0.0 && s < 1.0, "s must lie in (0,1)");
  return 3.0 * s - s * s;
}

/// Threshold t = 1 - (g(1,1) - 2s)^2 / (8 s (1-s)): outside (-t, t) the upper
/// bound on g_perp drops below g_perp(0).
inline double threshold_t(double g11, double s) {
  require(s > 0.0 && s < 1.0, "s must lie in (0,1)");
  if (!(g11 >= 2.0 * s)) throw DomainError("threshold_t: g(1,1) must be at least 2s");
  const double gap = g11 - 2.0 * s;
  return 1.0 - gap * gap / (8.0 * s * (1.0 - s));
}

struct KappaFit {
  double kappa_hat = 0.0;
  double c_hat = 0.0;
  double r_squared = 0.0;
  double kappa_stderr = 0.0;
  double kappa_ci_half_width = 0.0;  // 95% Student-t
  std::pair<double, double> q_window;
  std::size_t used = 0;
  std::size_t excluded = 0;  // gap within 2 joint standard errors of zero
  std::vector<double> residuals;
};

/// Fits |g_perp(0) - g_perp(q)| ~ c |q|^kappa by least squares on logs.
/// Points with |q| outside [q_window.first, q_window.second] or q == 0 are
/// ignored; points whose gap is at most twice its joint standard error are
/// excluded and counted.
inline KappaFit fit_curvature(std::span<const ShapeEstimate> points, const ShapeEstimate& gperp0,
                              std::pair<double, double> q_window) {
  require(q_window.first >= 0.0 && q_window.first <= q_window.second, "bad q window");
  std::vector<double> lx, ly;
  std::size_t excluded = 0;
  for (const auto& p : points) {
    require(p.direction.kind() == DirectionKind::Perp, "fit_curvature takes q-direction estimates");
    require(p.n == gperp0.n && p.s == gperp0.s, "fit_curvature: estimates must share n and s");
    const double aq = std::abs(p.direction.first());
    if (aq == 0.0 || aq < q_window.first || aq > q_window.second) continue;
    const double gap = gperp0.mean - p.mean;
    const double se = stats::joint_stderr(gperp0.std_error, p.std_error);
    if (gap <= 2.0 * se || gap <= 0.0) {
      ++excluded;
      continue;
    }
    lx.push_back(std::log(aq));
    ly.push_back(std::log(gap));
  }
  if (lx.size() < 4)
    throw FitError("fit_curvature: " + std::to_string(lx.size()) + " usable points (" +
                   std::to_string(excluded) + " excluded as indistinguishable from zero); need 4");
  const auto line = stats::fit_line(lx, ly);
  if (!(line.slope > 0.0)) throw FitError("fit_curvature: fitted exponent is not positive");

  KappaFit fit;
  fit.kappa_hat = line.slope;
  fit.c_hat = std::exp(line.intercept);
  fit.r_squared = line.r_squared;
  fit.kappa_stderr = line.slope_stderr;
  fit.kappa_ci_half_width = stats::t_half_width(line.slope_stderr, lx.size() - 2);
  fit.q_window = q_window;
  fit.used = lx.size();
  fit.excluded = excluded;
  fit.residuals = line.residuals;
  return fit;
}

struct ConvergenceFit {
  double a = 0.0;  // estimated limit g(1,1)
  double b = 0.0;  // rate constant in mean(n) = a - b sqrt(ln n / n)
  double r_squared = 0.0;
  std::vector<double> residuals;
  stats::RunsTest runs;
};

struct ConvergenceProfile {
  std::vector<ShapeEstimate> points;
  std::optional<ConvergenceFit> fit;  // present with >= 2 scales
};

inline double convergence_abscissa(int n) {
  return std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(n));
}

inline ConvergenceFit fit_convergence(std::span<const ShapeEstimate> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(convergence_abscissa(p.n));
    y.push_back(p.mean);
  }
  const auto line = stats::fit_line(x, y);
  ConvergenceFit fit;
  fit.a = line.intercept;
  fit.b = -line.slope;
  fit.r_squared = line.r_squared;
  fit.residuals = line.residuals;
  fit.runs = stats::runs_test(fit.residuals);
  return fit;
}

/// E T(n,n)/n across a ladder of scales, plus the a - b sqrt(ln n / n) fit.
/// Scale n uses the base seed mix64(seed, n).
inline ConvergenceProfile convergence_profile(double s, std::span<const int> n_list, int reps,
                                              std::uint64_t seed, unsigned workers = 1,
                                              const FieldSource& source = bernoulli_source()) {
  require(!n_list.empty(), "convergence_profile: empty n list");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    require(n_list[i] > n_list[i - 1], "convergence_profile: n list must be strictly increasing");
  ConvergenceProfile profile;
  for (int n : n_list)
    profile.points.push_back(estimate_point(Direction::perp(0.0), n, reps, s,
                                            mix64(seed, static_cast<std::uint64_t>(n)), workers, source));
  if (profile.points.size() >= 2) profile.fit = fit_convergence(profile.points);
  return profile;
}

}  // namespace glab
