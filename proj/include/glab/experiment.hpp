#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "glab/config.hpp"
#include "glab/csv.hpp"
#include "glab/decomposition.hpp"
#include "glab/digest.hpp"
#include "glab/error.hpp"
#include "glab/fluctuation.hpp"
#include "glab/lcs.hpp"
#include "glab/rng.hpp"
#include "glab/shape.hpp"
#include "glab/suites.hpp"

#ifndef GLAB_VERSION
#define GLAB_VERSION "0.1.0"
#endif

namespace glab {

inline constexpr std::string_view kVersion = GLAB_VERSION;

using Json = nlohmann::json;

struct OutputFile {
  std::string name;
  std::string sha256;
  std::uint64_t bytes = 0;
};

/// Everything known about one run. Data files (CSV, summary.json,
/// config.txt) depend only on the canonical config and the version; the
/// timestamps live in run_record.json alone.
struct RunRecord {
  std::string experiment;
  std::string config_hash;
  std::string version{kVersion};
  std::string started_at;
  std::string finished_at;
  std::string status = "ok";  // ok, invalid_config, capacity, invariant_violation, error
  std::optional<ErrorCode> error_code;
  std::string error_message;
  std::string output_dir;
  std::vector<OutputFile> outputs;
  Json summary = Json::object();
  int exit_code = 0;
};

struct RunOptions {
  std::optional<unsigned> workers;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> master_seed;  // e.g. from GLAB_MASTER_SEED
  bool write_record = true;
};

inline constexpr std::string_view kDefaultOutputDir = "glab-out";

/// Per-experiment base seed; per-replication seeds are derived from it (and
/// the scale, where there is one) by mix64.
inline std::uint64_t experiment_seed(std::uint64_t master_seed, std::string_view experiment) {
  return mix64(master_seed, string_tag(experiment));
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::schema: return "invalid_config";
    case ErrorCode::capacity: return "capacity";
    case ErrorCode::invariant: return "invariant_violation";
    default: return "error";
  }
}

namespace detail {

inline Json real_json(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Products {
  std::vector<std::pair<std::string, std::string>> files;  // name, bytes
  Json summary = Json::object();
  std::optional<std::string> invariant_failure;
};

inline Json shape_json(const ShapeEstimate& e) {
  return {{"direction_kind", to_string(e.direction.kind())}, {"direction", e.direction.label()},
          {"n", e.n}, {"reps", e.reps}, {"seed", e.seed}, {"mean", e.mean}, {"stderr", e.std_error},
          {"endpoint", {e.endpoint.x, e.endpoint.y}},
          {"rounding_bias", {e.rounding_bias_x, e.rounding_bias_y}}};
}

inline Json deviation_json(const DeviationSummary& d) {
  Json q = Json::object();
  for (const auto& level : d.quantiles)
    q[format_real(level.level)] = {{"value", level.value}, {"ci", {level.ci.lo, level.ci.hi}}};
  return {{"n", d.n}, {"reps", d.reps}, {"quantiles", q}};
}

inline Json exponent_json(const ExponentFit& f) {
  return {{"xi_hat", f.xi_hat}, {"intercept", f.intercept}, {"r_squared", real_json(f.r_squared)},
          {"stderr", real_json(f.xi_stderr)}, {"ci95_half_width", real_json(f.ci_half_width)}};
}

inline Json xi_json(const XiFit& fit) {
  return {{"quantile", fit.quantile}, {"n_range", {fit.n_lo, fit.n_hi}}, {"points", fit.points},
          {"excluded_n", fit.excluded_n}, {"raw", exponent_json(fit.raw)},
          {"log_corrected", exponent_json(fit.log_corrected)}};
}

inline Products run_shape_point(const Config& c, std::uint64_t base, unsigned workers) {
  const auto direction = direction_of(c);
  const int reps = static_cast<int>(c.get<std::int64_t>("reps"));
  const double s = s_of(c);
  CsvTable table = shape_table();
  Products out;
  Json points = Json::array();
  for (int n : n_list_of(c)) {
    const auto e = estimate_point(direction, n, reps, s, mix64(base, static_cast<std::uint64_t>(n)), workers);
    add_row(table, e);
    points.push_back(shape_json(e));
  }
  out.summary["points"] = points;
  if (direction.kind() != DirectionKind::Vector)
    out.summary["upper_bound"] = gperp_upper_bound(direction.as_perp(), s);
  out.files.emplace_back("results.csv", to_csv(table));
  return out;
}

inline Products run_shape_curvature(const Config& c, std::uint64_t base, unsigned workers) {
  const int n = n_list_of(c).front();
  const int reps = static_cast<int>(c.get<std::int64_t>("reps"));
  const double s = s_of(c);
  const auto& q_list = c.get<std::vector<double>>("q_list");
  CsvTable table = shape_table();
  const auto center = estimate_point(Direction::perp(0.0), n, reps, s, mix64(base, 0), workers);
  add_row(table, center);
  std::vector<ShapeEstimate> points;
  for (std::size_t i = 0; i < q_list.size(); ++i) {
    points.push_back(estimate_point(Direction::perp(q_list[i]), n, reps, s, mix64(base, i + 1), workers));
    add_row(table, points.back());
  }
  Products out;
  out.summary["gperp0"] = shape_json(center);
  try {
    const auto fit = fit_curvature(points, center, q_window_of(c));
    out.summary["kappa_fit"] = {{"kappa_hat", fit.kappa_hat}, {"c_hat", fit.c_hat},
                                {"r_squared", real_json(fit.r_squared)}, {"stderr", real_json(fit.kappa_stderr)},
                                {"ci95_half_width", real_json(fit.kappa_ci_half_width)},
                                {"q_window", {fit.q_window.first, fit.q_window.second}},
                                {"used", fit.used}, {"excluded", fit.excluded}, {"residuals", fit.residuals}};
  } catch (const FitError& e) {
    out.summary["kappa_fit_error"] = e.what();
  }
  out.files.emplace_back("results.csv", to_csv(table));
  return out;
}

inline Products run_convergence(const Config& c, std::uint64_t base, unsigned workers) {
  const auto ns = n_list_of(c);
  const double s = s_of(c);
  const auto profile = convergence_profile(s, ns, static_cast<int>(c.get<std::int64_t>("reps")), base, workers);
  CsvTable table = shape_table();
  for (const auto& p : profile.points) add_row(table, p);
  Products out;
  out.summary["lower_bound"] = gperp_lower_bound_at_zero(s);
  out.summary["upper_bound"] = gperp_upper_bound(0.0, s);
  if (profile.fit) {
    const auto& f = *profile.fit;
    out.summary["fit"] = {{"a", f.a}, {"b", f.b}, {"r_squared", real_json(f.r_squared)},
                          {"residuals", f.residuals}, {"runs_test_p", f.runs.p_value}, {"runs", f.runs.runs}};
  }
  out.files.emplace_back("results.csv", to_csv(table));
  return out;
}

inline Products run_event_a(const Config& c, std::uint64_t base, unsigned workers) {
  const auto policy = policy_of(c);
  const double s = s_of(c);
  const int reps = static_cast<int>(c.get<std::int64_t>("reps"));
  CsvTable table = event_a_table();
  CsvTable fields = event_a_fields_table();
  Products out;
  Json warnings = Json::array();
  for (int n : n_list_of(c)) {
    const int k = c.has("k") ? static_cast<int>(c.get<std::int64_t>("k"))
                             : n / static_cast<int>(c.get<std::int64_t>("m"));
    const std::uint64_t seed = mix64(base, static_cast<std::uint64_t>(n));
    const auto est = estimate_event_A_prob(n, k, s, policy, reps, seed, workers);
    add_row(table, EventARow{n, k, policy, s, seed, reps, est.p_hat, est.std_error});
    add_field_rows(fields, n, k, est);
    for (const auto& w : est.warnings) warnings.push_back("n=" + std::to_string(n) + ": " + w);
  }
  out.summary["warnings"] = warnings;
  out.files.emplace_back("results.csv", to_csv(table));
  if (c.get_or("dump_fields", false)) out.files.emplace_back("event_a_fields.csv", to_csv(fields));
  return out;
}

inline Products deviation_products(const std::vector<DeviationSummary>& profile, bool with_dist) {
  CsvTable table = deviation_table(with_dist);
  CsvTable samples = deviation_samples_table();
  Products out;
  Json scales = Json::array();
  for (const auto& d : profile) {
    add_rows(table, d);
    add_samples(samples, d);
    scales.push_back(deviation_json(d));
  }
  out.summary["scales"] = scales;
  out.files.emplace_back("results.csv", to_csv(table));
  out.files.emplace_back("samples.csv", to_csv(samples));
  return out;
}

inline void add_xi_fit(Products& out, const std::vector<DeviationSummary>& profile, double quantile) {
  try {
    out.summary["xi_fit"] = xi_json(fit_transversal_exponent(profile, quantile));
  } catch (const FitError& e) {
    out.summary["xi_fit_error"] = e.what();
  }
}

inline Products run_deviation(const Config& c, std::uint64_t base, unsigned workers, bool fit) {
  const auto profile = deviation_profile(s_of(c), n_list_of(c), static_cast<int>(c.get<std::int64_t>("reps")),
                                         mode_of(c), base, workers, capacity_of(c));
  auto out = deviation_products(profile, false);
  if (fit) add_xi_fit(out, profile, c.get_or("quantile", 0.5));
  return out;
}

inline Products run_containment(const Config& c, std::uint64_t base, unsigned workers) {
  const int n = n_list_of(c).front();
  const int reps = static_cast<int>(c.get<std::int64_t>("reps"));
  const double s = s_of(c);
  const double width = c.get<double>("width");
  const auto est = cylinder_containment_prob(n, s, width, mode_of(c), reps, base, workers, capacity_of(c));
  CsvTable table = containment_table();
  add_row(table, ContainmentRow{n, s, to_string(mode_of(c)), width, reps, base, est.p_hat, est.std_error});
  CsvTable samples = deviation_samples_table();
  for (std::size_t r = 0; r < est.max_devs.size(); ++r)
    samples.add({std::to_string(n), to_string(mode_of(c)), std::to_string(r), std::to_string(est.max_devs[r])});
  Products out;
  out.summary["p_hat"] = est.p_hat;
  out.summary["stderr"] = est.std_error;
  out.files.emplace_back("results.csv", to_csv(table));
  out.files.emplace_back("samples.csv", to_csv(samples));
  return out;
}

inline Products run_lcs(const Config& c, std::uint64_t base, unsigned workers) {
  const auto ns = n_list_of(c);
  const int k = static_cast<int>(c.get_or<std::int64_t>("alphabet", 2));
  const auto profile = lcs_deviation_profile(ns, k, dist_of(c), static_cast<int>(c.get<std::int64_t>("reps")),
                                             base, workers, capacity_of(c));
  auto out = deviation_products(profile, true);
  if (ns.size() >= 4) add_xi_fit(out, profile, c.get_or("quantile", 0.5));
  return out;
}

inline Products run_suite_experiment(const Config& c, std::string_view suite, std::uint64_t base,
                                     unsigned workers) {
  SuiteOptions opt;
  opt.seed = base;
  opt.trials = static_cast<int>(c.get_or<std::int64_t>("reps", 0));
  opt.workers = workers;
  if (c.has("k_list")) {
    opt.k_list.clear();
    for (auto k : c.get<std::vector<std::int64_t>>("k_list")) opt.k_list.push_back(static_cast<int>(k));
  }
  opt.max_side = static_cast<int>(c.get_or<std::int64_t>("max_side", opt.max_side));
  const auto result = run_suite(suite, opt);
  CsvTable table = suite_table();
  Products out;
  Json checks = Json::array();
  for (const auto& check : result.checks) {
    table.add({result.suite, check.name, std::to_string(check.trials), std::to_string(check.failures)});
    checks.push_back({{"check", check.name}, {"trials", check.trials}, {"failures", check.failures},
                      {"first_failure", check.first_failure}});
    if (check.failures && !out.invariant_failure)
      out.invariant_failure = result.suite + ": " + check.name + " failed " + std::to_string(check.failures) +
                              " of " + std::to_string(check.trials) + " (first: " + check.first_failure + ")";
  }
  out.summary["checks"] = checks;
  out.summary["passed"] = result.passed();
  out.files.emplace_back("results.csv", to_csv(table));
  return out;
}

inline Products dispatch(const Config& c, std::uint64_t base, unsigned workers) {
  const auto e = experiment_of(c);
  if (e == "shape-point") return run_shape_point(c, base, workers);
  if (e == "shape-curvature") return run_shape_curvature(c, base, workers);
  if (e == "convergence") return run_convergence(c, base, workers);
  if (e == "event-a") return run_event_a(c, base, workers);
  if (e == "deviation-profile") return run_deviation(c, base, workers, false);
  if (e == "xi-fit") return run_deviation(c, base, workers, true);
  if (e == "containment") return run_containment(c, base, workers);
  if (e == "lcs-profile") return run_lcs(c, base, workers);
  if (e.ends_with("-suite")) return run_suite_experiment(c, e, base, workers);
  throw DomainError("unknown experiment '" + e + "'");
}

}  // namespace detail

inline Json to_json(const RunRecord& r) {
  Json outputs = Json::array();
  for (const auto& o : r.outputs) outputs.push_back({{"file", o.name}, {"sha256", o.sha256}, {"bytes", o.bytes}});
  Json error = nullptr;
  if (r.error_code)
    error = {{"code", std::string(to_string(*r.error_code))}, {"message", r.error_message}};
  return {{"experiment", r.experiment}, {"config_hash", r.config_hash}, {"version", r.version},
          {"started_at", r.started_at}, {"finished_at", r.finished_at}, {"status", r.status},
          {"exit_code", r.exit_code}, {"error", error}, {"outputs", outputs}, {"summary", r.summary}};
}

/// Applies the overrides, validates, runs, and writes every output under
/// the output directory. Errors are captured in the record rather than
/// thrown; record.exit_code carries the process status.
inline RunRecord run(Config config, const RunOptions& options = {}) {
  RunRecord record;
  record.started_at = utc_timestamp();
  auto fail = [&](ErrorCode code, const std::string& message) {
    record.error_code = code;
    record.error_message = message;
    record.status = status_for(code);
    record.exit_code = exit_code(code);
  };
  std::filesystem::path dir;
  try {
    if (options.workers) config.set("workers", static_cast<std::int64_t>(*options.workers));
    if (options.output_dir) config.set("output_dir", *options.output_dir);
    if (options.master_seed) config.set("master_seed", *options.master_seed);
    if (config.has("experiment")) record.experiment = experiment_of(config);
    dir = config.get_or<std::string>("output_dir", std::string(kDefaultOutputDir));
    record.output_dir = dir.string();
    record.config_hash = config.hash();
    validate_config(config);

    const auto base = experiment_seed(master_seed_of(config), record.experiment);
    auto products = detail::dispatch(config, base, workers_of(config));

    std::filesystem::create_directories(dir);
    products.files.emplace_back("config.txt", config.serialize(true));
    Json summary = {{"experiment", record.experiment}, {"config_hash", record.config_hash},
                    {"version", record.version}, {"master_seed", master_seed_of(config)},
                    {"experiment_seed", base}, {"results", products.summary}};
    products.files.emplace_back("summary.json", summary.dump(2) + "\n");
    for (const auto& [name, bytes] : products.files) {
      write_file((dir / name).string(), bytes);
      record.outputs.push_back({name, sha256_hex(bytes), bytes.size()});
    }
    record.summary = products.summary;
    if (products.invariant_failure) fail(ErrorCode::invariant, *products.invariant_failure);
  } catch (const Error& e) {
    fail(e.code(), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    fail(ErrorCode::io, e.what());
  } catch (const std::bad_alloc&) {
    fail(ErrorCode::capacity, "out of memory");
  }
  record.finished_at = utc_timestamp();
  if (options.write_record && !dir.empty()) {
    try {
      std::filesystem::create_directories(dir);
      write_file((dir / "run_record.json").string(), to_json(record).dump(2) + "\n");
    } catch (const std::exception&) {
      // The record is best effort once the run itself has failed.
      if (record.exit_code == 0) fail(ErrorCode::io, "cannot write run_record.json in " + dir.string());
    }
  }
  return record;
}

/// Parses GLAB_MASTER_SEED-style text; empty means no override.
inline std::optional<std::uint64_t> parse_seed_override(const char* text) {
  if (!text || !*text) return std::nullopt;
  try {
    return detail::parse_number<std::uint64_t>("seed", text);
  } catch (const DomainError&) {
    throw DomainError("GLAB_MASTER_SEED must be an unsigned 64-bit integer, got '" + std::string(text) + "'");
  }
}

}  // namespace glab
