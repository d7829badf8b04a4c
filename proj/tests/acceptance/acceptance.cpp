// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "glab/glab.hpp"

using namespace glab;
namespace fs = std::filesystem;

namespace {

constexpr unsigned kWorkers = 1;
constexpr double kS = 0.5;

struct Verdict {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string check_detail(const CheckResult& c) {
  std::string out = c.name + ": " + std::to_string(c.failures) + "/" + std::to_string(c.trials) + " failures";
  if (c.failures) out += " (first: " + c.first_failure + ")";
  return out;
}

bool clean(std::initializer_list<CheckResult> checks, std::string& detail) {
  bool ok = true;
  for (const auto& c : checks) {
    if (!detail.empty()) detail += "; ";
    detail += check_detail(c);
    ok = ok && c.failures == 0 && c.trials > 0;
  }
  return ok;
}

double joint(double a, double b) { return std::sqrt(a * a + b * b); }

fs::path scratch_root() {
  return fs::temp_directory_path() / ("glab_acceptance_" + std::to_string(::getpid()));
}

RunRecord run_config(const std::string& name, unsigned workers) {
  const auto config = Config::load(std::string(GLAB_CONFIG_DIR) + "/" + name + ".conf");
  RunOptions opt;
  opt.workers = workers;
  opt.output_dir = (scratch_root() / (name + "_w" + std::to_string(workers))).string();
  return run(config, opt);
}

std::map<std::string, std::string> digests(const RunRecord& r) {
  std::map<std::string, std::string> out;
  for (const auto& o : r.outputs) out[o.name] = o.sha256;
  return out;
}

CsvTable table(const RunRecord& r, const std::string& file) {
  return parse_csv(read_file(r.output_dir + "/" + file));
}

template <typename Fn>
Verdict timed(int id, std::string title, Fn&& fn) {
  Verdict v{id, std::move(title), false, {}, 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %2d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", v.id, v.title.c_str(), v.detail.c_str(),
              v.seconds);
  std::fflush(stdout);
  return v;
}

}  // namespace

int main() {
  std::vector<Verdict> verdicts;
  std::map<std::string, RunRecord> single;  // shipped configs run with one worker

  verdicts.push_back(timed(1, "passage times match path enumeration", [](Verdict& v) {
    v.pass = clean({check_passage_oracle(101, 1000, kWorkers)}, v.detail);
  }));

  verdicts.push_back(timed(2, "geodesic envelopes match enumerated unions", [](Verdict& v) {
    v.pass = clean({check_envelope_oracle(202, 500, kWorkers)}, v.detail);
  }));

  verdicts.push_back(timed(3, "anti-diagonal resampling moves T by at most 1", [](Verdict& v) {
    v.pass = clean({check_resampling(303, 10000, kWorkers)}, v.detail);
  }));

  verdicts.push_back(timed(4, "partition identity", [](Verdict& v) {
    v.pass = clean({check_partitions(404, 500, kWorkers, {2, 5}, 10)}, v.detail);
  }));

  ShapeEstimate diagonal;
  verdicts.push_back(timed(5, "diagonal mean above 3s - s^2", [&](Verdict& v) {
    diagonal = estimate_point(Direction::perp(0.0), 1000, 100, kS, 505, kWorkers);
    const double floor = gperp_lower_bound_at_zero(kS) - 3.0 * diagonal.std_error;
    v.pass = diagonal.mean >= floor;
    v.detail = "mean " + fmt("%.5f", diagonal.mean) + " stderr " + fmt("%.5f", diagonal.std_error) +
               " >= " + fmt("%.5f", floor);
  }));

  verdicts.push_back(timed(6, "diagonal mean below the upper bound", [&](Verdict& v) {
    const double ceiling = gperp_upper_bound(0.0, kS) + 3.0 * diagonal.std_error;
    v.pass = diagonal.reps > 0 && diagonal.mean <= ceiling;
    v.detail = "mean " + fmt("%.5f", diagonal.mean) + " <= " + fmt("%.5f", ceiling);
  }));

  verdicts.push_back(timed(7, "superadditive doubling", [&](Verdict& v) {
    const auto r = run_config("convergence", 1);
    single.emplace("convergence", r);
    if (r.exit_code) throw std::runtime_error(r.error_message);
    const auto points = read_shape_estimates(table(r, "results.csv"), kS);
    v.pass = points.size() >= 2;
    double worst = INFINITY;
    for (std::size_t i = 1; i < points.size(); ++i) {
      const auto& a = points[i - 1];
      const auto& b = points[i];
      if (b.n != 2 * a.n) v.pass = false;
      const double margin = (b.mean - a.mean) / joint(a.std_error, b.std_error);
      worst = std::min(worst, margin);
      if (margin < -4.0) v.pass = false;
    }
    v.detail = std::to_string(points.size()) + " scales " + std::to_string(points.front().n) + ".." +
               std::to_string(points.back().n) + ", worst (mean(2n)-mean(n))/joint stderr " + fmt("%.3f", worst) +
               " >= -4";
  }));

  verdicts.push_back(timed(8, "symmetry at q = +-0.4", [](Verdict& v) {
    const auto plus = estimate_point(Direction::perp(0.4), 1000, 200, kS, 808, kWorkers);
    const auto minus = estimate_point(Direction::perp(-0.4), 1000, 200, kS, 809, kWorkers);
    const double z = std::abs(plus.mean - minus.mean) / joint(plus.std_error, minus.std_error);
    v.pass = z <= 4.0;
    v.detail = "g(+0.4) " + fmt("%.5f", plus.mean) + " g(-0.4) " + fmt("%.5f", minus.mean) + ", |diff|/joint stderr " +
               fmt("%.3f", z) + " <= 4";
  }));

  verdicts.push_back(timed(9, "event A exactness and trend", [&](Verdict& v) {
    const bool exact = clean({check_event_a_oracle(909, 500, kWorkers)}, v.detail);
    const auto r = run_config("event-a", 1);
    single.emplace("event-a", r);
    if (r.exit_code) throw std::runtime_error(r.error_message);
    const auto rows = read_event_a_rows(table(r, "results.csv"));
    bool trend = rows.size() >= 2;
    v.detail += "; p_hat";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      v.detail += " n=" + std::to_string(rows[i].n) + ":" + fmt("%.3f", rows[i].p_hat);
      if (i && rows[i].p_hat < rows[i - 1].p_hat - 2.0 * joint(rows[i].std_error, rows[i - 1].std_error))
        trend = false;
    }
    v.detail += trend ? " nondecreasing within 2 sigma" : " decreases by more than 2 sigma";
    v.pass = exact && trend;
  }));

  verdicts.push_back(timed(10, "transversal exponent window", [&](Verdict& v) {
    const auto r = run_config("xi-fit", 1);
    single.emplace("xi-fit", r);
    if (r.exit_code) throw std::runtime_error(r.error_message);
    const auto samples = table(r, "samples.csv");
    const auto profile = read_deviation_summaries(table(r, "results.csv"), &samples);
    const auto fit = fit_transversal_exponent(profile, 0.5);
    v.pass = profile.front().reps >= 100 && fit.points >= 6 && fit.xi_hat() >= 0.5 && fit.xi_hat() <= 0.95;
    v.detail = "xi_hat " + fmt("%.4f", fit.xi_hat()) + " +- " + fmt("%.4f", fit.raw.ci_half_width) + " over n=" +
               std::to_string(fit.n_lo) + ".." + std::to_string(fit.n_hi) + ", reps " +
               std::to_string(profile.front().reps) + ", log-corrected " + fmt("%.4f", fit.log_corrected.xi_hat) +
               ", window [0.5, 0.95]";
  }));

  verdicts.push_back(timed(11, "LCS lengths and alignment envelopes", [](Verdict& v) {
    v.pass = clean({check_lcs_oracle(1111, 1000, kWorkers), check_alignment_oracle(1112, 1000, kWorkers)}, v.detail);
  }));

  verdicts.push_back(timed(12, "byte-identical outputs at 1 and 8 workers", [&](Verdict& v) {
    const char* names[] = {"oracle-suite", "resample-suite", "partition-suite", "convergence",   "shape-point",
                           "shape-curvature", "event-a",     "deviation-profile", "xi-fit",      "containment",
                           "lcs-profile"};
    v.pass = true;
    int files = 0;
    for (const char* name : names) {
      auto it = single.find(name);
      const RunRecord one = it != single.end() ? it->second : run_config(name, 1);
      const RunRecord eight = run_config(name, 8);
      const bool same = one.exit_code == 0 && eight.exit_code == 0 && !one.outputs.empty() &&
                        digests(one) == digests(eight);
      files += static_cast<int>(one.outputs.size());
      if (!same) {
        v.pass = false;
        v.detail += std::string(v.detail.empty() ? "" : "; ") + name + " differs";
      }
    }
    if (v.pass) v.detail = std::to_string(std::size(names)) + " configs, " + std::to_string(files) + " files identical";
  }));

  std::error_code ec;
  fs::remove_all(scratch_root(), ec);

  int failed = 0;
  for (const auto& v : verdicts) failed += v.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(verdicts.size()) - failed, verdicts.size());
  return failed ? 1 : 0;
}
