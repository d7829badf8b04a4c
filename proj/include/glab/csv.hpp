#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "glab/config.hpp"
#include "glab/decomposition.hpp"
#include "glab/error.hpp"
#include "glab/fluctuation.hpp"
#include "glab/shape.hpp"

namespace glab {

/// A header plus string cells. Values never contain commas or quotes, so no
/// quoting is done; reals are written with 17 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw SchemaError("missing column '" + std::string(name) + "'");
  }

  void require_columns(std::initializer_list<std::string_view> names) const {
    for (auto name : names) column(name);
  }

  const std::string& cell(std::size_t row, std::string_view name) const { return rows.at(row)[column(name)]; }

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw SchemaError("row width does not match the header");
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

inline CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  auto split = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  bool first = true;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first) {
      table.header = split(line);
      first = false;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != table.header.size())
      throw SchemaError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " cells, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw SchemaError("empty CSV");
  return table;
}

inline double csv_real(const std::string& cell) {
  if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
  return detail::parse_number<double>("csv", cell);
}

inline std::int64_t csv_int(const std::string& cell) { return detail::parse_number<std::int64_t>("csv", cell); }
inline std::uint64_t csv_seed(const std::string& cell) { return detail::parse_number<std::uint64_t>("csv", cell); }

inline std::string csv_real_cell(double v) { return std::isnan(v) ? "nan" : format_real(v); }

// ---- shape estimates ----

inline CsvTable shape_table() {
  return {{"direction_kind", "q_or_p_or_xy", "n", "reps", "seed", "mean", "stderr", "normalization"}, {}};
}

inline void add_row(CsvTable& t, const ShapeEstimate& e) {
  t.add({to_string(e.direction.kind()), e.direction.label(), std::to_string(e.n), std::to_string(e.reps),
         std::to_string(e.seed), format_real(e.mean), format_real(e.std_error), to_string(e.normalization)});
}

/// Reads shape rows back; s and the lattice endpoint are not part of the
/// schema and are reconstructed from `s` and the direction.
inline std::vector<ShapeEstimate> read_shape_estimates(const CsvTable& t, double s) {
  t.require_columns({"direction_kind", "q_or_p_or_xy", "n", "reps", "seed", "mean", "stderr", "normalization"});
  std::vector<ShapeEstimate> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    ShapeEstimate e;
    const auto& kind = t.cell(r, "direction_kind");
    const auto& value = t.cell(r, "q_or_p_or_xy");
    if (kind == "q") {
      e.direction = Direction::perp(csv_real(value));
    } else if (kind == "p") {
      e.direction = Direction::slope(csv_real(value));
    } else if (kind == "xy") {
      const auto semi = value.find(';');
      if (semi == std::string::npos) throw SchemaError("xy direction needs 'x;y'");
      e.direction = Direction::vector(csv_real(value.substr(0, semi)), csv_real(value.substr(semi + 1)));
    } else {
      throw SchemaError("unknown direction_kind '" + kind + "'");
    }
    e.n = static_cast<int>(csv_int(t.cell(r, "n")));
    e.reps = static_cast<int>(csv_int(t.cell(r, "reps")));
    e.seed = csv_seed(t.cell(r, "seed"));
    e.mean = csv_real(t.cell(r, "mean"));
    e.std_error = csv_real(t.cell(r, "stderr"));
    const auto& norm = t.cell(r, "normalization");
    if (norm == "per-n") e.normalization = Normalization::PerN;
    else if (norm == "per-half-perimeter") e.normalization = Normalization::PerHalfPerimeter;
    else throw SchemaError("unknown normalization '" + norm + "'");
    e.s = s;
    const auto [tx, ty] = e.direction.target(e.n);
    e.endpoint = {static_cast<int>(std::lround(tx)), static_cast<int>(std::lround(ty))};
    e.rounding_bias_x = e.endpoint.x - tx;
    e.rounding_bias_y = e.endpoint.y - ty;
    out.push_back(e);
  }
  return out;
}

// ---- deviation summaries ----

inline CsvTable deviation_table(bool with_dist) {
  CsvTable t{{"n", "s", "mode", "reps", "quantile", "value", "ci_lo", "ci_hi"}, {}};
  if (with_dist) t.header.push_back("dist");
  return t;
}

inline CsvTable deviation_samples_table() { return {{"n", "mode", "replication", "max_dev"}, {}}; }

inline void add_rows(CsvTable& t, const DeviationSummary& d) {
  const bool with_dist = t.header.back() == "dist";
  for (const auto& q : d.quantiles) {
    std::vector<std::string> row{std::to_string(d.n), csv_real_cell(d.s), d.mode, std::to_string(d.reps),
                                 format_real(q.level), format_real(q.value), format_real(q.ci.lo),
                                 format_real(q.ci.hi)};
    if (with_dist) row.push_back(d.descriptor);
    t.add(std::move(row));
  }
}

inline void add_samples(CsvTable& t, const DeviationSummary& d) {
  for (std::size_t r = 0; r < d.values.size(); ++r)
    t.add({std::to_string(d.n), d.mode, std::to_string(r), format_real(d.values[r])});
}

/// Rebuilds summaries from the quantile rows and, when given, the
/// per-replication samples.
inline std::vector<DeviationSummary> read_deviation_summaries(const CsvTable& t, const CsvTable* samples = nullptr) {
  t.require_columns({"n", "s", "mode", "reps", "quantile", "value", "ci_lo", "ci_hi"});
  const bool with_dist = std::find(t.header.begin(), t.header.end(), "dist") != t.header.end();
  std::vector<DeviationSummary> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const int n = static_cast<int>(csv_int(t.cell(r, "n")));
    const auto& mode = t.cell(r, "mode");
    if (out.empty() || out.back().n != n || out.back().mode != mode) {
      DeviationSummary d;
      d.n = n;
      d.s = csv_real(t.cell(r, "s"));
      d.mode = mode;
      d.reps = static_cast<int>(csv_int(t.cell(r, "reps")));
      if (with_dist) d.descriptor = t.cell(r, "dist");
      out.push_back(std::move(d));
    }
    out.back().quantiles.push_back({csv_real(t.cell(r, "quantile")), csv_real(t.cell(r, "value")),
                                    {csv_real(t.cell(r, "ci_lo")), csv_real(t.cell(r, "ci_hi"))}});
  }
  if (samples) {
    samples->require_columns({"n", "mode", "replication", "max_dev"});
    for (std::size_t r = 0; r < samples->rows.size(); ++r) {
      const int n = static_cast<int>(csv_int(samples->cell(r, "n")));
      const auto& mode = samples->cell(r, "mode");
      auto it = std::find_if(out.begin(), out.end(), [&](const auto& d) { return d.n == n && d.mode == mode; });
      if (it == out.end()) throw SchemaError("sample row for unknown scale n=" + std::to_string(n));
      it->values.push_back(csv_real(samples->cell(r, "max_dev")));
    }
  }
  return out;
}

// ---- event A ----

struct EventARow {
  int n = 0;
  int k = 0;
  SkewPolicy policy;
  double s = 0.0;
  std::uint64_t seed = 0;
  int reps = 0;
  double p_hat = 0.0;
  double std_error = 0.0;

  friend bool operator==(const EventARow&, const EventARow&) = default;
};

inline CsvTable event_a_table() {
  return {{"n", "k", "eta", "p1", "p2", "s", "seed", "reps", "p_hat", "stderr"}, {}};
}

inline CsvTable event_a_fields_table() {
  return {{"n", "k", "replication", "m", "threshold", "max_skew_count", "holds", "passage_time"}, {}};
}

inline void add_row(CsvTable& t, const EventARow& e) {
  t.add({std::to_string(e.n), std::to_string(e.k), format_real(e.policy.eta), format_real(e.policy.p1),
         format_real(e.policy.p2), format_real(e.s), std::to_string(e.seed), std::to_string(e.reps),
         format_real(e.p_hat), format_real(e.std_error)});
}

inline void add_field_rows(CsvTable& t, int n, int k, const EventAEstimate& est) {
  for (std::size_t r = 0; r < est.reports.size(); ++r) {
    const auto& rep = est.reports[r];
    t.add({std::to_string(n), std::to_string(k), std::to_string(r), std::to_string(rep.m),
           std::to_string(rep.threshold), std::to_string(rep.max_skew_count), rep.holds ? "1" : "0",
           std::to_string(rep.passage_time)});
  }
}

inline std::vector<EventARow> read_event_a_rows(const CsvTable& t) {
  t.require_columns({"n", "k", "eta", "p1", "p2", "s", "seed", "reps", "p_hat", "stderr"});
  std::vector<EventARow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({static_cast<int>(csv_int(t.cell(r, "n"))), static_cast<int>(csv_int(t.cell(r, "k"))),
                   {csv_real(t.cell(r, "eta")), csv_real(t.cell(r, "p1")), csv_real(t.cell(r, "p2"))},
                   csv_real(t.cell(r, "s")), csv_seed(t.cell(r, "seed")),
                   static_cast<int>(csv_int(t.cell(r, "reps"))), csv_real(t.cell(r, "p_hat")),
                   csv_real(t.cell(r, "stderr"))});
  return out;
}

// ---- containment ----

struct ContainmentRow {
  int n = 0;
  double s = 0.0;
  std::string mode;
  double width = 0.0;
  int reps = 0;
  std::uint64_t seed = 0;
  double p_hat = 0.0;
  double std_error = 0.0;

  friend bool operator==(const ContainmentRow&, const ContainmentRow&) = default;
};

inline CsvTable containment_table() {
  return {{"n", "s", "mode", "width", "reps", "seed", "p_hat", "stderr"}, {}};
}

inline void add_row(CsvTable& t, const ContainmentRow& c) {
  t.add({std::to_string(c.n), format_real(c.s), c.mode, format_real(c.width), std::to_string(c.reps),
         std::to_string(c.seed), format_real(c.p_hat), format_real(c.std_error)});
}

inline std::vector<ContainmentRow> read_containment_rows(const CsvTable& t) {
  t.require_columns({"n", "s", "mode", "width", "reps", "seed", "p_hat", "stderr"});
  std::vector<ContainmentRow> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    out.push_back({static_cast<int>(csv_int(t.cell(r, "n"))), csv_real(t.cell(r, "s")), t.cell(r, "mode"),
                   csv_real(t.cell(r, "width")), static_cast<int>(csv_int(t.cell(r, "reps"))),
                   csv_seed(t.cell(r, "seed")), csv_real(t.cell(r, "p_hat")), csv_real(t.cell(r, "stderr"))});
  return out;
}

// ---- invariant suites ----

inline CsvTable suite_table() { return {{"suite", "check", "trials", "failures"}, {}}; }

}  // namespace glab
