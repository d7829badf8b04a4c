#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "glab/decomposition.hpp"
#include "glab/digest.hpp"
#include "glab/error.hpp"
#include "glab/lcs.hpp"
#include "glab/shape.hpp"

namespace glab {

// Flat "key = value" experiment configuration. Every key has a declared type;
// lists are comma separated (surrounding brackets optional), '#' starts a
// comment.

enum class ValueKind { Bool, Int, Seed, Real, Text, IntList, RealList };

using Value = std::variant<bool, std::int64_t, std::uint64_t, double, std::string, std::vector<std::int64_t>,
                           std::vector<double>>;

struct KeySpec {
  std::string_view name;
  ValueKind kind;
  bool runtime;  // excluded from the canonical form and the hash
};

inline constexpr KeySpec kConfigKeys[] = {
    {"alphabet", ValueKind::Int, false},    {"dist", ValueKind::RealList, false},
    {"dump_fields", ValueKind::Bool, false}, {"eta", ValueKind::Real, false},
    {"experiment", ValueKind::Text, false},  {"k", ValueKind::Int, false},
    {"k_list", ValueKind::IntList, false},   {"m", ValueKind::Int, false},
    {"master_seed", ValueKind::Seed, false}, {"max_cells", ValueKind::Int, false},
    {"max_side", ValueKind::Int, false},     {"model", ValueKind::Text, false},
    {"n", ValueKind::Int, false},            {"n_list", ValueKind::IntList, false},
    {"output_dir", ValueKind::Text, true},   {"p", ValueKind::Real, false},
    {"p1", ValueKind::Real, false},          {"p2", ValueKind::Real, false},
    {"q", ValueKind::Real, false},           {"q_list", ValueKind::RealList, false},
    {"q_window", ValueKind::RealList, false}, {"quantile", ValueKind::Real, false},
    {"reps", ValueKind::Int, false},         {"s", ValueKind::Real, false},
    {"width", ValueKind::Real, false},       {"workers", ValueKind::Int, true},
    {"xy", ValueKind::RealList, false},
};

inline const KeySpec& key_spec(std::string_view key) {
  for (const auto& spec : kConfigKeys)
    if (spec.name == key) return spec;
  throw SchemaError("unknown config key '" + std::string(key) + "'");
}

inline constexpr std::string_view kExperiments[] = {
    "shape-point", "shape-curvature", "convergence",    "event-a",        "deviation-profile", "xi-fit",
    "containment", "lcs-profile",     "oracle-suite",   "resample-suite", "partition-suite",
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw DomainError("config key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value)) throw DomainError("config key '" + std::string(key) + "' must be finite");
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') text = text.substr(1, text.size() - 2);
  std::vector<T> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_number<T>(key, text.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline Value parse_value(std::string_view key, std::string_view text) {
  switch (key_spec(key).kind) {
    case ValueKind::Bool:
      if (detail::trim(text) == "true") return true;
      if (detail::trim(text) == "false") return false;
      throw DomainError("config key '" + std::string(key) + "' must be true or false");
    case ValueKind::Int: return detail::parse_number<std::int64_t>(key, text);
    case ValueKind::Seed: return detail::parse_number<std::uint64_t>(key, text);
    case ValueKind::Real: return detail::parse_number<double>(key, text);
    case ValueKind::Text: return std::string(detail::trim(text));
    case ValueKind::IntList: return detail::parse_list<std::int64_t>(key, text);
    case ValueKind::RealList: return detail::parse_list<double>(key, text);
  }
  throw SchemaError("unhandled value kind");
}

inline std::string format_value(const Value& value) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_real(v); }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(const std::vector<std::int64_t>& v) const {
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
      return out;
    }
    std::string operator()(const std::vector<double>& v) const {
      std::string out;
      for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
      return out;
    }
  };
  return std::visit(Visitor{}, value);
}

class Config {
 public:
  static Config parse(std::string_view text) {
    Config config;
    std::size_t line_no = 0;
    while (!text.empty()) {
      const auto eol = text.find('\n');
      std::string_view line = text.substr(0, eol);
      text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw SchemaError("config line " + std::to_string(line_no) + ": expected key = value");
      std::string key(detail::trim(line.substr(0, eq)));
      if (key == "seed") key = "master_seed";
      if (config.values_.count(key))
        throw SchemaError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      config.values_.emplace(key, parse_value(key, line.substr(eq + 1)));
    }
    return config;
  }

  static Config load(const std::string& path) {
    try {
      return parse(read_file(path));
    } catch (const IoError& e) {
      throw DomainError(std::string("config file: ") + e.what());
    }
  }

  /// One "key = value" line per key in sorted order. The canonical form
  /// leaves out runtime-only keys (workers, output_dir).
  std::string serialize(bool canonical = false) const {
    std::string out;
    for (const auto& [key, value] : values_) {
      if (canonical && key_spec(key).runtime) continue;
      out += key + " = " + format_value(value) + "\n";
    }
    return out;
  }

  std::string hash() const { return sha256_hex(serialize(true)); }

  bool has(std::string_view key) const { return values_.find(key) != values_.end(); }

  void set(std::string_view key, Value value) {
    const auto kind = key_spec(key).kind;
    if (static_cast<std::size_t>(kind) != value.index())
      throw SchemaError("config key '" + std::string(key) + "' given a value of the wrong type");
    values_.insert_or_assign(std::string(key), std::move(value));
  }

  void erase(std::string_view key) {
    if (auto it = values_.find(key); it != values_.end()) values_.erase(it);
  }

  template <typename T>
  const T& get(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw DomainError("config key '" + std::string(key) + "' is required");
    if (const T* v = std::get_if<T>(&it->second)) return *v;
    throw SchemaError("config key '" + std::string(key) + "' read with the wrong type");
  }

  template <typename T>
  T get_or(std::string_view key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  const std::map<std::string, Value, std::less<>>& values() const noexcept { return values_; }

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::map<std::string, Value, std::less<>> values_;
};

// Typed accessors with defaults shared by validation and the runner.

inline std::string experiment_of(const Config& c) { return c.get<std::string>("experiment"); }
inline std::uint64_t master_seed_of(const Config& c) { return c.get_or<std::uint64_t>("master_seed", 0); }
inline unsigned workers_of(const Config& c) { return static_cast<unsigned>(c.get_or<std::int64_t>("workers", 1)); }
inline double s_of(const Config& c) { return c.get_or("s", 0.5); }

inline int as_int(std::int64_t v, std::string_view key) {
  require(v >= 0 && v <= kMaxSide * 4LL, "config key '" + std::string(key) + "' out of range");
  return static_cast<int>(v);
}

inline PathMode mode_of(const Config& c) {
  const auto model = c.get_or<std::string>("model", "dlpp");
  if (model == "dlpp") return PathMode::LastPassage;
  if (model == "dfpp") return PathMode::FirstPassage;
  throw DomainError("model '" + model + "' is not a percolation model");
}

inline std::vector<int> n_list_of(const Config& c) {
  std::vector<int> out;
  if (c.has("n_list")) {
    for (auto v : c.get<std::vector<std::int64_t>>("n_list")) out.push_back(as_int(v, "n_list"));
  } else {
    out.push_back(as_int(c.get<std::int64_t>("n"), "n"));
  }
  return out;
}

inline SkewPolicy policy_of(const Config& c) {
  return {c.get_or("eta", 0.5), c.get_or("p1", 0.5), c.get_or("p2", 2.0)};
}

inline Capacity capacity_of(const Config& c) {
  Capacity cap;
  if (c.has("max_cells")) cap.max_cells = static_cast<std::uint64_t>(c.get<std::int64_t>("max_cells"));
  return cap;
}

inline std::vector<double> dist_of(const Config& c) {
  const int k = static_cast<int>(c.get_or<std::int64_t>("alphabet", 2));
  return c.has("dist") ? c.get<std::vector<double>>("dist") : uniform_distribution(std::max(k, 2));
}

inline Direction direction_of(const Config& c) {
  const int given = static_cast<int>(c.has("q")) + static_cast<int>(c.has("p")) + static_cast<int>(c.has("xy"));
  require(given <= 1, "give at most one of q, p, xy");
  if (c.has("p")) return Direction::slope(c.get<double>("p"));
  if (c.has("xy")) {
    const auto& xy = c.get<std::vector<double>>("xy");
    require(xy.size() == 2, "xy must have two entries");
    return Direction::vector(xy[0], xy[1]);
  }
  return Direction::perp(c.get_or("q", 0.0));
}

inline std::pair<double, double> q_window_of(const Config& c) {
  if (!c.has("q_window")) return {0.0, 0.5};
  const auto& w = c.get<std::vector<double>>("q_window");
  require(w.size() == 2, "q_window must have two entries");
  return {w[0], w[1]};
}

/// Checks every key the experiment reads, before anything is computed.
inline void validate_config(const Config& c) {
  const auto experiment = experiment_of(c);
  if (std::find(std::begin(kExperiments), std::end(kExperiments), experiment) == std::end(kExperiments))
    throw DomainError("unknown experiment '" + experiment + "'");

  const bool suite = experiment.size() > 6 && experiment.ends_with("-suite");
  const bool lcs = experiment == "lcs-profile";
  const auto model = c.get_or<std::string>("model", lcs ? "lcs" : "dlpp");
  if (lcs) require(model == "lcs", "lcs-profile needs model = lcs");
  else if (!suite) mode_of(c);

  if (c.has("workers")) require(c.get<std::int64_t>("workers") >= 1, "workers must be at least 1");
  if (c.has("max_cells")) require(c.get<std::int64_t>("max_cells") >= 1, "max_cells must be positive");
  if (c.has("output_dir")) require(!c.get<std::string>("output_dir").empty(), "output_dir must not be empty");
  const auto reps = c.get_or<std::int64_t>("reps", suite ? 1 : 0);
  require(reps >= 1 && reps <= 100000000, "reps must be a positive integer");
  if (!suite && !lcs) {
    const double s = s_of(c);
    require(s > 0.0 && s < 1.0, "s must lie in (0,1), got " + format_real(s));
  }

  if (suite) {
    if (c.has("k_list"))
      for (auto k : c.get<std::vector<std::int64_t>>("k_list")) require(k >= 1, "k_list entries must be positive");
    if (c.has("max_side")) require(c.get<std::int64_t>("max_side") >= 2, "max_side must be at least 2");
    if (c.has("n")) require(c.get<std::int64_t>("n") >= 1, "n must be positive");
    return;
  }

  const bool needs_list = experiment == "convergence" || experiment == "deviation-profile" ||
                          experiment == "xi-fit" || lcs || experiment == "event-a" ||
                          experiment == "shape-point";
  if (!needs_list) require(!c.has("n_list"), experiment + " takes a single n");
  require(c.has("n") || c.has("n_list"), "n or n_list is required");
  require(!(c.has("n") && c.has("n_list")), "give n or n_list, not both");
  const auto ns = n_list_of(c);
  require(!ns.empty(), "n_list must not be empty");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    require(ns[i] >= 1 && ns[i] <= kMaxSide, "n must lie in [1, 65536]");
    if (i) require(ns[i] > ns[i - 1], "n_list must be strictly increasing");
  }

  if (experiment == "shape-point" || experiment == "shape-curvature" || experiment == "convergence")
    require(reps >= 2, experiment + " needs reps >= 2");
  if (experiment == "shape-point") direction_of(c);
  if (experiment == "shape-curvature") {
    require(c.has("q_list"), "shape-curvature needs q_list");
    for (double q : c.get<std::vector<double>>("q_list")) require(q > -1.0 && q < 1.0, "q_list entries must lie in (-1,1)");
    const auto w = q_window_of(c);
    require(w.first >= 0.0 && w.first <= w.second, "q_window must be an increasing pair of non-negative values");
  }
  if (experiment == "event-a") {
    policy_of(c).validate();
    require(c.has("k") != c.has("m"), "event-a needs exactly one of k (block width) or m (block count)");
    for (int n : ns) {
      if (c.has("k")) {
        const auto k = c.get<std::int64_t>("k");
        require(k >= 1 && n % k == 0, "k must divide every n");
      } else {
        const auto m = c.get<std::int64_t>("m");
        require(m >= 1 && n % m == 0, "m must divide every n");
      }
    }
  }
  if (experiment == "xi-fit" || experiment == "deviation-profile") {
    const double q = c.get_or("quantile", 0.5);
    require(q > 0.0 && q <= 1.0, "quantile must lie in (0,1]");
  }
  if (experiment == "xi-fit") require(ns.size() >= 4, "xi-fit needs at least four scales");
  if (experiment == "containment") {
    require(c.has("width"), "containment needs width");
    const double w = c.get<double>("width");
    require(w >= 0.0 && w <= ns[0], "width must lie in [0, n]");
  }
  if (lcs) {
    const auto k = c.get_or<std::int64_t>("alphabet", 2);
    require(k >= 2 && k <= 256, "alphabet must lie in [2, 256]");
    validate_distribution(static_cast<int>(k), dist_of(c));
  }
}

}  // namespace glab
