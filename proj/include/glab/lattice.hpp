#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "glab/error.hpp"
#include "glab/rng.hpp"

namespace glab {

struct Point {
  int x = 0;
  int y = 0;

  friend constexpr bool operator==(Point, Point) = default;
};

/// Coordinatewise order: a <= b when a.x <= b.x and a.y <= b.y.
constexpr bool dominated(Point a, Point b) noexcept { return a.x <= b.x && a.y <= b.y; }

constexpr int l1_distance(Point a, Point b) noexcept {
  return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y);
}

inline constexpr int kMaxSide = 1 << 16;

/// Random 0/1 vertex weights on the grid {0..nx} x {0..ny}.
///
/// Weights are stored row-major by y. A field made by generate_field() can be
/// regenerated bit-for-bit from (nx, ny, s, seed); fields built from explicit
/// arrays (fixtures, resampled fields) carry their parent's seed as metadata
/// only.
class WeightField {
 public:
  WeightField() = default;

  static WeightField from_weights(int nx, int ny, double s, std::vector<std::uint8_t> weights,
                                  std::uint64_t seed = 0) {
    check_dims(nx, ny, s);
    const auto cells = static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1);
    require(weights.size() == cells, "weight array size does not match (nx+1)*(ny+1)");
    for (auto w : weights) require(w <= 1, "weights must be 0 or 1");
    WeightField f;
    f.nx_ = nx;
    f.ny_ = ny;
    f.s_ = s;
    f.seed_ = seed;
    f.weights_ = std::move(weights);
    return f;
  }

  /// Constant field, mostly for fixtures.
  static WeightField filled(int nx, int ny, std::uint8_t value, double s = 0.5) {
    check_dims(nx, ny, s);
    return from_weights(
        nx, ny, s,
        std::vector<std::uint8_t>(static_cast<std::size_t>(nx + 1) * (ny + 1), value));
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double s() const noexcept { return s_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Point corner() const noexcept { return {nx_, ny_}; }

  bool contains(Point p) const noexcept { return p.x >= 0 && p.y >= 0 && p.x <= nx_ && p.y <= ny_; }

  std::uint8_t operator()(int x, int y) const noexcept {
    return weights_[static_cast<std::size_t>(y) * stride() + static_cast<std::size_t>(x)];
  }
  std::uint8_t operator()(Point p) const noexcept { return (*this)(p.x, p.y); }

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {weights_.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }
  std::span<const std::uint8_t> weights() const noexcept { return weights_; }

  /// Copy with one weight replaced.
  WeightField with_weight(Point p, std::uint8_t value) const {
    require(contains(p), "with_weight: vertex outside the grid");
    require(value <= 1, "with_weight: weight must be 0 or 1");
    WeightField copy = *this;
    copy.weights_[static_cast<std::size_t>(p.y) * stride() + static_cast<std::size_t>(p.x)] = value;
    return copy;
  }

  friend bool operator==(const WeightField&, const WeightField&) = default;

  static void check_dims(int nx, int ny, double s) {
    require(nx >= 1 && ny >= 1, "grid must have positive width and height");
    require(nx <= kMaxSide && ny <= kMaxSide, "grid side exceeds 2^16");
    require(s > 0.0 && s < 1.0, "Bernoulli parameter s must lie in (0,1)");
  }

 private:
  std::size_t stride() const noexcept { return static_cast<std::size_t>(nx_) + 1; }

  int nx_ = 0;
  int ny_ = 0;
  double s_ = 0.5;
  std::uint64_t seed_ = 0;
  std::vector<std::uint8_t> weights_;
};

/// I.i.d. Bernoulli(s) field. Vertex (x, y) gets vertex_bernoulli(seed, x, y, s),
/// i.e. a SplitMix64 mix of the seed and the packed coordinates, so the
/// result does not depend on fill order.
inline WeightField generate_field(int nx, int ny, double s, std::uint64_t seed) {
  WeightField::check_dims(nx, ny, s);
  std::vector<std::uint8_t> w(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(ny + 1));
  std::size_t i = 0;
  for (int y = 0; y <= ny; ++y)
    for (int x = 0; x <= nx; ++x) w[i++] = vertex_bernoulli(seed, x, y, s);
  return WeightField::from_weights(nx, ny, s, std::move(w), seed);
}

/// Field with axes swapped: result(x, y) == field(y, x).
inline WeightField transpose(const WeightField& field) {
  std::vector<std::uint8_t> w(field.weights().size());
  std::size_t i = 0;
  for (int y = 0; y <= field.nx(); ++y)
    for (int x = 0; x <= field.ny(); ++x) w[i++] = field(y, x);
  return WeightField::from_weights(field.ny(), field.nx(), field.s(), std::move(w), field.seed());
}

/// Returns a copy of `field` whose weights on `vertices` are redrawn
/// i.i.d. Bernoulli(s) from the stream keyed by `resample_seed`.
inline WeightField resample_vertex_set(const WeightField& field, std::span<const Point> vertices,
                                       std::uint64_t resample_seed) {
  std::vector<std::uint8_t> w(field.weights().begin(), field.weights().end());
  const auto stride = static_cast<std::size_t>(field.nx()) + 1;
  for (Point p : vertices) {
    require(field.contains(p), "resample_vertex_set: vertex outside the grid");
    w[static_cast<std::size_t>(p.y) * stride + static_cast<std::size_t>(p.x)] =
        vertex_bernoulli(resample_seed, p.x, p.y, field.s());
  }
  return WeightField::from_weights(field.nx(), field.ny(), field.s(), std::move(w), field.seed());
}

/// The vertices {(x, y) : x + y == index} inside the grid, ordered by x.
inline std::vector<Point> anti_diagonal(const WeightField& field, int index) {
  std::vector<Point> out;
  for (int x = 0; x <= field.nx(); ++x) {
    const int y = index - x;
    if (y >= 0 && y <= field.ny()) out.push_back({x, y});
  }
  return out;
}

// Binary layout (all integers little-endian):
//   "GLAB1" | u32 nx | u32 ny | f64 s (IEEE-754 bits) | u64 seed | packed bits
// Bits run row-major (y outer, x inner), least significant bit first, and the
// final byte is zero-padded.
inline constexpr std::array<char, 5> kFieldMagic{'G', 'L', 'A', 'B', '1'};

namespace detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.put(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(std::istream& in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw IoError("truncated field header");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace detail

inline void write_field(std::ostream& out, const WeightField& field) {
  out.write(kFieldMagic.data(), kFieldMagic.size());
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.nx()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.ny()));
  std::uint64_t s_bits;
  const double s = field.s();
  std::memcpy(&s_bits, &s, sizeof s_bits);
  detail::put_le<std::uint64_t>(out, s_bits);
  detail::put_le<std::uint64_t>(out, field.seed());

  const auto w = field.weights();
  std::vector<char> packed((w.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
  out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
  if (!out) throw IoError("failed writing weight field");
}

inline WeightField read_field(std::istream& in) {
  std::array<char, 5> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kFieldMagic) throw IoError("not a GLAB1 weight field");
  const auto nx = detail::get_le<std::uint32_t>(in);
  const auto ny = detail::get_le<std::uint32_t>(in);
  const auto s_bits = detail::get_le<std::uint64_t>(in);
  const auto seed = detail::get_le<std::uint64_t>(in);
  double s;
  std::memcpy(&s, &s_bits, sizeof s);
  if (nx < 1 || ny < 1 || nx > kMaxSide || ny > kMaxSide) throw IoError("bad field dimensions");

  const std::size_t cells = static_cast<std::size_t>(nx + 1) * (ny + 1);
  std::vector<char> packed((cells + 7) / 8);
  in.read(packed.data(), static_cast<std::streamsize>(packed.size()));
  if (!in) throw IoError("truncated field body");
  std::vector<std::uint8_t> w(cells);
  for (std::size_t i = 0; i < cells; ++i)
    w[i] = static_cast<std::uint8_t>((static_cast<unsigned char>(packed[i / 8]) >> (i % 8)) & 1);
  return WeightField::from_weights(static_cast<int>(nx), static_cast<int>(ny), s, std::move(w), seed);
}

}  // namespace glab
