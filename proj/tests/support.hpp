#pragma once

#include <cstdint>
#include <vector>

#include "glab/lattice.hpp"
#include "glab/rng.hpp"

namespace glab::fixtures {

// Bernoulli parameters cycled through by randomized tests.
inline double pick_s(std::uint64_t seed) {
  constexpr double choices[] = {0.2, 0.5, 0.8};
  return choices[seed % 3];
}

inline WeightField random_field(int nx, int ny, std::uint64_t seed) {
  return generate_field(nx, ny, pick_s(seed), mix64(0x7e57, seed));
}

// The 2 x 2 hand-checked fixture, rows listed from y = 0 upwards.
inline WeightField small_fixture() {
  return WeightField::from_weights(2, 2, 0.5, {0, 1, 1,  //
                                               0, 1, 0,  //
                                               1, 0, 1});
}

}  // namespace glab::fixtures
