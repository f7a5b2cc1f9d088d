#ifndef CAVESIM_TEST_SUPPORT_HPP
#define CAVESIM_TEST_SUPPORT_HPP

#include <random>

#include "cavesim/geometry.hpp"

namespace cavesim::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int uniform_int(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng());
}

inline Vec3 random_vec(double lo, double hi) {
  return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)};
}

inline EulerAngles random_attitude(double max_pitch = 1.5) {
  return {uniform(-3.1, 3.1), uniform(-max_pitch, max_pitch), uniform(-3.1, 3.1)};
}

}  // namespace cavesim::test

#endif  // CAVESIM_TEST_SUPPORT_HPP
