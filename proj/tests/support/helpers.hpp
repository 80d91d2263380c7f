#pragma once

#include <cmath>
#include <random>

#include "finslerforms/frame.hpp"

namespace testing_support {

using finslerforms::cd;
using finslerforms::CVector;

inline CVector random_point(std::mt19937_64& rng, int size, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  CVector p(size);
  for (auto& x : p) x = {u(rng), u(rng)};
  return p;
}

// Fiber point bounded away from the zero section.
inline CVector random_fiber(std::mt19937_64& rng, int size) {
  CVector v = random_point(rng, size, 1.0);
  v[0] += cd{1.5, 0.0};
  return v;
}

inline cd random_lambda(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.3, 3.0), arg(0.0, 2.0 * finslerforms::kPi);
  return std::polar(mag(rng), arg(rng));
}

inline double rel_diff(cd a, cd b, double floor = 1.0) {
  return std::abs(a - b) / std::max(floor, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing_support
