#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace finslerforms {

using cd = std::complex<double>;
using CVector = std::vector<cd>;

inline constexpr cd kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Coordinate enumeration shared by jets and forms.
//
// Holomorphic coordinates are numbered z^1..z^n (indices 0..n-1) followed by
// v^1..v^r (indices n..n+r-1). Coordinate c owns two slots: 2c for the
// holomorphic direction and 2c+1 for its conjugate. Jets use the slots as
// Taylor variables (w, w-bar); forms use them as the generators dw, dw-bar.
struct CoordinateFrame {
  int n = 1;
  int r = 1;

  CoordinateFrame() = default;
  CoordinateFrame(int base_dim, int rank);

  int coords() const { return n + r; }
  int slots() const { return 2 * (n + r); }
  int base_coord(int alpha) const { return alpha; }
  int fiber_coord(int i) const { return n + i; }

  static constexpr int holo_slot(int coord) { return 2 * coord; }
  static constexpr int anti_slot(int coord) { return 2 * coord + 1; }

  friend bool operator==(const CoordinateFrame&, const CoordinateFrame&) = default;
};

std::string to_string(const CoordinateFrame& frame);

}  // namespace finslerforms
