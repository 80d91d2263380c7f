#include "finslerforms/frame.hpp"

namespace finslerforms {

CoordinateFrame::CoordinateFrame(int base_dim, int rank) : n(base_dim), r(rank) {
  if (n < 1 || r < 1) {
    throw Error("coordinate frame needs n >= 1 and r >= 1, got n=" + std::to_string(n) +
                " r=" + std::to_string(r));
  }
  if (2 * (n + r) > 16) {
    throw Error("coordinate frame too large: 2(n+r) must not exceed 16");
  }
}

std::string to_string(const CoordinateFrame& frame) {
  return "(n=" + std::to_string(frame.n) + ", r=" + std::to_string(frame.r) + ")";
}

}  // namespace finslerforms
