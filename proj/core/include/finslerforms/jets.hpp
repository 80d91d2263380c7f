#pragma once

// Truncated multivariate Taylor jets in the Wirtinger variables (w, w-bar) of a
// CoordinateFrame. A jet of order m stores every Taylor coefficient of total
// degree <= m; mixed Wirtinger derivatives are read off directly:
//
//   d^{|A|+|B|} f / dw^A dw-bar^B = A! B! * coeff[A, B],
//
// with d/dw = (d/dx - i d/dy)/2 and d/dw-bar = (d/dx + i d/dy)/2.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "finslerforms/frame.hpp"

namespace finslerforms::jets {

inline constexpr int kMaxOrder = 4;
inline constexpr int kMaxSlots = 16;

// Exponent per slot (see CoordinateFrame for the slot enumeration).
using MultiIndex = std::array<std::uint8_t, kMaxSlots>;

int degree(const MultiIndex& idx);

// Dense coefficient layout shared by all jets with the same (slots, order,
// frozen). Frozen slots carry no monomials.
class Layout {
 public:
  struct Pair {
    std::uint16_t rhs;
    std::uint16_t out;
  };

  static std::shared_ptr<const Layout> get(int slots, int order, std::uint32_t frozen = 0);

  Layout(int slots, int order, std::uint32_t frozen = 0);

  int slots() const { return slots_; }
  int order() const { return order_; }
  std::uint32_t frozen() const { return frozen_; }
  int size() const { return static_cast<int>(indices_.size()); }

  const MultiIndex& index(int k) const { return indices_[k]; }
  int degree_of(int k) const { return degrees_[k]; }
  // Returns -1 when the index exceeds the truncation order.
  int position(const MultiIndex& idx) const;
  double factorial(int k) const { return factorials_[k]; }
  int conj_position(int k) const { return conj_[k]; }
  // Products c[out] += a[k] * b[rhs] for every admissible rhs.
  std::span<const Pair> pairs(int k) const;

 private:
  int slots_;
  int order_;
  std::uint32_t frozen_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degrees_;
  std::vector<double> factorials_;
  std::vector<int> conj_;
  std::vector<Pair> pairs_;
  std::vector<std::size_t> pair_offsets_;
  std::vector<std::pair<std::uint64_t, int>> lookup_;  // sorted by key
};

// Expansion point shared by every jet of one evaluation.
class Context {
 public:
  Context(const CoordinateFrame& frame, CVector basepoint, int order, bool fiber_only = false);

  const CoordinateFrame& frame() const { return frame_; }
  int order() const { return order_; }
  const CVector& basepoint() const { return basepoint_; }
  const Layout& layout() const { return *layout_; }
  bool frozen(int coord) const;

 private:
  CoordinateFrame frame_;
  int order_;
  CVector basepoint_;
  std::shared_ptr<const Layout> layout_;
};

using ContextPtr = std::shared_ptr<const Context>;

// basepoint lists z^1..z^n then v^1..v^r. fiber_only freezes z^1..z^n, so
// jets carry derivatives in the fiber coordinates only.
ContextPtr make_context(const CoordinateFrame& frame, CVector basepoint, int order = kMaxOrder,
                        bool fiber_only = false);

class Jet {
 public:
  Jet() = default;
  explicit Jet(ContextPtr ctx);
  Jet(ContextPtr ctx, cd value);

  const Context& context() const { return *ctx_; }
  const ContextPtr& context_ptr() const { return ctx_; }
  bool valid() const { return ctx_ != nullptr; }

  cd value() const { return c_[0]; }
  cd coefficient(int k) const { return c_[k]; }
  std::span<const cd> coefficients() const { return c_; }
  std::span<cd> coefficients() { return c_; }

  // Taylor coefficient and the corresponding mixed derivative.
  cd taylor(const MultiIndex& idx) const;
  cd derivative(const MultiIndex& idx) const;

  Jet& operator+=(const Jet& other);
  Jet& operator-=(const Jet& other);
  Jet& operator*=(const Jet& other);
  Jet& operator/=(const Jet& other);
  Jet& operator+=(cd s);
  Jet& operator-=(cd s);
  Jet& operator*=(cd s);
  Jet& operator/=(cd s);

 private:
  ContextPtr ctx_;
  std::vector<cd> c_;

  void require_compatible(const Jet& other) const;
  friend Jet multiply(const Jet& a, const Jet& b);
};

Jet operator-(const Jet& a);
Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator+(Jet a, cd s);
Jet operator+(cd s, Jet a);
Jet operator-(Jet a, cd s);
Jet operator-(cd s, const Jet& a);
Jet operator*(Jet a, cd s);
Jet operator*(cd s, Jet a);
Jet operator/(Jet a, cd s);
Jet operator/(cd s, const Jet& a);

Jet multiply(const Jet& a, const Jet& b);
Jet reciprocal(const Jet& a);
Jet log(const Jet& a);
Jet exp(const Jet& a);
Jet pow(const Jet& a, double p);
Jet conj(const Jet& a);
Jet re(const Jet& a);

// One exact coordinate jet per holomorphic coordinate (z^1..z^n, v^1..v^r).
// Conjugate coordinates come from conj().
std::vector<Jet> seed(const ContextPtr& ctx);
Jet coordinate(const ContextPtr& ctx, int coord);

// Multisets of holomorphic coordinate indices (in CoordinateFrame numbering).
struct WirtingerIndex {
  std::vector<int> holo;
  std::vector<int> anti;

  int order() const { return static_cast<int>(holo.size() + anti.size()); }
  MultiIndex multi_index() const;
};

cd wirtinger(const Jet& j, const WirtingerIndex& idx);

// Mixed partial in real coordinates: slot 2c is Re(coord c), 2c+1 is Im(coord c).
cd real_partial(const Jet& j, std::span<const int> real_slots);

// Conjugate symmetry D_{A,B-bar} f = conj(D_{B,A-bar} f), relative to max(1, |f|).
bool is_real(const Jet& j, double tol = 1e-10);
void require_real(const Jet& j, double tol = 1e-10);

}  // namespace finslerforms::jets
