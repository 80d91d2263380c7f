#pragma once

// Pointwise complex exterior algebra on the generators dz^a, dz-bar^a, dv^i,
// dv-bar^i. Generator g corresponds to slot g of the CoordinateFrame, so a
// monomial is a bitmask and its canonical ordering is ascending slot order.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "finslerforms/frame.hpp"

namespace finslerforms::forms {

using Mask = std::uint32_t;

enum class Split { total, horizontal, vertical };

Mask horizontal_mask(const CoordinateFrame& frame);
Mask vertical_mask(const CoordinateFrame& frame);
int unbarred_count(Mask m);
int barred_count(Mask m);

// Sign of (monomial a) ^ (monomial b) relative to the canonical ordering of a|b;
// zero when they share a generator.
int wedge_sign(Mask a, Mask b);

class Form {
 public:
  using Term = std::pair<Mask, cd>;

  Form() = default;
  explicit Form(const CoordinateFrame& frame) : frame_(frame) {}

  static Form scalar(const CoordinateFrame& frame, cd value);
  static Form generator(const CoordinateFrame& frame, int slot, cd coef = 1.0);
  static Form dz(const CoordinateFrame& frame, int alpha) {
    return generator(frame, CoordinateFrame::holo_slot(frame.base_coord(alpha)));
  }
  static Form dzbar(const CoordinateFrame& frame, int alpha) {
    return generator(frame, CoordinateFrame::anti_slot(frame.base_coord(alpha)));
  }
  static Form dv(const CoordinateFrame& frame, int i) {
    return generator(frame, CoordinateFrame::holo_slot(frame.fiber_coord(i)));
  }
  static Form dvbar(const CoordinateFrame& frame, int i) {
    return generator(frame, CoordinateFrame::anti_slot(frame.fiber_coord(i)));
  }

  const CoordinateFrame& frame() const { return frame_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  cd coefficient(Mask m) const;
  // Adds to the coefficient of an already canonical monomial.
  void add(Mask m, cd coef);

  double max_abs() const;
  // Degree of every term, or -1 for a mixed-degree form; 0 for the zero form.
  int degree() const;
  bool is_even() const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);
  Form& operator*=(cd s);

 private:
  CoordinateFrame frame_;
  std::vector<Term> terms_;  // sorted by mask, no duplicates

  void require_same_frame(const Form& other) const;
  friend Form wedge(const Form& a, const Form& b);
  friend Form from_terms(const CoordinateFrame& frame, std::vector<Term> raw);
};

// Sorts and merges duplicate monomials, dropping exact zeros.
Form from_terms(const CoordinateFrame& frame, std::vector<Form::Term> raw);

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator-(Form a);
Form operator*(Form a, cd s);
Form operator*(cd s, Form a);

Form wedge(const Form& a, const Form& b);
Form power(const Form& a, int k);

Form bidegree_extract(const Form& a, int p, int q, Split split = Split::total);
// Total-degree piece.
Form degree_extract(const Form& a, int k);
// Drops every term containing one of the generators in `dropped`.
Form drop_generators(const Form& a, Mask dropped);

// Replaces each generator slot s by the one-form images[s] (linear substitution).
Form substitute(const Form& a, std::span<const Form> images);

// Connection data for the horizontal-vertical splitting
//   delta v^k = dv^k + N^k_a dz^a,  N^k_a = Gamma^k_{j a} v^j,
// and its conjugate for dv-bar.
struct DeltaShift {
  CoordinateFrame frame;
  std::vector<cd> N;  // N[k * n + a]

  cd at(int k, int a) const { return N[k * frame.n + a]; }
};

// gamma is indexed gamma[(k * r + j) * n + a] = Gamma^k_{j a}.
DeltaShift make_delta_shift(const CoordinateFrame& frame, std::span<const cd> gamma,
                            std::span<const cd> v);

enum class DeltaDirection { to_delta, from_delta };

// to_delta: input over {dz, dv}, output with dv-slots reinterpreted as delta v.
// from_delta: the inverse rewrite.
Form delta_basis(const Form& a, const DeltaShift& shift, DeltaDirection direction);

class FormMatrix {
 public:
  FormMatrix() = default;
  FormMatrix(const CoordinateFrame& frame, int size);

  int size() const { return size_; }
  const CoordinateFrame& frame() const { return frame_; }
  Form& operator()(int i, int j) { return entries_[i * size_ + j]; }
  const Form& operator()(int i, int j) const { return entries_[i * size_ + j]; }

 private:
  CoordinateFrame frame_;
  int size_ = 0;
  std::vector<Form> entries_;
};

// det(I + scale * M) for a matrix of even forms, by cofactor expansion.
Form det_plus_identity(const FormMatrix& m, cd scale);

// phi(Y_1, ..., Y_k) for a k-form: sum over monomials of coef * det[g_a(Y_b)].
// vectors[b][slot] is the value of generator `slot` on Y_b.
cd evaluate_on_vectors(const Form& a, std::span<const CVector> vectors);

}  // namespace finslerforms::forms
