#include "finslerforms/exterior.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>

namespace finslerforms::forms {

namespace {

constexpr Mask kEvenSlots = 0x55555555u;

Mask slot_bit(int slot) { return Mask{1} << slot; }

}  // namespace

Mask horizontal_mask(const CoordinateFrame& frame) {
  return (Mask{1} << (2 * frame.n)) - 1;
}

Mask vertical_mask(const CoordinateFrame& frame) {
  return ((Mask{1} << frame.slots()) - 1) & ~horizontal_mask(frame);
}

int unbarred_count(Mask m) { return std::popcount(m & kEvenSlots); }
int barred_count(Mask m) { return std::popcount(m & ~kEvenSlots); }

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (Mask rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(a >> (j + 1));  // generators of a that sit after g_j
  }
  return (swaps & 1) ? -1 : 1;
}

Form Form::scalar(const CoordinateFrame& frame, cd value) {
  Form f(frame);
  if (value != cd{}) f.terms_.emplace_back(0, value);
  return f;
}

Form Form::generator(const CoordinateFrame& frame, int slot, cd coef) {
  if (slot < 0 || slot >= frame.slots()) throw Error("form generator slot out of range");
  Form f(frame);
  if (coef != cd{}) f.terms_.emplace_back(slot_bit(slot), coef);
  return f;
}

cd Form::coefficient(Mask m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask key) { return t.first < key; });
  return (it != terms_.end() && it->first == m) ? it->second : cd{};
}

void Form::add(Mask m, cd coef) {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, Mask key) { return t.first < key; });
  if (it != terms_.end() && it->first == m) {
    it->second += coef;
  } else {
    terms_.insert(it, {m, coef});
  }
}

double Form::max_abs() const {
  double m = 0.0;
  for (const auto& [mask, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

int Form::degree() const {
  if (terms_.empty()) return 0;
  const int d = std::popcount(terms_.front().first);
  for (const auto& t : terms_)
    if (std::popcount(t.first) != d) return -1;
  return d;
}

bool Form::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return std::popcount(t.first) % 2 == 0; });
}

void Form::require_same_frame(const Form& other) const {
  if (frame_ != other.frame_) {
    throw Error("form frame mismatch: " + to_string(frame_) + " vs " + to_string(other.frame_));
  }
}

Form& Form::operator+=(const Form& other) {
  require_same_frame(other);
  std::vector<Term> merged;
  merged.reserve(terms_.size() + other.terms_.size());
  auto a = terms_.cbegin();
  auto b = other.terms_.cbegin();
  while (a != terms_.cend() || b != other.terms_.cend()) {
    if (b == other.terms_.cend() || (a != terms_.cend() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.cend() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      merged.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

Form& Form::operator-=(const Form& other) { return *this += other * cd{-1.0}; }

Form& Form::operator*=(cd s) {
  for (auto& t : terms_) t.second *= s;
  return *this;
}

Form from_terms(const CoordinateFrame& frame, std::vector<Form::Term> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const Form::Term& x, const Form::Term& y) { return x.first < y.first; });
  Form out(frame);
  for (const auto& t : raw) {
    if (!out.terms_.empty() && out.terms_.back().first == t.first) {
      out.terms_.back().second += t.second;
    } else {
      out.terms_.push_back(t);
    }
  }
  std::erase_if(out.terms_, [](const Form::Term& t) { return t.second == cd{}; });
  return out;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }
Form operator-(Form a) { return a *= cd{-1.0}; }
Form operator*(Form a, cd s) { return a *= s; }
Form operator*(cd s, Form a) { return a *= s; }

Form wedge(const Form& a, const Form& b) {
  a.require_same_frame(b);
  std::vector<Form::Term> raw;
  raw.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      const int s = wedge_sign(ma, mb);
      if (s != 0) raw.emplace_back(ma | mb, static_cast<double>(s) * ca * cb);
    }
  }
  return from_terms(a.frame(), std::move(raw));
}

Form power(const Form& a, int k) {
  if (k < 0) throw Error("form power: negative exponent");
  Form out = Form::scalar(a.frame(), 1.0);
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

Form bidegree_extract(const Form& a, int p, int q, Split split) {
  const Mask h = horizontal_mask(a.frame());
  const Mask v = vertical_mask(a.frame());
  std::vector<Form::Term> kept;
  for (const auto& [m, c] : a.terms()) {
    if (unbarred_count(m) != p || barred_count(m) != q) continue;
    if (split == Split::horizontal && (m & v)) continue;
    if (split == Split::vertical && (m & h)) continue;
    kept.emplace_back(m, c);
  }
  return from_terms(a.frame(), std::move(kept));
}

Form degree_extract(const Form& a, int k) {
  std::vector<Form::Term> kept;
  for (const auto& t : a.terms())
    if (std::popcount(t.first) == k) kept.push_back(t);
  return from_terms(a.frame(), std::move(kept));
}

Form drop_generators(const Form& a, Mask dropped) {
  std::vector<Form::Term> kept;
  for (const auto& t : a.terms())
    if (!(t.first & dropped)) kept.push_back(t);
  return from_terms(a.frame(), std::move(kept));
}

Form substitute(const Form& a, std::span<const Form> images) {
  if (static_cast<int>(images.size()) != a.frame().slots()) {
    throw Error("form substitution needs one image per generator");
  }
  Form out(a.frame());
  for (const auto& [m, c] : a.terms()) {
    Form term = Form::scalar(a.frame(), c);
    for (Mask rest = m; rest; rest &= rest - 1) {
      term = wedge(term, images[std::countr_zero(rest)]);
    }
    out += term;
  }
  return out;
}

DeltaShift make_delta_shift(const CoordinateFrame& frame, std::span<const cd> gamma,
                            std::span<const cd> v) {
  const int n = frame.n, r = frame.r;
  if (static_cast<int>(gamma.size()) != r * r * n || static_cast<int>(v.size()) != r) {
    throw Error("delta shift: connection or fiber point has the wrong size");
  }
  DeltaShift shift{frame, std::vector<cd>(r * n)};
  for (int k = 0; k < r; ++k)
    for (int a = 0; a < n; ++a) {
      cd s{};
      for (int j = 0; j < r; ++j) s += gamma[(k * r + j) * n + a] * v[j];
      shift.N[k * n + a] = s;
    }
  return shift;
}

Form delta_basis(const Form& a, const DeltaShift& shift, DeltaDirection direction) {
  const auto& frame = a.frame();
  if (frame != shift.frame) throw Error("delta basis: frame mismatch");
  const double sign = direction == DeltaDirection::from_delta ? 1.0 : -1.0;
  std::vector<Form> images;
  images.reserve(frame.slots());
  for (int s = 0; s < frame.slots(); ++s) images.push_back(Form::generator(frame, s));
  for (int k = 0; k < frame.r; ++k) {
    const int c = frame.fiber_coord(k);
    for (int al = 0; al < frame.n; ++al) {
      const cd nk = shift.at(k, al);
      images[CoordinateFrame::holo_slot(c)] += Form::dz(frame, al) * (sign * nk);
      images[CoordinateFrame::anti_slot(c)] += Form::dzbar(frame, al) * (sign * std::conj(nk));
    }
  }
  return substitute(a, images);
}

FormMatrix::FormMatrix(const CoordinateFrame& frame, int size)
    : frame_(frame), size_(size), entries_(size * size, Form(frame)) {}

namespace {

Form det_recursive(const std::vector<Form>& a, int size, const CoordinateFrame& frame) {
  if (size == 1) return a[0];
  Form out(frame);
  std::vector<Form> minor((size - 1) * (size - 1));
  for (int col = 0; col < size; ++col) {
    if (a[col].empty()) continue;
    for (int i = 1; i < size; ++i) {
      int mj = 0;
      for (int j = 0; j < size; ++j) {
        if (j == col) continue;
        minor[(i - 1) * (size - 1) + mj++] = a[i * size + j];
      }
    }
    Form term = wedge(a[col], det_recursive(minor, size - 1, frame));
    if (col % 2 == 1) term *= cd{-1.0};
    out += term;
  }
  return out;
}

}  // namespace

Form det_plus_identity(const FormMatrix& m, cd scale) {
  const int r = m.size();
  if (r == 0) return Form::scalar(m.frame(), 1.0);
  std::vector<Form> a(r * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (!m(i, j).is_even()) throw Error("det_plus_identity: entry of odd degree");
      a[i * r + j] = m(i, j) * scale;
      if (i == j) a[i * r + j] += Form::scalar(m.frame(), 1.0);
    }
  return det_recursive(a, r, m.frame());
}

cd evaluate_on_vectors(const Form& a, std::span<const CVector> vectors) {
  const int k = static_cast<int>(vectors.size());
  cd total{};
  Eigen::MatrixXcd mat(k, k);
  for (const auto& [m, c] : a.terms()) {
    if (std::popcount(m) != k) continue;
    int row = 0;
    for (Mask rest = m; rest; rest &= rest - 1, ++row) {
      const int slot = std::countr_zero(rest);
      for (int b = 0; b < k; ++b) mat(row, b) = vectors[b][slot];
    }
    total += c * (k == 0 ? cd{1.0} : mat.determinant());
  }
  return total;
}

}  // namespace finslerforms::forms
