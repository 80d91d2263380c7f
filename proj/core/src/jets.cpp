#include "finslerforms/jets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace finslerforms::jets {

namespace {

std::uint64_t pack(const MultiIndex& idx) {
  std::uint64_t key = 0;
  for (int s = 0; s < kMaxSlots; ++s) {
    key |= static_cast<std::uint64_t>(idx[s] & 0xF) << (4 * s);
  }
  return key;
}

double factorial_of(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void enumerate(int slots, std::uint32_t frozen, int slot, int remaining, MultiIndex& cur,
               std::vector<MultiIndex>& out) {
  if (slot == slots) {
    out.push_back(cur);
    return;
  }
  const int top = (frozen >> slot) & 1u ? 0 : remaining;
  for (int e = 0; e <= top; ++e) {
    cur[slot] = static_cast<std::uint8_t>(e);
    enumerate(slots, frozen, slot + 1, remaining - e, cur, out);
  }
  cur[slot] = 0;
}

// Evaluates sum_k d[k] * (a - a0)^k by Horner's rule in the nilpotent part.
Jet compose(const Jet& a, std::span<const cd> d) {
  Jet nil = a;
  nil.coefficients()[0] = 0.0;
  const int order = a.context().order();
  Jet acc(a.context_ptr(), d[order]);
  for (int k = order - 1; k >= 0; --k) {
    acc = multiply(acc, nil);
    acc.coefficients()[0] += d[k];
  }
  return acc;
}

}  // namespace

int degree(const MultiIndex& idx) {
  int d = 0;
  for (auto e : idx) d += e;
  return d;
}

Layout::Layout(int slots, int order, std::uint32_t frozen)
    : slots_(slots), order_(order), frozen_(frozen) {
  if (slots < 1 || slots > kMaxSlots) throw Error("jet layout: slot count out of range");
  if (order < 0 || order > kMaxOrder) throw Error("jet layout: order must be in [0, 4]");

  std::vector<MultiIndex> all;
  MultiIndex cur{};
  enumerate(slots, frozen, 0, order, cur, all);
  std::stable_sort(all.begin(), all.end(), [](const MultiIndex& a, const MultiIndex& b) {
    const int da = degree(a), db = degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  });
  indices_ = std::move(all);

  const int size = static_cast<int>(indices_.size());
  degrees_.resize(size);
  factorials_.resize(size);
  lookup_.reserve(size);
  for (int k = 0; k < size; ++k) {
    degrees_[k] = degree(indices_[k]);
    double f = 1.0;
    for (auto e : indices_[k]) f *= factorial_of(e);
    factorials_[k] = f;
    lookup_.emplace_back(pack(indices_[k]), k);
  }
  std::sort(lookup_.begin(), lookup_.end());

  conj_.resize(size);
  for (int k = 0; k < size; ++k) {
    MultiIndex swapped{};
    for (int s = 0; s + 1 < slots; s += 2) {
      swapped[s] = indices_[k][s + 1];
      swapped[s + 1] = indices_[k][s];
    }
    conj_[k] = position(swapped);
  }

  pair_offsets_.resize(size + 1);
  for (int k = 0; k < size; ++k) {
    pair_offsets_[k] = pairs_.size();
    for (int j = 0; j < size; ++j) {
      if (degrees_[k] + degrees_[j] > order_) break;  // indices sorted by degree
      MultiIndex sum{};
      for (int s = 0; s < slots; ++s) sum[s] = indices_[k][s] + indices_[j][s];
      pairs_.push_back({static_cast<std::uint16_t>(j), static_cast<std::uint16_t>(position(sum))});
    }
  }
  pair_offsets_[size] = pairs_.size();
}

std::shared_ptr<const Layout> Layout::get(int slots, int order, std::uint32_t frozen) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, std::uint32_t>, std::shared_ptr<const Layout>> cache;
  std::lock_guard lock(mutex);
  auto& entry = cache[{slots, order, frozen}];
  if (!entry) entry = std::make_shared<const Layout>(slots, order, frozen);
  return entry;
}

int Layout::position(const MultiIndex& idx) const {
  if (degree(idx) > order_) return -1;
  const auto key = pack(idx);
  auto it = std::lower_bound(lookup_.begin(), lookup_.end(), std::make_pair(key, -1));
  if (it == lookup_.end() || it->first != key) return -1;
  return it->second;
}

std::span<const Layout::Pair> Layout::pairs(int k) const {
  return {pairs_.data() + pair_offsets_[k], pairs_.data() + pair_offsets_[k + 1]};
}

namespace {

std::uint32_t base_slots(const CoordinateFrame& frame) {
  std::uint32_t mask = 0;
  for (int a = 0; a < frame.n; ++a) {
    mask |= 1u << CoordinateFrame::holo_slot(frame.base_coord(a));
    mask |= 1u << CoordinateFrame::anti_slot(frame.base_coord(a));
  }
  return mask;
}

}  // namespace

Context::Context(const CoordinateFrame& frame, CVector basepoint, int order, bool fiber_only)
    : frame_(frame), order_(order), basepoint_(std::move(basepoint)),
      layout_(Layout::get(frame.slots(), order, fiber_only ? base_slots(frame) : 0u)) {
  if (static_cast<int>(basepoint_.size()) != frame_.coords()) {
    throw Error("jet seed: basepoint has " + std::to_string(basepoint_.size()) +
                " entries, frame " + to_string(frame_) + " needs " +
                std::to_string(frame_.coords()));
  }
}

bool Context::frozen(int coord) const {
  return (layout_->frozen() >> CoordinateFrame::holo_slot(coord)) & 1u;
}

ContextPtr make_context(const CoordinateFrame& frame, CVector basepoint, int order,
                        bool fiber_only) {
  return std::make_shared<const Context>(frame, std::move(basepoint), order, fiber_only);
}

Jet::Jet(ContextPtr ctx) : ctx_(std::move(ctx)), c_(ctx_->layout().size(), cd{}) {}

Jet::Jet(ContextPtr ctx, cd value) : Jet(std::move(ctx)) { c_[0] = value; }

cd Jet::taylor(const MultiIndex& idx) const {
  const int k = ctx_->layout().position(idx);
  if (k < 0) throw Error("jet: derivative order exceeds truncation order or uses a frozen slot");
  return c_[k];
}

cd Jet::derivative(const MultiIndex& idx) const {
  const int k = ctx_->layout().position(idx);
  if (k < 0) throw Error("jet: derivative order exceeds truncation order or uses a frozen slot");
  return c_[k] * ctx_->layout().factorial(k);
}

void Jet::require_compatible(const Jet& other) const {
  if (ctx_ == other.ctx_) return;
  if (!ctx_ || !other.ctx_ || ctx_->frame() != other.ctx_->frame() ||
      ctx_->order() != other.ctx_->order() || ctx_->basepoint() != other.ctx_->basepoint() ||
      ctx_->layout().frozen() != other.ctx_->layout().frozen()) {
    throw Error("jet arithmetic: operands have different frames or basepoints");
  }
}

Jet& Jet::operator+=(const Jet& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += other.c_[k];
  return *this;
}

Jet& Jet::operator-=(const Jet& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= other.c_[k];
  return *this;
}

Jet& Jet::operator*=(const Jet& other) { return *this = multiply(*this, other); }
Jet& Jet::operator/=(const Jet& other) { return *this = multiply(*this, reciprocal(other)); }

Jet& Jet::operator+=(cd s) {
  c_[0] += s;
  return *this;
}

Jet& Jet::operator-=(cd s) {
  c_[0] -= s;
  return *this;
}

Jet& Jet::operator*=(cd s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet& Jet::operator/=(cd s) {
  if (std::abs(s) == 0.0) throw Error("jet: division by zero scalar");
  for (auto& x : c_) x /= s;
  return *this;
}

namespace {

std::size_t nonzeros(const std::vector<cd>& c) {
  return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](cd x) { return x != cd{}; }));
}

}  // namespace

Jet multiply(const Jet& x, const Jet& y) {
  x.require_compatible(y);
  // The outer loop skips zero coefficients, so put the sparser factor there.
  const bool swap = nonzeros(y.c_) < nonzeros(x.c_);
  const Jet& a = swap ? y : x;
  const Jet& b = swap ? x : y;
  const Layout& layout = a.context().layout();
  Jet out(a.context_ptr());
  // Plain real arithmetic: std::complex multiplication goes through the
  // NaN-recovering __muldc3 path, which dominated jet evaluation.
  auto* dst = reinterpret_cast<double*>(out.c_.data());
  const auto* rhs = reinterpret_cast<const double*>(b.c_.data());
  const int size = layout.size();
  for (int k = 0; k < size; ++k) {
    const double ar = a.c_[k].real(), ai = a.c_[k].imag();
    if (ar == 0.0 && ai == 0.0) continue;
    for (const auto& p : layout.pairs(k)) {
      const double br = rhs[2 * p.rhs], bi = rhs[2 * p.rhs + 1];
      dst[2 * p.out] += ar * br - ai * bi;
      dst[2 * p.out + 1] += ar * bi + ai * br;
    }
  }
  return out;
}

Jet operator-(const Jet& a) { return a * cd{-1.0}; }
Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(const Jet& a, const Jet& b) { return multiply(a, b); }
Jet operator/(const Jet& a, const Jet& b) { return multiply(a, reciprocal(b)); }
Jet operator+(Jet a, cd s) { return a += s; }
Jet operator+(cd s, Jet a) { return a += s; }
Jet operator-(Jet a, cd s) { return a -= s; }
Jet operator-(cd s, const Jet& a) { return -a + s; }
Jet operator*(Jet a, cd s) { return a *= s; }
Jet operator*(cd s, Jet a) { return a *= s; }
Jet operator/(Jet a, cd s) { return a /= s; }
Jet operator/(cd s, const Jet& a) { return reciprocal(a) * s; }

Jet reciprocal(const Jet& a) {
  const cd a0 = a.value();
  if (!(std::abs(a0) > 1e-300) || !std::isfinite(std::abs(a0))) {
    throw Error("jet: division by a (near-)zero value; evaluation point off E^o or degenerate metric");
  }
  std::array<cd, kMaxOrder + 1> d{};
  cd inv = 1.0 / a0, term = inv;
  for (int k = 0; k <= a.context().order(); ++k) {
    d[k] = (k % 2 == 0 ? 1.0 : -1.0) * term;
    term *= inv;
  }
  return compose(a, d);
}

Jet log(const Jet& a) {
  const cd a0 = a.value();
  if (!(a0.real() > 0.0) || std::abs(a0.imag()) > 1e-10 * std::max(1.0, std::abs(a0))) {
    throw Error("jet: log of a value that is not real-positive (" + std::to_string(a0.real()) +
                ", " + std::to_string(a0.imag()) + ")");
  }
  std::array<cd, kMaxOrder + 1> d{};
  d[0] = std::log(a0);
  cd inv = 1.0 / a0, term = inv;
  for (int k = 1; k <= a.context().order(); ++k) {
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * term / static_cast<double>(k);
    term *= inv;
  }
  return compose(a, d);
}

Jet exp(const Jet& a) {
  std::array<cd, kMaxOrder + 1> d{};
  const cd e = std::exp(a.value());
  double fact = 1.0;
  for (int k = 0; k <= a.context().order(); ++k) {
    if (k > 0) fact *= k;
    d[k] = e / fact;
  }
  return compose(a, d);
}

Jet pow(const Jet& a, double p) {
  const cd a0 = a.value();
  if (p == 0.0) return Jet(a.context_ptr(), 1.0);
  if (!(std::abs(a0) > 1e-300)) throw Error("jet: pow of a (near-)zero value");
  std::array<cd, kMaxOrder + 1> d{};
  // generalized binomial coefficients times a0^(p-k)
  double binom = 1.0;
  for (int k = 0; k <= a.context().order(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    d[k] = binom * std::pow(a0, p - k);
  }
  return compose(a, d);
}

Jet conj(const Jet& a) {
  Jet out(a.context_ptr());
  const Layout& layout = a.context().layout();
  auto src = a.coefficients();
  auto dst = out.coefficients();
  for (int k = 0; k < layout.size(); ++k) dst[k] = std::conj(src[layout.conj_position(k)]);
  return out;
}

Jet re(const Jet& a) { return (a + conj(a)) * cd{0.5}; }

Jet coordinate(const ContextPtr& ctx, int coord) {
  const auto& frame = ctx->frame();
  if (coord < 0 || coord >= frame.coords()) throw Error("jet seed: coordinate index out of range");
  Jet j(ctx, ctx->basepoint()[coord]);
  if (ctx->order() >= 1 && !ctx->frozen(coord)) {
    MultiIndex idx{};
    idx[CoordinateFrame::holo_slot(coord)] = 1;
    j.coefficients()[ctx->layout().position(idx)] = 1.0;
  }
  return j;
}

std::vector<Jet> seed(const ContextPtr& ctx) {
  std::vector<Jet> out;
  out.reserve(ctx->frame().coords());
  for (int c = 0; c < ctx->frame().coords(); ++c) out.push_back(coordinate(ctx, c));
  return out;
}

MultiIndex WirtingerIndex::multi_index() const {
  MultiIndex idx{};
  for (int c : holo) {
    if (c < 0 || 2 * c >= kMaxSlots) throw Error("wirtinger: coordinate index out of range");
    ++idx[CoordinateFrame::holo_slot(c)];
  }
  for (int c : anti) {
    if (c < 0 || 2 * c + 1 >= kMaxSlots) throw Error("wirtinger: coordinate index out of range");
    ++idx[CoordinateFrame::anti_slot(c)];
  }
  return idx;
}

cd wirtinger(const Jet& j, const WirtingerIndex& idx) {
  if (idx.order() > j.context().order()) {
    throw Error("wirtinger: order " + std::to_string(idx.order()) + " exceeds jet order " +
                std::to_string(j.context().order()));
  }
  for (int c : idx.holo)
    if (c >= j.context().frame().coords()) throw Error("wirtinger: coordinate index out of range");
  for (int c : idx.anti)
    if (c >= j.context().frame().coords()) throw Error("wirtinger: coordinate index out of range");
  return j.derivative(idx.multi_index());
}

cd real_partial(const Jet& j, std::span<const int> real_slots) {
  if (static_cast<int>(real_slots.size()) > j.context().order()) {
    throw Error("real_partial: order exceeds jet order");
  }
  // d/dx = d/dw + d/dwbar, d/dy = i (d/dw - d/dwbar)
  const int m = static_cast<int>(real_slots.size());
  cd total{};
  for (int mask = 0; mask < (1 << m); ++mask) {
    MultiIndex idx{};
    cd weight = 1.0;
    for (int t = 0; t < m; ++t) {
      const int slot = real_slots[t];
      const int coord = slot / 2;
      if (coord >= j.context().frame().coords()) throw Error("real_partial: slot out of range");
      const bool imag_dir = slot % 2 == 1;
      const bool take_anti = (mask >> t) & 1;
      ++idx[take_anti ? CoordinateFrame::anti_slot(coord) : CoordinateFrame::holo_slot(coord)];
      if (imag_dir) weight *= take_anti ? -kI : kI;
    }
    total += weight * j.derivative(idx);
  }
  return total;
}

bool is_real(const Jet& j, double tol) {
  const Layout& layout = j.context().layout();
  auto c = j.coefficients();
  const double scale = std::max(1.0, std::abs(c[0]));
  for (int k = 0; k < layout.size(); ++k) {
    if (std::abs(c[k] - std::conj(c[layout.conj_position(k)])) > tol * scale) return false;
  }
  return true;
}

void require_real(const Jet& j, double tol) {
  if (!is_real(j, tol)) throw Error("jet claimed real-valued violates conjugate symmetry");
}

}  // namespace finslerforms::jets
