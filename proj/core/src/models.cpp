#include "finslerforms/models.hpp"

#include <cmath>
#include <sstream>

namespace finslerforms {

namespace {

template <class T>
T zero_like(const T& x) {
  return x * cd{0.0};
}

// (1 + z zb)^(-a), evaluated for either scalar type.
template <class T>
T fs_factor(const T& z, const T& zb, double a) {
  using std::pow;
  using jets::pow;
  if (a == 0.0) return zero_like(z) + cd{1.0};
  return pow(z * zb + cd{1.0}, -a);
}

std::string list(const std::vector<double>& xs) {
  std::ostringstream out;
  out << "(";
  for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
  out << ")";
  return out.str();
}

}  // namespace

Coords<jets::Jet> seed_coords(const jets::ContextPtr& ctx) {
  const auto& frame = ctx->frame();
  auto holo = jets::seed(ctx);
  Coords<jets::Jet> x;
  for (int a = 0; a < frame.n; ++a) {
    x.z.push_back(holo[frame.base_coord(a)]);
    x.zb.push_back(jets::conj(holo[frame.base_coord(a)]));
  }
  for (int i = 0; i < frame.r; ++i) {
    x.v.push_back(holo[frame.fiber_coord(i)]);
    x.vb.push_back(jets::conj(holo[frame.fiber_coord(i)]));
  }
  return x;
}

Coords<cd> make_coords(const CVector& z, const CVector& v) {
  Coords<cd> x{z, {}, v, {}};
  for (auto c : z) x.zb.push_back(std::conj(c));
  for (auto c : v) x.vb.push_back(std::conj(c));
  return x;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::HermitianDiagonal: return "HermitianDiagonal";
    case Family::FinslerPerturbed: return "FinslerPerturbed";
    case Family::TensorByLine: return "TensorByLine";
    case Family::Restricted: return "Restricted";
    case Family::Custom: return "Custom";
  }
  return "unknown";
}

double MetricModel::value(const CVector& z, const CVector& v) const {
  return evaluate(make_coords(z, v)).real();
}

HermitianDiagonal::HermitianDiagonal(int base_dim, std::vector<std::vector<double>> degrees)
    : MetricModel(CoordinateFrame(base_dim, static_cast<int>(degrees.size()))),
      degrees_(std::move(degrees)) {
  for (const auto& d : degrees_) {
    if (static_cast<int>(d.size()) != base_dim) {
      throw Error("HermitianDiagonal: each fiber coordinate needs one degree per base factor");
    }
  }
}

std::string HermitianDiagonal::describe() const {
  std::ostringstream out;
  out << "HermitianDiagonal degrees=[";
  for (std::size_t i = 0; i < degrees_.size(); ++i) out << (i ? "," : "") << list(degrees_[i]);
  out << "]";
  return out.str();
}

bool HermitianDiagonal::z_independent() const {
  for (const auto& d : degrees_)
    for (double a : d)
      if (a != 0.0) return false;
  return true;
}

template <class T>
std::vector<T> HermitianDiagonal::weights(const Coords<T>& x) const {
  std::vector<T> h;
  h.reserve(degrees_.size());
  for (const auto& d : degrees_) {
    T w = fs_factor(x.z[0], x.zb[0], d[0]);
    for (int a = 1; a < frame().n; ++a) w = w * fs_factor(x.z[a], x.zb[a], d[a]);
    h.push_back(std::move(w));
  }
  return h;
}

template <class T>
T HermitianDiagonal::eval(const Coords<T>& x) const {
  const auto h = weights(x);
  T g = h[0] * (x.v[0] * x.vb[0]);
  for (int i = 1; i < frame().r; ++i) g = g + h[i] * (x.v[i] * x.vb[i]);
  return g;
}

template std::vector<jets::Jet> HermitianDiagonal::weights(const Coords<jets::Jet>&) const;
template std::vector<cd> HermitianDiagonal::weights(const Coords<cd>&) const;

FinslerPerturbed::FinslerPerturbed(std::shared_ptr<const HermitianDiagonal> core, double epsilon,
                                   std::vector<double> decay)
    : MetricModel(core->frame()), core_(std::move(core)), epsilon_(epsilon), decay_(std::move(decay)) {
  if (!(epsilon_ >= 0.0)) throw Error("FinslerPerturbed: epsilon must be non-negative");
  if (!decay_.empty() && static_cast<int>(decay_.size()) != frame().n) {
    throw Error("FinslerPerturbed: need one decay exponent per base factor");
  }
  for (double d : decay_)
    if (!(d >= 0.0)) throw Error("FinslerPerturbed: decay exponents must be non-negative");
}

bool FinslerPerturbed::z_independent() const {
  if (!core_->z_independent()) return false;
  if (epsilon_ == 0.0) return true;
  for (double d : decay_)
    if (d != 0.0) return false;
  return true;
}

std::string FinslerPerturbed::describe() const {
  std::ostringstream out;
  out << "FinslerPerturbed eps=" << epsilon_;
  if (!decay_.empty()) out << " decay" << list(decay_);
  out << " over " << core_->describe();
  return out.str();
}

template <class T>
T FinslerPerturbed::eval(const Coords<T>& x) const {
  const auto h = core_->weights(x);
  T gh = h[0] * (x.v[0] * x.vb[0]);
  T t = gh;
  T q = t * t;
  for (int i = 1; i < frame().r; ++i) {
    t = h[i] * (x.v[i] * x.vb[i]);
    gh = gh + t;
    q = q + t * t;
  }
  if (epsilon_ == 0.0) return gh;
  T weight = q * cd{epsilon_} / gh;
  for (std::size_t a = 0; a < decay_.size(); ++a) weight = weight * fs_factor(x.z[a], x.zb[a], decay_[a]);
  return gh + weight;
}

TensorByLine::TensorByLine(ModelPtr inner, std::vector<double> line_degrees)
    : MetricModel(inner->frame()), inner_(std::move(inner)), line_(std::move(line_degrees)) {
  if (static_cast<int>(line_.size()) != frame().n) {
    throw Error("TensorByLine: need one line degree per base factor");
  }
}

std::string TensorByLine::describe() const {
  return inner_->describe() + " tensor O" + list(line_);
}

bool TensorByLine::z_independent() const {
  if (!inner_->z_independent()) return false;
  for (double b : line_)
    if (b != 0.0) return false;
  return true;
}

template <class T>
T TensorByLine::eval(const Coords<T>& x) const {
  T g = inner_->evaluate(x);
  for (int a = 0; a < frame().n; ++a) g = g * fs_factor(x.z[a], x.zb[a], line_[a]);
  return g;
}

Restricted::Restricted(ModelPtr inner, std::vector<int> subset)
    : MetricModel(CoordinateFrame(inner->frame().n, static_cast<int>(subset.size()))),
      inner_(std::move(inner)), subset_(std::move(subset)) {
  for (std::size_t a = 0; a < subset_.size(); ++a) {
    if (subset_[a] < 0 || subset_[a] >= inner_->frame().r) {
      throw Error("Restricted: fiber coordinate index out of range");
    }
    for (std::size_t b = 0; b < a; ++b)
      if (subset_[a] == subset_[b]) throw Error("Restricted: repeated fiber coordinate");
  }
}

std::string Restricted::describe() const {
  std::ostringstream out;
  out << inner_->describe() << " restricted to {";
  for (std::size_t i = 0; i < subset_.size(); ++i) out << (i ? "," : "") << subset_[i] + 1;
  out << "}";
  return out.str();
}

template <class T>
T Restricted::eval(const Coords<T>& x) const {
  Coords<T> full{x.z, x.zb, {}, {}};
  const T zero = zero_like(x.v[0]);
  full.v.assign(inner_->frame().r, zero);
  full.vb.assign(inner_->frame().r, zero);
  for (std::size_t a = 0; a < subset_.size(); ++a) {
    full.v[subset_[a]] = x.v[a];
    full.vb[subset_[a]] = x.vb[a];
  }
  return inner_->evaluate(full);
}

jets::Jet HermitianDiagonal::evaluate(const Coords<jets::Jet>& x) const { return eval(x); }
cd HermitianDiagonal::evaluate(const Coords<cd>& x) const { return eval(x); }
jets::Jet FinslerPerturbed::evaluate(const Coords<jets::Jet>& x) const { return eval(x); }
cd FinslerPerturbed::evaluate(const Coords<cd>& x) const { return eval(x); }
jets::Jet TensorByLine::evaluate(const Coords<jets::Jet>& x) const { return eval(x); }
cd TensorByLine::evaluate(const Coords<cd>& x) const { return eval(x); }
jets::Jet Restricted::evaluate(const Coords<jets::Jet>& x) const { return eval(x); }
cd Restricted::evaluate(const Coords<cd>& x) const { return eval(x); }

Custom::Custom(const CoordinateFrame& frame, std::string name, JetFn jet_fn, ValueFn value_fn,
               bool hermitian, bool z_independent)
    : MetricModel(frame), name_(std::move(name)), jet_fn_(std::move(jet_fn)),
      value_fn_(std::move(value_fn)), hermitian_(hermitian), z_independent_(z_independent) {}

std::shared_ptr<const HermitianDiagonal> make_hermitian(int base_dim,
                                                        std::vector<std::vector<double>> degrees) {
  return std::make_shared<const HermitianDiagonal>(base_dim, std::move(degrees));
}

ModelPtr make_perturbed(int base_dim, std::vector<std::vector<double>> degrees, double epsilon) {
  return std::make_shared<const FinslerPerturbed>(make_hermitian(base_dim, std::move(degrees)),
                                                  epsilon);
}

ModelPtr make_broken(ModelPtr inner) {
  auto jet_fn = [inner](const Coords<jets::Jet>& x) {
    return inner->evaluate(x) + jets::pow(x.v[0] * x.vb[0], 1.5);
  };
  auto value_fn = [inner](const Coords<cd>& x) {
    return inner->evaluate(x) + std::pow(x.v[0] * x.vb[0], 1.5);
  };
  return std::make_shared<const Custom>(inner->frame(), inner->describe() + " + |v1|^3",
                                        jet_fn, value_fn, false, inner->z_independent());
}

}  // namespace finslerforms
