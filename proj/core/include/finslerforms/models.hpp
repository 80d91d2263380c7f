#pragma once

// Finsler metric families on a single affine chart of E over CP1 or CP1 x CP1.
// Every model evaluates G either on jets (for differentiation) or on plain
// complex numbers (for the finite-difference oracle and cheap checks).

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "finslerforms/frame.hpp"
#include "finslerforms/jets.hpp"

namespace finslerforms {

// Holomorphic coordinates and their conjugates, passed separately so jets can
// carry independent Taylor variables for z and z-bar.
template <class T>
struct Coords {
  std::vector<T> z, zb, v, vb;
};

Coords<jets::Jet> seed_coords(const jets::ContextPtr& ctx);
Coords<cd> make_coords(const CVector& z, const CVector& v);

enum class Family { HermitianDiagonal, FinslerPerturbed, TensorByLine, Restricted, Custom };

std::string to_string(Family f);

class MetricModel {
 public:
  explicit MetricModel(const CoordinateFrame& frame) : frame_(frame) {}
  virtual ~MetricModel() = default;

  const CoordinateFrame& frame() const { return frame_; }
  virtual Family family() const = 0;
  virtual std::string describe() const = 0;

  virtual jets::Jet evaluate(const Coords<jets::Jet>& x) const = 0;
  virtual cd evaluate(const Coords<cd>& x) const = 0;

  // Quadratic in v: G = sum G_{ij-bar}(z) v^i v-bar^j.
  virtual bool hermitian() const = 0;
  virtual bool z_independent() const = 0;

  double value(const CVector& z, const CVector& v) const;

 private:
  CoordinateFrame frame_;
};

using ModelPtr = std::shared_ptr<const MetricModel>;

// G = sum_i h_i(z) |v^i|^2 with h_i = prod_a (1 + |z^a|^2)^(-degrees[i][a]).
class HermitianDiagonal : public MetricModel {
 public:
  HermitianDiagonal(int base_dim, std::vector<std::vector<double>> degrees);

  Family family() const override { return Family::HermitianDiagonal; }
  std::string describe() const override;
  jets::Jet evaluate(const Coords<jets::Jet>& x) const override;
  cd evaluate(const Coords<cd>& x) const override;
  bool hermitian() const override { return true; }
  bool z_independent() const override;

  const std::vector<std::vector<double>>& degrees() const { return degrees_; }

  template <class T>
  std::vector<T> weights(const Coords<T>& x) const;
  template <class T>
  T eval(const Coords<T>& x) const;

 private:
  std::vector<std::vector<double>> degrees_;
};

// G = G_h + eps * Q / G_h with Q = sum_i (h_i |v^i|^2)^2.
class FinslerPerturbed : public MetricModel {
 public:
  // decay[a] > 0 lets the weight fall off as epsilon * prod_a (1 + |z^a|^2)^(-decay[a]).
  FinslerPerturbed(std::shared_ptr<const HermitianDiagonal> core, double epsilon,
                   std::vector<double> decay = {});

  Family family() const override { return Family::FinslerPerturbed; }
  std::string describe() const override;
  jets::Jet evaluate(const Coords<jets::Jet>& x) const override;
  cd evaluate(const Coords<cd>& x) const override;
  bool hermitian() const override { return epsilon_ == 0.0 || frame().r == 1; }
  bool z_independent() const override;

  const HermitianDiagonal& core() const { return *core_; }
  std::shared_ptr<const HermitianDiagonal> core_ptr() const { return core_; }
  double epsilon() const { return epsilon_; }
  const std::vector<double>& decay() const { return decay_; }

 private:
  std::shared_ptr<const HermitianDiagonal> core_;
  double epsilon_;
  std::vector<double> decay_;

  template <class T>
  T eval(const Coords<T>& x) const;
};

// G * h_L(z) with h_L = prod_a (1 + |z^a|^2)^(-line_degrees[a]).
class TensorByLine : public MetricModel {
 public:
  TensorByLine(ModelPtr inner, std::vector<double> line_degrees);

  Family family() const override { return Family::TensorByLine; }
  std::string describe() const override;
  jets::Jet evaluate(const Coords<jets::Jet>& x) const override;
  cd evaluate(const Coords<cd>& x) const override;
  bool hermitian() const override { return inner_->hermitian(); }
  bool z_independent() const override;

  const MetricModel& inner() const { return *inner_; }
  const std::vector<double>& line_degrees() const { return line_; }

 private:
  ModelPtr inner_;
  std::vector<double> line_;

  template <class T>
  T eval(const Coords<T>& x) const;
};

// The inner metric read on the coordinate subbundle spanned by `subset` of the
// fiber coordinates; the remaining coordinates are held at zero.
class Restricted : public MetricModel {
 public:
  Restricted(ModelPtr inner, std::vector<int> subset);

  Family family() const override { return Family::Restricted; }
  std::string describe() const override;
  jets::Jet evaluate(const Coords<jets::Jet>& x) const override;
  cd evaluate(const Coords<cd>& x) const override;
  bool hermitian() const override { return inner_->hermitian(); }
  bool z_independent() const override { return inner_->z_independent(); }

  const std::vector<int>& subset() const { return subset_; }

 private:
  ModelPtr inner_;
  std::vector<int> subset_;

  template <class T>
  T eval(const Coords<T>& x) const;
};

class Custom : public MetricModel {
 public:
  using JetFn = std::function<jets::Jet(const Coords<jets::Jet>&)>;
  using ValueFn = std::function<cd(const Coords<cd>&)>;

  Custom(const CoordinateFrame& frame, std::string name, JetFn jet_fn, ValueFn value_fn,
         bool hermitian = false, bool z_independent = false);

  Family family() const override { return Family::Custom; }
  std::string describe() const override { return name_; }
  jets::Jet evaluate(const Coords<jets::Jet>& x) const override { return jet_fn_(x); }
  cd evaluate(const Coords<cd>& x) const override { return value_fn_(x); }
  bool hermitian() const override { return hermitian_; }
  bool z_independent() const override { return z_independent_; }

 private:
  std::string name_;
  JetFn jet_fn_;
  ValueFn value_fn_;
  bool hermitian_;
  bool z_independent_;
};

// O(a_1) + ... + O(a_r) over CP1, or with per-factor degrees over CP1 x CP1.
std::shared_ptr<const HermitianDiagonal> make_hermitian(int base_dim,
                                                        std::vector<std::vector<double>> degrees);
ModelPtr make_perturbed(int base_dim, std::vector<std::vector<double>> degrees, double epsilon);

// G + |v^1|^3: fails homogeneity, used as a negative control.
ModelPtr make_broken(ModelPtr inner);

}  // namespace finslerforms
