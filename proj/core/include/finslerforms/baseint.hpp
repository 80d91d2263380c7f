#pragma once

// Base manifolds CP1 and CP1 x CP1 on their dense affine chart, with the
// Fubini-Study profile omega = sqrt(-1) sum_a (1 + |z^a|^2)^{-2} dz^a ^ dz-bar^a
// (no 1/2pi). Volumes: int omega = 2 pi on CP1, int omega^2 = 8 pi^2 on the
// product (omega^n is not divided by n!).

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "finslerforms/exterior.hpp"
#include "finslerforms/fiberint.hpp"
#include "finslerforms/finsler.hpp"
#include "finslerforms/quadrature.hpp"

namespace finslerforms::base {

using quad::QuadratureSpec;

enum class Kind { CP1, CP1xCP1 };

class BaseManifold {
 public:
  explicit BaseManifold(Kind kind) : kind_(kind) {}
  static BaseManifold from_string(const std::string& name);

  Kind kind() const { return kind_; }
  int dim() const { return kind_ == Kind::CP1 ? 1 : 2; }
  std::string name() const { return kind_ == Kind::CP1 ? "CP1" : "CP1xCP1"; }

  Eigen::MatrixXcd kahler(const CVector& z) const;
  KahlerMetric kahler_metric() const;
  // omega in the horizontal generators of `frame` (frame.n must equal dim()).
  forms::Form omega(const CoordinateFrame& frame, const CVector& z) const;
  double volume() const;

 private:
  Kind kind_;
};

// Coefficient of dz^1 ^ dz-bar^1 ^ ... ^ dz^n ^ dz-bar^n.
forms::Mask top_mask(int n);
cd top_coefficient(const forms::Form& f);

// Ratio of the top coefficients of f and omega^n at z (real for real forms).
cd ratio_to_volume(const BaseManifold& m, const forms::Form& f, const CVector& z);

using TopField = std::function<cd(const CVector& z)>;

struct BaseResult {
  cd value;
  double error = 0.0;
  std::size_t nodes = 0;
};

// int_M field(z) dz^1 ^ dz-bar^1 ^ ... over the chart: (-2i)^n int field d(vol).
// With spec.convergence_check, the change under raised orders is the error.
BaseResult base_integrate(const BaseManifold& m, const TopField& field, const QuadratureSpec& spec);

// g^{a b-bar} F_{a b-bar} for a (1,1) form sqrt(-1) F_{a b-bar} dz^a ^ dz-bar^b.
cd trace_omega(const BaseManifold& m, const forms::Form& form, const CVector& z);
// (P g^-1 P g^-1) traced, with P the Kobayashi matrix at b.
cd trace_omega_sq(const BaseManifold& m, const CurvatureBundle& b);

// int_M C_1(E, G) ^ omega^{n-1}, from C_1 = -s_1 pushed forward at each base node.
BaseResult degree(const MetricModel& model, const BaseManifold& m,
                  const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec);

// lambda = 2 pi n / int omega^n * degree / r.
struct LambdaResult {
  double lambda = 0.0;
  double degree = 0.0;
  double error = 0.0;
};
LambdaResult lambda_from_class(const MetricModel& model, const BaseManifold& m,
                               const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec);

struct SlopeReport {
  double degree = 0.0;
  int rank = 0;
  double slope = 0.0;
  double error = 0.0;
};
SlopeReport slope(const MetricModel& model, const BaseManifold& m,
                  const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec);

// Pointwise (2,2) fields on CP1 x CP1 as multiples of omega^2.
struct PointwiseKL {
  double kl = 0.0;           // ((r-1) C_1^2 - 2r C_2) / omega^2
  double segre = 0.0;        // s_2 / omega^2
  double segre_bound = 0.0;  // r(r+1) lambda^2 / (8 pi^2 n^2)
  double error = 0.0;
};
PointwiseKL kl_fields(const MetricModel& model, const BaseManifold& m, const CVector& z,
                      double lambda, const QuadratureSpec& fiber_spec);

}  // namespace finslerforms::base
