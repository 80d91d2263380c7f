#pragma once

// Pushforward along the projective fibers P(E_z), computed on the affine chart
// v = (1, w), w in C^{r-1}. Results are horizontal forms at z: a Form whose
// terms only involve dz, dz-bar.

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "finslerforms/exterior.hpp"
#include "finslerforms/finsler.hpp"
#include "finslerforms/models.hpp"
#include "finslerforms/quadrature.hpp"

namespace finslerforms::fiber {

using quad::QuadratureSpec;

struct FiberResult {
  forms::Form value;   // horizontal
  double error = 0.0;  // 3 standard errors (Monte Carlo) or the order-raise change
  std::size_t nodes = 0;

  cd scalar() const { return value.coefficient(0); }
};

// Form-valued integrand at a fixed base point, evaluated at a full fiber vector v.
using FormIntegrand = std::function<forms::Form(const CVector& v)>;

// Values to integrate against dx dy on each plane of C^{r-1} at v = (1, w).
using ChartDensity = std::function<std::vector<cd>(const CVector& v)>;

struct ChartIntegral {
  std::vector<cd> values;
  std::vector<double> errors;
  std::size_t nodes = 0;
};

// scales rescales the chart, w^a = scales[a-1] w'^a, so that fibers with very
// different weights stay well resolved; the Jacobian is applied here.
ChartIntegral integrate_chart(int rank, std::size_t width, const ChartDensity& density,
                              const QuadratureSpec& spec, std::span<const double> scales = {});

// sqrt(G(z, e_0) / G(z, e_a)) for a = 1..r-1.
std::vector<double> chart_scales(const MetricModel& model, const CVector& z);

// Largest relative defect of coef(lambda v) * lambda^p * conj(lambda)^q = coef(v),
// with (p, q) the vertical bidegree of each monomial.
double descent_defect(const FormIntegrand& integrand, const CoordinateFrame& frame,
                      const CVector& v, cd lambda);

// Pulls back to the chart, keeps the full vertical volume part and integrates.
FiberResult fiber_integrate(const CoordinateFrame& frame, const FormIntegrand& integrand,
                            const QuadratureSpec& spec, bool check_descent = true,
                            std::span<const double> scales = {});

// pi_* Xi^{r-1}; 1 by the normalization lemma.
FiberResult normalization(const MetricModel& model, const CVector& z, const QuadratureSpec& spec);

// Total Segre form 1 + s_1 + ... + s_n from pi_* Xi^{r-1+j}.
FiberResult total_segre(const MetricModel& model, const CVector& z, const QuadratureSpec& spec);
FiberResult segre_direct(const MetricModel& model, const CVector& z, int j,
                         const QuadratureSpec& spec);

// s_k = (-1)^k (2 pi)^{-k} binom(r-1+k, k) pi_*(Psi^k ^ omega_FS^{r-1}).
FiberResult segre_via_psi(const MetricModel& model, const CVector& z, int k,
                          const QuadratureSpec& spec);

// Total Chern form 1 + c_1 + ... from pi_*(det(I + sqrt(-1)/2pi Theta) ^ Xi^{r-1}).
FiberResult total_chern_cw(const MetricModel& model, const CVector& z, const QuadratureSpec& spec);
FiberResult chern_via_cw(const MetricModel& model, const CVector& z, int k,
                         const QuadratureSpec& spec);

// Graded inverse: C_1 = -s_1, C_2 = s_1^2 - s_2, C_3 = -s_1^3 + 2 s_1 s_2 - s_3, ...
// segre[j-1] = s_j; returns C_1..C_m with m = segre.size().
std::vector<forms::Form> chern_from_segre(std::span<const forms::Form> segre);

// (sqrt(-1)/2pi) pi_*[ log(G/h) sum_i Xi_G^i Xi_h^{r-1-i}
//                      - log(det G_{ij-bar} / det h_{ij-bar}) Xi_G^{r-1} ].
FiberResult bott_chern_c0(const MetricModel& model, const MetricModel& hermitian,
                          const CVector& z, const QuadratureSpec& spec);

// h(G)_{ij-bar}(z) = int G_{ij-bar}(z, .) i_z^* omega_FS^{r-1}.
Eigen::MatrixXcd averaged_metric(const MetricModel& model, const CVector& z,
                                 const QuadratureSpec& spec);

// h_z(u) = int |<u, v>|^2 e^{-log G} (omega^phi)^{r-1} / (r-1)!, omega^phi = sqrt(-1) dd-bar_v log G.
struct L2Value {
  double value = 0.0;
  double error = 0.0;
};
L2Value l2_dual_metric(const MetricModel& model, const CVector& z, const CVector& u,
                       const QuadratureSpec& spec);

}  // namespace finslerforms::fiber
