#pragma once

// Pointwise curvature of a Finsler metric G at (z, v), all built from one jet
// of G. Index conventions used throughout:
//
//   levi(i, j)        = G_{i j-bar}
//   levi_inv(j, k)    = G^{j-bar k},      sum_j levi(i, j) levi_inv(j, k) = delta_ik
//   gamma_h[(k r + i) n + a]    = Gamma^k_{i a} = G_{i j-bar a} G^{j-bar k}
//   gamma_v[(k r + i) r + l]    = gamma^k_{i l} = G_{i j-bar l} G^{j-bar k}
//   K[((i r + j) n + a) n + b]  = K_{i j-bar a b-bar}
//   theta(i, k)       = Theta^k_i as a (1,1)-form

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "finslerforms/exterior.hpp"
#include "finslerforms/jets.hpp"
#include "finslerforms/models.hpp"

namespace finslerforms {

// Order 2 gives G, the Levi matrix and Xi; order 4 gives everything.
// vertical keeps z fixed and gives only the fiber (1,1) part of Xi.
enum class Detail { vertical, xi, full };

struct CurvatureBundle {
  CoordinateFrame frame;
  CVector z, v;
  Detail detail = Detail::full;
  double G = 0.0;
  Eigen::MatrixXcd levi, levi_inv;
  std::vector<cd> gamma_h, gamma_v, K;
  Eigen::MatrixXcd psi_matrix;  // P_{a b} = K_{i j-bar a b-bar} v^i v-bar^j / G
  forms::Form psi, omega_fs, xi;
  forms::FormMatrix theta;

  cd gamma_h_at(int k, int i, int a) const { return gamma_h[(k * frame.r + i) * frame.n + a]; }
  cd gamma_v_at(int k, int i, int l) const { return gamma_v[(k * frame.r + i) * frame.r + l]; }
  cd K_at(int i, int j, int a, int b) const {
    return K[((i * frame.r + j) * frame.n + a) * frame.n + b];
  }
};

jets::Jet metric_jet(const MetricModel& model, const CVector& z, const CVector& v, int order);

// Throws when v = 0 or the Levi matrix is not positive-definite.
CurvatureBundle evaluate(const MetricModel& model, const CVector& z, const CVector& v,
                         Detail detail = Detail::full);

// Smallest Levi eigenvalue with its eigenvector; positive means strongly pseudo-convex.
struct LeviSpectrum {
  double min_eigenvalue = 0.0;
  double trace = 0.0;
  Eigen::VectorXcd witness;
};
LeviSpectrum levi_spectrum(const MetricModel& model, const CVector& z, const CVector& v);

// Homogeneity identities, each normalized by G:
// |G_i v^i - G|, |G_j-bar v-bar^j - G|, |G_{i j-bar} v^i v-bar^j - G|,
// max_{j,k} |G_{i j-bar k} v^i|, max_{i,k} |G_{i j-bar k-bar} v-bar^j|.
struct EulerResiduals {
  double g_i = 0, g_jbar = 0, g_ijbar = 0, g_ijbar_k = 0, g_ijbar_kbar = 0;
  double max() const;
};
EulerResiduals euler_residuals(const MetricModel& model, const CVector& z, const CVector& v);

// max |gamma^k_{il} v^i|, max |gamma^k_{il} v^l|, and max |Gamma(z, lambda v) - Gamma(z, v)|.
struct ConnectionResiduals {
  double gamma_contract_i = 0, gamma_contract_l = 0, gamma_h_scaling = 0;
  double max() const;
};
ConnectionResiduals connection_residuals(const MetricModel& model, const CVector& z,
                                         const CVector& v, cd lambda);

// max |coef(Xi) - coef(-Psi / 2 pi + omega_FS)| in the coordinate basis.
double decomposition_residual(const CurvatureBundle& b);
double decomposition_residual(const MetricModel& model, const CVector& z, const CVector& v);

// max |coef(Psi) - coef(sqrt(-1) Theta^k_i v^i G_{k l-bar} v-bar^l / G, horizontal)|.
double theta_consistency_residual(const CurvatureBundle& b);

enum class CurvatureSign { positive, negative, indefinite, flat };
std::string to_string(CurvatureSign s);

struct SamplePoint {
  CVector z, v;
};

struct SignScan {
  CurvatureSign sign = CurvatureSign::flat;
  double margin = 0.0;  // extreme eigenvalue in the direction of the sign
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double max_entry = 0.0;
};
SignScan kobayashi_sign_scan(const MetricModel& model, std::span<const SamplePoint> samples);

// g(a, b) = g_{a b-bar} of the base Kaehler form sqrt(-1) g_{a b-bar} dz^a ^ dz-bar^b.
using KahlerMetric = std::function<Eigen::MatrixXcd(const CVector& z)>;

// g^{a b-bar} K_{i j-bar a b-bar} v^i v-bar^j / G.
cd einstein_trace(const CurvatureBundle& b, const Eigen::MatrixXcd& g);

// g^{a b-bar} K^i_{j a b-bar} for a Hermitian-induced model; lambda is the mean diagonal.
struct HermitianEinstein {
  double residual = 0.0;
  double lambda = 0.0;
};
HermitianEinstein hermitian_einstein_check(const MetricModel& model, std::span<const CVector> zs,
                                           const KahlerMetric& g);

}  // namespace finslerforms
