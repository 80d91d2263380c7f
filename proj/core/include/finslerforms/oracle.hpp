#pragma once

// Independent ground truth: finite-difference Wirtinger derivatives, closed-form
// Chern-Weil data of split Hermitian bundles, and a plain Monte Carlo
// integrator. Nothing here touches the jet or quadrature engines.

#include <cstdint>
#include <functional>
#include <vector>

#include "finslerforms/frame.hpp"

namespace finslerforms::oracle {

struct FDPlan {
  double step = 1e-3;
  int richardson_levels = 2;
};

// f takes the holomorphic coordinates; conjugates are formed inside f.
using ScalarFn = std::function<cd(const CVector& point)>;

struct FDResult {
  cd value;
  double error = 0.0;  // difference between the last two Richardson levels
};

// Mixed Wirtinger derivative d/dw^{holo} d/dw-bar^{anti} by nested 4th-order
// central differences with d/dw = (d/dx - i d/dy) / 2, then Richardson.
FDResult fd_wirtinger(const ScalarFn& f, const CVector& point, const std::vector<int>& holo,
                      const std::vector<int>& anti, const FDPlan& plan = {});

// Split bundle L_1 + ... + L_r with L_i = O(a_i^1, ..., a_i^n) and the product
// Fubini-Study metrics (1 + |z^a|^2)^{-a_i^a}.
struct SplitBundle {
  std::vector<std::vector<double>> degrees;  // degrees[i][a]

  int rank() const { return static_cast<int>(degrees.size()); }
  int base_dim() const { return degrees.empty() ? 0 : static_cast<int>(degrees[0].size()); }

  // Coefficient of dz^a ^ dz-bar^a in c_1(E, h) at z.
  cd c1_coefficient(const CVector& z, int a) const;
  // Coefficient of dz^1 ^ dz-bar^1 ^ dz^2 ^ dz-bar^2 in c_2(E, h) at z (n = 2).
  cd c2_top_coefficient(const CVector& z) const;
  double c1_number() const;                // int_CP1 c_1 (n = 1)
  double c1_omega_number() const;          // int c_1 ^ omega^{n-1}, FS profile omega
  double c2_number() const;                // int c_2 on CP1 x CP1
};

// Plain Monte Carlo over copies of C with w = tan(t) e^{i phi}, t and phi
// uniform; the integrand is taken against dx dy per plane.
struct BruteResult {
  cd value;
  double error = 0.0;  // 3 standard errors
};
BruteResult brute_integrate(int planes, const std::function<cd(const CVector& w)>& integrand,
                            std::size_t samples, std::uint64_t seed);

}  // namespace finslerforms::oracle
