#include "doctest.h"
#include "finslerforms/fiberint.hpp"
#include "finslerforms/oracle.hpp"
#include "helpers.hpp"

#include <random>

using namespace finslerforms;
using namespace finslerforms::fiber;
using forms::Form;

namespace {

const auto kFlat = make_hermitian(1, {{0.0}, {0.0}});
const auto kO11 = make_hermitian(1, {{1.0}, {1.0}});
const auto kO12 = make_hermitian(1, {{1.0}, {2.0}});
const auto kPert = make_perturbed(1, {{1.0}, {1.0}}, 0.1);
const auto kFlatPert = make_perturbed(1, {{0.0}, {0.0}}, 0.1);

// Coefficient of dz ^ dz-bar on a one-dimensional base.
cd dzdzb(const Form& f) { return f.coefficient(0b11); }

QuadratureSpec tensor(int radial, int angular) {
  QuadratureSpec s;
  s.radial_order = radial;
  s.angular_order = angular;
  return s;
}

QuadratureSpec montecarlo(std::size_t samples, std::uint64_t seed) {
  QuadratureSpec s;
  s.mode = quad::Mode::montecarlo;
  s.mc_samples = samples;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("normalization of Xi^{r-1}") {
  const auto flat = normalization(*kFlat, {cd{0.2}}, tensor(64, 64));
  CHECK(std::abs(flat.scalar() - 1.0) < 1e-8);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const CVector z = testing_support::random_point(rng, 1);
    CHECK(std::abs(normalization(*kPert, z, {}).scalar() - 1.0) < 1e-6);
    CHECK(std::abs(normalization(*kO12, z, {}).scalar() - 1.0) < 1e-6);
  }
  const auto rank3 = make_hermitian(1, {{0.0}, {0.0}, {0.0}});
  const auto mc = normalization(*rank3, {cd{}}, montecarlo(100000, 3));
  CHECK(std::abs(mc.scalar() - 1.0) < 0.02);
  CHECK(std::abs(mc.scalar() - 1.0) <= mc.error);
  const auto rank1 = make_hermitian(1, {{2.0}});
  CHECK(std::abs(normalization(*rank1, {cd{0.4}}, {}).scalar() - 1.0) < 1e-15);
}

TEST_CASE("tensor normalization lies in the brute-force band") {
  const CVector z{cd{0.3, -0.1}};
  auto density = [&](const CVector& w) {
    const auto b = evaluate(*kPert, z, {cd{1.0}, w[0]}, Detail::xi);
    return b.xi.coefficient(0b110000) * cd{0.0, -2.0};
  };
  const auto brute = oracle::brute_integrate(1, density, 100000, 5);
  const cd tensor_value = normalization(*kPert, z, {}).scalar();
  CHECK(std::abs(brute.value - tensor_value) < brute.error);
}

TEST_CASE("convergence check and descent check") {
  QuadratureSpec s = tensor(32, 16);
  s.convergence_check = true;
  const auto res = normalization(*kPert, {cd{0.1}}, s);
  CHECK(res.error < 1e-10);
  s.tolerance = 1e-30;
  CHECK_THROWS_AS(normalization(*kPert, {cd{0.1}}, s), Error);
  // Xi^{r-1} times G is not degree zero.
  auto bad = [&](const CVector& v) {
    const auto b = evaluate(*kPert, {cd{}}, v, Detail::xi);
    return b.xi * cd{b.G};
  };
  CHECK_THROWS_AS(fiber_integrate(kPert->frame(), bad, {}), Error);
  CHECK_THROWS_AS(normalization(*kPert, {cd{}}, tensor(4, 16)), Error);
}

TEST_CASE("Segre forms on CP1") {
  CHECK(segre_direct(*kFlat, {cd{0.3}}, 1, {}).value.max_abs() < 1e-14);
  CHECK(segre_via_psi(*kFlat, {cd{0.3}}, 1, {}).value.max_abs() < 1e-14);
  CHECK(std::abs(segre_direct(*kO11, {cd{0.3}}, 0, {}).scalar() - 1.0) < 1e-12);
  // s_1 = -(1/pi) sqrt(-1) dz ^ dz-bar for O(1) + O(1) at the origin.
  const auto s1 = segre_direct(*kO11, {cd{}}, 1, {});
  CHECK(std::abs(dzdzb(s1.value) - cd(0.0, -1.0 / kPi)) < 1e-10);
  std::mt19937_64 rng(2);
  for (const auto& m : {ModelPtr(kO11), ModelPtr(kO12), ModelPtr(kPert)}) {
    for (int t = 0; t < 5; ++t) {
      const CVector z = testing_support::random_point(rng, 1);
      const auto a = segre_direct(*m, z, 1, {});
      const auto b = segre_via_psi(*m, z, 1, {});
      CHECK((a.value - b.value).max_abs() < 1e-9);
    }
  }
  CHECK_THROWS_AS(segre_direct(*kO11, {cd{}}, 2, {}), Error);
}

TEST_CASE("Chern forms via Chern-Weil on the pullback") {
  const auto c1 = chern_via_cw(*kO11, {cd{}}, 1, {});
  CHECK(std::abs(dzdzb(c1.value) - cd(0.0, 1.0 / kPi)) < 1e-10);
  CHECK(chern_via_cw(*kFlat, {cd{0.5}}, 1, {}).value.max_abs() < 1e-14);
  CHECK(std::abs(chern_via_cw(*kPert, {cd{0.5}}, 0, {}).scalar() - 1.0) < 1e-8);
  std::mt19937_64 rng(3);
  const oracle::SplitBundle split{{{1.0}, {2.0}}};
  for (int t = 0; t < 5; ++t) {
    const CVector z = testing_support::random_point(rng, 1);
    CHECK(std::abs(dzdzb(chern_via_cw(*kO12, z, 1, {}).value) - split.c1_coefficient(z, 0)) <
          1e-8);
  }
}

TEST_CASE("graded inverse of the total Segre form") {
  const CoordinateFrame f(2, 2);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  auto random_even = [&](int k) {
    Form out(f);
    for (forms::Mask m = 0; m < 16; ++m)
      if (std::popcount(m) == 2 * k) out.add(m, {g(rng), g(rng)});
    return out;
  };
  const std::vector<Form> zero{Form(f), Form(f)};
  for (const auto& c : chern_from_segre(zero)) CHECK(c.empty());
  const Form sigma = random_even(1);
  const std::vector<Form> geometric{sigma, forms::wedge(sigma, sigma)};
  CHECK(chern_from_segre(geometric)[1].max_abs() < 1e-12);
  const std::vector<Form> s{random_even(1), random_even(2)};
  const auto c = chern_from_segre(s);
  const Form one = Form::scalar(f, 1.0);
  const Form prod = forms::wedge(one + s[0] + s[1], one + c[0] + c[1]);
  CHECK((prod - one).max_abs() < 1e-12);
}

TEST_CASE("Bott-Chern scalar") {
  const auto core = make_hermitian(1, {{1.0}, {2.0}});
  const auto pert = std::make_shared<FinslerPerturbed>(core, 0.1);
  CHECK(std::abs(bott_chern_c0(*core, *core, {cd{0.2}}, {}).scalar()) < 1e-15);
  // Regression anchor from the first run, identical at (24, 8) through (96, 24).
  const cd anchor{0.0, -3.80507313981e-4};
  CHECK(std::abs(bott_chern_c0(*pert, *core, {cd{}}, tensor(24, 8)).scalar() - anchor) < 1e-14);
  CHECK(std::abs(bott_chern_c0(*pert, *core, {cd{}}, tensor(64, 16)).scalar() - anchor) < 1e-14);
  CHECK_THROWS_AS(bott_chern_c0(*core, *pert, {cd{}}, {}), Error);
}

TEST_CASE("averaged metric") {
  const auto flat = averaged_metric(*kFlat, {cd{0.4}}, {});
  CHECK((flat - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  const CVector z{cd{0.5, 0.5}};
  const auto h = averaged_metric(*kO12, z, {});
  const double rho = 1.0 + std::norm(z[0]);
  CHECK(std::abs(h(0, 0) - 1.0 / rho) < 1e-10);
  CHECK(std::abs(h(1, 1) - 1.0 / (rho * rho)) < 1e-10);
  CHECK(std::abs(h(0, 1)) < 1e-10);
  const auto hp = averaged_metric(*kPert, z, {});
  CHECK((hp - hp.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(hp);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("L2 dual metric") {
  // Flat rank 2: h(u) = int |w_0|^2 / |v|^2 over P^1 against 2 pi Xi, which is pi.
  const auto a = l2_dual_metric(*kFlat, {cd{0.3}}, {cd{1.0}, cd{}}, {});
  CHECK(std::abs(a.value - kPi) < 1e-8);
  const auto b = l2_dual_metric(*kFlat, {cd{-0.7, 0.2}}, {cd{}, cd{1.0}}, {});
  CHECK(std::abs(a.value - b.value) < 1e-8);
  const auto p1 = l2_dual_metric(*kFlatPert, {cd{0.1}}, {cd{1.0}, cd{0.5}}, {});
  const auto p2 = l2_dual_metric(*kFlatPert, {cd{0.9, -0.4}}, {cd{1.0}, cd{0.5}}, {});
  CHECK(p1.value > 0.0);
  CHECK(std::abs(p1.value - p2.value) < 1e-12);
  CHECK_THROWS_AS(l2_dual_metric(*kFlat, {cd{}}, {cd{}, cd{}}, {}), Error);
}
