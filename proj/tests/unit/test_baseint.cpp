#include "doctest.h"
#include "finslerforms/baseint.hpp"
#include "finslerforms/oracle.hpp"
#include "helpers.hpp"

#include <random>

using namespace finslerforms;
using namespace finslerforms::base;
using forms::Form;

namespace {

const BaseManifold kCP1(Kind::CP1);
const BaseManifold kProduct(Kind::CP1xCP1);

QuadratureSpec fiber_spec() {
  QuadratureSpec s;
  s.radial_order = 24;
  s.angular_order = 8;
  return s;
}

QuadratureSpec base_spec(bool symmetric = true) {
  QuadratureSpec s;
  s.radial_order = 24;
  s.angular_order = 8;
  s.radial_symmetry = symmetric;
  return s;
}

}  // namespace

TEST_CASE("volumes and omega") {
  for (const auto& m : {kCP1, kProduct}) {
    const CoordinateFrame f(m.dim(), 1);
    auto field = [&](const CVector& z) { return top_coefficient(forms::power(m.omega(f, z), m.dim())); };
    const auto vol = base_integrate(m, field, base_spec(false));
    CHECK(std::abs(vol.value - m.volume()) < 1e-6 * m.volume());
    CHECK(std::abs(base_integrate(m, field, base_spec(true)).value - m.volume()) < 1e-6 * m.volume());
    CHECK(std::abs(trace_omega(m, m.omega(f, CVector(m.dim(), cd{0.3, 0.4})),
                               CVector(m.dim(), cd{0.3, 0.4})) -
                   static_cast<double>(m.dim())) < 1e-14);
  }
  CHECK(base_integrate(kCP1, [](const CVector&) { return cd{}; }, base_spec()).value == cd{});
  CHECK(BaseManifold::from_string("CP1xCP1").dim() == 2);
  CHECK_THROWS_AS(BaseManifold::from_string("CP2"), Error);
}

TEST_CASE("base quadrature agrees with the brute-force oracle") {
  auto field = [](const CVector& z) { return cd{0.0, 1.0} * std::pow(1.0 + std::norm(z[0]), -2.0); };
  const auto tensor = base_integrate(kCP1, field, base_spec());
  // (-2i) * i f = 2 f against dx dy
  const auto brute = oracle::brute_integrate(
      1, [&](const CVector& w) { return cd{0.0, -2.0} * field(w); }, 100000, 13);
  CHECK(std::abs(tensor.value - brute.value) < brute.error);
  CHECK(std::abs(tensor.value - 2.0 * kPi) < 1e-10);
}

TEST_CASE("radial symmetry is verified, not assumed") {
  auto field = [](const CVector& z) { return cd{z[0].real() * z[0].real()} / std::pow(1.0 + std::norm(z[0]), 3.0); };
  CHECK_THROWS_AS(base_integrate(kCP1, field, base_spec(true)), Error);
  CHECK_NOTHROW(base_integrate(kCP1, field, base_spec(false)));
}

TEST_CASE("first Chern numbers on CP1") {
  for (const auto& deg : std::vector<std::vector<std::vector<double>>>{{{1.0}, {1.0}}, {{1.0}, {2.0}}}) {
    const oracle::SplitBundle split{deg};
    for (double eps : {0.0, 0.05, 0.1}) {
      const auto model = make_perturbed(1, deg, eps);
      auto cw = [&](const CVector& z) {
        return top_coefficient(fiber::chern_via_cw(*model, z, 1, fiber_spec()).value);
      };
      const auto c1 = base_integrate(kCP1, cw, base_spec());
      const auto C1 = degree(*model, kCP1, fiber_spec(), base_spec());
      CHECK(std::abs(c1.value - split.c1_number()) < 1e-4);
      CHECK(std::abs(C1.value - split.c1_number()) < 1e-4);
    }
  }
}

TEST_CASE("Gauss-Bonnet for TCP1") {
  // TCP1 = O(2) with the Fubini-Study metric (1+|z|^2)^{-2}.
  const auto tangent = make_hermitian(1, {{2.0}});
  auto cw = [&](const CVector& z) {
    return top_coefficient(fiber::chern_via_cw(*tangent, z, 1, fiber_spec()).value);
  };
  CHECK(std::abs(base_integrate(kCP1, cw, base_spec()).value - 2.0) < 1e-4);
}

TEST_CASE("Einstein constant and slopes") {
  const auto o11 = make_hermitian(1, {{1.0}, {1.0}});
  const auto lam = lambda_from_class(*o11, kCP1, fiber_spec(), base_spec());
  CHECK(std::abs(lam.lambda - 1.0) < 1e-4);
  const auto flat = make_hermitian(1, {{0.0}, {0.0}});
  CHECK(std::abs(lambda_from_class(*flat, kCP1, fiber_spec(), base_spec()).lambda) < 1e-12);
  const auto twisted = std::make_shared<TensorByLine>(o11, std::vector<double>{1.0});
  const auto line = make_hermitian(1, {{1.0}});
  const double sum = lam.lambda + lambda_from_class(*line, kCP1, fiber_spec(), base_spec()).lambda;
  CHECK(std::abs(lambda_from_class(*twisted, kCP1, fiber_spec(), base_spec()).lambda - sum) < 1e-4);

  const auto pert = make_perturbed(1, {{1.0}, {1.0}}, 0.1);
  const auto total = slope(*pert, kCP1, fiber_spec(), base_spec());
  CHECK(total.rank == 2);
  CHECK(std::abs(total.slope - 1.0) < 1e-4);
  const auto sub = std::make_shared<Restricted>(pert, std::vector<int>{0});
  const auto part = slope(*sub, kCP1, fiber_spec(), base_spec());
  CHECK(part.rank == 1);
  CHECK(part.slope <= total.slope + 1e-4);
  CHECK(std::abs(part.slope - total.slope) < 1e-4);
  const auto flat_line = std::make_shared<Restricted>(flat, std::vector<int>{1});
  CHECK(std::abs(slope(*flat_line, kCP1, fiber_spec(), base_spec()).slope) < 1e-12);
}

TEST_CASE("trace of Psi and Cauchy-Schwarz") {
  std::mt19937_64 rng(11);
  const auto o11 = make_hermitian(1, {{1.0}, {1.0}});
  const auto mixed = make_perturbed(2, {{1.0, 0.0}, {0.0, 1.0}}, 0.1);
  for (int t = 0; t < 10; ++t) {
    const CVector z = testing_support::random_point(rng, 1);
    const auto b = evaluate(*o11, z, testing_support::random_fiber(rng, 2));
    CHECK(std::abs(trace_omega(kCP1, b.psi, z) - 1.0) < 1e-12);
    const CVector z2 = testing_support::random_point(rng, 2);
    const auto b2 = evaluate(*mixed, z2, testing_support::random_fiber(rng, 2));
    const cd tr = trace_omega(kProduct, b2.psi, z2);
    CHECK(2.0 * trace_omega_sq(kProduct, b2).real() >= std::norm(tr) - 1e-12);
  }
}

TEST_CASE("Kobayashi-Luebke and Segre bound fields on CP1 x CP1") {
  const CVector z{cd{0.3}, cd{-0.2, 0.1}};
  // L + L with L = O(1, 1): lambda = 2, equality in both.
  const auto ll = make_hermitian(2, {{1.0, 1.0}, {1.0, 1.0}});
  const auto eq = kl_fields(*ll, kProduct, z, 2.0, fiber_spec());
  CHECK(std::abs(eq.kl) < 1e-10);
  CHECK(std::abs(eq.segre - eq.segre_bound) < 1e-10);
  CHECK(std::abs(eq.segre_bound - 6.0 / (8.0 * kPi * kPi)) < 1e-14);
  // O(1,0) + O(0,1): lambda = 1, kl = -1/(4 pi^2), s_2 = 1/(8 pi^2) < 3/(16 pi^2).
  const auto split = make_hermitian(2, {{1.0, 0.0}, {0.0, 1.0}});
  const auto strict = kl_fields(*split, kProduct, z, 1.0, fiber_spec());
  CHECK(std::abs(strict.kl + 1.0 / (4.0 * kPi * kPi)) < 1e-10);
  CHECK(std::abs(strict.segre - 1.0 / (8.0 * kPi * kPi)) < 1e-10);
  CHECK(strict.segre < strict.segre_bound);
  const auto flat = make_hermitian(2, {{0.0, 0.0}, {0.0, 0.0}});
  const auto zero = kl_fields(*flat, kProduct, z, 0.0, fiber_spec());
  CHECK(std::abs(zero.kl) < 1e-12);
  CHECK(std::abs(zero.segre) < 1e-12);
}

TEST_CASE("lambda on CP1 x CP1 from the class") {
  const auto ll = make_hermitian(2, {{1.0, 1.0}, {1.0, 1.0}});
  QuadratureSpec f = fiber_spec(), b = base_spec();
  f.radial_order = b.radial_order = 16;
  CHECK(std::abs(lambda_from_class(*ll, kProduct, f, b).lambda - 2.0) < 1e-6);
}
