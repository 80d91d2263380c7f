#include "doctest.h"
#include "finslerforms/oracle.hpp"

#include <cmath>

using namespace finslerforms;
using namespace finslerforms::oracle;

namespace {

cd abs2(cd z) { return z * std::conj(z); }

}  // namespace

TEST_CASE("fd_wirtinger: Hessian of |v|^2") {
  auto f = [](const CVector& p) { return abs2(p[0]); };
  const auto d = fd_wirtinger(f, {cd{0.7, 0.2}}, {0}, {0});
  CHECK(std::abs(d.value - 1.0) < 1e-10);
  CHECK(std::abs(fd_wirtinger(f, {cd{0.7, 0.2}}, {0}, {}).value - cd(0.7, -0.2)) < 1e-10);
}

TEST_CASE("fd_wirtinger: polynomials with known coefficients are exact to 1e-8") {
  // f = z^2 zb w + 3 w wb^2, with d^3/dz^2 dzb = 2 w, d^2/dw dwb = 6 wb, d^4/dz^2 dzb dw = 2
  auto f = [](const CVector& p) {
    const cd z = p[0], w = p[1];
    return z * z * std::conj(z) * w + 3.0 * w * std::conj(w) * std::conj(w);
  };
  const CVector pt{cd{0.3, -0.4}, cd{-0.6, 0.25}};
  CHECK(std::abs(fd_wirtinger(f, pt, {0, 0}, {0}).value - 2.0 * pt[1]) < 1e-8);
  CHECK(std::abs(fd_wirtinger(f, pt, {1}, {1}).value - 6.0 * std::conj(pt[1])) < 1e-8);
  CHECK(std::abs(fd_wirtinger(f, pt, {0, 0, 1}, {0}).value - 2.0) < 1e-8);
  CHECK(std::abs(fd_wirtinger(f, pt, {1, 1}, {}).value) < 1e-8);
}

TEST_CASE("fd_wirtinger: fourth derivative of log(1 + |z|^2) at the origin") {
  // log(1 + x) = x - x^2/2 + ..., so the |z|^4 coefficient is -1/2 and
  // d^4/dz^2 dzb^2 picks up 2! 2! times it: -2.
  auto f = [](const CVector& p) { return std::log(1.0 + abs2(p[0])); };
  const auto d = fd_wirtinger(f, {cd{0.0, 0.0}}, {0, 0}, {0, 0});
  CHECK(std::abs(d.value - (-2.0)) < 1e-6);
  CHECK(d.error < 1e-5);
}

TEST_CASE("fd_wirtinger: rejects orders above four") {
  auto f = [](const CVector& p) { return p[0]; };
  CHECK_THROWS_AS(fd_wirtinger(f, {cd{}}, {0, 0, 0}, {0, 0}), Error);
}

TEST_CASE("split bundle Chern numbers") {
  CHECK(SplitBundle{{{1.0}}}.c1_number() == doctest::Approx(1.0));
  CHECK(SplitBundle{{{1.0}, {2.0}}}.c1_number() == doctest::Approx(3.0));
  CHECK(SplitBundle{{{1.0, 0.0}, {0.0, 1.0}}}.c2_number() == doctest::Approx(1.0));
  CHECK(SplitBundle{{{1.0, 1.0}, {1.0, 1.0}}}.c2_number() == doctest::Approx(2.0));
  // c_1 density of O(1) + O(1) at the origin: (1/pi) sqrt(-1) dz ^ dz-bar
  const cd c1 = SplitBundle{{{1.0}, {1.0}}}.c1_coefficient({cd{}}, 0);
  CHECK(std::abs(c1 - cd(0.0, 1.0 / kPi)) < 1e-15);
}

TEST_CASE("brute_integrate: FS area of CP1") {
  // omega = sqrt(-1) (1+|z|^2)^{-2} dz ^ dz-bar = 2 (1+|z|^2)^{-2} dx dy
  auto f = [](const CVector& w) { return cd{2.0 * std::pow(1.0 + std::norm(w[0]), -2.0)}; };
  const auto res = brute_integrate(1, f, 100000, 7);
  CHECK(std::abs(res.value - 2.0 * kPi) < 0.01 * 2.0 * kPi);
  CHECK(std::abs(res.value - 2.0 * kPi) < res.error);
}

TEST_CASE("brute_integrate: fiber normalization of the flat rank-2 metric") {
  // Xi on the fiber chart is (sqrt(-1)/2pi)(1+|w|^2)^{-2} dw ^ dw-bar, density (1/pi)(1+|w|^2)^{-2}.
  auto f = [](const CVector& w) { return cd{std::pow(1.0 + std::norm(w[0]), -2.0) / kPi}; };
  const auto res = brute_integrate(1, f, 100000, 11);
  CHECK(std::abs(res.value - 1.0) < 0.01);
}

TEST_CASE("brute_integrate: zero integrand") {
  const auto res = brute_integrate(2, [](const CVector&) { return cd{}; }, 1000, 3);
  CHECK(res.value == cd{});
  CHECK(res.error == 0.0);
}
