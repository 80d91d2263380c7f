#include "finslerforms/oracle.hpp"

#include <cmath>
#include <random>

namespace finslerforms::oracle {

namespace {

// Direction t of the nested stencil: coordinate and whether it is d/dw-bar.
struct Direction {
  int coord;
  bool anti;
};

// 4th-order central first-derivative stencil.
constexpr double kOffsets[4] = {-2.0, -1.0, 1.0, 2.0};
constexpr double kWeights[4] = {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};

cd nested(const ScalarFn& f, CVector& point, const std::vector<Direction>& dirs, std::size_t level,
          double h) {
  if (level == dirs.size()) return f(point);
  const auto [c, anti] = dirs[level];
  const cd base = point[c];
  // d/dw = (d/dx - i d/dy) / 2,  d/dw-bar = (d/dx + i d/dy) / 2
  const cd y_factor = anti ? cd{0.0, 0.5} : cd{0.0, -0.5};
  cd dx{}, dy{};
  for (int s = 0; s < 4; ++s) {
    point[c] = base + kOffsets[s] * h;
    dx += kWeights[s] * nested(f, point, dirs, level + 1, h);
    point[c] = base + cd{0.0, kOffsets[s] * h};
    dy += kWeights[s] * nested(f, point, dirs, level + 1, h);
  }
  point[c] = base;
  return (0.5 * dx + y_factor * dy) / h;
}

}  // namespace

FDResult fd_wirtinger(const ScalarFn& f, const CVector& point, const std::vector<int>& holo,
                      const std::vector<int>& anti, const FDPlan& plan) {
  std::vector<Direction> dirs;
  for (int c : holo) dirs.push_back({c, false});
  for (int c : anti) dirs.push_back({c, true});
  for (const auto& d : dirs)
    if (d.coord < 0 || d.coord >= static_cast<int>(point.size()))
      throw Error("fd_wirtinger: coordinate index out of range");
  if (dirs.size() > 4) throw Error("fd_wirtinger: order above 4");
  if (dirs.empty()) return {f(point), 0.0};

  const int m = static_cast<int>(dirs.size());
  // Larger steps for higher orders keep round-off (~eps / h^m) below truncation.
  const double h0 = plan.step * std::pow(10.0, 0.6 * (m - 1));
  if (!(h0 > 1e-8)) throw Error("fd_wirtinger: step underflow");

  CVector p(point);
  std::vector<cd> table;
  for (int level = 0; level <= plan.richardson_levels; ++level) {
    table.push_back(nested(f, p, dirs, 0, h0 / std::pow(2.0, level)));
  }
  // Richardson on an error series in h^4, h^6, ...
  std::vector<cd> prev = table;
  cd last = table.back(), before = table.size() > 1 ? table[table.size() - 2] : table.back();
  for (int k = 1; k <= plan.richardson_levels; ++k) {
    const double factor = std::pow(2.0, 2 * k + 2);
    std::vector<cd> next;
    for (std::size_t i = 1; i < prev.size(); ++i) {
      next.push_back((factor * prev[i] - prev[i - 1]) / (factor - 1.0));
    }
    before = next.size() > 1 ? next[next.size() - 2] : prev.back();
    last = next.back();
    prev = std::move(next);
  }
  if (!std::isfinite(std::abs(last))) throw Error("fd_wirtinger: non-finite result");
  return {last, std::abs(last - before)};
}

cd SplitBundle::c1_coefficient(const CVector& z, int a) const {
  double sum = 0.0;
  for (const auto& d : degrees) sum += d[a];
  return cd{0.0, 1.0} * sum * std::pow(1.0 + std::norm(z[a]), -2.0) / (2.0 * kPi);
}

cd SplitBundle::c2_top_coefficient(const CVector& z) const {
  if (base_dim() != 2) throw Error("c2_top_coefficient needs a two-dimensional base");
  double mixed = 0.0;
  for (int i = 0; i < rank(); ++i)
    for (int j = i + 1; j < rank(); ++j)
      mixed += degrees[i][0] * degrees[j][1] + degrees[i][1] * degrees[j][0];
  const double g = std::pow(1.0 + std::norm(z[0]), -2.0) * std::pow(1.0 + std::norm(z[1]), -2.0);
  // (i / 2pi)^2 = -1 / 4pi^2
  return -mixed * g / (4.0 * kPi * kPi);
}

double SplitBundle::c1_number() const {
  double sum = 0.0;
  for (const auto& d : degrees) sum += d[0];
  return sum;
}

double SplitBundle::c1_omega_number() const {
  if (base_dim() == 1) return c1_number();
  // int c_1(O(a, b)) ^ (omega_1 + omega_2) = 2 pi (a + b)
  double sum = 0.0;
  for (const auto& d : degrees) sum += d[0] + d[1];
  return 2.0 * kPi * sum;
}

double SplitBundle::c2_number() const {
  double mixed = 0.0;
  for (int i = 0; i < rank(); ++i)
    for (int j = i + 1; j < rank(); ++j)
      mixed += degrees[i][0] * degrees[j][1] + degrees[i][1] * degrees[j][0];
  return mixed;
}

BruteResult brute_integrate(int planes, const std::function<cd(const CVector& w)>& integrand,
                            std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw Error("brute_integrate needs at least 2 samples");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> t_dist(0.0, kPi / 2.0), phi_dist(0.0, 2.0 * kPi);
  const double box = std::pow(kPi * kPi, planes);  // (pi/2 * 2pi)^planes
  cd sum{};
  double sq = 0.0;
  CVector w(planes);
  for (std::size_t s = 0; s < samples; ++s) {
    double jac = 1.0;
    for (int p = 0; p < planes; ++p) {
      const double t = t_dist(rng);
      const double c = std::cos(t);
      w[p] = std::polar(std::tan(t), phi_dist(rng));
      jac *= std::tan(t) / (c * c);
    }
    const cd x = integrand(w) * jac * box;
    sum += x;
    sq += std::norm(x);
  }
  const double n = static_cast<double>(samples);
  const cd mean = sum / n;
  const double var = std::max(0.0, sq / n - std::norm(mean));
  if (!std::isfinite(var)) throw Error("brute_integrate: variance overflow");
  return {mean, 3.0 * std::sqrt(var / (n - 1.0))};
}

}  // namespace finslerforms::oracle
