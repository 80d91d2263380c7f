#include "finslerforms/fiberint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace finslerforms::fiber {

namespace {

using forms::Form;
using forms::Mask;

constexpr std::size_t kMcBlock = 1 << 15;

Mask coord_mask(int coord) {
  return (Mask{1} << CoordinateFrame::holo_slot(coord)) |
         (Mask{1} << CoordinateFrame::anti_slot(coord));
}

// Chart volume element: the vertical monomial dw^1 dw-bar^1 ... dw^m dw-bar^m.
Mask chart_volume_mask(const CoordinateFrame& f) {
  Mask m = 0;
  for (int a = 1; a < f.r; ++a) m |= coord_mask(f.fiber_coord(a));
  return m;
}

// (sqrt(-1) dw ^ dw-bar = 2 dx ^ dy)  =>  dw ^ dw-bar = -2i dx ^ dy.
cd chart_orientation(int m) { return std::pow(cd{0.0, -2.0}, m); }

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

struct Reduction {
  std::vector<quad::ComplexAccumulator> sum;
  std::vector<quad::Accumulator> sq;

  explicit Reduction(std::size_t width) : sum(width), sq(width) {}
};

ChartIntegral tensor_chart(int rank, std::size_t width, const ChartDensity& density,
                           const QuadratureSpec& spec) {
  const int m = rank - 1;
  const auto nodes = quad::product_rule(m, spec.radial_order, spec.angular_order);
  std::vector<std::vector<cd>> values(nodes.size());
  quad::parallel_for(nodes.size(), [&](std::size_t k) {
    CVector v{1.0};
    v.insert(v.end(), nodes[k].w.begin(), nodes[k].w.end());
    values[k] = density(v);
    if (values[k].size() != width) throw Error("fiber density returned the wrong width");
  });
  Reduction red(width);
  for (std::size_t k = 0; k < nodes.size(); ++k)
    for (std::size_t e = 0; e < width; ++e) red.sum[e].add(values[k][e] * nodes[k].weight);
  ChartIntegral out;
  out.nodes = nodes.size();
  out.errors.assign(width, 0.0);
  for (std::size_t e = 0; e < width; ++e) out.values.push_back(red.sum[e].value());
  return out;
}

ChartIntegral montecarlo_chart(int rank, std::size_t width, const ChartDensity& density,
                               const QuadratureSpec& spec) {
  const int m = rank - 1;
  const double norm = factorial(m) / std::pow(kPi, m);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  Reduction red(width);
  std::vector<CVector> points;
  std::vector<double> inv_density;
  std::vector<std::vector<cd>> values;
  for (std::size_t done = 0; done < spec.mc_samples;) {
    const std::size_t count = std::min(kMcBlock, spec.mc_samples - done);
    points.assign(count, {});
    inv_density.assign(count, 0.0);
    values.assign(count, {});
    for (std::size_t s = 0; s < count; ++s) {
      CVector u(rank);
      for (auto& x : u) x = {normal(rng), normal(rng)};
      CVector v{1.0};
      double w2 = 0.0;
      for (int a = 1; a < rank; ++a) {
        v.push_back(u[a] / u[0]);
        w2 += std::norm(v.back());
      }
      points[s] = std::move(v);
      inv_density[s] = std::pow(1.0 + w2, m + 1) / norm;
    }
    quad::parallel_for(count, [&](std::size_t s) {
      values[s] = density(points[s]);
      if (values[s].size() != width) throw Error("fiber density returned the wrong width");
    });
    for (std::size_t s = 0; s < count; ++s)
      for (std::size_t e = 0; e < width; ++e) {
        const cd x = values[s][e] * inv_density[s];
        red.sum[e].add(x);
        red.sq[e].add(std::norm(x));
      }
    done += count;
  }
  const double N = static_cast<double>(spec.mc_samples);
  ChartIntegral out;
  out.nodes = spec.mc_samples;
  for (std::size_t e = 0; e < width; ++e) {
    const cd mean = red.sum[e].value() / N;
    const double var = std::max(0.0, red.sq[e].value() / N - std::norm(mean));
    out.values.push_back(mean);
    // A zero-variance estimator (importance density equal to the integrand) still has round-off.
    out.errors.push_back(std::max(3.0 * std::sqrt(var / (N - 1.0)), 1e-12 * std::max(1.0, std::abs(mean))));
  }
  return out;
}

}  // namespace

ChartIntegral integrate_chart(int rank, std::size_t width, const ChartDensity& raw_density,
                              const QuadratureSpec& spec, std::span<const double> scales) {
  spec.validate();
  if (rank < 1) throw Error("fiber integration needs rank >= 1");
  if (!scales.empty() && static_cast<int>(scales.size()) != rank - 1) {
    throw Error("chart scales need one entry per affine coordinate");
  }
  double jacobian = 1.0;
  for (double s : scales) {
    if (!(s > 0.0)) throw Error("chart scales must be positive");
    jacobian *= s * s;
  }
  const std::vector<double> sc(scales.begin(), scales.end());
  ChartDensity scaled = [&](const CVector& v) {
    CVector u(v);
    for (std::size_t a = 0; a < sc.size(); ++a) u[a + 1] *= sc[a];
    auto out = raw_density(u);
    for (auto& x : out) x *= jacobian;
    return out;
  };
  const ChartDensity& density = sc.empty() ? raw_density : scaled;
  if (rank == 1) {
    ChartIntegral out;
    out.values = density(CVector{1.0});
    out.errors.assign(out.values.size(), 0.0);
    out.nodes = 1;
    return out;
  }
  if (spec.mode == quad::Mode::montecarlo) return montecarlo_chart(rank, width, density, spec);
  ChartIntegral out = tensor_chart(rank, width, density, spec);
  if (spec.convergence_check) {
    const ChartIntegral fine = tensor_chart(rank, width, density, spec.raised());
    for (std::size_t e = 0; e < width; ++e) {
      out.errors[e] = std::abs(fine.values[e] - out.values[e]);
      if (out.errors[e] > spec.tolerance) {
        throw Error("fiber quadrature did not converge: raising orders changed a coefficient by " +
                    std::to_string(out.errors[e]));
      }
    }
  }
  return out;
}

double descent_defect(const FormIntegrand& integrand, const CoordinateFrame& frame,
                      const CVector& v, cd lambda) {
  CVector lv(v);
  for (auto& x : lv) x *= lambda;
  const Form a = integrand(v);
  const Form b = integrand(lv);
  const Mask vert = forms::vertical_mask(frame);
  Form scaled(frame);
  for (const auto& [m, c] : b.terms()) {
    const int p = forms::unbarred_count(m & vert);
    const int q = forms::barred_count(m & vert);
    scaled.add(m, c * std::pow(lambda, p) * std::pow(std::conj(lambda), q));
  }
  // Forms that vanish identically (Xi_vert^r, say) carry round-off only.
  return (scaled - a).max_abs() / std::max(a.max_abs(), 1e-9);
}

std::vector<double> chart_scales(const MetricModel& model, const CVector& z) {
  const int r = model.frame().r;
  CVector e(r, cd{});
  e[0] = 1.0;
  const double g0 = model.value(z, e);
  std::vector<double> out;
  for (int a = 1; a < r; ++a) {
    CVector ea(r, cd{});
    ea[a] = 1.0;
    const double ga = model.value(z, ea);
    if (!(g0 > 0.0 && ga > 0.0)) throw Error("chart scales: metric not positive on a coordinate axis");
    out.push_back(std::sqrt(g0 / ga));
  }
  return out;
}

FiberResult fiber_integrate(const CoordinateFrame& frame, const FormIntegrand& integrand,
                            const QuadratureSpec& spec, bool check_descent,
                            std::span<const double> scales) {
  const Mask horiz = forms::horizontal_mask(frame);
  const Mask vert = forms::vertical_mask(frame);
  const Mask volume = chart_volume_mask(frame);
  const Mask dv0 = coord_mask(frame.fiber_coord(0));
  const std::size_t width = std::size_t{1} << (2 * frame.n);
  const cd orient = chart_orientation(frame.r - 1);

  if (check_descent) {
    std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> mag(0.5, 2.0), arg(0.0, 2.0 * kPi);
    CVector v{1.0};
    for (int a = 1; a < frame.r; ++a) v.push_back(cd{0.3 * a, -0.2 + 0.1 * a});
    for (int t = 0; t < 3; ++t) {
      const cd lambda = std::polar(mag(rng), arg(rng));
      const double d = descent_defect(integrand, frame, v, lambda);
      if (d > 1e-7) {
        throw Error("integrand does not descend to P(E_z): relative defect " + std::to_string(d));
      }
    }
  }

  auto density = [&](const CVector& v) {
    std::vector<cd> out(width);
    const Form form = integrand(v);
    for (const auto& [m, c] : form.terms()) {
      if ((m & dv0) || (m & vert) != volume) continue;
      out[m & horiz] += c * orient;
    }
    return out;
  };
  const ChartIntegral chart = integrate_chart(frame.r, width, density, spec, scales);

  FiberResult result;
  result.value = Form(frame);
  result.nodes = chart.nodes;
  for (std::size_t h = 0; h < width; ++h) {
    if (chart.values[h] != cd{}) result.value.add(static_cast<Mask>(h), chart.values[h]);
    result.error = std::max(result.error, chart.errors[h]);
  }
  return result;
}

FiberResult normalization(const MetricModel& model, const CVector& z, const QuadratureSpec& spec) {
  const int r = model.frame().r;
  auto integrand = [&](const CVector& v) {
    return forms::power(evaluate(model, z, v, Detail::vertical).xi, r - 1);
  };
  return fiber_integrate(model.frame(), integrand, spec, true, chart_scales(model, z));
}

FiberResult total_segre(const MetricModel& model, const CVector& z, const QuadratureSpec& spec) {
  const auto& f = model.frame();
  auto integrand = [&](const CVector& v) {
    const Form xi = evaluate(model, z, v, Detail::xi).xi;
    Form p = forms::power(xi, f.r - 1);
    Form total = p;
    for (int j = 1; j <= f.n; ++j) {
      p = forms::wedge(p, xi);
      total += p;
    }
    return total;
  };
  return fiber_integrate(f, integrand, spec, true, chart_scales(model, z));
}

FiberResult segre_direct(const MetricModel& model, const CVector& z, int j,
                         const QuadratureSpec& spec) {
  if (j < 0 || j > model.frame().n) throw Error("segre_direct: need 0 <= j <= n");
  const int r = model.frame().r;
  auto integrand = [&](const CVector& v) {
    return forms::power(evaluate(model, z, v, Detail::xi).xi, r - 1 + j);
  };
  FiberResult res = fiber_integrate(model.frame(), integrand, spec, true, chart_scales(model, z));
  res.value = forms::degree_extract(res.value, 2 * j);
  return res;
}

FiberResult segre_via_psi(const MetricModel& model, const CVector& z, int k,
                          const QuadratureSpec& spec) {
  const auto& f = model.frame();
  if (k < 1 || k > f.n) throw Error("segre_via_psi: need 1 <= k <= n");
  auto integrand = [&](const CVector& v) {
    const auto b = evaluate(model, z, v);
    const Form fs_vert = forms::bidegree_extract(b.omega_fs, 1, 1, forms::Split::vertical);
    return forms::wedge(forms::power(b.psi, k), forms::power(fs_vert, f.r - 1));
  };
  FiberResult res = fiber_integrate(f, integrand, spec, true, chart_scales(model, z));
  const double scale = (k % 2 ? -1.0 : 1.0) * binomial(f.r - 1 + k, k) / std::pow(2.0 * kPi, k);
  res.value *= scale;
  res.error *= std::abs(scale);
  return res;
}

FiberResult total_chern_cw(const MetricModel& model, const CVector& z, const QuadratureSpec& spec) {
  const auto& f = model.frame();
  auto integrand = [&](const CVector& v) {
    const auto b = evaluate(model, z, v);
    const Form c = forms::det_plus_identity(b.theta, kI / (2.0 * kPi));
    return forms::wedge(c, forms::power(b.xi, f.r - 1));
  };
  return fiber_integrate(f, integrand, spec, true, chart_scales(model, z));
}

FiberResult chern_via_cw(const MetricModel& model, const CVector& z, int k,
                         const QuadratureSpec& spec) {
  if (k < 0 || k > model.frame().r) throw Error("chern_via_cw: need 0 <= k <= r");
  FiberResult res = total_chern_cw(model, z, spec);
  res.value = forms::degree_extract(res.value, 2 * k);
  return res;
}

std::vector<Form> chern_from_segre(std::span<const Form> segre) {
  if (segre.empty()) return {};
  const auto& frame = segre.front().frame();
  std::vector<Form> c{Form::scalar(frame, 1.0)};
  for (std::size_t k = 1; k <= segre.size(); ++k) {
    Form ck(frame);
    for (std::size_t j = 1; j <= k; ++j) ck -= forms::wedge(segre[j - 1], c[k - j]);
    c.push_back(std::move(ck));
  }
  c.erase(c.begin());
  return c;
}

FiberResult bott_chern_c0(const MetricModel& model, const MetricModel& hermitian,
                          const CVector& z, const QuadratureSpec& spec) {
  const auto& f = model.frame();
  if (hermitian.frame() != f) throw Error("bott_chern_c0: metrics live on different frames");
  if (!hermitian.hermitian()) throw Error("bott_chern_c0: auxiliary metric must be Hermitian");
  const int r = f.r;
  auto integrand = [&](const CVector& v) {
    const auto bg = evaluate(model, z, v, Detail::vertical);
    const auto bh = evaluate(hermitian, z, v, Detail::vertical);
    const Form& xg = bg.xi;
    const Form& xh = bh.xi;
    Form mixed(f);
    for (int i = 0; i < r; ++i) mixed += forms::wedge(forms::power(xg, i), forms::power(xh, r - 1 - i));
    const double log_ratio = std::log(bg.G / bh.G);
    const double log_det = std::log(bg.levi.determinant().real() / bh.levi.determinant().real());
    return (mixed * cd{log_ratio} - forms::power(xg, r - 1) * cd{log_det}) * (kI / (2.0 * kPi));
  };
  FiberResult res = fiber_integrate(f, integrand, spec, true, chart_scales(model, z));
  res.value = forms::degree_extract(res.value, 0);
  return res;
}

Eigen::MatrixXcd averaged_metric(const MetricModel& model, const CVector& z,
                                 const QuadratureSpec& spec) {
  const auto& f = model.frame();
  const int r = f.r;
  const Mask volume = chart_volume_mask(f);
  const cd orient = chart_orientation(r - 1);
  auto density = [&](const CVector& v) {
    const auto b = evaluate(model, z, v, Detail::vertical);
    const cd top = forms::power(b.xi, r - 1).coefficient(volume) * orient;
    std::vector<cd> out(r * r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) out[i * r + j] = b.levi(i, j) * top;
    return out;
  };
  const auto chart = integrate_chart(r, r * r, density, spec, chart_scales(model, z));
  Eigen::MatrixXcd h(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) h(i, j) = chart.values[i * r + j];
  return h;
}

L2Value l2_dual_metric(const MetricModel& model, const CVector& z, const CVector& u,
                       const QuadratureSpec& spec) {
  const auto& f = model.frame();
  const int r = f.r;
  if (static_cast<int>(u.size()) != r) throw Error("l2_dual_metric: dual vector has wrong size");
  if (std::all_of(u.begin(), u.end(), [](cd x) { return x == cd{}; })) {
    throw Error("l2_dual_metric: dual vector must be nonzero");
  }
  const Mask volume = chart_volume_mask(f);
  // omega^phi = 2 pi Xi on the fiber.
  const cd scale = chart_orientation(r - 1) * std::pow(2.0 * kPi, r - 1) / factorial(r - 1);
  auto density = [&](const CVector& v) {
    const auto b = evaluate(model, z, v, Detail::vertical);
    cd pairing{};
    for (int i = 0; i < r; ++i) pairing += u[i] * v[i];
    const cd top = forms::power(b.xi, r - 1).coefficient(volume);
    return std::vector<cd>{std::norm(pairing) / b.G * top * scale};
  };
  const auto chart = integrate_chart(r, 1, density, spec, chart_scales(model, z));
  return {chart.values[0].real(), chart.errors[0]};
}

}  // namespace finslerforms::fiber
