#include "finslerforms/baseint.hpp"

#include <cmath>

namespace finslerforms::base {

BaseManifold BaseManifold::from_string(const std::string& name) {
  if (name == "CP1") return BaseManifold(Kind::CP1);
  if (name == "CP1xCP1") return BaseManifold(Kind::CP1xCP1);
  throw Error("unknown base manifold '" + name + "' (expected CP1 or CP1xCP1)");
}

Eigen::MatrixXcd BaseManifold::kahler(const CVector& z) const {
  if (static_cast<int>(z.size()) != dim()) throw Error("base point has the wrong dimension");
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim(), dim());
  for (int a = 0; a < dim(); ++a) g(a, a) = std::pow(1.0 + std::norm(z[a]), -2.0);
  return g;
}

KahlerMetric BaseManifold::kahler_metric() const {
  return [m = *this](const CVector& z) { return m.kahler(z); };
}

forms::Form BaseManifold::omega(const CoordinateFrame& frame, const CVector& z) const {
  if (frame.n != dim()) throw Error("omega: frame base dimension differs from the manifold");
  const auto g = kahler(z);
  forms::Form w(frame);
  for (int a = 0; a < dim(); ++a)
    w += forms::wedge(forms::Form::dz(frame, a), forms::Form::dzbar(frame, a)) * (kI * g(a, a));
  return w;
}

double BaseManifold::volume() const {
  return kind_ == Kind::CP1 ? 2.0 * kPi : 8.0 * kPi * kPi;
}

forms::Mask top_mask(int n) { return (forms::Mask{1} << (2 * n)) - 1; }

cd top_coefficient(const forms::Form& f) { return f.coefficient(top_mask(f.frame().n)); }

cd ratio_to_volume(const BaseManifold& m, const forms::Form& f, const CVector& z) {
  const auto vol = forms::power(m.omega(f.frame(), z), m.dim());
  return top_coefficient(f) / top_coefficient(vol);
}

namespace {

cd integrate_once(const BaseManifold& m, const TopField& field, const QuadratureSpec& spec,
                  std::size_t& nodes_used) {
  const int angular = spec.radial_symmetry ? 1 : spec.angular_order;
  const auto nodes = quad::product_rule(m.dim(), spec.radial_order, angular);
  std::vector<cd> values(nodes.size());
  quad::parallel_for(nodes.size(), [&](std::size_t k) { values[k] = field(nodes[k].w); });
  quad::ComplexAccumulator acc;
  for (std::size_t k = 0; k < nodes.size(); ++k) acc.add(values[k] * nodes[k].weight);
  nodes_used = nodes.size();
  return acc.value() * std::pow(cd{0.0, -2.0}, m.dim());
}

void require_symmetric(const BaseManifold& m, const TopField& field) {
  CVector z(m.dim()), rotated(m.dim());
  for (int a = 0; a < m.dim(); ++a) {
    z[a] = cd{0.4 + 0.3 * a, 0.2};
    rotated[a] = z[a] * std::polar(1.0, 0.7 + 1.1 * a);
  }
  const cd f0 = field(z), f1 = field(rotated);
  if (std::abs(f0 - f1) > 1e-10 * std::max(1.0, std::abs(f0))) {
    throw Error("base field is not rotation invariant; disable radial_symmetry");
  }
}

}  // namespace

BaseResult base_integrate(const BaseManifold& m, const TopField& field,
                          const QuadratureSpec& spec) {
  spec.validate();
  if (spec.mode != quad::Mode::tensor) {
    throw Error("base integration is tensor-only; use the brute-force oracle for Monte Carlo");
  }
  if (spec.radial_symmetry) require_symmetric(m, field);
  BaseResult out;
  out.value = integrate_once(m, field, spec, out.nodes);
  if (spec.convergence_check) {
    std::size_t fine_nodes = 0;
    const cd fine = integrate_once(m, field, spec.raised(), fine_nodes);
    out.error = std::abs(fine - out.value);
    if (out.error > spec.tolerance) {
      throw Error("base quadrature did not converge: raising orders changed the integral by " +
                  std::to_string(out.error));
    }
  }
  return out;
}

cd trace_omega(const BaseManifold& m, const forms::Form& form, const CVector& z) {
  const int n = m.dim();
  if (form.frame().n != n) throw Error("trace_omega: frame base dimension differs");
  Eigen::MatrixXcd F(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const auto probe = forms::wedge(forms::Form::dz(form.frame(), a),
                                      forms::Form::dzbar(form.frame(), b));
      const auto& [mask, sign] = probe.terms().front();
      F(a, b) = form.coefficient(mask) * sign / kI;
    }
  return (m.kahler(z).inverse() * F).trace();
}

cd trace_omega_sq(const BaseManifold& m, const CurvatureBundle& b) {
  const Eigen::MatrixXcd ginv = m.kahler(b.z).inverse();
  return (b.psi_matrix * ginv * b.psi_matrix * ginv).trace();
}

BaseResult degree(const MetricModel& model, const BaseManifold& m,
                  const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec) {
  const int n = m.dim();
  if (model.frame().n != n) throw Error("degree: model base dimension differs from the manifold");
  auto field = [&](const CVector& z) {
    const auto s1 = fiber::segre_direct(model, z, 1, fiber_spec).value;
    const auto c1 = s1 * cd{-1.0};
    return top_coefficient(forms::wedge(c1, forms::power(m.omega(model.frame(), z), n - 1)));
  };
  return base_integrate(m, field, base_spec);
}

LambdaResult lambda_from_class(const MetricModel& model, const BaseManifold& m,
                               const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec) {
  const auto deg = degree(model, m, fiber_spec, base_spec);
  LambdaResult out;
  out.degree = deg.value.real();
  const double factor = 2.0 * kPi * m.dim() / m.volume() / model.frame().r;
  out.lambda = factor * out.degree;
  out.error = factor * deg.error;
  return out;
}

SlopeReport slope(const MetricModel& model, const BaseManifold& m,
                  const QuadratureSpec& fiber_spec, const QuadratureSpec& base_spec) {
  const auto deg = degree(model, m, fiber_spec, base_spec);
  SlopeReport out;
  out.degree = deg.value.real();
  out.rank = model.frame().r;
  out.slope = out.degree / out.rank;
  out.error = deg.error / out.rank;
  return out;
}

PointwiseKL kl_fields(const MetricModel& model, const BaseManifold& m, const CVector& z,
                      double lambda, const QuadratureSpec& fiber_spec) {
  if (m.dim() != 2 || model.frame().n != 2) throw Error("kl_fields needs a two-dimensional base");
  const int r = model.frame().r;
  const auto total = fiber::total_segre(model, z, fiber_spec);
  const std::vector<forms::Form> s{forms::degree_extract(total.value, 2),
                                   forms::degree_extract(total.value, 4)};
  const auto c = fiber::chern_from_segre(s);
  const auto kl = forms::wedge(c[0], c[0]) * cd{static_cast<double>(r - 1)} -
                  c[1] * cd{2.0 * r};
  PointwiseKL out;
  out.kl = ratio_to_volume(m, kl, z).real();
  out.segre = ratio_to_volume(m, s[1], z).real();
  out.segre_bound = r * (r + 1) * lambda * lambda / (8.0 * kPi * kPi * 4.0);
  out.error = total.error / std::abs(top_coefficient(forms::power(m.omega(model.frame(), z), 2)));
  return out;
}

}  // namespace finslerforms::base
