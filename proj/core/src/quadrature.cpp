#include "finslerforms/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace finslerforms::quad {

std::string to_string(Mode m) { return m == Mode::tensor ? "tensor" : "montecarlo"; }

Mode mode_from_string(const std::string& s) {
  if (s == "tensor") return Mode::tensor;
  if (s == "montecarlo" || s == "mc") return Mode::montecarlo;
  throw Error("unknown quadrature mode '" + s + "' (expected tensor or montecarlo)");
}

void QuadratureSpec::validate() const {
  if (mode == Mode::tensor && (radial_order < 8 || angular_order < 8)) {
    throw Error("tensor quadrature orders must be at least 8");
  }
  if (mode == Mode::montecarlo && mc_samples < 2) {
    throw Error("Monte Carlo quadrature needs at least 2 samples");
  }
  if (!(tolerance > 0.0)) throw Error("quadrature tolerance must be positive");
}

QuadratureSpec QuadratureSpec::raised() const {
  QuadratureSpec s = *this;
  s.radial_order += 8;
  s.angular_order += 4;
  s.mc_samples *= 2;
  s.convergence_check = false;
  return s;
}

Rule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw Error("Gauss-Legendre order must be positive");
  gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(order);
  if (!table) throw Error("GSL could not allocate a Gauss-Legendre table");
  Rule rule;
  rule.x.resize(order);
  rule.w.resize(order);
  for (int i = 0; i < order; ++i) {
    gsl_integration_glfixed_point(a, b, i, &rule.x[i], &rule.w[i], table);
  }
  gsl_integration_glfixed_table_free(table);
  return rule;
}

std::vector<PlaneNode> plane_rule(int radial_order, int angular_order) {
  const Rule t = gauss_legendre(radial_order, 0.0, kPi / 2.0);
  const double dphi = 2.0 * kPi / angular_order;
  std::vector<PlaneNode> nodes;
  nodes.reserve(static_cast<std::size_t>(radial_order) * angular_order);
  for (int i = 0; i < radial_order; ++i) {
    const double rho = std::tan(t.x[i]);
    const double sec = 1.0 / std::cos(t.x[i]);
    const double radial_w = t.w[i] * rho * sec * sec;
    for (int j = 0; j < angular_order; ++j) {
      const double phi = (j + 0.5) * dphi;
      nodes.push_back({std::polar(rho, phi), radial_w * dphi});
    }
  }
  return nodes;
}

std::vector<ProductNode> product_rule(int copies, int radial_order, int angular_order) {
  std::vector<ProductNode> out{{{}, 1.0}};
  if (copies == 0) return out;
  const auto plane = plane_rule(radial_order, angular_order);
  for (int c = 0; c < copies; ++c) {
    std::vector<ProductNode> next;
    next.reserve(out.size() * plane.size());
    for (const auto& node : out)
      for (const auto& p : plane) {
        ProductNode q = node;
        q.w.push_back(p.w);
        q.weight *= p.weight;
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

void Accumulator::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

unsigned worker_count() {
  if (const char* env = std::getenv("FINSLERFORMS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {
// Nested parallel_for calls run inline on the worker that issued them.
thread_local bool in_parallel_region = false;
}  // namespace

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1 || in_parallel_region) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    const bool outer = in_parallel_region;
    in_parallel_region = true;
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
    in_parallel_region = outer;
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace finslerforms::quad
