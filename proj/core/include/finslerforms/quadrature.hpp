#pragma once

// Integration plans over copies of the complex plane. A plane is covered by
// w = tan(t) e^{i phi}: Gauss-Legendre in t in [0, pi/2) and a uniform grid in
// phi, which is spectrally accurate for smooth periodic integrands.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "finslerforms/frame.hpp"

namespace finslerforms::quad {

enum class Mode { tensor, montecarlo };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct QuadratureSpec {
  Mode mode = Mode::tensor;
  int radial_order = 32;
  int angular_order = 16;
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 20240611;
  double tolerance = 1e-6;
  // Re-run at (radial + 8, angular + 4) and fail when the change exceeds tolerance.
  bool convergence_check = false;
  // Base integration only: the field depends on |z^a| alone, so one phase node
  // per plane suffices. Verified at run time on rotated copies of a node.
  bool radial_symmetry = false;

  void validate() const;
  QuadratureSpec raised() const;
};

struct Rule {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes and weights on [a, b].
Rule gauss_legendre(int order, double a, double b);

// Nodes w in C with weights for dx dy (Jacobian tan(t) sec^2(t) included).
struct PlaneNode {
  cd w;
  double weight;
};
std::vector<PlaneNode> plane_rule(int radial_order, int angular_order);

// All tensor-product nodes of `copies` planes; node k lists one w per plane.
struct ProductNode {
  CVector w;
  double weight;
};
std::vector<ProductNode> product_rule(int copies, int radial_order, int angular_order);

// Neumaier compensated summation.
class Accumulator {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class ComplexAccumulator {
 public:
  void add(cd x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  cd value() const { return {re_.value(), im_.value()}; }

 private:
  Accumulator re_, im_;
};

// Runs body(i) for i in [0, count) on a pool of threads. Results must be
// written to per-index storage; reductions happen afterwards in index order.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Thread count used by parallel_for (FINSLERFORMS_THREADS overrides hardware).
unsigned worker_count();

}  // namespace finslerforms::quad
