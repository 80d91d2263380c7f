#include "finslerforms/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace finslerforms {

namespace {

using Eigen::MatrixXcd;

// Mixed derivative of G in CoordinateFrame numbering.
class Derivs {
 public:
  explicit Derivs(const jets::Jet& j) : j_(j) {}

  cd operator()(std::initializer_list<int> holo, std::initializer_list<int> anti = {}) const {
    jets::MultiIndex idx{};
    for (int c : holo) ++idx[CoordinateFrame::holo_slot(c)];
    for (int c : anti) ++idx[CoordinateFrame::anti_slot(c)];
    return j_.derivative(idx);
  }

 private:
  const jets::Jet& j_;
};

void require_nonzero(const CVector& v) {
  if (std::all_of(v.begin(), v.end(), [](cd x) { return x == cd{}; })) {
    throw Error("curvature evaluation at v = 0 (off E^o)");
  }
}

MatrixXcd levi_matrix(const Derivs& d, const CoordinateFrame& f) {
  MatrixXcd levi(f.r, f.r);
  for (int i = 0; i < f.r; ++i)
    for (int j = 0; j < f.r; ++j) levi(i, j) = d({f.fiber_coord(i)}, {f.fiber_coord(j)});
  return levi;
}

LeviSpectrum spectrum_of(const MatrixXcd& levi) {
  const MatrixXcd herm = 0.5 * (levi + levi.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(herm);
  LeviSpectrum s;
  s.min_eigenvalue = eig.eigenvalues()(0);
  s.trace = herm.trace().real();
  s.witness = eig.eigenvectors().col(0);
  return s;
}

void require_positive(const LeviSpectrum& s, const CVector& z, const CVector& v) {
  if (!(s.min_eigenvalue > 1e-10 * std::abs(s.trace))) {
    std::ostringstream msg;
    msg << "Levi matrix not positive-definite at z=(";
    for (std::size_t a = 0; a < z.size(); ++a) msg << (a ? "," : "") << z[a];
    msg << ") v=(";
    for (std::size_t i = 0; i < v.size(); ++i) msg << (i ? "," : "") << v[i];
    msg << "): smallest eigenvalue " << s.min_eigenvalue << ", witness (";
    for (int i = 0; i < s.witness.size(); ++i) msg << (i ? "," : "") << s.witness(i);
    msg << ")";
    throw Error(msg.str());
  }
}

forms::Form holo_anti(const CoordinateFrame& f, int a, int b, cd coef) {
  return forms::wedge(forms::Form::generator(f, CoordinateFrame::holo_slot(a), coef),
                      forms::Form::generator(f, CoordinateFrame::anti_slot(b)));
}

}  // namespace

namespace {

jets::Jet metric_jet_impl(const MetricModel& model, const CVector& z, const CVector& v, int order,
                          bool fiber_only) {
  const auto& f = model.frame();
  if (static_cast<int>(z.size()) != f.n || static_cast<int>(v.size()) != f.r) {
    throw Error("metric evaluation: point does not match frame " + to_string(f));
  }
  CVector base(z);
  base.insert(base.end(), v.begin(), v.end());
  auto ctx = jets::make_context(f, std::move(base), order, fiber_only);
  return model.evaluate(seed_coords(ctx));
}

}  // namespace

jets::Jet metric_jet(const MetricModel& model, const CVector& z, const CVector& v, int order) {
  return metric_jet_impl(model, z, v, order, false);
}

LeviSpectrum levi_spectrum(const MetricModel& model, const CVector& z, const CVector& v) {
  const auto j = metric_jet(model, z, v, 2);
  return spectrum_of(levi_matrix(Derivs(j), model.frame()));
}

CurvatureBundle evaluate(const MetricModel& model, const CVector& z, const CVector& v,
                         Detail detail) {
  require_nonzero(v);
  const auto& f = model.frame();
  const int n = f.n, r = f.r, N = f.coords();
  const auto jet = metric_jet_impl(model, z, v, detail == Detail::full ? 4 : 2, detail == Detail::vertical);
  const Derivs d(jet);

  CurvatureBundle b;
  b.frame = f;
  b.z = z;
  b.v = v;
  b.detail = detail;
  b.G = jet.value().real();
  if (!(b.G > 0.0)) throw Error("metric is not positive at the evaluation point");
  b.levi = levi_matrix(d, f);
  require_positive(spectrum_of(b.levi), z, v);
  if (detail != Detail::vertical) b.levi_inv = b.levi.inverse();

  // (log G)_{A B-bar} = G_{A B-bar} / G - G_A G_B-bar / G^2
  const double G = b.G;
  // the vertical detail has no base derivatives
  const int A0 = detail == Detail::vertical ? n : 0;
  std::vector<cd> first(N), first_bar(N);
  for (int A = A0; A < N; ++A) {
    first[A] = d({A});
    first_bar[A] = d({}, {A});
  }
  MatrixXcd logg = MatrixXcd::Zero(N, N);
  for (int A = A0; A < N; ++A)
    for (int B = A0; B < N; ++B) logg(A, B) = d({A}, {B}) / G - first[A] * first_bar[B] / (G * G);

  const cd xi_scale = kI / (2.0 * kPi);
  std::vector<forms::Form::Term> xi_terms;
  xi_terms.reserve(N * N);
  for (int A = A0; A < N; ++A)
    for (int B = A0; B < N; ++B) {
      const forms::Mask ha = forms::Mask{1} << CoordinateFrame::holo_slot(A);
      const forms::Mask hb = forms::Mask{1} << CoordinateFrame::anti_slot(B);
      xi_terms.emplace_back(ha | hb, static_cast<double>(forms::wedge_sign(ha, hb)) * xi_scale * logg(A, B));
    }
  b.xi = forms::from_terms(f, std::move(xi_terms));

  if (detail != Detail::full) return b;

  std::vector<MatrixXcd> Q(N, MatrixXcd(r, r)), R(N, MatrixXcd(r, r));
  for (int A = 0; A < N; ++A)
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        Q[A](i, j) = d({f.fiber_coord(i), A}, {f.fiber_coord(j)});
        R[A](i, j) = d({f.fiber_coord(i)}, {f.fiber_coord(j), A});
      }
  const MatrixXcd& Linv = b.levi_inv;

  b.gamma_h.assign(r * r * n, cd{});
  for (int a = 0; a < n; ++a) {
    const MatrixXcd ga = Q[f.base_coord(a)] * Linv;
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < r; ++i) b.gamma_h[(k * r + i) * n + a] = ga(i, k);
  }
  b.gamma_v.assign(r * r * r, cd{});
  for (int l = 0; l < r; ++l) {
    const MatrixXcd gl = Q[f.fiber_coord(l)] * Linv;
    for (int k = 0; k < r; ++k)
      for (int i = 0; i < r; ++i) b.gamma_v[(k * r + i) * r + l] = gl(i, k);
  }

  // Theta^k_i coefficient of dA ^ dB-bar: -[S_{AB} Linv - Q_A Linv R_B Linv](i, k)
  b.theta = forms::FormMatrix(f, r);
  b.K.assign(r * r * n * n, cd{});
  MatrixXcd S(r, r);
  for (int A = 0; A < N; ++A) {
    const MatrixXcd QL = Q[A] * Linv;
    for (int B = 0; B < N; ++B) {
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) S(i, j) = d({f.fiber_coord(i), A}, {f.fiber_coord(j), B});
      const MatrixXcd QLR = QL * R[B];
      const MatrixXcd th = -(S * Linv - QLR * Linv);
      for (int i = 0; i < r; ++i)
        for (int k = 0; k < r; ++k) {
          if (th(i, k) != cd{}) b.theta(i, k) += holo_anti(f, A, B, th(i, k));
        }
      if (A < n && B < n) {
        const MatrixXcd Kab = -S + QLR;
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j) b.K[((i * r + j) * n + A) * n + B] = Kab(i, j);
      }
    }
  }

  Eigen::VectorXcd vv(r);
  for (int i = 0; i < r; ++i) vv(i) = v[i];
  b.psi_matrix = MatrixXcd(n, n);
  b.psi = forms::Form(f);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      cd p{};
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) p += b.K_at(i, j, a, c) * v[i] * std::conj(v[j]);
      p /= G;
      b.psi_matrix(a, c) = p;
      b.psi += holo_anti(f, f.base_coord(a), f.base_coord(c), kI * p);
    }

  // omega_FS in the delta basis, then rewritten over dz, dv.
  forms::Form fs_delta(f);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      fs_delta += holo_anti(f, f.fiber_coord(i), f.fiber_coord(j),
                            xi_scale * logg(f.fiber_coord(i), f.fiber_coord(j)));
  const auto shift = forms::make_delta_shift(f, b.gamma_h, v);
  b.omega_fs = forms::delta_basis(fs_delta, shift, forms::DeltaDirection::from_delta);
  return b;
}

double EulerResiduals::max() const {
  return std::max({g_i, g_jbar, g_ijbar, g_ijbar_k, g_ijbar_kbar});
}

EulerResiduals euler_residuals(const MetricModel& model, const CVector& z, const CVector& v) {
  const auto& f = model.frame();
  const int r = f.r;
  const auto jet = metric_jet(model, z, v, 3);
  const Derivs d(jet);
  const cd G = jet.value();
  const double scale = std::abs(G);

  EulerResiduals out;
  cd gi{}, gj{}, gij{};
  for (int i = 0; i < r; ++i) {
    gi += d({f.fiber_coord(i)}) * v[i];
    gj += d({}, {f.fiber_coord(i)}) * std::conj(v[i]);
    for (int j = 0; j < r; ++j)
      gij += d({f.fiber_coord(i)}, {f.fiber_coord(j)}) * v[i] * std::conj(v[j]);
  }
  out.g_i = std::abs(gi - G) / scale;
  out.g_jbar = std::abs(gj - G) / scale;
  out.g_ijbar = std::abs(gij - G) / scale;
  for (int a = 0; a < r; ++a)
    for (int k = 0; k < r; ++k) {
      cd hk{}, ak{};
      for (int i = 0; i < r; ++i) {
        hk += d({f.fiber_coord(i), f.fiber_coord(k)}, {f.fiber_coord(a)}) * v[i];
        ak += d({f.fiber_coord(a)}, {f.fiber_coord(i), f.fiber_coord(k)}) * std::conj(v[i]);
      }
      out.g_ijbar_k = std::max(out.g_ijbar_k, std::abs(hk) / scale);
      out.g_ijbar_kbar = std::max(out.g_ijbar_kbar, std::abs(ak) / scale);
    }
  return out;
}

double ConnectionResiduals::max() const {
  return std::max({gamma_contract_i, gamma_contract_l, gamma_h_scaling});
}

ConnectionResiduals connection_residuals(const MetricModel& model, const CVector& z,
                                         const CVector& v, cd lambda) {
  const auto b = evaluate(model, z, v);
  CVector lv(v);
  for (auto& x : lv) x *= lambda;
  const auto bl = evaluate(model, z, lv);
  const int r = b.frame.r, n = b.frame.n;

  // gamma carries degree -1 in v, so compare against |gamma| |v|.
  double vnorm = 0.0;
  for (auto x : v) vnorm += std::norm(x);
  vnorm = std::sqrt(vnorm);
  double gscale = 1.0;
  for (auto g : b.gamma_v) gscale = std::max(gscale, std::abs(g) * vnorm);

  ConnectionResiduals out;
  for (int k = 0; k < r; ++k)
    for (int m = 0; m < r; ++m) {
      cd ci{}, cl{};
      for (int t = 0; t < r; ++t) {
        ci += b.gamma_v_at(k, t, m) * v[t];
        cl += b.gamma_v_at(k, m, t) * v[t];
      }
      out.gamma_contract_i = std::max(out.gamma_contract_i, std::abs(ci) / gscale);
      out.gamma_contract_l = std::max(out.gamma_contract_l, std::abs(cl) / gscale);
    }
  double hscale = 1.0;
  for (auto g : b.gamma_h) hscale = std::max(hscale, std::abs(g));
  for (int k = 0; k < r; ++k)
    for (int i = 0; i < r; ++i)
      for (int a = 0; a < n; ++a)
        out.gamma_h_scaling = std::max(
            out.gamma_h_scaling, std::abs(bl.gamma_h_at(k, i, a) - b.gamma_h_at(k, i, a)) / hscale);
  return out;
}

double decomposition_residual(const CurvatureBundle& b) {
  if (b.detail != Detail::full) throw Error("decomposition residual needs full curvature data");
  const forms::Form rhs = b.psi * cd{-1.0 / (2.0 * kPi)} + b.omega_fs;
  return (b.xi - rhs).max_abs();
}

double decomposition_residual(const MetricModel& model, const CVector& z, const CVector& v) {
  return decomposition_residual(evaluate(model, z, v));
}

double theta_consistency_residual(const CurvatureBundle& b) {
  if (b.detail != Detail::full) throw Error("theta consistency needs full curvature data");
  const int r = b.frame.r;
  forms::Form contracted(b.frame);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < r; ++k) {
      cd w{};
      for (int l = 0; l < r; ++l) w += b.levi(k, l) * std::conj(b.v[l]);
      w *= b.v[i] / b.G;
      if (w != cd{}) contracted += b.theta(i, k) * (kI * w);
    }
  const auto horizontal = forms::bidegree_extract(contracted, 1, 1, forms::Split::horizontal);
  return (horizontal - b.psi).max_abs();
}

std::string to_string(CurvatureSign s) {
  switch (s) {
    case CurvatureSign::positive: return "positive";
    case CurvatureSign::negative: return "negative";
    case CurvatureSign::indefinite: return "indefinite";
    case CurvatureSign::flat: return "flat";
  }
  return "unknown";
}

SignScan kobayashi_sign_scan(const MetricModel& model, std::span<const SamplePoint> samples) {
  SignScan scan;
  scan.min_eigenvalue = std::numeric_limits<double>::infinity();
  scan.max_eigenvalue = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const auto b = evaluate(model, s.z, s.v);
    const MatrixXcd herm = 0.5 * (b.psi_matrix + b.psi_matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
    scan.min_eigenvalue = std::min(scan.min_eigenvalue, eig.eigenvalues().minCoeff());
    scan.max_eigenvalue = std::max(scan.max_eigenvalue, eig.eigenvalues().maxCoeff());
    scan.max_entry = std::max(scan.max_entry, b.psi_matrix.cwiseAbs().maxCoeff());
  }
  if (samples.empty() || scan.max_entry < 1e-8) {
    scan.sign = CurvatureSign::flat;
    scan.margin = scan.max_entry;
  } else if (scan.min_eigenvalue > 0.0) {
    scan.sign = CurvatureSign::positive;
    scan.margin = scan.min_eigenvalue;
  } else if (scan.max_eigenvalue < 0.0) {
    scan.sign = CurvatureSign::negative;
    scan.margin = scan.max_eigenvalue;
  } else {
    scan.sign = CurvatureSign::indefinite;
    scan.margin = scan.min_eigenvalue;
  }
  return scan;
}

cd einstein_trace(const CurvatureBundle& b, const Eigen::MatrixXcd& g) {
  if (b.detail != Detail::full) throw Error("einstein trace needs full curvature data");
  Eigen::FullPivLU<MatrixXcd> lu(g);
  if (!lu.isInvertible()) throw Error("einstein trace: base metric is degenerate");
  return (lu.inverse() * b.psi_matrix).trace();
}

HermitianEinstein hermitian_einstein_check(const MetricModel& model, std::span<const CVector> zs,
                                           const KahlerMetric& g) {
  if (!model.hermitian()) throw Error("hermitian_einstein_check needs a Hermitian-induced model");
  const int r = model.frame().r, n = model.frame().n;
  CVector v(r, cd{});
  v[0] = 1.0;
  std::vector<MatrixXcd> mats;
  double diag_sum = 0.0;
  for (const auto& z : zs) {
    const auto b = evaluate(model, z, v);
    const MatrixXcd ginv = g(z).inverse();
    MatrixXcd lowered(r, r);
    for (int i = 0; i < r; ++i)
      for (int l = 0; l < r; ++l) {
        cd t{};
        for (int a = 0; a < n; ++a)
          for (int c = 0; c < n; ++c) t += ginv(c, a) * b.K_at(i, l, a, c);
        lowered(i, l) = t;
      }
    const MatrixXcd mixed = lowered * b.levi_inv;  // (i, k) = K^k_i traced
    mats.push_back(mixed);
    diag_sum += mixed.trace().real();
  }
  HermitianEinstein out;
  if (mats.empty()) return out;
  out.lambda = diag_sum / (static_cast<double>(mats.size()) * r);
  for (const auto& m : mats)
    out.residual = std::max(
        out.residual, (m - out.lambda * MatrixXcd::Identity(r, r)).cwiseAbs().maxCoeff());
  return out;
}

}  // namespace finslerforms
