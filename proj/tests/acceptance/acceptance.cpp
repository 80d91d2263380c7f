#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "finslerforms/scenarios.hpp"

using namespace finslerforms;
using namespace finslerforms::scenarios;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const Check& find_check(const Report& r, const std::string& name) {
  for (const auto& c : r.checks())
    if (c.name == name) return c;
  throw Error("report for " + r.config().scenario + " has no check " + name);
}

double info(const Report& r, const std::string& key) {
  auto it = r.info().find(key);
  if (it == r.info().end()) throw Error("report for " + r.config().scenario + " has no info " + key);
  return it->second;
}

Report run_json(const std::string& text) { return run(parse_config(text)); }

std::string metric(const std::string& family, const std::string& degrees, double eps = 0.0) {
  std::ostringstream s;
  s << R"({"family": ")" << family << R"(", "degrees": )" << degrees << R"(, "epsilon": )" << eps << '}';
  return s.str();
}

std::string config(const std::string& scenario, const std::string& metric_json, const std::string& base,
                   const std::string& extra = "") {
  return R"({"scenario": ")" + scenario + R"(", "metric": )" + metric_json + R"(, "base": ")" + base + '"' +
         (extra.empty() ? "" : ", " + extra) + '}';
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void note(Outcome& o, const std::string& s) { o.detail += (o.detail.empty() ? "" : "; ") + s; }

// Fails the outcome unless every check in the report passed.
void require_all(Outcome& o, const Report& r, const std::string& label) {
  for (const auto& c : r.checks())
    if (!c.pass) {
      o.pass = false;
      note(o, label + " " + c.name + " = " + fmt(c.computed));
    }
}

// -- 1 ------------------------------------------------------------------------

const std::vector<std::pair<std::string, std::string>> kBuiltinModels = {
    {"CP1", metric("HermitianDiagonal", "[[0], [0]]")},
    {"CP1", metric("HermitianDiagonal", "[[1], [1]]")},
    {"CP1", metric("HermitianDiagonal", "[[1], [2]]")},
    {"CP1", metric("FinslerPerturbed", "[[1], [1]]", 0.1)},
    {"CP1", metric("FinslerPerturbed", "[[0], [0]]", 0.1)},
    {"CP1", metric("FinslerPerturbed", "[[1], [2]]", 0.1)},
    {"CP1", R"({"family": "FinslerPerturbed", "degrees": [[1], [2]], "epsilon": 0.1, "epsilon_decay": [1]})"},
    {"CP1", metric("FinslerPerturbed", "[[1], [1], [2]]", 0.05)},
    {"CP1xCP1", metric("FinslerPerturbed", "[[1, 0], [0, 1]]", 0.1)},
    {"CP1xCP1", metric("HermitianDiagonal", "[[1, 1], [1, 1]]")},
    {"CP1", R"({"family": "TensorByLine", "line_degrees": [1], "inner": )" +
                metric("FinslerPerturbed", "[[1], [2]]", 0.1) + "}"},
    {"CP1", R"({"family": "Restricted", "subset": [1], "inner": )" +
                metric("FinslerPerturbed", "[[1], [2]]", 0.1) + "}"},
};

Outcome criterion1() {
  Outcome o;
  double worst = 0.0, control = std::numeric_limits<double>::infinity();
  for (const auto& [base, m] : kBuiltinModels) {
    const auto r = run_json(config("verify-identities", m, base,
                                   R"("samples": {"count": 100, "seed": 101}, "params": {"oracle_points": 0})"));
    for (const char* n : {"euler_residual_max", "connection_residual_max", "homogeneity_residual_max",
                          "levi_hermitian_residual_max"}) {
      const auto& c = find_check(r, n);
      worst = std::max(worst, c.computed);
      if (c.computed >= 1e-9) {
        o.pass = false;
        note(o, std::string(n) + " " + fmt(c.computed) + " on " + r.config().metric.family);
      }
    }
    const auto& neg = find_check(r, "negative_control_residual_min");
    control = std::min(control, neg.computed);
    if (!neg.pass) {
      o.pass = false;
      note(o, "negative control not flagged");
    }
  }
  note(o, std::to_string(kBuiltinModels.size()) + " models x 100 points, max residual " + fmt(worst) +
              ", negative control residual >= " + fmt(control));
  return o;
}

// -- 2 ------------------------------------------------------------------------

Outcome criterion2() {
  Outcome o;
  for (const auto& m : {metric("HermitianDiagonal", "[[1], [2]]"), metric("FinslerPerturbed", "[[1], [2]]", 0.1)}) {
    const auto r = run_json(config("verify-identities", m, "CP1",
                                   R"("samples": {"count": 100, "seed": 202}, "params": {"oracle_points": 0, "negative_control": 0})"));
    const auto& c = find_check(r, "decomposition_residual_max");
    if (!(c.computed < 1e-9)) o.pass = false;
    note(o, r.config().metric.family + " " + fmt(c.computed));
  }
  return o;
}

// -- 3 ------------------------------------------------------------------------

Outcome criterion3() {
  Outcome o;
  const std::string tensor = R"("quadrature": {"fiber": {"mode": "tensor", "radial_order": 48, "angular_order": 16}},
                                 "samples": {"count": 10, "seed": 303})";
  for (const auto& m : {metric("HermitianDiagonal", "[[1], [2]]"), metric("FinslerPerturbed", "[[1], [2]]", 0.1)}) {
    const auto r = run_json(config("fiber-normalization", m, "CP1", tensor));
    const auto& c = find_check(r, "normalization_deviation_max");
    if (!(c.computed <= 1e-6)) o.pass = false;
    note(o, "r=2 " + r.config().metric.family + " |I-1| " + fmt(c.computed));
  }
  const auto r = run_json(config("fiber-normalization", metric("FinslerPerturbed", "[[1], [1], [2]]", 0.05), "CP1",
                                 R"("quadrature": {"fiber": {"mode": "montecarlo", "mc_samples": 1000000, "seed": 99}},
                                    "samples": {"count": 2, "seed": 303})"));
  const auto& band = find_check(r, "normalization_in_3sigma_band");
  if (!band.pass) o.pass = false;
  note(o, "r=3 MC 1e6 at 2 base points: |I-1| " + fmt(info(r, "normalization_deviation_max")) + " vs 3 sigma " +
              fmt(info(r, "normalization_mc_error_max")));
  return o;
}

// -- 4 ------------------------------------------------------------------------

Outcome criterion4() {
  Outcome o;
  for (const auto& m : {metric("HermitianDiagonal", "[[1], [2]]"), metric("FinslerPerturbed", "[[1], [2]]", 0.1),
                        metric("FinslerPerturbed", "[[1], [1]]", 0.1)}) {
    const auto r = run_json(config("segre", m, "CP1", R"("samples": {"count": 10, "seed": 404}, "params": {"tolerance_k1": 1e-6})"));
    const auto& c = find_check(r, "segre_routes_k1_max_diff");
    if (!(c.computed < 1e-6)) o.pass = false;
    note(o, "k=1 " + r.config().metric.family + " " + fmt(c.computed));
  }
  const auto r = run_json(config("segre", metric("FinslerPerturbed", "[[1, 0], [0, 1]]", 0.1), "CP1xCP1",
                                 R"("samples": {"count": 5, "seed": 404}, "params": {"tolerance_k1": 1e-6, "tolerance_k2": 1e-4})"));
  const auto& c = find_check(r, "segre_routes_k2_max_diff");
  if (!(c.computed < 1e-4)) o.pass = false;
  note(o, "k=2 on CP1xCP1 " + fmt(c.computed));
  return o;
}

// -- 5 ------------------------------------------------------------------------

Outcome criterion5() {
  Outcome o;
  double worst = 0.0, worst_gap = 0.0, slowest = 0.0;
  for (const char* deg : {"[[1], [1]]", "[[1], [2]]"})
    for (double eps : {0.0, 0.05, 0.1}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_json(config("chern", metric("FinslerPerturbed", deg, eps), "CP1",
                                     R"("samples": {"count": 5, "seed": 505})"));
      slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      const auto& c1 = find_check(r, "int_c1_cw");
      const auto& gap = find_check(r, "int_c1_minus_int_C1");
      worst = std::max(worst, std::abs(c1.computed - c1.expected));
      worst_gap = std::max(worst_gap, gap.computed);
      if (!(std::abs(c1.computed - c1.expected) <= 1e-4 && gap.computed <= 1e-4)) {
        o.pass = false;
        note(o, std::string(deg) + " eps " + fmt(eps) + " int c1 " + fmt(c1.computed));
      }
    }
  if (slowest > 120.0) o.pass = false;
  note(o, "max |int c1 - (a+b)| " + fmt(worst) + ", max |int c1 - int C1| " + fmt(worst_gap) +
              ", slowest case " + fmt(slowest) + " s");
  return o;
}

// -- 6 ------------------------------------------------------------------------

Outcome criterion6() {
  Outcome o;
  const auto r = run_json(config("gauss-bonnet", metric("HermitianDiagonal", "[[2]]"), "CP1"));
  const auto& c = find_check(r, "int_c1_tangent");
  o.pass = c.pass && std::abs(c.computed - 2.0) <= 1e-4;
  require_all(o, r, "gauss-bonnet");
  note(o, "int c1(TCP1) = " + format_number(c.computed));
  return o;
}

// -- 7 ------------------------------------------------------------------------

Outcome criterion7() {
  Outcome o;
  const auto flat_weight = run_json(config("transgression", metric("FinslerPerturbed", "[[1], [2]]", 0.1), "CP1",
                                           R"("params": {"grid": 9})"));
  require_all(o, flat_weight, "constant-weight");
  note(o, "constant eps=0.1: c1-C1 rms " + fmt(info(flat_weight, "c1_minus_C1_rms")) + ", ddbar c0 rms " +
              fmt(info(flat_weight, "ddbar_c0_rms")) + (info(flat_weight, "degenerate") != 0.0 ? " (both vanish)" : ""));
  const auto decayed = run_json(config(
      "transgression",
      R"({"family": "FinslerPerturbed", "degrees": [[1], [2]], "epsilon": 0.1, "epsilon_decay": [1]})", "CP1",
      R"("params": {"grid": 9})"));
  require_all(o, decayed, "decayed-weight");
  if (info(decayed, "degenerate") != 0.0) {
    o.pass = false;
    note(o, "decayed-weight model is degenerate too");
  } else {
    note(o, "eps=0.1(1+|z|^2)^-1: residual " + fmt(find_check(decayed, "transgression_relative_residual").computed) +
                ", fitted constant " + format_number(info(decayed, "fitted_constant_re")) + " + " +
                fmt(info(decayed, "fitted_constant_im")) + "i");
  }
  return o;
}

// -- 8 ------------------------------------------------------------------------

Outcome criterion8() {
  Outcome o;
  const std::string extra = R"("samples": {"count": 10, "seed": 808}, "params": {"expect_positive": 1, "frames": 50})";
  for (const auto& m : {metric("HermitianDiagonal", "[[1], [2]]"), metric("FinslerPerturbed", "[[1], [2]]", 0.1)}) {
    const auto r = run_json(config("positivity-scan", m, "CP1", extra));
    require_all(o, r, r.config().metric.family);
    note(o, "CP1 " + r.config().metric.family + " min eig(-s1) " +
                fmt(find_check(r, "minus_s1_min_eigenvalue").computed));
  }
  const auto r = run_json(config("positivity-scan", metric("FinslerPerturbed", "[[1, 1], [1, 2]]", 0.1), "CP1xCP1",
                                 R"("quadrature": {"fiber": {"mode": "montecarlo", "mc_samples": 200000, "seed": 21}},
                                    "samples": {"count": 3, "seed": 808}, "params": {"expect_positive": 1, "frames": 50})"));
  require_all(o, r, "CP1xCP1");
  note(o, "CP1xCP1 MC: min eig(-s1) " + fmt(find_check(r, "minus_s1_min_eigenvalue").computed) + ", s2 frame test min " +
              fmt(find_check(r, "s2_frame_test_min").computed) + " (band " +
              fmt(find_check(r, "s2_frame_test_min").tolerance) + ")");
  return o;
}

// -- 9 ------------------------------------------------------------------------

Outcome criterion9() {
  Outcome o;
  const auto r = run_json(config("einstein", metric("HermitianDiagonal", "[[1], [1]]"), "CP1",
                                 R"("samples": {"count": 20, "seed": 909}, "params": {"expected_lambda": 1, "line_degree": 1})"));
  require_all(o, r, "einstein");
  const double dev = std::abs(find_check(r, "trace_psi_vs_expected").computed - 1.0) + find_check(r, "trace_psi_spread").computed;
  if (!(dev < 1e-8) || std::abs(info(r, "lambda_class") - 1.0) > 1e-4) o.pass = false;
  note(o, "tr Psi deviation " + fmt(dev) + ", lambda(class) " + format_number(info(r, "lambda_class")) +
              ", lambda(E x L) - lambda(E) - lambda(L) " +
              fmt(find_check(r, "lambda_additivity_tensor_line").computed -
                  find_check(r, "lambda_additivity_tensor_line").expected));
  return o;
}

// -- 10 -----------------------------------------------------------------------

Outcome criterion10() {
  Outcome o;
  const std::string quad = R"("quadrature": {"base": {"radial_order": 16, "angular_order": 8}}, "samples": {"count": 5, "seed": 1010})";
  for (const char* s : {"kl", "segre-bound"}) {
    const std::string field = std::string(s) == "kl" ? "kl_field" : "segre_minus_bound";
    const auto eq = run_json(config(s, metric("HermitianDiagonal", "[[1, 1], [1, 1]]"), "CP1xCP1",
                                    quad + R"(, "params": {"expect_equality": 1})"));
    require_all(o, eq, std::string(s) + " L+L");
    const auto st = run_json(config(s, metric("HermitianDiagonal", "[[1, 0], [0, 1]]"), "CP1xCP1",
                                    quad + R"(, "params": {"expect_strict": 1})"));
    require_all(o, st, std::string(s) + " O(1,0)+O(0,1)");
    note(o, std::string(s) + ": L+L |field| " + fmt(find_check(eq, field + "_abs_max").computed) +
                ", split max " + fmt(find_check(st, field + "_strict_max").computed));
  }
  return o;
}

// -- 11 -----------------------------------------------------------------------

Outcome criterion11() {
  Outcome o;
  const auto r = run_json(config("slope", metric("HermitianDiagonal", "[[1], [1]]"), "CP1",
                                 R"("params": {"line": 0, "expect_equality": 1})"));
  require_all(o, r, "slope");
  note(o, "mu(line) " + format_number(info(r, "slope_line")) + " vs mu(E) " + format_number(info(r, "slope_total")));
  return o;
}

// -- 12 -----------------------------------------------------------------------

Outcome criterion12() {
  Outcome o;
  const auto r = run_json(config("flatness", metric("FinslerPerturbed", "[[0], [0]]", 0.1), "CP1",
                                 R"("samples": {"count": 10, "seed": 1212})"));
  require_all(o, r, "flatness");
  if (info(r, "kobayashi_sign_flat") != 1.0) {
    o.pass = false;
    note(o, "not classified flat");
  }
  note(o, "flat, max |C1| " + fmt(find_check(r, "C1_max_abs").computed) + ", L2 z-spread " +
              fmt(find_check(r, "l2_metric_z_spread").computed) + ", |gamma| " +
              fmt(find_check(r, "vertical_connection_max").computed));
  return o;
}

// -- 13 -----------------------------------------------------------------------

Outcome criterion13() {
  Outcome o;
  double worst = 0.0;
  for (const auto& [base, m] : kBuiltinModels) {
    const auto r = run_json(config("verify-identities", m, base,
                                   R"("samples": {"count": 20, "seed": 1313}, "params": {"oracle_points": 20, "negative_control": 0})"));
    const auto& c = find_check(r, "jet_vs_fd_oracle_rel_max");
    worst = std::max(worst, c.computed);
    if (!(c.computed <= 1e-5)) {
      o.pass = false;
      note(o, "FD mismatch " + fmt(c.computed) + " on " + r.config().metric.family);
    }
  }
  note(o, "Levi and K entries vs FD: max rel " + fmt(worst));
  int bands = 0;
  for (const auto& m : {metric("HermitianDiagonal", "[[1], [2]]"), metric("FinslerPerturbed", "[[1], [2]]", 0.1)}) {
    const auto r = run_json(config("fiber-normalization", m, "CP1",
                                   R"("samples": {"count": 2, "seed": 1313}, "params": {"brute_samples": 400000})"));
    const auto& c = find_check(r, "normalization_vs_brute_force");
    bands += 1;
    if (!c.pass) {
      o.pass = false;
      note(o, "fiber integral outside brute-force band: " + fmt(c.computed) + " > " + fmt(c.tolerance));
    }
  }
  for (const auto& m : {metric("FinslerPerturbed", "[[1], [2]]", 0.1),
                        std::string(R"({"family": "FinslerPerturbed", "degrees": [[1], [2]], "epsilon": 0.1, "epsilon_decay": [1]})")}) {
    // each sample is a full fiber integral, hence the smaller count
    const auto r = run_json(config("chern", m, "CP1", R"("samples": {"count": 2, "seed": 1313}, "params": {"brute_samples": 20000})"));
    const auto& c = find_check(r, "int_C1_vs_brute_force");
    bands += 1;
    note(o, "int C1 " + fmt(c.computed) + " off, band " + fmt(c.tolerance));
    if (!c.pass) {
      o.pass = false;
      note(o, "base integral outside brute-force band: " + fmt(c.computed) + " > " + fmt(c.tolerance));
    }
  }
  note(o, std::to_string(bands) + " tensor integrals checked against 3-sigma brute-force bands");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2},   {3, criterion3},   {4, criterion4},   {5, criterion5},
      {6, criterion6}, {7, criterion7},   {8, criterion8},   {9, criterion9},   {10, criterion10},
      {11, criterion11}, {12, criterion12}, {13, criterion13}};
  const std::map<int, double> limits = {{1, 10}, {2, 10}, {3, 60}, {4, 300}, {5, 720}, {7, 600}, {10, 600}};
  int failed = 0;
  for (const auto& [id, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto lim = limits.find(id);
    if (lim != limits.end() && secs > lim->second) {
      o.pass = false;
      o.detail += "; over the " + fmt(lim->second) + " s budget";
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d: %s  [%.1f s]  %s\n", id, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
