#include <cmath>

#include "doctest.h"
#include "finslerforms/scenarios.hpp"

using namespace finslerforms;
using namespace finslerforms::scenarios;

namespace {

const char* kGaussBonnet = R"({
  "scenario": "gauss-bonnet",
  "metric": {"family": "HermitianDiagonal", "degrees": [[2]]},
  "base": "CP1",
  "quadrature": {"fiber": {"radial_order": 16, "angular_order": 8},
                 "base": {"radial_order": 24, "angular_order": 8}}
})";

ScenarioConfig perturbed(const std::string& scenario, double eps) {
  ScenarioConfig c = parse_config(R"({"scenario": ")" + scenario + R"("})");
  c.metric.family = "FinslerPerturbed";
  c.metric.degrees = {{1}, {1}};
  c.metric.epsilon = eps;
  c.samples.count = 5;
  return c;
}

}  // namespace

TEST_CASE("config parsing fills defaults and round-trips") {
  const auto c = parse_config(kGaussBonnet);
  CHECK(c.scenario == "gauss-bonnet");
  CHECK(c.metric.degrees == std::vector<std::vector<double>>{{2}});
  CHECK(c.fiber.radial_order == 16);
  CHECK(c.base_quadrature.radial_symmetry);
  CHECK(c.samples.seed == 7);
  CHECK(c.tolerances.identity == doctest::Approx(1e-9));
  const auto again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("config errors are reported") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"metric": {}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "kl", "bogus": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "kl", "base": "CP2"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "kl", "samples": {"count": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "kl", "quadrature": {"fiber": {"mode": "adaptive"}}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "kl", "scan": {"parameter": "degree", "values": []}})"),
                  ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  auto c = parse_config(kGaussBonnet);
  c.scenario = "no-such-scenario";
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("every scenario name is registered") {
  const auto& names = scenario_names();
  CHECK(names.size() == 13);
  for (const char* n : {"verify-identities", "fiber-normalization", "segre", "chern", "transgression",
                        "gauss-bonnet", "einstein", "kl", "segre-bound", "slope", "flatness",
                        "positivity-scan", "l2-metric"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
}

TEST_CASE("models are built from nested specs") {
  MetricSpec inner;
  inner.family = "FinslerPerturbed";
  inner.degrees = {{1}, {2}};
  inner.epsilon = 0.1;
  MetricSpec tensor;
  tensor.family = "TensorByLine";
  tensor.inner = std::make_shared<MetricSpec>(inner);
  tensor.line_degrees = {1};
  CHECK(build_model(tensor, 1)->frame().r == 2);
  MetricSpec sub;
  sub.family = "Restricted";
  sub.inner = std::make_shared<MetricSpec>(inner);
  sub.subset = {1};
  CHECK(build_model(sub, 1)->frame().r == 1);
  MetricSpec bad = inner;
  bad.family = "Custom";
  CHECK_THROWS_AS(build_model(bad, 1), ConfigError);
  bad = inner;
  bad.degrees = {{1, 2}, {2}};
  CHECK_THROWS(build_model(bad, 1));
}

TEST_CASE("reports are deterministic and carry the config") {
  const auto c = parse_config(kGaussBonnet);
  const auto a = run(c), b = run(c);
  CHECK(a.passed());
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_json().find("\"schema_version\": 1") != std::string::npos);
  CHECK(a.to_json().find("wall_time_s") == std::string::npos);
  CHECK(a.to_json(true).find("wall_time_s") != std::string::npos);
  CHECK(a.to_json().find("\"radial_order\": 16") != std::string::npos);
  for (const auto& ch : a.checks()) CHECK(ch.pass);
}

TEST_CASE("a failing tolerance fails the run") {
  auto c = parse_config(kGaussBonnet);
  c.params["euler_characteristic"] = 2.001;
  const auto rep = run(c);
  CHECK_FALSE(rep.passed());
  CHECK(rep.to_json().find("\"passed\": false") != std::string::npos);
}

TEST_CASE("samples are seeded") {
  auto c = perturbed("verify-identities", 0.1);
  const auto a = bundle_samples(c, CoordinateFrame{1, 2});
  const auto b = bundle_samples(c, CoordinateFrame{1, 2});
  CHECK(a.size() == 5);
  CHECK(a[3].v == b[3].v);
  c.samples.seed = 8;
  CHECK(bundle_samples(c, CoordinateFrame{1, 2})[3].v != a[3].v);
  for (const auto& z : base_samples(c, 2))
    for (auto x : z) CHECK(std::max(std::abs(x.real()), std::abs(x.imag())) <= c.samples.radius);
}

TEST_CASE("pseudo-convexity gate rejects large epsilon with a witness") {
  const auto ok = perturbed("verify-identities", 0.1);
  const auto gate = pseudoconvexity_gate(*build_model(ok.metric, 1), ok);
  CHECK(gate.min_eigenvalue > 0.0);
  const auto bad = perturbed("verify-identities", 2.0);
  try {
    (void)run(bad);
    FAIL("gate did not reject epsilon = 2");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("not strongly pseudo-convex") != std::string::npos);
    CHECK(msg.find("Levi eigenvalue -") != std::string::npos);
  }
}

TEST_CASE("scan emits one row per grid value") {
  auto c = perturbed("positivity-scan", 0.0);
  c.has_scan = true;
  c.scan = {"epsilon", {0.0, 0.1, 2.0}};
  const auto rows = scan(c);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].pass);
  CHECK(rows[1].pass);
  CHECK_FALSE(rows[2].pass);
  CHECK(rows[2].columns.at("gate_rejected") == 1.0);
  CHECK(rows[0].columns.at("levi_min_eigenvalue") > rows[1].columns.at("levi_min_eigenvalue"));
  const auto csv = scan_to_csv("epsilon", rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  c.scan.values.clear();
  const auto empty = scan_to_csv("epsilon", scan(c));
  CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
  CHECK(empty.rfind("epsilon", 0) == 0);
}

TEST_CASE("verify-identities passes and its negative control trips") {
  auto c = perturbed("verify-identities", 0.1);
  c.params["oracle_points"] = 2;
  const auto rep = run(c);
  CHECK(rep.passed());
  bool saw_control = false;
  for (const auto& ch : rep.checks())
    if (ch.name == "negative_control_residual_min") {
      saw_control = true;
      CHECK(ch.computed > 1e-6);
    }
  CHECK(saw_control);
}

TEST_CASE("inequality scenarios refuse non-Einstein models") {
  auto c = perturbed("kl", 0.1);
  c.base = "CP1xCP1";
  c.metric.degrees = {{1, 0}, {1, 2}};
  CHECK_THROWS_AS(run(c), ConfigError);
}
