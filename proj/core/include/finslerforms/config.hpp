#pragma once

// Scenario configuration. The on-disk form is JSON (see configs/ and the
// README for the schema); the JSON library stays private to the .cpp files.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "finslerforms/baseint.hpp"
#include "finslerforms/models.hpp"
#include "finslerforms/quadrature.hpp"

namespace finslerforms::scenarios {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct MetricSpec {
  std::string family = "HermitianDiagonal";
  std::vector<std::vector<double>> degrees;  // degrees[i][a]
  double epsilon = 0.0;
  std::vector<double> epsilon_decay;         // FinslerPerturbed, empty for a constant weight
  std::shared_ptr<MetricSpec> inner;         // TensorByLine, Restricted
  std::vector<double> line_degrees;          // TensorByLine
  std::vector<int> subset;                   // Restricted
};

struct SamplePlan {
  int count = 10;
  std::uint64_t seed = 7;
  double radius = 1.0;  // base points are drawn from the square |Re|, |Im| <= radius
};

struct Tolerances {
  double identity = 1e-9;
  double quadrature = 1e-6;
  double class_level = 1e-4;
  double oracle = 1e-5;
  double pointwise = 1e-8;
  double transgression = 0.05;
  double margin = 1e-6;
};

struct ScanPlan {
  std::string parameter;  // "epsilon" is the only scannable parameter
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string scenario;
  MetricSpec metric;
  std::string base = "CP1";
  quad::QuadratureSpec fiber;
  quad::QuadratureSpec base_quadrature;
  SamplePlan samples;
  Tolerances tolerances;
  std::map<std::string, double> params;
  bool has_scan = false;
  ScanPlan scan;

  double param(const std::string& key, double fallback) const;
  base::BaseManifold manifold() const { return base::BaseManifold::from_string(base); }
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
// Canonical JSON text (sorted keys, every field present).
std::string to_json(const ScenarioConfig& config);

ModelPtr build_model(const MetricSpec& spec, int base_dim);

}  // namespace finslerforms::scenarios
