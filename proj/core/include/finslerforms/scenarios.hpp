#pragma once

// Scenario orchestration: each scenario evaluates one family of identities or
// inequalities for the configured metric and records the outcome as checks.

#include <string>
#include <vector>

#include "finslerforms/config.hpp"
#include "finslerforms/finsler.hpp"
#include "finslerforms/report.hpp"

namespace finslerforms::scenarios {

const std::vector<std::string>& scenario_names();

// Throws ConfigError for an invalid config or a metric that fails the
// pseudo-convexity gate; checks that fail are recorded, not thrown.
Report run(const ScenarioConfig& config);

// Re-runs the scenario for each value of the scanned parameter.
std::vector<ScanRow> scan(const ScenarioConfig& config);

// Deterministic sample plan drawn from config.samples.
std::vector<CVector> base_samples(const ScenarioConfig& config, int base_dim);
std::vector<SamplePoint> bundle_samples(const ScenarioConfig& config, const CoordinateFrame& frame);

// Smallest Levi eigenvalue over the sample plan and a fixed set of fiber
// directions; throws ConfigError with the witness when it is not positive.
struct GateResult {
  double min_eigenvalue = 0.0;
  SamplePoint witness;
};
GateResult pseudoconvexity_gate(const MetricModel& model, const ScenarioConfig& config);

}  // namespace finslerforms::scenarios
