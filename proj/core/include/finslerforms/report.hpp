#pragma once

// Scenario reports: one record per check plus reported-only values, emitted as
// JSON (stable schema) or CSV. Wall time is left out unless asked for so that
// two runs with the same config and seed produce identical bytes.

#include <map>
#include <string>
#include <vector>

#include "finslerforms/config.hpp"

namespace finslerforms::scenarios {

inline constexpr int kReportSchemaVersion = 1;

// Where an expected value comes from.
enum class Provenance {
  theorem,      // an identity or inequality that holds for every admissible metric
  closed_form,  // a hand-derivable value (normalizations, symmetry, trivial cases)
  oracle,       // produced by the independent oracle module
  anchor,       // frozen from an earlier run and cross-checked at two orders
};
std::string to_string(Provenance p);

enum class Comparison {
  within,  // |computed - expected| <= tolerance
  at_most, // computed <= expected + tolerance
  below,   // computed < expected - tolerance
  above,   // computed > expected + tolerance
};
std::string to_string(Comparison c);

struct Check {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  Provenance provenance = Provenance::theorem;
  Comparison comparison = Comparison::within;
  double tolerance = 0.0;
  bool pass = false;
};

Check make_check(std::string name, double computed, double expected, Provenance provenance,
                 Comparison comparison, double tolerance);

class Report {
 public:
  explicit Report(ScenarioConfig config) : config_(std::move(config)) {}

  const ScenarioConfig& config() const { return config_; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::map<std::string, double>& info() const { return info_; }

  const Check& add(Check c);
  // Values that are measured and reported but not asserted.
  void note(const std::string& key, double value) { info_[key] = value; }
  void set_wall_time(double seconds) { wall_time_ = seconds; }

  bool passed() const;
  std::string to_json(bool include_timing = false) const;
  std::string to_csv() const;

 private:
  ScenarioConfig config_;
  std::vector<Check> checks_;
  std::map<std::string, double> info_;
  double wall_time_ = -1.0;
};

// One row per scanned parameter value; columns are the union of check and note names.
struct ScanRow {
  double value = 0.0;
  std::map<std::string, double> columns;
  bool pass = false;
};
std::string scan_to_csv(const std::string& parameter, const std::vector<ScanRow>& rows);

std::string format_number(double x);

}  // namespace finslerforms::scenarios
