#include "finslerforms/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json_io.hpp"

#ifndef FINSLERFORMS_VERSION
#define FINSLERFORMS_VERSION "unknown"
#endif

namespace finslerforms::scenarios {

using nlohmann::json;

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::theorem: return "theorem";
    case Provenance::closed_form: return "closed-form";
    case Provenance::oracle: return "oracle";
    case Provenance::anchor: return "anchor";
  }
  return "unknown";
}

std::string to_string(Comparison c) {
  switch (c) {
    case Comparison::within: return "within";
    case Comparison::at_most: return "at_most";
    case Comparison::below: return "below";
    case Comparison::above: return "above";
  }
  return "unknown";
}

Check make_check(std::string name, double computed, double expected, Provenance provenance,
                 Comparison comparison, double tolerance) {
  Check c{std::move(name), computed, expected, provenance, comparison, tolerance, false};
  // NaN fails every comparison.
  switch (comparison) {
    case Comparison::within: c.pass = std::abs(computed - expected) <= tolerance; break;
    case Comparison::at_most: c.pass = computed <= expected + tolerance; break;
    case Comparison::below: c.pass = computed < expected - tolerance; break;
    case Comparison::above: c.pass = computed > expected + tolerance; break;
  }
  return c;
}

const Check& Report::add(Check c) {
  checks_.push_back(std::move(c));
  return checks_.back();
}

bool Report::passed() const {
  if (checks_.empty()) return false;
  for (const auto& c : checks_)
    if (!c.pass) return false;
  return true;
}

namespace {

json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

std::string Report::to_json(bool include_timing) const {
  json checks = json::array();
  for (const auto& c : checks_) {
    checks.push_back({{"name", c.name},
                      {"computed", number(c.computed)},
                      {"expected", number(c.expected)},
                      {"provenance", to_string(c.provenance)},
                      {"comparison", to_string(c.comparison)},
                      {"tolerance", number(c.tolerance)},
                      {"pass", c.pass}});
  }
  json info = json::object();
  for (const auto& [k, v] : info_) info[k] = number(v);
  json j{{"schema_version", kReportSchemaVersion},
         {"version", FINSLERFORMS_VERSION},
         {"scenario", config_.scenario},
         {"config", config_to_json(config_)},
         {"run",
          {{"seed", config_.samples.seed},
           {"fiber_orders", {config_.fiber.radial_order, config_.fiber.angular_order}},
           {"base_orders", {config_.base_quadrature.radial_order, config_.base_quadrature.angular_order}},
           {"fiber_mode", quad::to_string(config_.fiber.mode)}}},
         {"base_manifold",
          {{"name", config_.base},
           {"omega", "sqrt(-1) sum_a (1+|z^a|^2)^-2 dz^a ^ dz-bar^a, no 1/2pi"},
           {"volume", config_.manifold().volume()}}},
         {"checks", checks},
         {"info", info},
         {"passed", passed()}};
  if (include_timing && wall_time_ >= 0.0) j["run"]["wall_time_s"] = wall_time_;
  return j.dump(2) + "\n";
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string Report::to_csv() const {
  std::ostringstream out;
  out << "name,computed,expected,provenance,comparison,tolerance,pass\n";
  for (const auto& c : checks_) {
    out << c.name << ',' << format_number(c.computed) << ',' << format_number(c.expected) << ','
        << to_string(c.provenance) << ',' << to_string(c.comparison) << ','
        << format_number(c.tolerance) << ',' << (c.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string scan_to_csv(const std::string& parameter, const std::vector<ScanRow>& rows) {
  std::set<std::string> names;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.columns) names.insert(k);
  std::ostringstream out;
  out << parameter;
  for (const auto& n : names) out << ',' << n;
  out << ",pass\n";
  for (const auto& r : rows) {
    out << format_number(r.value);
    for (const auto& n : names) {
      out << ',';
      auto it = r.columns.find(n);
      if (it != r.columns.end()) out << format_number(it->second);
    }
    out << ',' << (r.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace finslerforms::scenarios
