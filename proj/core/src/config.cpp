#include "finslerforms/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"

namespace finslerforms::scenarios {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

MetricSpec parse_metric(const json& j, const std::string& where) {
  reject_unknown(j, {"family", "degrees", "epsilon", "epsilon_decay", "inner", "line_degrees", "subset"}, where);
  MetricSpec m;
  read(j, "family", m.family, where);
  read(j, "degrees", m.degrees, where);
  read(j, "epsilon", m.epsilon, where);
  read(j, "epsilon_decay", m.epsilon_decay, where);
  read(j, "line_degrees", m.line_degrees, where);
  read(j, "subset", m.subset, where);
  if (j.contains("inner")) m.inner = std::make_shared<MetricSpec>(parse_metric(j.at("inner"), where + ".inner"));
  return m;
}

json metric_to_json(const MetricSpec& m) {
  json j{{"family", m.family}, {"degrees", m.degrees}, {"epsilon", m.epsilon}};
  if (!m.epsilon_decay.empty()) j["epsilon_decay"] = m.epsilon_decay;
  if (m.inner) j["inner"] = metric_to_json(*m.inner);
  if (!m.line_degrees.empty()) j["line_degrees"] = m.line_degrees;
  if (!m.subset.empty()) j["subset"] = m.subset;
  return j;
}

quad::QuadratureSpec parse_quadrature(const json& j, quad::QuadratureSpec q, const std::string& where) {
  reject_unknown(j, {"mode", "radial_order", "angular_order", "mc_samples", "seed", "tolerance",
                     "convergence_check", "radial_symmetry"},
                 where);
  std::string mode = quad::to_string(q.mode);
  read(j, "mode", mode, where);
  try {
    q.mode = quad::mode_from_string(mode);
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  read(j, "radial_order", q.radial_order, where);
  read(j, "angular_order", q.angular_order, where);
  read(j, "mc_samples", q.mc_samples, where);
  read(j, "seed", q.seed, where);
  read(j, "tolerance", q.tolerance, where);
  read(j, "convergence_check", q.convergence_check, where);
  read(j, "radial_symmetry", q.radial_symmetry, where);
  try {
    q.validate();
  } catch (const Error& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return q;
}

json quadrature_to_json(const quad::QuadratureSpec& q) {
  return {{"mode", quad::to_string(q.mode)},
          {"radial_order", q.radial_order},
          {"angular_order", q.angular_order},
          {"mc_samples", q.mc_samples},
          {"seed", q.seed},
          {"tolerance", q.tolerance},
          {"convergence_check", q.convergence_check},
          {"radial_symmetry", q.radial_symmetry}};
}

quad::QuadratureSpec default_fiber() {
  quad::QuadratureSpec q;
  q.radial_order = 24;
  q.angular_order = 8;
  return q;
}

quad::QuadratureSpec default_base() {
  quad::QuadratureSpec q = default_fiber();
  q.radial_symmetry = true;
  return q;
}

}  // namespace

double ScenarioConfig::param(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"scenario", "metric", "base", "quadrature", "samples", "tolerances", "params",
                     "scan"},
                 "config");
  ScenarioConfig c;
  c.fiber = default_fiber();
  c.base_quadrature = default_base();
  read(j, "scenario", c.scenario, "config");
  if (c.scenario.empty()) throw ConfigError("config.scenario is required");
  if (j.contains("metric")) c.metric = parse_metric(j.at("metric"), "metric");
  read(j, "base", c.base, "config");
  try {
    (void)base::BaseManifold::from_string(c.base);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (j.contains("quadrature")) {
    const auto& q = j.at("quadrature");
    reject_unknown(q, {"fiber", "base"}, "quadrature");
    if (q.contains("fiber")) c.fiber = parse_quadrature(q.at("fiber"), c.fiber, "quadrature.fiber");
    if (q.contains("base"))
      c.base_quadrature = parse_quadrature(q.at("base"), c.base_quadrature, "quadrature.base");
  }
  if (j.contains("samples")) {
    const auto& s = j.at("samples");
    reject_unknown(s, {"count", "seed", "radius"}, "samples");
    read(s, "count", c.samples.count, "samples");
    read(s, "seed", c.samples.seed, "samples");
    read(s, "radius", c.samples.radius, "samples");
    if (c.samples.count < 1) throw ConfigError("samples.count must be positive");
    if (!(c.samples.radius > 0.0)) throw ConfigError("samples.radius must be positive");
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    reject_unknown(t, {"identity", "quadrature", "class_level", "oracle", "pointwise",
                       "transgression", "margin"},
                   "tolerances");
    auto& tol = c.tolerances;
    read(t, "identity", tol.identity, "tolerances");
    read(t, "quadrature", tol.quadrature, "tolerances");
    read(t, "class_level", tol.class_level, "tolerances");
    read(t, "oracle", tol.oracle, "tolerances");
    read(t, "pointwise", tol.pointwise, "tolerances");
    read(t, "transgression", tol.transgression, "tolerances");
    read(t, "margin", tol.margin, "tolerances");
  }
  read(j, "params", c.params, "config");
  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    reject_unknown(s, {"parameter", "values"}, "scan");
    c.has_scan = true;
    read(s, "parameter", c.scan.parameter, "scan");
    read(s, "values", c.scan.values, "scan");
    if (c.scan.parameter != "epsilon") {
      throw ConfigError("scan.parameter must be 'epsilon', got '" + c.scan.parameter + "'");
    }
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

json config_to_json(const ScenarioConfig& c) {
  const auto& t = c.tolerances;
  json j{{"scenario", c.scenario},
         {"metric", metric_to_json(c.metric)},
         {"base", c.base},
         {"quadrature",
          {{"fiber", quadrature_to_json(c.fiber)}, {"base", quadrature_to_json(c.base_quadrature)}}},
         {"samples", {{"count", c.samples.count}, {"seed", c.samples.seed}, {"radius", c.samples.radius}}},
         {"tolerances",
          {{"identity", t.identity},
           {"quadrature", t.quadrature},
           {"class_level", t.class_level},
           {"oracle", t.oracle},
           {"pointwise", t.pointwise},
           {"transgression", t.transgression},
           {"margin", t.margin}}},
         {"params", c.params}};
  if (c.has_scan) j["scan"] = {{"parameter", c.scan.parameter}, {"values", c.scan.values}};
  return j;
}

std::string to_json(const ScenarioConfig& config) { return config_to_json(config).dump(2); }

ModelPtr build_model(const MetricSpec& spec, int base_dim) {
  auto require_degrees = [&] {
    if (spec.degrees.empty()) throw ConfigError(spec.family + " needs metric.degrees");
    for (const auto& d : spec.degrees)
      if (static_cast<int>(d.size()) != base_dim) {
        throw ConfigError("metric.degrees rows need one entry per base factor (" +
                          std::to_string(base_dim) + ")");
      }
  };
  try {
    if (spec.family == "HermitianDiagonal") {
      require_degrees();
      return make_hermitian(base_dim, spec.degrees);
    }
    if (spec.family == "FinslerPerturbed") {
      require_degrees();
      return std::make_shared<const FinslerPerturbed>(make_hermitian(base_dim, spec.degrees), spec.epsilon,
                                                      spec.epsilon_decay);
    }
    if (spec.family == "TensorByLine" || spec.family == "Restricted") {
      if (!spec.inner) throw ConfigError(spec.family + " needs metric.inner");
      auto inner = build_model(*spec.inner, base_dim);
      if (spec.family == "TensorByLine") {
        return std::make_shared<TensorByLine>(inner, spec.line_degrees);
      }
      return std::make_shared<Restricted>(inner, spec.subset);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("metric: ") + e.what());
  }
  throw ConfigError("unknown metric family '" + spec.family +
                    "' (Custom models are built in code, not from config)");
}

}  // namespace finslerforms::scenarios
