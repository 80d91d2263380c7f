#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "finslerforms/scenarios.hpp"

namespace fs = finslerforms::scenarios;

namespace {

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw fs::ConfigError("cannot write output file '" + path + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for Finsler vector bundle curvature and characteristic forms"};
  std::string scenario, config_path, out_path, format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> radial, angular;
  std::optional<std::size_t> mc_samples;
  bool timing = false, list = false;

  app.add_option("scenario", scenario, "scenario name (see --list)");
  app.add_option("--config", config_path, "scenario config (JSON)");
  app.add_option("--seed", seed, "seed for sample points and Monte Carlo");
  app.add_option("--radial-order", radial, "radial Gauss-Legendre order (fiber and base)");
  app.add_option("--angular-order", angular, "angular order (fiber and base)");
  app.add_option("--mc-samples", mc_samples, "Monte Carlo sample count for fiber integrals");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--timing", timing, "include wall time in the JSON report");
  app.add_flag("--list", list, "list scenario names and exit");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& n : fs::scenario_names()) std::cout << n << '\n';
    return 0;
  }
  try {
    if (scenario.empty()) throw fs::ConfigError("a scenario name is required");
    if (config_path.empty()) throw fs::ConfigError("--config is required");
    auto config = fs::load_config(config_path);
    if (config.scenario != scenario) {
      throw fs::ConfigError("config is for scenario '" + config.scenario + "', not '" + scenario + "'");
    }
    if (seed) {
      config.samples.seed = *seed;
      config.fiber.seed = *seed;
    }
    for (auto* q : {&config.fiber, &config.base_quadrature}) {
      if (radial) q->radial_order = *radial;
      if (angular) q->angular_order = *angular;
    }
    if (mc_samples) config.fiber.mc_samples = *mc_samples;
    try {
      config.fiber.validate();
      config.base_quadrature.validate();
    } catch (const finslerforms::Error& e) {
      throw fs::ConfigError(e.what());
    }

    if (config.has_scan) {
      const auto rows = fs::scan(config);
      write_output(fs::scan_to_csv(config.scan.parameter, rows), out_path);
      for (const auto& r : rows)
        if (!r.pass) return 1;
      return 0;
    }
    const auto report = fs::run(config);
    write_output(format == "csv" ? report.to_csv() : report.to_json(timing), out_path);
    if (!report.passed()) {
      for (const auto& c : report.checks())
        if (!c.pass) std::cerr << "FAIL " << c.name << ": computed " << c.computed << '\n';
      return 1;
    }
    return 0;
  } catch (const fs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const finslerforms::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
