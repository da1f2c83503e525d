// Scenario-driven command line front end: loads a JSON config, runs the
// requested verification checks and writes report.json plus CSV artifacts.
//
// Exit codes: 0 full pass, 1 at least one check failed, 2 invalid config or
// violated theorem precondition.

#include "aniso/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"anisotropic-geometry verification tool"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  auto add_sub = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config_path, "scenario config file (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", output_override,
                    "override the configured output directory");
    return sub;
  };

  add_sub("check", "run the scenario's full check list");
  CLI::App* cmd_wulff =
      add_sub("wulff", "emit Wulff-shape samples to wulff.csv");
  CLI::App* cmd_flow =
      add_sub("flow", "run the interior foliation flow, writing trace.csv");
  CLI::App* cmd_convexity =
      add_sub("convexity", "certify the convexity condition of the anisotropy");

  CLI11_PARSE(app, argc, argv);

  try {
    aniso::Scenario scenario = aniso::load_scenario(config_path);
    if (!output_override.empty()) scenario.output_dir = output_override;

    std::vector<std::string> subset;
    if (cmd_wulff->parsed()) subset = {"wulff"};
    if (cmd_flow->parsed()) subset = {"flow"};
    if (cmd_convexity->parsed()) subset = {"convexity"};

    aniso::CheckReport report = aniso::run_scenario(scenario, subset);
    for (const auto& check : report.checks)
      std::cout << (check.pass ? "[PASS] " : "[FAIL] ") << check.name << "\n";
    std::cout << (report.overall_pass ? "PASS" : "FAIL") << " ("
              << (scenario.output_dir / "report.json").string() << ")\n";
    return report.overall_pass ? 0 : 1;
  } catch (const aniso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const aniso::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
