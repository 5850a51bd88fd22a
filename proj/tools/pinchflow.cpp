#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinchflow/commands.hpp"

int main(int argc, char** argv) {
  using namespace pinchflow;

  CLI::App app{"Curvature flows of curves on rotationally symmetric pinched Hadamard surfaces"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out;
  std::vector<int> modes;
  std::string run_dir;
  bool strict = false;

  auto* run = app.add_subcommand("run", "Run a scenario file or a directory of scenario files");
  run->add_option("--scenario", scenario, "Scenario JSON file or directory")->required();
  run->add_option("--out", out, "Output directory (overrides the scenario)");

  auto* spectrum = app.add_subcommand("spectrum", "Fit decay rates of Fourier modes around a circle");
  spectrum->add_option("--scenario", scenario, "Scenario JSON file")->required();
  spectrum->add_option("--out", out, "Output directory (overrides the scenario)");
  spectrum->add_option("--modes", modes, "Comma-separated mode list")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Re-run the diagnostics checks on a run directory");
  verify->add_option("dir", run_dir, "Run directory");
  verify->add_option("--out", out, "Run directory (alternative to the positional argument)");
  verify->add_flag("--strict", strict, "Treat warnings as failures");

  auto* info = app.add_subcommand("surface-info", "Tabulate the warp function and curvature");
  info->add_option("--scenario", scenario, "Scenario JSON file")->required();
  info->add_option("--out", out, "Directory for surface.svg (overrides the scenario)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::optional<std::string> out_dir =
      out.empty() ? std::nullopt : std::optional<std::string>(out);
  try {
    if (run->parsed()) return cmd_run(scenario, out_dir, std::cout, std::cerr);
    if (spectrum->parsed()) return cmd_spectrum(scenario, out_dir, modes, std::cout, std::cerr);
    if (info->parsed()) return cmd_surface_info(scenario, out_dir, std::cout, std::cerr);
    if (verify->parsed()) {
      const std::string dir = run_dir.empty() ? out : run_dir;
      if (dir.empty()) {
        std::cerr << "verify: a run directory is required\n";
        return kExitConfig;
      }
      return cmd_verify(dir, strict, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
