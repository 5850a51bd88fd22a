#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pinchflow {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,    // usage, configuration or I/O error
  kExitSingular = 2,  // run halted by blow-up, escape, embeddedness or graph breakdown
  kExitVerify = 3,    // verification found a failure-grade violation
};

/// Worker cap for batch runs: HF_THREADS if set to a positive integer, else
/// the hardware concurrency.
unsigned worker_count();

/// Runs one scenario file, or every *.json file of a directory (one output
/// subdirectory per scenario, named after the file stem).
int cmd_run(const std::string& scenario_path, const std::optional<std::string>& out_dir,
            std::ostream& out, std::ostream& err);

int cmd_spectrum(const std::string& scenario_path, const std::optional<std::string>& out_dir,
                 const std::vector<int>& modes, std::ostream& out, std::ostream& err);

/// Re-runs the diagnostics checks on the files written by cmd_run.
int cmd_verify(const std::string& run_dir, bool strict, std::ostream& out, std::ostream& err);

int cmd_surface_info(const std::string& scenario_path, const std::optional<std::string>& out_dir,
                     std::ostream& out, std::ostream& err);

}  // namespace pinchflow
