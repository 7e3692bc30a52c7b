#pragma once

#include <string>

#include "vwlab/config.hpp"
#include "vwlab/error.hpp"

namespace vwlab {

enum ExitCode : int {
  ExitOk = 0,
  ExitConfig = 2,
  ExitHypothesis = 3,
  ExitSolver = 4,
  ExitIo = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

// Executes the configured mode and fills out_dir with config.txt, CSVs, snapshots/, summary.txt
// and timing.txt. Errors are caught, recorded in failure.txt and mapped to an exit code.
// Everything except timing.txt is byte-identical across repeated runs of the same config.
int run_config(const SimulationConfig& cfg, const std::string& out_dir);

}  // namespace vwlab
