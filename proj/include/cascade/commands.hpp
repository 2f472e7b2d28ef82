#pragma once

#include <functional>
#include <ostream>

#include "cascade/run_config.hpp"

namespace cascade::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitIntegration = 3,
  kExitNotConverged = 4,
};

// Each command writes its artifacts plus effective_config.json into cfg.out
// and a one-line summary to `log`. Library errors propagate; use
// run_guarded to map them onto exit codes.
//
// simulate: fidelity_curve.csv, report.json, deficits.csv (kernel tracking)
// optimize: profile.csv, trace.csv, stationarity.json
// sweep:    sweep.csv
// budget:   budget.json
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_optimize(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_budget(const RunConfig& cfg, std::ostream& log);

/// Runs `fn`, printing any error to `err` and returning its exit code.
int run_guarded(const std::function<int()>& fn, std::ostream& err);

}  // namespace cascade::cli
