#pragma once

#include <iosfwd>
#include <string>

#include "smcmc/config.hpp"

namespace smcmc {

/// Commands return process exit codes: 0 success, 1 config error,
/// 2 precondition error, 3 numerical error. `log` receives human-readable
/// progress/results (pass a null stream to silence).
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_sample(const RunConfig& cfg, std::ostream& log);
int cmd_benchmark(const RunConfig& cfg, std::ostream& log);
int cmd_check_derivatives(const RunConfig& cfg, std::ostream& log);

/// Runs the named command ("simulate", "sample", "benchmark",
/// "check-derivatives"), translating thrown errors into exit codes and a
/// diagnostic line on `err`.
int dispatch_command(const std::string& name, const RunConfig& cfg, std::ostream& log,
                     std::ostream& err);

}  // namespace smcmc
