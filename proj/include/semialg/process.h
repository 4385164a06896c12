#pragma once

#include <string>
#include <vector>

namespace semialg {

struct ProcessResult {
  bool started = false;
  bool timed_out = false;
  /// Exit status when the process exited normally, otherwise -1.
  int exit_code = -1;
  std::string output;
};

/// Runs `argv[0]` (searched on PATH) with its stdout captured and stderr
/// discarded. The process is killed after `timeout` seconds; <= 0 waits
/// indefinitely.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout);

}  // namespace semialg
