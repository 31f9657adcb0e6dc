#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace genrecon {

inline constexpr const char* kWorkerDirEnv = "GENRECON_WORKER_DIR";

struct ProcessResult {
  bool spawned = false;
  std::string spawn_error;
  bool timed_out = false;
  int exit_code = -1;    // valid when the child exited normally
  int term_signal = 0;   // nonzero when the child was killed by a signal
  std::string stdout_text;

  bool exited_ok() const { return spawned && !timed_out && term_signal == 0 && exit_code == 0; }
};

/// Prefixes a bare command name with $GENRECON_WORKER_DIR when an executable
/// of that name exists there; otherwise returns argv unchanged (PATH lookup).
std::vector<std::string> resolve_worker_command(std::vector<std::string> argv);

/// Spawns argv in its own process group, writes stdin_text to its standard
/// input, and collects standard output. A watchdog thread kills the whole
/// group once the timeout elapses. Standard error is inherited.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& stdin_text,
                          std::chrono::milliseconds timeout);

}  // namespace genrecon
