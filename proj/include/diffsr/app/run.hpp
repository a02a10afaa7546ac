#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "diffsr/app/config.hpp"

namespace diffsr::app {

/// Writes the agent state plus the config echo (so the directory alone can
/// rebuild the agent) as a tensor archive.
void checkpoint_save(const agent::OnlineAgent& agent, const RunConfig& config, const std::filesystem::path& dir);

/// Rebuilds the agent described by the checkpoint's own config echo and
/// restores its state.
struct LoadedRun {
  RunConfig config;
  std::unique_ptr<agent::OnlineAgent> agent;
};
LoadedRun checkpoint_load(const std::filesystem::path& dir);

/// A full online training run. Writes into the resolved output directory:
///
///   config.txt      effective configuration
///   metrics.jsonl   one record per evaluation
///   checkpoint/     final state (and periodic states if requested)
///   summary.txt     one line: status, steps, final evaluation
///
/// With `resume`, training continues from that checkpoint and metrics lines
/// past its step are dropped before appending. Returns 0 on completion and 1
/// when a component poisoned the run.
int run_experiment(const RunConfig& config, const std::optional<std::filesystem::path>& resume, std::ostream& log);

struct ReprRunOptions {
  std::optional<std::filesystem::path> checkpoint;  // take the buffer from here
  std::int64_t collect_steps = 20000;                // otherwise collect random-policy data
  int train_steps = 2000;
  int log_every = 100;
};

/// Representation learning alone: score matching on a recorded buffer. Saves ψ, ζ, the
/// head and the schedule under <output>/repr and returns the final loss.
double run_representation(const RunConfig& config, const ReprRunOptions& options, std::ostream& log);

}  // namespace diffsr::app
