#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "imitate/cli/args.hpp"
#include "imitate/eval/evaluate.hpp"
#include "imitate/learning/agent.hpp"

namespace imitate::cli {

/// Training log columns, in order. wall_time is the only non-deterministic one.
const std::vector<std::string>& log_columns();

/// CSV sibling of a text log: same path with a .csv extension.
std::filesystem::path csv_sibling(const std::filesystem::path& log_file);

/// Trains until the agent has done args.max_iters iterations, resuming from
/// args.model_file when it is set. Writes one row per iteration to the text log,
/// its CSV sibling and `out`, and a checkpoint after every iteration. Returns
/// rank 0's statistics for the iterations run by this call.
std::vector<learning::IterationStats> run_train(const RunArgs& args, std::ostream& out, std::ostream& err);

struct TestResult {
  eval::EvalReport report;
  double mean_return = 0.0;
  int episodes = 0;
  std::filesystem::path csv_file;
};

/// Evaluates the checkpoint (or the zero-residual "playback" policy) with the
/// mean action over args.test_episodes episodes. Prints the table and writes a
/// CSV next to the log file (<stem>_test.csv).
TestResult run_test(const RunArgs& args, std::ostream& out, std::ostream& err);

/// Entry point used by the `imitate` tool; returns the process exit status.
int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imitate::cli
