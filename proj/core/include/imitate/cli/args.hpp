#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace imitate::cli {

/// Command-line options. Every field is settable as `--<field> <value>`.
struct RunArgs {
  std::string mode = "train";  // train | test
  int num_envs = 1;            // per worker
  std::string env_config;
  std::string agent_config;
  bool visualize = false;
  std::string log_file = "output/log.txt";
  std::string out_model_file = "output/model.json";
  /// test: checkpoint to evaluate, or "playback" for the zero-residual policy.
  /// train: checkpoint to resume from (optional).
  std::string model_file;
  std::string logger = "csv";  // csv | tb | wandb
  std::string arg_file;
  int num_workers = 1;
  std::string device = "cpu";
  std::uint64_t seed = 0;
  int max_iters = 100;      // total training iterations, counted across resumes
  int test_episodes = 32;

  friend bool operator==(const RunArgs&, const RunArgs&) = default;
};

/// Flag names accepted by parse_args, in declaration order.
const std::vector<std::string>& valid_keys();

/// Parses `--key value` tokens. If --arg_file is given, the file's tokens
/// (whitespace separated, '#' starts a comment) are applied first and the
/// command-line tokens override them key by key. Throws InvalidArgument on
/// unknown keys, missing values, bad values or an unreadable arg file.
RunArgs parse_args(const std::vector<std::string>& tokens);
RunArgs parse_args(int argc, const char* const* argv);

/// Tokens for every field (empty strings included) that parse back to `args`.
std::vector<std::string> render_args(const RunArgs& args);

}  // namespace imitate::cli
