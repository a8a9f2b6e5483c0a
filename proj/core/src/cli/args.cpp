#include "imitate/cli/args.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "imitate/util/error.hpp"

namespace imitate::cli {

const std::vector<std::string>& valid_keys() {
  static const std::vector<std::string> keys = {
      "mode",   "num_envs", "env_config",  "agent_config", "visualize", "log_file",  "out_model_file", "model_file",
      "logger", "arg_file", "num_workers", "device",       "seed",      "max_iters", "test_episodes"};
  return keys;
}

namespace {

std::string key_list() {
  std::string s;
  for (const auto& k : valid_keys()) s += (s.empty() ? "--" : ", --") + k;
  return s;
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

KeyValues pair_up(const std::vector<std::string>& tokens, const std::string& where) {
  KeyValues kv;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (t.size() < 3 || t.rfind("--", 0) != 0) {
      throw InvalidArgument("expected --key, got '" + t + "'" + where);
    }
    const std::string key = t.substr(2);
    bool known = false;
    for (const auto& k : valid_keys()) known = known || k == key;
    if (!known) throw InvalidArgument("unknown argument '--" + key + "'" + where + "; valid keys: " + key_list());
    if (i + 1 >= tokens.size() || tokens[i + 1].rfind("--", 0) == 0) {
      throw InvalidArgument("missing value for '--" + key + "'" + where);
    }
    kv.emplace_back(key, tokens[++i]);
  }
  return kv;
}

std::vector<std::string> read_arg_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read arg_file '" + path + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  return tokens;
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidArgument("invalid value '" + v + "' for --" + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidArgument("invalid value '" + v + "' for --" + key + " (true|false)");
}

void apply(RunArgs& a, const std::string& key, const std::string& v) {
  if (key == "mode") a.mode = v;
  else if (key == "num_envs") a.num_envs = parse_number<int>(key, v);
  else if (key == "env_config") a.env_config = v;
  else if (key == "agent_config") a.agent_config = v;
  else if (key == "visualize") a.visualize = parse_bool(key, v);
  else if (key == "log_file") a.log_file = v;
  else if (key == "out_model_file") a.out_model_file = v;
  else if (key == "model_file") a.model_file = v;
  else if (key == "logger") a.logger = v;
  else if (key == "arg_file") a.arg_file = v;
  else if (key == "num_workers") a.num_workers = parse_number<int>(key, v);
  else if (key == "device") a.device = v;
  else if (key == "seed") a.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "max_iters") a.max_iters = parse_number<int>(key, v);
  else if (key == "test_episodes") a.test_episodes = parse_number<int>(key, v);
}

void validate(const RunArgs& a) {
  if (a.mode != "train" && a.mode != "test") throw InvalidArgument("--mode must be train or test, got '" + a.mode + "'");
  if (a.mode == "test" && a.model_file.empty()) throw InvalidArgument("--mode test requires --model_file");
  if (a.num_envs < 1) throw InvalidArgument("--num_envs must be at least 1");
  if (a.num_workers < 1) throw InvalidArgument("--num_workers must be at least 1");
  if (a.max_iters < 0) throw InvalidArgument("--max_iters must be non-negative");
  if (a.test_episodes < 1) throw InvalidArgument("--test_episodes must be at least 1");
  if (a.logger != "csv" && a.logger != "tb" && a.logger != "wandb") {
    throw InvalidArgument("--logger must be csv, tb or wandb, got '" + a.logger + "'");
  }
}

}  // namespace

RunArgs parse_args(const std::vector<std::string>& tokens) {
  const KeyValues cmd = pair_up(tokens, "");
  RunArgs a;
  for (const auto& [k, v] : cmd) {
    if (k == "arg_file") a.arg_file = v;
  }
  if (!a.arg_file.empty()) {
    for (const auto& [k, v] : pair_up(read_arg_file(a.arg_file), " in arg_file " + a.arg_file)) {
      if (k == "arg_file") throw InvalidArgument("arg_file " + a.arg_file + " may not include another --arg_file");
      apply(a, k, v);
    }
  }
  for (const auto& [k, v] : cmd) apply(a, k, v);
  validate(a);
  return a;
}

RunArgs parse_args(int argc, const char* const* argv) {
  return parse_args(std::vector<std::string>(argv + 1, argv + argc));
}

std::vector<std::string> render_args(const RunArgs& a) {
  return {"--mode",           a.mode,
          "--num_envs",       std::to_string(a.num_envs),
          "--env_config",     a.env_config,
          "--agent_config",   a.agent_config,
          "--visualize",      a.visualize ? "true" : "false",
          "--log_file",       a.log_file,
          "--out_model_file", a.out_model_file,
          "--model_file",     a.model_file,
          "--logger",         a.logger,
          "--arg_file",       a.arg_file,
          "--num_workers",    std::to_string(a.num_workers),
          "--device",         a.device,
          "--seed",           std::to_string(a.seed),
          "--max_iters",      std::to_string(a.max_iters),
          "--test_episodes",  std::to_string(a.test_episodes)};
}

}  // namespace imitate::cli
