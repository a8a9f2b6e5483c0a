#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "imitate/learning/model.hpp"
#include "imitate/learning/returns.hpp"

namespace imitate::learning {

/// amp and add train a discriminator next to a PPO policy.
enum class AgentType { ppo, awr, amp, add };

const char* to_string(AgentType t);
AgentType agent_type_from_string(const std::string& s);

struct AgentConfig {
  AgentType type = AgentType::ppo;
  int steps_per_env = 32;
  ReturnParams returns;
  bool normalize_obs = true;
  double normalizer_clip = 5.0;

  // PPO
  double clip = 0.2;
  int epochs = 4;
  int minibatches = 4;
  double policy_lr = 3e-4;
  double value_lr = 1e-3;
  double value_coef = 1.0;
  double entropy_coef = 0.0;
  bool normalize_advantages = true;

  // AWR
  double awr_beta = 1.0;
  double awr_max_weight = 20.0;
  int replay_size = 100000;
  int awr_batch_size = 256;
  int awr_steps = 32;

  // AMP / ADD
  double task_reward_weight = 0.0;
  double style_reward_weight = 1.0;
  double disc_lr = 1e-4;
  double gp_coef = 5.0;
  int disc_batch_size = 256;
  bool normalize_disc_obs = true;

  ModelConfig model;

  bool adversarial() const { return type == AgentType::amp || type == AgentType::add; }

  static AgentConfig from_json(const nlohmann::json& j);
  static AgentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace imitate::learning
