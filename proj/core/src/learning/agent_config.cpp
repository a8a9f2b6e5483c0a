#include "imitate/learning/agent_config.hpp"

#include <set>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::learning {

const char* to_string(AgentType t) {
  switch (t) {
    case AgentType::ppo:
      return "ppo";
    case AgentType::awr:
      return "awr";
    case AgentType::amp:
      return "amp";
    case AgentType::add:
      return "add";
  }
  return "?";
}

AgentType agent_type_from_string(const std::string& s) {
  for (AgentType t : {AgentType::ppo, AgentType::awr, AgentType::amp, AgentType::add}) {
    if (s == to_string(t)) return t;
  }
  throw ConfigError("unknown agent type '" + s + "' (ppo|awr|amp|add)");
}

namespace {

const std::set<std::string> kKeys = {
    "agent",        "steps_per_env",     "discount",         "gae_lambda",         "fail_value",
    "succ_value",   "normalize_obs",     "normalizer_clip",  "clip",               "epochs",
    "minibatches",  "policy_lr",         "value_lr",         "value_coef",         "entropy_coef",
    "normalize_advantages", "awr_beta",  "awr_max_weight",   "replay_size",        "awr_batch_size",
    "awr_steps",    "task_reward_weight", "style_reward_weight", "disc_lr",        "gp_coef",
    "disc_batch_size", "normalize_disc_obs", "model"};

}  // namespace

AgentConfig AgentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("agent config must be a mapping");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown agent config key '" + key + "'");
  }
  AgentConfig c;
  try {
    c.type = agent_type_from_string(j.at("agent").get<std::string>());
    c.steps_per_env = j.value("steps_per_env", c.steps_per_env);
    c.returns.discount = j.value("discount", c.returns.discount);
    c.returns.lambda = j.value("gae_lambda", c.returns.lambda);
    c.returns.fail_value = j.value("fail_value", c.returns.fail_value);
    c.returns.succ_value = j.value("succ_value", c.returns.succ_value);
    c.normalize_obs = j.value("normalize_obs", c.normalize_obs);
    c.normalizer_clip = j.value("normalizer_clip", c.normalizer_clip);
    c.clip = j.value("clip", c.clip);
    c.epochs = j.value("epochs", c.epochs);
    c.minibatches = j.value("minibatches", c.minibatches);
    c.policy_lr = j.value("policy_lr", c.policy_lr);
    c.value_lr = j.value("value_lr", c.value_lr);
    c.value_coef = j.value("value_coef", c.value_coef);
    c.entropy_coef = j.value("entropy_coef", c.entropy_coef);
    c.normalize_advantages = j.value("normalize_advantages", c.normalize_advantages);
    c.awr_beta = j.value("awr_beta", c.awr_beta);
    c.awr_max_weight = j.value("awr_max_weight", c.awr_max_weight);
    c.replay_size = j.value("replay_size", c.replay_size);
    c.awr_batch_size = j.value("awr_batch_size", c.awr_batch_size);
    c.awr_steps = j.value("awr_steps", c.awr_steps);
    c.task_reward_weight = j.value("task_reward_weight", c.task_reward_weight);
    c.style_reward_weight = j.value("style_reward_weight", c.style_reward_weight);
    c.disc_lr = j.value("disc_lr", c.disc_lr);
    c.gp_coef = j.value("gp_coef", c.gp_coef);
    c.disc_batch_size = j.value("disc_batch_size", c.disc_batch_size);
    c.normalize_disc_obs = j.value("normalize_disc_obs", c.normalize_disc_obs);
    if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("agent config: ") + e.what());
  }
  if (c.steps_per_env < 1 || c.epochs < 1 || c.minibatches < 1) {
    throw ConfigError("steps_per_env, epochs and minibatches must be positive");
  }
  if (!(c.returns.discount >= 0.0 && c.returns.discount <= 1.0) || !(c.returns.lambda >= 0.0 && c.returns.lambda <= 1.0)) {
    throw ConfigError("discount and gae_lambda must lie in [0, 1]");
  }
  if (!(c.clip > 0.0) || !(c.policy_lr > 0.0) || !(c.value_lr > 0.0) || !(c.disc_lr > 0.0)) {
    throw ConfigError("clip and learning rates must be positive");
  }
  if (!(c.awr_beta > 0.0) || !(c.awr_max_weight > 0.0) || c.replay_size < 1 || c.awr_batch_size < 1 || c.awr_steps < 1) {
    throw ConfigError("invalid AWR settings");
  }
  if (c.disc_batch_size < 1 || c.gp_coef < 0.0) throw ConfigError("invalid discriminator settings");
  return c;
}

AgentConfig AgentConfig::load(const std::filesystem::path& path) { return from_json(load_document(path)); }

nlohmann::json AgentConfig::to_json() const {
  return {{"agent", to_string(type)},
          {"steps_per_env", steps_per_env},
          {"discount", returns.discount},
          {"gae_lambda", returns.lambda},
          {"fail_value", returns.fail_value},
          {"succ_value", returns.succ_value},
          {"normalize_obs", normalize_obs},
          {"normalizer_clip", normalizer_clip},
          {"clip", clip},
          {"epochs", epochs},
          {"minibatches", minibatches},
          {"policy_lr", policy_lr},
          {"value_lr", value_lr},
          {"value_coef", value_coef},
          {"entropy_coef", entropy_coef},
          {"normalize_advantages", normalize_advantages},
          {"awr_beta", awr_beta},
          {"awr_max_weight", awr_max_weight},
          {"replay_size", replay_size},
          {"awr_batch_size", awr_batch_size},
          {"awr_steps", awr_steps},
          {"task_reward_weight", task_reward_weight},
          {"style_reward_weight", style_reward_weight},
          {"disc_lr", disc_lr},
          {"gp_coef", gp_coef},
          {"disc_batch_size", disc_batch_size},
          {"normalize_disc_obs", normalize_disc_obs},
          {"model", model.to_json()}};
}

}  // namespace imitate::learning
