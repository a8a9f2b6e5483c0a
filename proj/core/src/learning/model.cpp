#include "imitate/learning/model.hpp"

#include <cmath>
#include <numbers>

#include "imitate/util/error.hpp"

namespace imitate::learning {

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    if (j.contains("hidden")) c.actor_hidden = c.critic_hidden = c.disc_hidden = j.at("hidden").get<std::vector<int>>();
    if (j.contains("actor_hidden")) c.actor_hidden = j.at("actor_hidden").get<std::vector<int>>();
    if (j.contains("critic_hidden")) c.critic_hidden = j.at("critic_hidden").get<std::vector<int>>();
    if (j.contains("disc_hidden")) c.disc_hidden = j.at("disc_hidden").get<std::vector<int>>();
    if (j.contains("activation")) c.activation = activation_from_string(j.at("activation").get<std::string>());
    c.init_action_std = j.value("init_action_std", c.init_action_std);
    c.actor_output_scale = j.value("actor_output_scale", c.actor_output_scale);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  if (!(c.init_action_std > 0.0)) throw ConfigError("model.init_action_std must be positive");
  return c;
}

nlohmann::json ModelConfig::to_json() const {
  return {{"actor_hidden", actor_hidden},
          {"critic_hidden", critic_hidden},
          {"disc_hidden", disc_hidden},
          {"activation", to_string(activation)},
          {"init_action_std", init_action_std},
          {"actor_output_scale", actor_output_scale}};
}

PolicyModel::PolicyModel(int obs_dim, int action_dim, int disc_dim, ModelConfig config)
    : config_(std::move(config)),
      actor_(obs_dim, config_.actor_hidden, action_dim, config_.activation),
      critic_(obs_dim, config_.critic_hidden, 1, config_.activation) {
  int offset = 0;
  actor_seg_ = {offset, actor_.num_params()};
  offset += actor_seg_.size;
  log_std_seg_ = {offset, action_dim};
  offset += action_dim;
  critic_seg_ = {offset, critic_.num_params()};
  offset += critic_seg_.size;
  if (disc_dim > 0) {
    disc_ = Mlp(disc_dim, config_.disc_hidden, 1, config_.activation);
    disc_seg_ = {offset, disc_.num_params()};
  } else {
    disc_seg_ = {offset, 0};
  }
  offset += disc_seg_.size;
  params_ = Eigen::VectorXd::Zero(offset);
}

void PolicyModel::init(Rng& rng) {
  actor_.init(params_.data() + actor_seg_.offset, rng, config_.actor_output_scale);
  params_.segment(log_std_seg_.offset, log_std_seg_.size).setConstant(std::log(config_.init_action_std));
  critic_.init(params_.data() + critic_seg_.offset, rng, 1.0);
  if (has_disc()) disc_.init(params_.data() + disc_seg_.offset, rng, 1.0);
}

Eigen::MatrixXd PolicyModel::action_mean(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  return actor_.forward(actor_params(), x);
}

Eigen::VectorXd PolicyModel::value(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  return critic_.forward(critic_params(), x).row(0).transpose();
}

Eigen::VectorXd PolicyModel::disc_score(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  if (!has_disc()) throw ContractError("model has no discriminator");
  return disc_.forward(disc_params(), x).row(0).transpose();
}

nlohmann::json PolicyModel::layout() const {
  return {{"obs_dim", obs_dim()},
          {"action_dim", action_dim()},
          {"disc_dim", disc_dim()},
          {"actor", actor_.sizes()},
          {"critic", critic_.sizes()},
          {"disc", has_disc() ? nlohmann::json(disc_.sizes()) : nlohmann::json::array()},
          {"activation", to_string(config_.activation)},
          {"num_params", num_params()}};
}

Eigen::VectorXd gaussian_log_prob(const Eigen::MatrixXd& mean, const Eigen::VectorXd& log_std,
                                  const Eigen::MatrixXd& actions) {
  const Eigen::ArrayXd inv_std = (-log_std.array()).exp();
  const Eigen::ArrayXXd z = (actions - mean).array().colwise() * inv_std;
  const double norm = log_std.sum() + 0.5 * static_cast<double>(log_std.size()) * std::log(2.0 * std::numbers::pi);
  return (-0.5 * z.square().colwise().sum() - norm).matrix().transpose();
}

}  // namespace imitate::learning
