#pragma once

#include <Eigen/Core>

#include "imitate/learning/model.hpp"

namespace imitate::learning {

/// Columns are samples; `x` is the normalized observation.
struct PolicyBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd actions;
  Eigen::VectorXd old_log_prob;  // PPO
  Eigen::VectorXd advantages;    // PPO
  Eigen::VectorXd weights;       // AWR sample weights
  Eigen::VectorXd returns;
};

struct PpoParams {
  double clip = 0.2;
  double value_coef = 1.0;
  double entropy_coef = 0.0;
};

struct LossStats {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

/// Clipped surrogate + value regression - entropy bonus. Adds the gradient
/// w.r.t. the flat parameter vector into `grad` (sized num_params).
LossStats ppo_loss(const PolicyModel& model, const PolicyBatch& batch, const PpoParams& p, Eigen::VectorXd& grad);

/// -mean(w log pi(a|s)) + value_coef * mean((V - R)^2).
LossStats awr_loss(const PolicyModel& model, const PolicyBatch& batch, double value_coef, Eigen::VectorXd& grad);

/// exp(A / beta) clamped to max_weight.
Eigen::VectorXd awr_weights(const Eigen::VectorXd& advantages, double beta, double max_weight);

struct DiscStats {
  double total = 0.0;
  double real_loss = 0.0;
  double fake_loss = 0.0;
  double grad_penalty = 0.0;
  double real_mean = 0.0;
  double fake_mean = 0.0;
};

/// Least-squares discriminator loss with a gradient penalty on real samples:
/// mean((D(real) - 1)^2) + mean((D(fake) + 1)^2) + gp_coef * mean(|dD/dx(real)|^2).
DiscStats disc_loss(const PolicyModel& model, const Eigen::MatrixXd& real, const Eigen::MatrixXd& fake, double gp_coef,
                    Eigen::VectorXd& grad);

/// max(0, 1 - 0.25 (d - 1)^2)
double style_reward(double d);

}  // namespace imitate::learning
