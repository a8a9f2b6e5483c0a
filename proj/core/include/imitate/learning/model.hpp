#pragma once

#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "imitate/learning/mlp.hpp"

namespace imitate::learning {

struct ModelConfig {
  std::vector<int> actor_hidden{256, 128};
  std::vector<int> critic_hidden{256, 128};
  std::vector<int> disc_hidden{256, 128};
  Activation activation = Activation::relu;
  double init_action_std = 0.2;
  /// Scale of the actor's initial output layer; small values start near the zero action.
  double actor_output_scale = 0.01;

  static ModelConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Contiguous range of the flat parameter vector.
struct Segment {
  int offset = 0;
  int size = 0;
};

/// Gaussian policy (MLP mean, state-independent log-std), value MLP and an
/// optional scalar discriminator MLP, all stored in one flat parameter vector
/// laid out as [actor | log_std | critic | disc].
class PolicyModel {
 public:
  PolicyModel(int obs_dim, int action_dim, int disc_dim, ModelConfig config);

  void init(Rng& rng);

  int obs_dim() const { return actor_.in_dim(); }
  int action_dim() const { return actor_.out_dim(); }
  int disc_dim() const { return has_disc() ? disc_.in_dim() : 0; }
  bool has_disc() const { return disc_seg_.size > 0; }
  int num_params() const { return static_cast<int>(params_.size()); }
  const ModelConfig& config() const { return config_; }

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  const Mlp& actor() const { return actor_; }
  const Mlp& critic() const { return critic_; }
  const Mlp& disc() const { return disc_; }
  const Segment& actor_segment() const { return actor_seg_; }
  const Segment& log_std_segment() const { return log_std_seg_; }
  const Segment& critic_segment() const { return critic_seg_; }
  const Segment& disc_segment() const { return disc_seg_; }
  /// Everything except the discriminator.
  Segment policy_segment() const { return {0, disc_seg_.offset}; }

  const double* actor_params() const { return params_.data() + actor_seg_.offset; }
  const double* critic_params() const { return params_.data() + critic_seg_.offset; }
  const double* disc_params() const { return params_.data() + disc_seg_.offset; }

  Eigen::MatrixXd action_mean(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  Eigen::VectorXd log_std() const { return params_.segment(log_std_seg_.offset, log_std_seg_.size); }
  Eigen::VectorXd value(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
  Eigen::VectorXd disc_score(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

  /// Architecture description; checkpoints must match it exactly.
  nlohmann::json layout() const;

 private:
  ModelConfig config_;
  Mlp actor_, critic_, disc_;
  Segment actor_seg_, log_std_seg_, critic_seg_, disc_seg_;
  Eigen::VectorXd params_;
};

/// Diagonal Gaussian log-density per column of `actions`.
Eigen::VectorXd gaussian_log_prob(const Eigen::MatrixXd& mean, const Eigen::VectorXd& log_std,
                                  const Eigen::MatrixXd& actions);

}  // namespace imitate::learning
