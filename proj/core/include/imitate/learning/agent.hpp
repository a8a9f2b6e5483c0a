#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "imitate/envs/vec_env.hpp"
#include "imitate/learning/adam.hpp"
#include "imitate/learning/agent_config.hpp"
#include "imitate/learning/communicator.hpp"
#include "imitate/learning/model.hpp"
#include "imitate/learning/normalizer.hpp"
#include "imitate/util/rng.hpp"

namespace imitate::learning {

/// Per-iteration training statistics of one worker. NaN marks "not applicable"
/// or "no episode finished this iteration".
struct IterationStats {
  long iteration = 0;
  long samples = 0;  // env steps taken by this worker so far
  int episodes = 0;
  double mean_return = 0.0;
  double mean_episode_length = 0.0;
  double mean_reward = 0.0;  // training reward per step (after relabeling)
  double mean_task_reward = 0.0;
  double e_pos = 0.0;
  double e_vel = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  double action_std = 0.0;
  double disc_loss = 0.0;
  double disc_real = 0.0;
  double disc_fake = 0.0;
};

/// On-policy (PPO, AMP, ADD) or off-policy (AWR) learner driving one VecEnv.
///
/// With a communicator, each rank owns its env batch and a model replica;
/// gradients and normalizer statistics are reduced across ranks in rank order
/// so replicas stay bit-identical.
class Agent {
 public:
  Agent(AgentConfig config, envs::VecEnv& env, std::uint64_t seed, Communicator* comm = nullptr, int rank = 0);

  IterationStats train_iteration();

  /// Actions for raw observations (obs_dim x B). Deterministic uses the mean.
  Eigen::MatrixXd act(const Eigen::Ref<const Eigen::MatrixXd>& obs, bool deterministic);

  const AgentConfig& config() const { return config_; }
  PolicyModel& model() { return model_; }
  const PolicyModel& model() const { return model_; }
  const RunningNormalizer& obs_normalizer() const { return obs_norm_; }
  const RunningNormalizer& disc_normalizer() const { return disc_norm_; }
  long iteration() const { return iteration_; }
  long samples() const { return samples_; }
  int rank() const { return rank_; }

  /// ADD reward for raw difference vectors (columns).
  Eigen::VectorXd add_reward(const Eigen::MatrixXd& delta) const;
  /// AMP style reward for raw disc observations (columns).
  Eigen::VectorXd amp_reward(const Eigen::MatrixXd& disc_obs) const;

  /// Complete training state, including the environment, for exact resumption.
  nlohmann::json state() const;
  void load_state(const nlohmann::json& j);
  /// Loads only parameters and normalizers (test mode). Layout must match.
  void load_policy(const nlohmann::json& j);

 private:
  struct Rollout {
    Eigen::MatrixXd obs, x, actions, disc;
    Eigen::VectorXd log_prob, values, rewards, task_rewards, bootstrap;
    std::vector<envs::DoneFlag> dones;
  };
  struct ReplayBuffer {
    Eigen::MatrixXd obs, actions;
    Eigen::VectorXd returns;
    int size = 0;
    int next = 0;
  };

  int column(int t, int i) const { return t * num_envs_ + i; }
  void collect(Rollout& ro, IterationStats& st);
  void relabel(Rollout& ro) const;
  Eigen::VectorXd discriminator_reward(const Eigen::MatrixXd& raw) const;
  void compute_returns(const Rollout& ro, Eigen::VectorXd& returns, Eigen::VectorXd& adv) const;
  void ppo_update(const Rollout& ro, const Eigen::VectorXd& returns, const Eigen::VectorXd& adv, IterationStats& st);
  void awr_update(IterationStats& st);
  void disc_step(const Eigen::MatrixXd& fake_raw, IterationStats& st, int& count);
  void push_replay(const Rollout& ro, const Eigen::VectorXd& returns);
  void sync_normalizer(RunningNormalizer& norm, const Eigen::MatrixXd& batch);
  Eigen::VectorXd reduce(const Eigen::VectorXd& grad);

  AgentConfig config_;
  envs::VecEnv& env_;
  Communicator* comm_;
  int rank_;
  int num_envs_;
  PolicyModel model_;
  Adam policy_opt_, disc_opt_;
  RunningNormalizer obs_norm_, disc_norm_;
  Rng rng_;
  long iteration_ = 0;
  long samples_ = 0;
  std::vector<double> ep_return_;
  std::vector<int> ep_length_;
  ReplayBuffer replay_;
};

}  // namespace imitate::learning
