#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "imitate/engine/engine.hpp"
#include "imitate/envs/env_config.hpp"
#include "imitate/kinematics/motion.hpp"
#include "imitate/util/rng.hpp"

namespace imitate::envs {

/// Batched step output. Matrices are column-per-env.
struct StepResult {
  Eigen::MatrixXd obs;
  Eigen::VectorXd reward;
  std::vector<DoneFlag> done;
  /// Auxiliary per-env data: "disc_obs" (amp, target_location with a motion),
  /// "add_delta" (add), "e_pos"/"e_vel" (tracking tasks), "task_reward". Failed envs get NaN columns.
  std::map<std::string, Eigen::MatrixXd> info;
};

/// A batch of environments sharing one character, task and engine.
///
/// Action -> command: pos/pd_1d actions are joint-target offsets (scaled by
/// action_scale) added to the upcoming reference pose for tracking tasks or to
/// the zero pose otherwise; vel actions are joint rates; torque actions are
/// fractions of each joint's torque limit.
///
/// After a step reports done != NULL the returned observation is the terminal
/// one; the env is reset by reset_done() or, failing that, at the start of the
/// next step().
class VecEnv {
 public:
  VecEnv(EnvConfig config, int num_envs, std::uint64_t seed);
  VecEnv(EnvConfig config, std::shared_ptr<const kin::CharacterModel> character,
         std::shared_ptr<const kin::MotionLibrary> motions, int num_envs, std::uint64_t seed);

  int num_envs() const { return engine_->num_envs(); }
  int obs_dim() const { return obs_dim_; }
  int action_dim() const { return character_->dof_count(); }
  const EnvConfig& config() const { return config_; }
  const kin::CharacterModel& character() const { return *character_; }
  std::shared_ptr<const kin::CharacterModel> character_ptr() const { return character_; }
  const kin::MotionLibrary* motions() const { return motions_.get(); }
  engine::Engine& engine() { return *engine_; }
  const engine::Engine& engine() const { return *engine_; }
  double control_dt() const { return config_.engine.control_dt(); }

  Eigen::MatrixXd reset();
  /// Resets the listed envs only; returns the full observation batch.
  Eigen::MatrixXd reset(const std::vector<int>& ids);
  /// Resets every env whose last step reported done != NULL.
  Eigen::MatrixXd reset_done();
  StepResult step(const Eigen::Ref<const Eigen::MatrixXd>& actions);
  const Eigen::MatrixXd& observations() const { return obs_; }

  /// Episode time and reference clip time of env i.
  double episode_time(int i) const { return slots_.at(i).time; }
  double reference_time(int i) const { return slots_.at(i).t0 + slots_.at(i).time; }
  int reference_clip(int i) const { return slots_.at(i).clip; }
  /// Reference sample at the env's current reference time (tracking tasks).
  kin::PoseSample reference_sample(int i) const;
  const Vec3& goal(int i) const { return slots_.at(i).goal; }
  /// Overrides the episode start: reference time t0 (tracking) or goal (target_location).
  void set_reference_start(int i, int clip, double t0);

  bool has_disc_obs() const { return disc_dim_ > 0; }
  int disc_obs_dim() const { return disc_dim_; }
  /// Transitions sampled from the motion library: disc_obs_dim x n.
  Eigen::MatrixXd sample_reference_disc_obs(int n, Rng& rng) const;
  int add_delta_dim() const;

  nlohmann::json save_state() const;
  void load_state(const nlohmann::json& j);

 private:
  struct Slot {
    int clip = 0;
    double t0 = 0.0;
    double time = 0.0;
    double dwell = 0.0;
    Vec3 goal = Vec3::Zero();
    bool needs_reset = true;
    kin::Pose prev_pose;
  };

  void init(int num_envs, std::uint64_t seed);
  void reset_env(int i);
  double time_limit(int i) const;
  kin::PoseSample reference_at(int i, double t) const;
  Eigen::VectorXd command_from_action(int i, const Eigen::VectorXd& a) const;
  void write_obs(int i);
  void sample_goal(int i);

  EnvConfig config_;
  std::shared_ptr<const kin::CharacterModel> character_;
  std::shared_ptr<const kin::MotionLibrary> motions_;
  std::unique_ptr<engine::Engine> engine_;
  std::vector<Slot> slots_;
  std::vector<char> terminate_on_contact_;
  Rng rng_;
  Eigen::MatrixXd obs_;
  int obs_dim_ = 0;
  int disc_dim_ = 0;
  double swing_length_ = 1.0;
};

}  // namespace imitate::envs
