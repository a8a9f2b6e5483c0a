#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "imitate/kinematics/character.hpp"
#include "imitate/kinematics/pose.hpp"

namespace imitate::engine {

using kin::Vec3;

enum class ControlMode { none, pos, vel, torque, pd_1d };
enum class Backend { kinematic, planar_dynamics };

const char* to_string(ControlMode m);
const char* to_string(Backend b);
ControlMode control_mode_from_string(const std::string& s);
Backend backend_from_string(const std::string& s);

/// Penalty ground contact: normal spring-damper and tangential damping capped by friction.
struct ContactParams {
  double normal_stiffness = 3e4;  // N/m
  double normal_damping = 300.0;  // N s/m
  double tangent_damping = 300.0;  // N s/m
  double friction = 1.0;
  double tolerance = 1e-3;  // m, for contact flags
};

struct EngineConfig {
  Backend backend = Backend::kinematic;
  ControlMode control_mode = ControlMode::pos;
  double control_freq = 30.0;
  double sim_freq = 600.0;
  /// Defaults to -9.81 along the character's up axis when unset.
  std::optional<Vec3> gravity;
  double ground_height = 0.0;
  ContactParams contact;
  /// Kinematic backend only: std-dev of Gaussian noise added to pose commands.
  double action_noise = 0.0;

  int substeps() const;
  double control_dt() const { return 1.0 / control_freq; }
  double sim_dt() const { return 1.0 / sim_freq; }
  Vec3 gravity_for(const kin::CharacterModel& ch) const;

  /// Throws ConfigError for unsupported combinations with this character.
  void validate(const kin::CharacterModel& ch) const;

  static EngineConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct SimState {
  kin::Pose pose;
  kin::PoseVelocity vel;
  std::vector<char> contacts;  // per body, touching ground
  bool failed = false;         // set when a non-finite command reached the engine

  friend bool operator==(const SimState&, const SimState&) = default;
};

/// Bit-exact JSON form of a state (doubles round-trip through 17 significant digits).
nlohmann::json state_to_json(const SimState& s);
SimState state_from_json(const nlohmann::json& j);

/// Revolute PD torque: kp (target - q) - kd qdot, clamped to +-limit.
double pd_torque(double q, double qdot, double target, const kin::PdGains& gains, double limit);

/// Spherical PD torque with error exp_map(q^-1 target), clamped per component.
Vec3 pd_torque(const kin::Quat& q, const Vec3& omega, const kin::Quat& target, const kin::PdGains& gains, double limit);

/// Unified stepping interface over a batch of environments.
///
/// Each instance owns the state of `num_envs` independent environments.
/// Stepping is deterministic given states, commands and the construction seed.
class Engine {
 public:
  Engine(std::shared_ptr<const kin::CharacterModel> character, EngineConfig config, int num_envs);
  virtual ~Engine() = default;

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Advances every env by one control period. `commands` is dof_count x num_envs.
  void step(const Eigen::Ref<const Eigen::MatrixXd>& commands);
  /// Advances only env i with the given command.
  void step_env(int i, const Eigen::Ref<const Eigen::VectorXd>& command);

  const SimState& get_state(int i) const;
  void set_state(int i, const SimState& s);

  /// Recomputes contact flags of `s` for this engine's ground and geometry.
  void update_contacts(SimState& s) const;
  SimState make_state(const kin::Pose& pose, const kin::PoseVelocity& vel) const;

  /// Backend-private state beyond the per-env SimStates (e.g. noise generators).
  virtual nlohmann::json backend_state() const { return nlohmann::json::object(); }
  virtual void set_backend_state(const nlohmann::json&) {}

  int num_envs() const { return static_cast<int>(states_.size()); }
  const kin::CharacterModel& character() const { return *character_; }
  const EngineConfig& config() const { return config_; }

 protected:
  /// Advance state by one control period with a validated, finite command.
  virtual void advance(int env, SimState& s, const Eigen::VectorXd& command) = 0;

  std::shared_ptr<const kin::CharacterModel> character_;
  EngineConfig config_;
  std::vector<SimState> states_;
};

std::unique_ptr<Engine> make_engine(std::shared_ptr<const kin::CharacterModel> character, const EngineConfig& config,
                                    int num_envs, std::uint64_t seed = 0);

}  // namespace imitate::engine
