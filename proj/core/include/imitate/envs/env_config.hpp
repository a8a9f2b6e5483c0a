#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imitate/engine/engine.hpp"
#include "imitate/envs/features.hpp"

namespace imitate::envs {

/// Episode outcome reported with every step. Precedence when several hold: FAIL > SUCC > TIME > NULL.
enum class DoneFlag : int { null = 0, fail = 1, succ = 2, time = 3 };

DoneFlag resolve_done(bool fail, bool succ, bool time);
const char* to_string(DoneFlag d);

/// swing_up: torque-limited pendulum raising its last body above the root.
enum class Task { deepmimic, amp, add, target_location, view_motion, swing_up };

const char* to_string(Task t);
Task task_from_string(const std::string& s);
/// Tasks that follow a reference clip in lockstep.
bool is_tracking(Task t);

struct EnvConfig {
  Task task = Task::deepmimic;
  std::filesystem::path character_file;
  /// Clip or dataset file; required by every task except swing_up and target_location.
  std::filesystem::path motion_file;
  double episode_length = 10.0;  // s
  bool pose_error_termination = true;
  double pose_error_threshold = 1.0;  // m
  /// Body names whose ground contact ends the episode; unset means every non-foot body.
  std::optional<std::vector<std::string>> contact_termination_bodies;
  /// Root height below which the episode fails; disabled when unset.
  std::optional<double> fall_height;
  /// Random reference-time initialization; unset means on for tracking tasks.
  std::optional<bool> rsi;
  /// Per-joint action scale (rad for pos/pd_1d, rad/s for vel).
  double action_scale = 1.0;
  /// Std-dev of joint noise added to the default pose on non-tracking resets.
  double reset_noise = 0.05;
  TrackingWeights tracking;
  double goal_radius = 0.3;     // m
  double goal_dwell = 0.5;      // s
  double goal_min_dist = 1.0;   // m
  double goal_max_dist = 4.0;   // m
  engine::EngineConfig engine;

  bool rsi_enabled() const { return rsi.value_or(is_tracking(task)); }

  /// Relative paths are resolved against `base` (the config file).
  static EnvConfig from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
  static EnvConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

}  // namespace imitate::envs
