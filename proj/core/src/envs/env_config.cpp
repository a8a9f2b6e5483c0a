#include "imitate/envs/env_config.hpp"

#include <set>

#include "imitate/util/config_io.hpp"
#include "imitate/util/error.hpp"

namespace imitate::envs {

DoneFlag resolve_done(bool fail, bool succ, bool time) {
  if (fail) return DoneFlag::fail;
  if (succ) return DoneFlag::succ;
  if (time) return DoneFlag::time;
  return DoneFlag::null;
}

const char* to_string(DoneFlag d) {
  switch (d) {
    case DoneFlag::null:
      return "NULL";
    case DoneFlag::fail:
      return "FAIL";
    case DoneFlag::succ:
      return "SUCC";
    case DoneFlag::time:
      return "TIME";
  }
  return "?";
}

const char* to_string(Task t) {
  switch (t) {
    case Task::deepmimic:
      return "deepmimic";
    case Task::amp:
      return "amp";
    case Task::add:
      return "add";
    case Task::target_location:
      return "target_location";
    case Task::view_motion:
      return "view_motion";
    case Task::swing_up:
      return "swing_up";
  }
  return "?";
}

Task task_from_string(const std::string& s) {
  for (Task t : {Task::deepmimic, Task::amp, Task::add, Task::target_location, Task::view_motion, Task::swing_up}) {
    if (s == to_string(t)) return t;
  }
  throw ConfigError("unknown task '" + s + "' (deepmimic|amp|add|target_location|view_motion|swing_up)");
}

bool is_tracking(Task t) { return t == Task::deepmimic || t == Task::add || t == Task::view_motion; }

namespace {

const std::set<std::string> kKeys = {
    "task", "character_file", "motion_file", "episode_length", "pose_error_termination", "contact_termination_bodies",
    "fall_height", "rsi", "action_scale", "reset_noise", "reward_weights", "goal", "engine"};

TrackingWeights weights_from_json(const Json& j) {
  TrackingWeights w;
  w.w_pose = j.value("pose", w.w_pose);
  w.w_vel = j.value("vel", w.w_vel);
  w.w_ee = j.value("end_effector", w.w_ee);
  w.w_root = j.value("root", w.w_root);
  w.a_pose = j.value("pose_scale", w.a_pose);
  w.a_vel = j.value("vel_scale", w.a_vel);
  w.a_ee = j.value("end_effector_scale", w.a_ee);
  w.a_root = j.value("root_scale", w.a_root);
  if (w.w_pose < 0 || w.w_vel < 0 || w.w_ee < 0 || w.w_root < 0 || w.w_pose + w.w_vel + w.w_ee + w.w_root <= 0) {
    throw ConfigError("reward_weights must be non-negative with a positive sum");
  }
  return w;
}

}  // namespace

EnvConfig EnvConfig::from_json(const Json& j, const std::filesystem::path& base) {
  if (!j.is_object()) throw ConfigError("environment config must be a mapping");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.count(key)) throw ConfigError("unknown environment config key '" + key + "'");
  }
  EnvConfig c;
  try {
    c.task = task_from_string(j.at("task").get<std::string>());
    c.character_file = resolve_path(base, j.at("character_file").get<std::string>());
    if (j.contains("motion_file")) c.motion_file = resolve_path(base, j.at("motion_file").get<std::string>());
    c.episode_length = j.value("episode_length", c.episode_length);
    if (j.contains("pose_error_termination")) {
      const auto& p = j.at("pose_error_termination");
      c.pose_error_termination = p.value("enabled", c.pose_error_termination);
      c.pose_error_threshold = p.value("threshold", c.pose_error_threshold);
    }
    if (j.contains("contact_termination_bodies")) {
      c.contact_termination_bodies = j.at("contact_termination_bodies").get<std::vector<std::string>>();
    }
    if (j.contains("fall_height")) c.fall_height = j.at("fall_height").get<double>();
    if (j.contains("rsi")) c.rsi = j.at("rsi").get<bool>();
    c.action_scale = j.value("action_scale", c.action_scale);
    c.reset_noise = j.value("reset_noise", c.reset_noise);
    if (j.contains("reward_weights")) c.tracking = weights_from_json(j.at("reward_weights"));
    if (j.contains("goal")) {
      const auto& g = j.at("goal");
      c.goal_radius = g.value("radius", c.goal_radius);
      c.goal_dwell = g.value("dwell", c.goal_dwell);
      c.goal_min_dist = g.value("min_distance", c.goal_min_dist);
      c.goal_max_dist = g.value("max_distance", c.goal_max_dist);
    }
    if (j.contains("engine")) c.engine = engine::EngineConfig::from_json(j.at("engine"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("environment config: ") + e.what());
  }
  if (!(c.episode_length > 0.0)) throw ConfigError("episode_length must be positive");
  if (!(c.pose_error_threshold > 0.0)) throw ConfigError("pose_error_termination.threshold must be positive");
  if (!(c.action_scale > 0.0)) throw ConfigError("action_scale must be positive");
  if (c.reset_noise < 0.0) throw ConfigError("reset_noise must be non-negative");
  if (!(c.goal_min_dist >= 0.0 && c.goal_max_dist >= c.goal_min_dist)) throw ConfigError("invalid goal distances");
  const bool needs_motion = c.task != Task::swing_up && c.task != Task::target_location;
  if (needs_motion && c.motion_file.empty()) {
    throw ConfigError(std::string("task ") + to_string(c.task) + " requires motion_file");
  }
  return c;
}

EnvConfig EnvConfig::load(const std::filesystem::path& path) { return from_json(load_document(path), path); }

Json EnvConfig::to_json() const {
  Json j{{"task", to_string(task)},
         {"character_file", character_file.string()},
         {"episode_length", episode_length},
         {"pose_error_termination", {{"enabled", pose_error_termination}, {"threshold", pose_error_threshold}}},
         {"action_scale", action_scale},
         {"reset_noise", reset_noise},
         {"reward_weights",
          {{"pose", tracking.w_pose},
           {"vel", tracking.w_vel},
           {"end_effector", tracking.w_ee},
           {"root", tracking.w_root},
           {"pose_scale", tracking.a_pose},
           {"vel_scale", tracking.a_vel},
           {"end_effector_scale", tracking.a_ee},
           {"root_scale", tracking.a_root}}},
         {"goal",
          {{"radius", goal_radius}, {"dwell", goal_dwell}, {"min_distance", goal_min_dist},
           {"max_distance", goal_max_dist}}},
         {"engine", engine.to_json()}};
  if (!motion_file.empty()) j["motion_file"] = motion_file.string();
  if (contact_termination_bodies) j["contact_termination_bodies"] = *contact_termination_bodies;
  if (fall_height) j["fall_height"] = *fall_height;
  if (rsi) j["rsi"] = *rsi;
  return j;
}

}  // namespace imitate::envs
