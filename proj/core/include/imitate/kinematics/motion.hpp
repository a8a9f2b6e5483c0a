#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "imitate/kinematics/pose.hpp"
#include "imitate/util/rng.hpp"

namespace imitate::kin {

enum class LoopMode { none, wrap };

/// Reference motion sampled at a fixed frame rate.
///
/// Each row of `frames` is [root position (3), root rotation exp map (3),
/// joint DoFs in depth-first joint order].
class MotionClip {
 public:
  MotionClip(double fps, LoopMode loop, std::string character, FrameLayout layout, Eigen::MatrixXd frames);

  double fps() const { return fps_; }
  LoopMode loop() const { return loop_; }
  const std::string& character() const { return character_; }
  const FrameLayout& layout() const { return layout_; }
  const Eigen::MatrixXd& frames() const { return frames_; }
  int num_frames() const { return static_cast<int>(frames_.rows()); }
  /// (num_frames - 1) / fps
  double duration() const { return (num_frames() - 1) / fps_; }

 private:
  double fps_;
  LoopMode loop_;
  std::string character_;
  FrameLayout layout_;
  Eigen::MatrixXd frames_;
};

struct PoseSample {
  Pose pose;
  PoseVelocity vel;
};

/// Pose and finite-difference velocity at time t (seconds).
///
/// Root position and revolute angles are interpolated linearly, rotations by
/// slerp. Velocities use central differences with h = 1 / (2 fps), one-sided
/// at the ends of non-looping clips. Looping clips wrap t and accumulate the
/// horizontal root displacement of one cycle per completed cycle.
PoseSample sample_pose(const MotionClip& clip, double t);

/// Pose only (no velocity). Same time semantics as sample_pose.
Pose sample_pose_only(const MotionClip& clip, double t);

/// Velocity that carries pose `a` to pose `b` over `dt` seconds.
PoseVelocity pose_difference_velocity(const FrameLayout& layout, const Pose& a, const Pose& b, double dt);

/// Reads a motion JSON document, validating it against `ch`.
MotionClip load_motion(const std::filesystem::path& path, const CharacterModel& ch);
MotionClip motion_from_json(const nlohmann::json& doc, const CharacterModel& ch);
void save_motion(const MotionClip& clip, const std::filesystem::path& path);
nlohmann::json motion_to_json(const MotionClip& clip);

/// One or more clips with sampling weights.
///
/// Loaded either from a single motion file or from a dataset file, a JSON array
/// of {"file", "weight"} entries whose paths are relative to the dataset file.
class MotionLibrary {
 public:
  MotionLibrary(std::vector<MotionClip> clips, std::vector<double> weights);

  static MotionLibrary load(const std::filesystem::path& path, const CharacterModel& ch);

  int size() const { return static_cast<int>(clips_.size()); }
  const MotionClip& clip(int i) const { return clips_.at(i); }
  double probability(int i) const { return probs_.at(i); }
  int sample_clip(Rng& rng) const;

 private:
  std::vector<MotionClip> clips_;
  std::vector<double> probs_;
};

}  // namespace imitate::kin
