#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "imitate/kinematics/quat.hpp"

namespace imitate::kin {

/// `free` and `fixed` describe the root; every other joint is spherical,
/// revolute or fixed.
enum class JointKind { free, fixed, revolute, spherical };

/// Number of frame entries (and actuated DoF) a non-root joint contributes.
int joint_dof_dim(JointKind kind);
const char* to_string(JointKind kind);
JointKind joint_kind_from_string(const std::string& s);

struct PdGains {
  double kp = 0.0;
  double kd = 0.0;
};

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::fixed;
  int parent = -1;
  Vec3 local_offset = Vec3::Zero();
  Vec3 axis = Vec3::UnitZ();
  double torque_limit = 0.0;
  PdGains pd_gains;
};

struct Geometry {
  enum class Type { none, sphere, capsule, box };
  Type type = Type::none;
  Vec3 from = Vec3::Zero();  // capsule endpoints (local)
  Vec3 to = Vec3::Zero();
  Vec3 center = Vec3::Zero();  // sphere and box
  Vec3 half_extents = Vec3::Zero();
  double radius = 0.0;
};

struct BodySpec {
  double mass = 1.0;
  Vec3 inertia = Vec3::Ones();  // principal moments about the COM, body frame
  Vec3 com = Vec3::Zero();
  Geometry geometry;
};

/// Axis along which "up" points for ground contact and horizontal projections.
enum class UpAxis { y, z };
Vec3 up_vector(UpAxis axis);

/// Per-joint slicing of a pose's DoF vector (frame layout after the 6 root entries).
struct FrameLayout {
  std::vector<JointKind> kinds;  // index = joint index; [0] is the root
  std::vector<int> offsets;      // DoF offset of each joint (root: -1)
  int dof_count = 0;
  UpAxis up = UpAxis::z;

  int frame_width() const { return 6 + dof_count; }
  int num_joints() const { return static_cast<int>(kinds.size()); }
};

/// Kinematic tree with body data and actuation limits.
///
/// Joints are listed in depth-first (preorder) order with joint 0 as the root.
/// Construction validates ordering and derives DoF offsets.
class CharacterModel {
 public:
  CharacterModel(std::string name, UpAxis up, std::vector<JointSpec> joints, std::vector<BodySpec> bodies,
                 std::vector<std::string> feet = {}, std::vector<std::string> end_effectors = {},
                 Vec3 default_root_pos = Vec3::Zero(), Quat default_root_rot = Quat::identity());

  static CharacterModel from_json(const nlohmann::json& doc);
  static CharacterModel load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::string& name() const { return name_; }
  UpAxis up_axis() const { return layout_.up; }
  Vec3 up() const { return up_vector(layout_.up); }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<BodySpec>& bodies() const { return bodies_; }
  const JointSpec& joint(int j) const { return joints_.at(j); }
  int num_joints() const { return static_cast<int>(joints_.size()); }
  int dof_count() const { return layout_.dof_count; }
  int frame_width() const { return layout_.frame_width(); }
  int dof_offset(int j) const { return layout_.offsets.at(j); }
  int dof_dim(int j) const { return j == 0 ? 0 : joint_dof_dim(joints_.at(j).kind); }
  const FrameLayout& layout() const { return layout_; }
  bool has_spherical() const;
  bool root_is_free() const { return joints_.front().kind == JointKind::free; }

  /// -1 when absent.
  int joint_index(const std::string& name) const;
  const std::vector<int>& feet() const { return feet_; }
  /// Explicit list, or leaf joints when none was given.
  const std::vector<int>& end_effectors() const { return end_effectors_; }
  const std::vector<int>& children(int j) const { return children_.at(j); }

  const Vec3& default_root_pos() const { return default_root_pos_; }
  const Quat& default_root_rot() const { return default_root_rot_; }

 private:
  std::string name_;
  std::vector<JointSpec> joints_;
  std::vector<BodySpec> bodies_;
  std::vector<int> feet_;
  std::vector<int> end_effectors_;
  std::vector<std::vector<int>> children_;
  FrameLayout layout_;
  Vec3 default_root_pos_;
  Quat default_root_rot_;
};

}  // namespace imitate::kin
